//! Streaming construction of `y_n` in increasing breakpoint order.
//!
//! The breakpoints of `R_{o gamma} y_n` are `b_i - (o + k) gamma` for the
//! breakpoints `b_i` of psi and `k < n`. For one `i` these form a shifted copy
//! of `{k h mod G : k < n}` with `h = -gamma`, whose sorted order follows the
//! three-gap successor rule: with `a` and `b` the indices of the smallest and
//! largest of `k h mod G` over `1 <= k < n`, the successor of `k` is `k + a`
//! if `k + a < n`, else `k - b` if `k >= b`, else `k + a - b`. Walking each
//! stream from its minimum and merging the streams yields the pieces of
//! `y_n` in order using `O(n)` time and `O(#breakpoints)` memory.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::stepfun::{StepFunction, ValueDistribution};

use super::{direct_sum, BirkhoffConfig};

/// Calls `emit(start, end, value)` for the pieces of `R_{offset gamma} y_n`,
/// in increasing order, covering `[0, G)`. Values are numerators over
/// `cfg.scale()`; adjacent pieces have distinct values except possibly across 0.
pub fn sweep(cfg: &BirkhoffConfig, n: u64, offset: u64, mut emit: impl FnMut(u64, u64, i64)) -> Result<()> {
    cfg.ensure(offset.saturating_add(n))?;
    let grid = cfg.grid();
    if n == 0 {
        emit(0, grid, 0);
        return Ok(());
    }
    let h = (grid - cfg.step()) % grid;
    let base = cfg.shift_of(offset);
    let jumps = cfg.psi_jumps();
    let m = jumps.len();
    let starts: Vec<u64> = cfg.psi_breaks().iter().map(|&b| (b + grid - base) % grid).collect();

    let mut pos = starts.clone();
    let mut idx = vec![0u64; m];
    let (mut a, mut da, mut b, mut db) = (0u64, u64::MAX, 0u64, 0u64);
    let mut kh: u64 = 0;
    for k in 0..n {
        if k > 0 {
            if kh < da {
                da = kh;
                a = k;
            }
            if kh > db {
                db = kh;
                b = k;
            }
        }
        for i in 0..m {
            let mut p = starts[i] + kh;
            if p >= grid {
                p -= grid;
            }
            if p < pos[i] {
                pos[i] = p;
                idx[i] = k;
            }
        }
        kh += h;
        if kh >= grid {
            kh -= grid;
        }
    }
    let up_a = da;
    let down_b = grid - db;

    let mut cur = direct_sum(cfg, base, n) as i64;
    let mut remaining = vec![n; m];
    let mut piece_start = 0u64;
    loop {
        let mut p = u64::MAX;
        for i in 0..m {
            if remaining[i] > 0 && pos[i] < p {
                p = pos[i];
            }
        }
        if p == u64::MAX {
            break;
        }
        let mut jump = 0i64;
        for i in 0..m {
            if remaining[i] > 0 && pos[i] == p {
                jump += jumps[i];
                remaining[i] -= 1;
                if remaining[i] > 0 {
                    let k = idx[i];
                    if k + a < n {
                        idx[i] = k + a;
                        pos[i] += up_a;
                    } else if k >= b {
                        idx[i] = k - b;
                        pos[i] += down_b;
                    } else {
                        idx[i] = k + a - b;
                        pos[i] += up_a + down_b;
                    }
                }
            }
        }
        // jumps at 0 are already part of the value at 0
        if p == 0 || jump == 0 {
            continue;
        }
        if p > piece_start {
            emit(piece_start, p, cur);
        }
        cur += jump;
        piece_start = p;
    }
    emit(piece_start, grid, cur);
    Ok(())
}

/// Total length carried by each value numerator.
#[derive(Clone, Debug, Default)]
pub struct ValueCounter {
    min: i64,
    counts: Vec<u128>,
}

impl ValueCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: i64, len: u64) {
        if self.counts.is_empty() {
            self.min = v;
            self.counts.push(0);
        }
        if v < self.min {
            let grow = (self.min - v) as usize;
            let mut c = vec![0u128; grow];
            c.extend_from_slice(&self.counts);
            self.counts = c;
            self.min = v;
        }
        let i = (v - self.min) as usize;
        if i >= self.counts.len() {
            self.counts.resize(i + 1, 0);
        }
        self.counts[i] += len as u128;
    }

    pub fn into_distribution(self, scale: i64, total: u128) -> ValueDistribution {
        let map: BTreeMap<i64, u128> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (self.min + i as i64, c))
            .collect();
        ValueDistribution::from_counts(&map, scale, total)
    }
}

/// Summary of one streamed sum: its law and piece count.
#[derive(Clone, Debug)]
pub struct LawSummary {
    pub law: ValueDistribution,
    pub pieces: u64,
}

/// Exact law of `R_{offset gamma} y_n` under Lebesgue measure, streamed.
pub fn birkhoff_law(cfg: &BirkhoffConfig, n: u64, offset: u64) -> Result<LawSummary> {
    let mut counter = ValueCounter::new();
    let mut pieces = 0u64;
    sweep(cfg, n, offset, |s, e, v| {
        counter.add(v, e - s);
        pieces += 1;
    })?;
    Ok(LawSummary {
        law: counter.into_distribution(cfg.scale(), cfg.grid() as u128),
        pieces,
    })
}

/// `R_{offset gamma} y_n` materialized from the stream.
pub fn birkhoff_sum_sweep(cfg: &BirkhoffConfig, n: u64, offset: u64) -> Result<StepFunction> {
    let mut breaks = Vec::new();
    let mut values = Vec::new();
    sweep(cfg, n, offset, |s, _, v| {
        breaks.push(s);
        values.push(v);
    })?;
    Ok(StepFunction::from_raw(cfg.grid(), cfg.scale(), breaks, values))
}
