//! Birkhoff sums `y_n(x) = sum_{k<n} psi(x + k alpha)` of a step function.
//!
//! All sums are computed for the rotation by the shadow rational `P/Q` of the
//! configuration, on the common grid `G = lcm(grid(psi), Q)`. Every iterate
//! `x + k P/Q` of a grid cell stays inside a grid cell, so the sums are exact
//! at every rational point.

mod fourier;
mod sweep;

pub use fourier::{fourier_psi, fourier_y, l2_via_parseval, FourierRecord, ParsevalBound};
pub use sweep::{birkhoff_law, birkhoff_sum_sweep, sweep, LawSummary, ValueCounter};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::contfrac::{PartialQuotients, ShadowRational};
use crate::error::{Error, Result};
use crate::exact;
use crate::stepfun::{merge_raw, rotate_raw, value_at_raw, StepFunction};

/// `+1` on `[0, 1/2)` and `-1` on `[1/2, 1)`.
pub fn psi_star() -> StepFunction {
    StepFunction::from_grid(2, vec![0, 1], vec![1, -1], 1).expect("valid")
}

/// Observable, rotation number and certified shadow rotation.
#[derive(Clone, Debug)]
pub struct BirkhoffConfig {
    psi: StepFunction,
    alpha: PartialQuotients,
    shadow: ShadowRational,
    // psi on the common grid
    breaks: Vec<u64>,
    jumps: Vec<i64>,
}

impl BirkhoffConfig {
    /// Requires `psi` to have mean zero; certifies a shadow for `horizon` iterates.
    pub fn new(psi: StepFunction, alpha: PartialQuotients, horizon: u64) -> Result<Self> {
        let mean = psi.integral();
        if !mean.is_zero() {
            return Err(Error::Hypothesis(format!("psi must have mean 0, has mean {mean}")));
        }
        let shadow = ShadowRational::certify(&alpha, &psi, horizon)?;
        let breaks = psi.on_grid(shadow.grid)?;
        let jumps = psi.jumps();
        Ok(BirkhoffConfig { psi, alpha, shadow, breaks, jumps })
    }

    pub fn psi_star(alpha: PartialQuotients, horizon: u64) -> Result<Self> {
        Self::new(psi_star(), alpha, horizon)
    }

    pub fn psi(&self) -> &StepFunction {
        &self.psi
    }

    pub fn alpha(&self) -> &PartialQuotients {
        &self.alpha
    }

    pub fn shadow(&self) -> &ShadowRational {
        &self.shadow
    }

    pub fn horizon(&self) -> u64 {
        self.shadow.horizon
    }

    pub fn grid(&self) -> u64 {
        self.shadow.grid
    }

    /// Shadow rotation `P/Q` as a step on the grid.
    pub fn step(&self) -> u64 {
        self.shadow.step()
    }

    /// Value denominator of psi (and of every `y_n`).
    pub fn scale(&self) -> i64 {
        self.psi.scale()
    }

    pub(crate) fn psi_breaks(&self) -> &[u64] {
        &self.breaks
    }

    pub(crate) fn psi_values(&self) -> &[i64] {
        self.psi.raw_values()
    }

    pub(crate) fn psi_jumps(&self) -> &[i64] {
        &self.jumps
    }

    /// `m P/Q` reduced onto the grid.
    pub fn shift_of(&self, m: u64) -> u64 {
        ((m as u128 * self.step() as u128) % self.grid() as u128) as u64
    }

    /// `|m P/Q|_T`, exact.
    pub fn circle_norm_of(&self, m: u64) -> BigRational {
        let s = self.shift_of(m);
        let g = self.grid();
        exact::ratio_u(s.min(g - s) as u128, g as u128)
    }

    pub fn ensure(&self, n: u64) -> Result<()> {
        self.shadow.check(n)
    }
}

/// `y_n` as an exact step function, built by doubling:
/// `y_{2m} = y_m + R_{m alpha} y_m` and `y_{m+1} = y_m + R_{m alpha} psi`.
pub fn birkhoff_sum(cfg: &BirkhoffConfig, n: u64) -> Result<StepFunction> {
    cfg.ensure(n)?;
    let (b, v) = sum_raw(cfg, n)?;
    Ok(StepFunction::from_raw(cfg.grid(), cfg.scale(), b, v))
}

pub(crate) fn sum_raw(cfg: &BirkhoffConfig, n: u64) -> Result<(Vec<u64>, Vec<i64>)> {
    if n == 0 {
        return Ok((vec![0], vec![0]));
    }
    let grid = cfg.grid();
    let (pb, pv) = (cfg.psi_breaks(), cfg.psi_values());
    let mut y = (pb.to_vec(), pv.to_vec());
    let mut m: u64 = 1;
    let add = |a: i64, b: i64| a.checked_add(b);
    for bit in (0..(63 - n.leading_zeros())).rev() {
        let (rb, rv) = rotate_raw(&y.0, &y.1, cfg.shift_of(m), grid);
        y = merge_raw(&y.0, &y.1, &rb, &rv, add)?;
        m *= 2;
        if (n >> bit) & 1 == 1 {
            let (rb, rv) = rotate_raw(pb, pv, cfg.shift_of(m), grid);
            y = merge_raw(&y.0, &y.1, &rb, &rv, add)?;
            m += 1;
        }
    }
    debug_assert_eq!(m, n);
    Ok(y)
}

/// `y_n(x)` by direct summation in `O(n)` time and `O(1)` memory.
pub fn birkhoff_value(cfg: &BirkhoffConfig, x: &BigRational, n: u64) -> Result<BigRational> {
    cfg.ensure(n)?;
    let grid = cfg.grid();
    // x sits in the grid cell [j, j+1) / G and so does every iterate shifted by k P/Q
    let j = (exact::frac(x) * num_bigint::BigInt::from(grid))
        .floor()
        .to_integer()
        .to_u64()
        .expect("cell index below grid");
    let total = direct_sum(cfg, j, n);
    Ok(BigRational::new(total.into(), cfg.scale().into()))
}

/// `sum_{k<n} psi(pos + k step)` with positions on the grid.
pub(crate) fn direct_sum(cfg: &BirkhoffConfig, start: u64, n: u64) -> i128 {
    let (grid, step) = (cfg.grid(), cfg.step());
    let (pb, pv) = (cfg.psi_breaks(), cfg.psi_values());
    let mut pos = start;
    let mut total: i128 = 0;
    if pb.len() == 2 {
        // two plateaus: a comparison per iterate
        let (b0, b1) = (pb[0], pb[1]);
        let (v0, v1) = (pv[0] as i128, pv[1] as i128);
        for _ in 0..n {
            total += if pos >= b0 && pos < b1 { v0 } else { v1 };
            pos += step;
            if pos >= grid {
                pos -= grid;
            }
        }
    } else {
        for _ in 0..n {
            total += value_at_raw(pb, pv, pos) as i128;
            pos += step;
            if pos >= grid {
                pos -= grid;
            }
        }
    }
    total
}
