//! Subsequences along which the rescaled Birkhoff sums are examined:
//! `r_n = q_1 + ... + q_n` and the greedy decorrelated subsequence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::birkhoff::{birkhoff_law, birkhoff_sum, sweep, BirkhoffConfig};
use crate::certified::{Bounds, Interval, DEFAULT_BITS};
use crate::contfrac::{Expansion, PartialQuotients};
use crate::error::{Error, Result};
use crate::exact::{self, serde_rational_vec};
use crate::stats::{char_gap, ks_distance_scaled, GaussianRef, ScaledLaw};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    RSequence,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Complete,
    /// The shadow horizon ran out before all requested blocks were found.
    Exhausted,
}

/// Stage `n` (1-based) examines `y_{indices[n-1]} / sqrt(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsequencePlan {
    pub kind: PlanKind,
    pub indices: Vec<u64>,
    pub block_lengths: Vec<u64>,
    /// Convergent index of each block.
    pub block_orders: Vec<usize>,
    /// Measured decorrelation constants (greedy only), `deltas[k-1]` certifies block `k+1`.
    #[serde(with = "serde_rational_vec")]
    pub deltas: Vec<BigRational>,
    pub sigma: Vec<Bounds>,
    pub status: PlanStatus,
}

impl SubsequencePlan {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Index of stage `n` (1-based).
    pub fn index(&self, n: usize) -> Result<u64> {
        if n == 0 || n > self.indices.len() {
            return Err(Error::InvalidArgument(format!("stage {n} outside 1..={}", self.indices.len())));
        }
        Ok(self.indices[n - 1])
    }

    pub fn attach_sigma(&mut self, sigma: &[Interval]) {
        self.sigma = sigma.iter().map(Bounds::from).collect();
    }
}

/// `r_n = q_1 + ... + q_n` for `n = 1..=N`.
pub fn r_sequence(alpha: &PartialQuotients, n: usize) -> Result<SubsequencePlan> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let exp = Expansion::new(alpha, n)?;
    let mut indices = Vec::with_capacity(n);
    let mut lengths = Vec::with_capacity(n);
    let mut r: u64 = 0;
    for c in &exp.convergents[1..=n] {
        let q = c
            .q_u64()
            .ok_or_else(|| Error::GridOverflow(format!("q_{} exceeds u64", c.index)))?;
        r = r
            .checked_add(q)
            .ok_or_else(|| Error::GridOverflow(format!("r_{} exceeds u64", c.index)))?;
        indices.push(r);
        lengths.push(q);
    }
    Ok(SubsequencePlan {
        kind: PlanKind::RSequence,
        indices,
        block_lengths: lengths,
        block_orders: (1..=n).collect(),
        deltas: Vec::new(),
        sigma: Vec::new(),
        status: PlanStatus::Complete,
    })
}

/// Exact law of `y_{indices[n-1]} / sqrt(n)`.
pub fn rescaled_law(cfg: &BirkhoffConfig, plan: &SubsequencePlan, n: usize) -> Result<ScaledLaw> {
    let idx = plan.index(n)?;
    let law = birkhoff_law(cfg, idx, 0)?.law;
    ScaledLaw::new(law, n as u64)
}

/// Laws for every stage of the plan.
pub fn stage_laws(cfg: &BirkhoffConfig, plan: &SubsequencePlan) -> Result<Vec<ScaledLaw>> {
    cfg.ensure(plan.indices.iter().copied().max().unwrap_or(0))?;
    (1..=plan.len()).into_par_iter().map(|n| rescaled_law(cfg, plan, n)).collect()
}

/// `sigma_n = ||y_{indices[n-1]} / sqrt(n)||_2`.
pub fn sigma_sequence(cfg: &BirkhoffConfig, plan: &SubsequencePlan) -> Result<Vec<Interval>> {
    stage_laws(cfg, plan)?.iter().map(sigma_of).collect()
}

pub fn sigma_of(law: &ScaledLaw) -> Result<Interval> {
    Interval::from_rational(&law.even_moment(2), DEFAULT_BITS).sqrt()
}

/// Per-stage statistics of a plan.
#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub n: usize,
    pub index: u64,
    pub sigma: Bounds,
    /// Kolmogorov distance to `g(sigma_n)`.
    pub ks: Bounds,
    #[serde(with = "exact::serde_rational")]
    pub m2: BigRational,
    #[serde(with = "exact::serde_rational")]
    pub m4: BigRational,
    /// `|phi_n(lambda) - exp(-lambda^2 sigma_n^2 / 2)|`.
    pub char_gap: Bounds,
    pub atoms: usize,
}

pub fn stage_record(plan: &SubsequencePlan, n: usize, law: &ScaledLaw, lambda: &BigRational) -> Result<StageRecord> {
    let sigma = sigma_of(law)?;
    let ks = if sigma.is_positive() {
        Bounds::from(&ks_distance_scaled(law, &GaussianRef::new(sigma.clone())?))
    } else {
        // degenerate law at 0 against a degenerate Gaussian
        Bounds { lo: 0.0, hi: 0.0 }
    };
    Ok(StageRecord {
        n,
        index: plan.index(n)?,
        sigma: Bounds::from(&sigma),
        ks,
        m2: law.even_moment(2),
        m4: law.even_moment(4),
        char_gap: Bounds::from(&char_gap(law, lambda, &sigma)),
        atoms: law.law.len(),
    })
}

/// `2^{-k}` for `k = 1..=len`.
pub fn default_schedule(len: usize) -> Vec<BigRational> {
    (1..=len)
        .map(|k| BigRational::new(BigInt::one(), BigInt::one() << k))
        .collect()
}

/// Odd `q_i` with `beta_i < 1/2`, deepening the expansion until decided.
fn eligible(alpha: &PartialQuotients, exp: &mut Expansion, i: usize) -> Result<bool> {
    if !exp.convergents[i].q_is_odd() {
        return Ok(false);
    }
    let mut order = (i + 3).max(exp.depth());
    loop {
        if order > exp.depth() {
            *exp = Expansion::new(alpha, order)?;
        }
        match exp.quality(i, order) {
            Ok(q) => return Ok(q.below_half),
            Err(Error::InsufficientPrecision { .. }) if order < i + 64 => order += 2,
            Err(e) => return Err(e),
        }
    }
}

/// Integrals of `R_{offset gamma} y_q` over the constancy intervals of `s`,
/// in units of `1 / (G * scale)`. The interval wrapping through 0 counts once.
fn block_integrals(cfg: &BirkhoffConfig, q: u64, offset: u64, cuts: &[u64]) -> Result<Vec<i128>> {
    let mut at_cut = Vec::with_capacity(cuts.len());
    let mut next = 0usize;
    let mut acc: i128 = 0;
    sweep(cfg, q, offset, |s, e, v| {
        while next < cuts.len() && cuts[next] < e {
            at_cut.push(acc + v as i128 * (cuts[next] - s) as i128);
            next += 1;
        }
        acc += v as i128 * (e - s) as i128;
    })?;
    debug_assert_eq!(at_cut.len(), cuts.len());
    let m = cuts.len();
    if m <= 1 {
        return Ok(vec![acc]);
    }
    let mut out: Vec<i128> = at_cut.windows(2).map(|w| w[1] - w[0]).collect();
    out.push(acc - at_cut[m - 1] + at_cut[0]);
    Ok(out)
}

/// Greedy selection of `J` convergent blocks `q~_1 < ... < q~_J`, each odd with
/// `beta < 1/2`, such that block `k+1` integrates to at most `delta_k / m(k)`
/// over every constancy interval of `S_k = f_1 + ... + f_k`, where `m(k)`
/// counts those intervals. Returns a partial plan marked `Exhausted` if the
/// horizon runs out first.
pub fn greedy_subsequence(cfg: &BirkhoffConfig, j: usize, schedule: &[BigRational]) -> Result<SubsequencePlan> {
    if j == 0 {
        return Err(Error::InvalidArgument("J must be >= 1".into()));
    }
    if schedule.len() + 1 < j {
        return Err(Error::InvalidArgument(format!("schedule has {} entries, need {}", schedule.len(), j - 1)));
    }
    if schedule.iter().any(|d| !d.is_positive()) {
        return Err(Error::InvalidArgument("schedule entries must be positive".into()));
    }
    let alpha = cfg.alpha();
    let horizon = cfg.horizon();
    let norm = BigInt::from(cfg.grid()) * BigInt::from(cfg.scale());
    let mut exp = Expansion::new(alpha, 16)?;
    let mut plan = SubsequencePlan {
        kind: PlanKind::Greedy,
        indices: Vec::new(),
        block_lengths: Vec::new(),
        block_orders: Vec::new(),
        deltas: Vec::new(),
        sigma: Vec::new(),
        status: PlanStatus::Complete,
    };
    let mut n_k: u64 = 0;
    let mut i = 1usize;
    // breakpoints of the current S_k
    let mut cuts: Vec<u64> = Vec::new();
    'blocks: while plan.len() < j {
        loop {
            if i + 3 > exp.depth() {
                exp = Expansion::new(alpha, 2 * exp.depth())?;
            }
            let q = match exp.convergents[i].q_u64() {
                Some(q) if q <= horizon - n_k => q,
                _ => {
                    plan.status = PlanStatus::Exhausted;
                    break 'blocks;
                }
            };
            let last = plan.block_lengths.last().copied().unwrap_or(0);
            if q > last && eligible(alpha, &mut exp, i)? {
                if plan.is_empty() {
                    break;
                }
                let k = plan.len();
                let ints = block_integrals(cfg, q, n_k, &cuts)?;
                let worst = ints.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
                let measured = BigRational::new(BigInt::from(worst) * BigInt::from(ints.len()), norm.clone());
                if measured <= schedule[k - 1] {
                    plan.deltas.push(measured);
                    break;
                }
            }
            i += 1;
        }
        let q = exp.convergents[i].q_u64().expect("checked");
        n_k += q;
        plan.indices.push(n_k);
        plan.block_lengths.push(q);
        plan.block_orders.push(i);
        i += 1;
        if plan.len() < j {
            cuts = birkhoff_sum(cfg, n_k)?.on_grid(cfg.grid())?;
        }
    }
    Ok(plan)
}

/// `sup |y_n|` for `n` in the plan, streamed.
pub fn stage_sup_norms(cfg: &BirkhoffConfig, plan: &SubsequencePlan) -> Result<Vec<BigRational>> {
    plan.indices
        .par_iter()
        .map(|&idx| Ok(birkhoff_law(cfg, idx, 0)?.law.support_max_abs()))
        .collect()
}
