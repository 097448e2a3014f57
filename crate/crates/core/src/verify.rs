//! Checkers for the inequalities behind the construction. Hard checks are
//! exact or certified and pass with zero tolerance; measured constants are
//! judged by a trend rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::birkhoff::{
    birkhoff_law, birkhoff_sum_sweep, fourier_psi, fourier_y, psi_star, BirkhoffConfig,
};
use crate::certified::{pi, Bounds, Interval, DEFAULT_BITS};
use crate::contfrac::{circle_norm_interval, Expansion, PartialQuotients};
use crate::error::{Error, Result};
use crate::exact;
use crate::limits::{r_sequence, sigma_sequence, SubsequencePlan};
use crate::stepfun::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Exact or certified inequality, no tolerance.
    Hard,
    /// Measured sequence judged by a [`TrendRule`].
    Trend,
}

/// One checked instance.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub params: Value,
    pub measured: Bounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<Bounds>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub lemma_id: String,
    pub kind: CheckKind,
    pub params: Value,
    pub instances_checked: u64,
    pub skipped: u64,
    pub pass: bool,
    /// Largest measured quantity divided by its bound.
    pub worst_ratio: Bounds,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<VerificationReport>,
}

impl VerificationReport {
    fn new(lemma_id: &str, kind: CheckKind, params: Value) -> Self {
        VerificationReport {
            lemma_id: lemma_id.to_string(),
            kind,
            params,
            instances_checked: 0,
            skipped: 0,
            pass: true,
            worst_ratio: Bounds { lo: 0.0, hi: 0.0 },
            witnesses: Vec::new(),
            parts: Vec::new(),
        }
    }

    fn record(&mut self, w: Witness, ratio: Option<Bounds>) {
        self.instances_checked += 1;
        self.pass &= w.ok;
        if let Some(r) = ratio {
            if r.hi > self.worst_ratio.hi {
                self.worst_ratio = r;
            }
        }
        self.witnesses.push(w);
    }

    fn with_parts(lemma_id: &str, params: Value, parts: Vec<VerificationReport>) -> Self {
        let kind = if parts.iter().any(|p| p.kind == CheckKind::Hard) { CheckKind::Hard } else { CheckKind::Trend };
        let mut r = VerificationReport::new(lemma_id, kind, params);
        r.instances_checked = parts.iter().map(|p| p.instances_checked).sum();
        r.skipped = parts.iter().map(|p| p.skipped).sum();
        r.pass = parts.iter().all(|p| p.pass);
        r.worst_ratio = parts
            .iter()
            .map(|p| p.worst_ratio)
            .fold(Bounds { lo: 0.0, hi: 0.0 }, |a, b| if b.hi > a.hi { b } else { a });
        r.parts = parts;
        r
    }

    /// Any failed hard check in this report or its parts.
    pub fn hard_failure(&self) -> bool {
        (self.kind == CheckKind::Hard && !self.pass && self.parts.is_empty())
            || self.parts.iter().any(|p| p.hard_failure())
    }
}

/// Operational reading of "decreasing" and "non-exploding" for finite sequences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrendRule {
    /// Allowed growth of the second-half envelope over the first-half envelope.
    pub factor: f64,
}

impl Default for TrendRule {
    fn default() -> Self {
        TrendRule { factor: 2.0 }
    }
}

impl TrendRule {
    /// Envelope over the second half at most `factor` times the envelope over the first half.
    pub fn stable(&self, seq: &[f64]) -> bool {
        if seq.len() < 2 {
            return true;
        }
        let max = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first = max(&seq[..seq.len().div_ceil(2)]);
        let second = max(&seq[seq.len() / 2..]);
        second <= self.factor * first
    }

    /// `stable` and the last value does not exceed the first.
    pub fn decreasing(&self, seq: &[f64]) -> bool {
        match (seq.first(), seq.last()) {
            (Some(a), Some(b)) => b <= a && self.stable(seq),
            _ => true,
        }
    }
}

fn rational_bounds(r: &BigRational) -> Bounds {
    Bounds::from(&Interval::from_rational(r, DEFAULT_BITS))
}

/// Enclosure of `beta_i`, deepening the expansion as needed.
fn beta_of(alpha: &PartialQuotients, exp: &mut Expansion, i: usize) -> Result<crate::RationalInterval> {
    let order = (i + 8).max(exp.depth());
    if order > exp.depth() {
        *exp = Expansion::new(alpha, order)?;
    }
    exp.beta(i, order)
}

/// Strict `beta_i < 1/2`, deepening until decided.
fn below_half(alpha: &PartialQuotients, exp: &mut Expansion, i: usize) -> Result<bool> {
    let mut order = (i + 8).max(exp.depth());
    loop {
        if order > exp.depth() {
            *exp = Expansion::new(alpha, order)?;
        }
        match exp.quality(i, order) {
            Ok(q) => return Ok(q.below_half),
            Err(Error::InsufficientPrecision { .. }) if order < i + 128 => order += 4,
            Err(e) => return Err(e),
        }
    }
}

/// Largest convergent index whose denominator is at most `q_max`.
pub fn max_index_with_q_at_most(alpha: &PartialQuotients, q_max: u64) -> Result<usize> {
    let mut depth = 16;
    loop {
        let exp = Expansion::new(alpha, depth)?;
        if let Some(i) = exp.convergents.iter().position(|c| c.q > BigInt::from(q_max)) {
            return Ok(i.saturating_sub(1));
        }
        depth *= 2;
    }
}

fn q_at(exp: &Expansion, i: usize, horizon: u64) -> Result<u64> {
    exp.convergents[i]
        .q_u64()
        .filter(|&q| q <= horizon)
        .ok_or_else(|| Error::HorizonExceeded {
            required: exp.convergents[i].q.to_u64().unwrap_or(u64::MAX),
            horizon,
        })
}

/// `||y_{q_n}||_inf <= Var(psi)` for convergents `1 <= n <= max_index`.
pub fn check_denjoy_koksma(cfg: &BirkhoffConfig, max_index: usize) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("denjoy_koksma", CheckKind::Hard, json!({ "max_index": max_index }));
    let var = cfg.psi().variation();
    let alpha = cfg.alpha();
    let mut exp = Expansion::new(alpha, max_index + 8)?;
    let mut jobs = Vec::new();
    for i in 1..=max_index {
        let q = q_at(&exp, i, cfg.horizon())?;
        if beta_of(alpha, &mut exp, i)?.hi > BigRational::one() {
            rep.skipped += 1;
            continue;
        }
        jobs.push((i, q));
    }
    let sups: Vec<Result<BigRational>> = jobs
        .par_iter()
        .map(|&(_, q)| Ok(birkhoff_law(cfg, q, 0)?.law.support_max_abs()))
        .collect();
    for (&(i, q), sup) in jobs.iter().zip(sups) {
        let sup = sup?;
        let ratio = if var.is_zero() { BigRational::zero() } else { &sup / &var };
        rep.record(
            Witness {
                params: json!({ "n": i, "q": q }),
                measured: rational_bounds(&sup),
                bound: Some(rational_bounds(&var)),
                ok: sup <= var,
            },
            Some(rational_bounds(&ratio)),
        );
    }
    Ok(rep)
}

/// Cell-by-cell structure of `y_q` for `psi*`, odd `q` and `beta < 1/2`: on
/// `[j/q, (j+1)/q)` with midpoint `w` it is `+1, -1, +1` with the sign change
/// in `(j/q, w]` and the optional return in `(w, (j+1)/q)` when `alpha > p/q`,
/// and `-1, +1, -1` with the optional first change in `(j/q, w)` and the
/// second in `[w, (j+1)/q)` when `alpha < p/q`.
pub fn refined_shape(y: &StepFunction, q: u64, alpha_above: bool) -> std::result::Result<(), String> {
    if y.scale() != 1 {
        return Err(format!("values not integer (scale {})", y.scale()));
    }
    let g = y.grid() as u128;
    let qq = q as u128;
    let br = y.breaks();
    let vals = y.raw_values();
    let nb = br.len();
    let mut p = 0usize;
    let mut cur = vals[nb - 1];
    for j in 0..qq {
        while p < nb && br[p] as u128 * qq <= j * g {
            cur = vals[p];
            p += 1;
        }
        let v0 = cur;
        // (jump, position relative to the midpoint)
        let mut inner = Vec::new();
        while p < nb && (br[p] as u128) * qq < (j + 1) * g {
            let side = (2 * br[p] as u128 * qq).cmp(&((2 * j + 1) * g));
            inner.push((vals[p] - cur, side));
            cur = vals[p];
            p += 1;
        }
        use std::cmp::Ordering::*;
        let ok = if alpha_above {
            v0 == 1
                && match inner.as_slice() {
                    [(-2, s)] => *s != Greater,
                    [(-2, s), (2, t)] => *s != Greater && *t == Greater,
                    _ => false,
                }
        } else {
            match (v0, inner.as_slice()) {
                (-1, [(2, s), (-2, t)]) => *s == Less && *t != Less,
                (1, [(-2, t)]) => *t != Less,
                _ => false,
            }
        };
        if !ok {
            return Err(format!("cell {j}: start value {v0}, inner jumps {inner:?}"));
        }
    }
    Ok(())
}

/// `||y_q||_inf <= 1`, `y_q` takes only the values `+-1`, and the cell
/// structure holds, for every odd `q_n` with `beta_n < 1/2`, `1 <= n <= max_index`.
pub fn check_refined_dk(cfg: &BirkhoffConfig, max_index: usize) -> Result<VerificationReport> {
    if cfg.psi() != &psi_star() {
        return Err(Error::Hypothesis("refined Denjoy-Koksma check needs psi = psi*".into()));
    }
    let mut rep = VerificationReport::new("refined_denjoy_koksma", CheckKind::Hard, json!({ "max_index": max_index }));
    let alpha = cfg.alpha();
    let mut exp = Expansion::new(alpha, max_index + 8)?;
    let mut jobs = Vec::new();
    for i in 1..=max_index {
        let q = q_at(&exp, i, cfg.horizon())?;
        if q % 2 == 0 || !below_half(alpha, &mut exp, i)? {
            rep.skipped += 1;
            continue;
        }
        jobs.push((i, q));
    }
    // (sup norm, +-1 valued, cell structure)
    type Outcome = (BigRational, bool, std::result::Result<(), String>);
    let results: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|&(i, q)| {
            let y = birkhoff_sum_sweep(cfg, q, 0)?;
            let sup = y.sup_norm();
            let pm_one = y.raw_values().iter().all(|v| v.abs() == 1) && y.scale() == 1;
            // p_n / q_n < alpha exactly for even n
            Ok((sup, pm_one, refined_shape(&y, q, i % 2 == 0)))
        })
        .collect();
    for (&(i, q), r) in jobs.iter().zip(results) {
        let (sup, pm_one, shape) = r?;
        let ok = sup <= BigRational::one() && pm_one && shape.is_ok();
        let mut params = json!({ "n": i, "q": q, "pm_one": pm_one });
        if let Err(e) = &shape {
            params["shape_error"] = json!(e);
        }
        rep.record(
            Witness { params, measured: rational_bounds(&sup), bound: Some(rational_bounds(&BigRational::one())), ok },
            Some(rational_bounds(&sup)),
        );
    }
    Ok(rep)
}

/// Fourier decay of `y_{q_n}` at fixed frequencies `1 <= k <= K`, `1 <= n <= max_index`.
///
/// Three parts: the bound `|hat y_{q_n}(k)| <= Var(psi) |q_n gamma|_T` (hard), the
/// bound `Var(psi) |q_n gamma|_T / (4 |k gamma|_T)` that follows from the
/// closed form of `hat y_n(k)` (hard), and the decrease of `|hat y_{q_n}(k)|`
/// past the first `n` with `k |q_n gamma|_T < 1/4` (trend). Here `gamma` is the
/// shadow rotation that all sums use.
pub fn check_weak_null(cfg: &BirkhoffConfig, k_max: u64, max_index: usize, rule: TrendRule) -> Result<VerificationReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("K must be >= 1".into()));
    }
    let ks: Vec<u64> = (1..=k_max).collect();
    check_weak_null_at(cfg, &ks, max_index, rule)
}

/// [`check_weak_null`] for an explicit list of positive frequencies.
pub fn check_weak_null_at(cfg: &BirkhoffConfig, ks: &[u64], max_index: usize, rule: TrendRule) -> Result<VerificationReport> {
    if ks.iter().any(|&k| k == 0 || k > i64::MAX as u64) {
        return Err(Error::InvalidArgument("frequencies must be positive".into()));
    }
    let params = json!({ "k": ks, "max_index": max_index });
    let mut literal = VerificationReport::new("weak_null_literal_bound", CheckKind::Hard, params.clone());
    let mut closed = VerificationReport::new("weak_null_closed_form_bound", CheckKind::Hard, params.clone());
    let mut trend = VerificationReport::new("weak_null_trend", CheckKind::Trend, params.clone());
    let exp = Expansion::new(cfg.alpha(), max_index + 1)?;
    let var = cfg.psi().variation();
    let bits = DEFAULT_BITS;
    let var_i = Interval::from_rational(&var, bits);
    let qs: Vec<u64> = (1..=max_index).map(|i| q_at(&exp, i, cfg.horizon())).collect::<Result<_>>()?;
    for &k in ks {
        let ki = k as i64;
        let k_norm = cfg.circle_norm_of(k);
        let mut seq = Vec::new();
        let mut started = false;
        for (idx, &q) in qs.iter().enumerate() {
            let n = idx + 1;
            let y = fourier_y(cfg, q, ki)?.abs();
            let q_norm = cfg.circle_norm_of(q);
            let bound = &var * &q_norm;
            let b_i = Interval::from_rational(&bound, bits);
            let ratio = if bound.is_zero() { Interval::zero(bits) } else { y.div(&b_i)? };
            literal.record(
                Witness {
                    params: json!({ "k": k, "n": n, "q": q }),
                    measured: Bounds::from(&y),
                    bound: Some(Bounds::from(&b_i)),
                    ok: y.certainly_le_rational(&bound),
                },
                Some(Bounds::from(&ratio)),
            );
            let cbound = if k_norm.is_zero() {
                Interval::from_int(q as i64, bits).mul(&var_i)
            } else {
                Interval::from_rational(&(&bound / (&k_norm * BigInt::from(4))), bits)
            };
            closed.record(
                Witness {
                    params: json!({ "k": k, "n": n, "q": q }),
                    measured: Bounds::from(&y),
                    bound: Some(Bounds::from(&cbound)),
                    ok: y.certainly_le(&cbound),
                },
                Some(Bounds::from(&y.div(&cbound).unwrap_or_else(|_| Interval::zero(bits)))),
            );
            started |= q_norm * BigInt::from(4 * k) < BigRational::one();
            if started {
                seq.push(y.hi_f64());
            }
        }
        let ok = rule.decreasing(&seq);
        trend.record(
            Witness {
                params: json!({ "k": k, "from_index": max_index + 1 - seq.len(), "sequence": seq }),
                measured: Bounds { lo: seq.last().copied().unwrap_or(0.0), hi: seq.last().copied().unwrap_or(0.0) },
                bound: None,
                ok,
            },
            None,
        );
    }
    Ok(VerificationReport::with_parts("weak_null", params, vec![literal, closed, trend]))
}

/// Distinct odd `k = q_n` with `beta_n < 1/2` (so `|k alpha|_T < 1/k`), each
/// with a certified lower bound of `|hat psi(k)| / |e^{2 pi i k alpha} - 1|`,
/// the size a solution `u` of `R_alpha u - u = psi` would need at `k`.
/// Passes iff `count` witnesses are found and every bound is at least `1/pi^2`.
pub fn cohomology_witness(cfg: &BirkhoffConfig, count: usize) -> Result<VerificationReport> {
    const MAX_INDEX: usize = 256;
    let mut rep = VerificationReport::new("cohomology_witness", CheckKind::Hard, json!({ "count": count }));
    if count == 0 {
        return Ok(rep);
    }
    let alpha = cfg.alpha();
    let bits = DEFAULT_BITS;
    let pi_i = pi(bits);
    let threshold = pi_i.sqr().recip()?;
    let mut exp = Expansion::new(alpha, 32)?;
    let mut last_q: Option<BigInt> = None;
    let mut found = 0usize;
    let mut i = 1usize;
    while found < count {
        if i > MAX_INDEX {
            return Err(Error::HorizonExceeded { required: count as u64, horizon: found as u64 });
        }
        let c = exp.convergents.get(i).cloned();
        let c = match c {
            Some(c) if i + 8 <= exp.depth() => c,
            _ => {
                exp = Expansion::new(alpha, 2 * exp.depth())?;
                continue;
            }
        };
        i += 1;
        if !c.q_is_odd() || last_q.as_ref() == Some(&c.q) || !below_half(alpha, &mut exp, c.index)? {
            continue;
        }
        let k = c.q.to_i64().ok_or_else(|| Error::GridOverflow(format!("q_{} exceeds i64", c.index)))?;
        last_q = Some(c.q.clone());
        let order = exp.depth();
        let enc = exp.alpha_enclosure(order)?;
        let norm = circle_norm_interval(&enc.scale(&BigRational::from_integer(c.q.clone())));
        // |e^{2 pi i x} - 1| <= 2 pi |x|_T
        let den = pi_i.mul_int(&BigInt::from(2)).mul(&Interval::from_rational(&norm.hi, bits));
        let num = fourier_psi(cfg.psi(), k).abs();
        let lower = Interval::from_rational(&num.lo_rational(), bits).div(&den)?;
        let ok = threshold.certainly_le(&lower);
        let kk = BigRational::from_integer(c.q.clone());
        rep.record(
            Witness {
                params: json!({ "n": c.index, "k": k, "k_times_norm_hi": exact::to_f64(&(&kk * &norm.hi)) }),
                measured: Bounds::from(&lower),
                bound: Some(Bounds::from(&threshold)),
                ok,
            },
            Some(Bounds::from(&threshold.div(&lower)?)),
        );
        found += 1;
    }
    Ok(rep)
}

/// The test family for decorrelation: `psi*`, its rotations by `j/8`, and
/// `randoms` seeded mean-zero step functions with at most 8 pieces on the grid `1/64`.
pub fn decorrelation_family(randoms: usize, seed: u64) -> Result<Vec<(String, StepFunction)>> {
    let mut out = vec![("psi_star".to_string(), psi_star())];
    for j in 1..8 {
        out.push((format!("psi_star_rot_{j}_8"), psi_star().rotate(&exact::rat(j, 8))?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 0..randoms {
        let pieces = rng.random_range(2..=8usize);
        let mut cuts: Vec<i64> = rand::seq::index::sample(&mut rng, 63, pieces - 1)
            .into_iter()
            .map(|c| c as i64 + 1)
            .collect();
        cuts.push(0);
        cuts.sort_unstable();
        let vals: Vec<i64> = (0..pieces).map(|_| rng.random_range(-4..=4)).collect();
        let breaks: Vec<BigRational> = cuts.iter().map(|&c| exact::rat(c, 64)).collect();
        let mean: BigRational = (0..pieces)
            .map(|i| {
                let end = if i + 1 < pieces { cuts[i + 1] } else { 64 };
                exact::rat(vals[i] * (end - cuts[i]), 64)
            })
            .sum();
        let values: Vec<BigRational> = vals.iter().map(|&v| exact::int(v) - &mean).collect();
        out.push((format!("random_{r}"), StepFunction::new(&breaks, &values)?));
    }
    Ok(out)
}

/// Block `s` (1-based) of a plan: `f_s = R_{n_{s-1} gamma} y_{q_s}`.
pub fn plan_block(cfg: &BirkhoffConfig, plan: &SubsequencePlan, s: usize) -> Result<StepFunction> {
    let offset = if s >= 2 { plan.index(s - 1)? } else { 0 };
    let len = plan.block_lengths.get(s - 1).copied().ok_or_else(|| {
        Error::InvalidArgument(format!("block {s} outside 1..={}", plan.block_lengths.len()))
    })?;
    birkhoff_sum_sweep(cfg, len, offset)
}

/// Measured constants `C* = max |int phi f_s| q_s / (Var(phi) s^beta)` and the
/// bilinear analogue with `f_s f_t` for the pairs `s <= t`, over the test family
/// and the blocks themselves. With no pairs given, all pairs are used. The
/// report passes when the per-stage constants are stable under `rule`.
pub fn measure_decorrelation(
    cfg: &BirkhoffConfig,
    plan: &SubsequencePlan,
    beta_exp: f64,
    sample_pairs: &[(usize, usize)],
    seed: u64,
    rule: TrendRule,
) -> Result<VerificationReport> {
    if beta_exp < 0.0 {
        return Err(Error::InvalidArgument("beta must be >= 0".into()));
    }
    let n = plan.len();
    let pairs: Vec<(usize, usize)> = if sample_pairs.is_empty() {
        (1..=n).flat_map(|s| (s..=n).map(move |t| (s, t))).collect()
    } else {
        sample_pairs.to_vec()
    };
    if let Some(&(s, t)) = pairs.iter().find(|&&(s, t)| s == 0 || s > t || t > n) {
        return Err(Error::InvalidArgument(format!("pair ({s}, {t}) not within 1 <= s <= t <= {n}")));
    }
    let blocks: Vec<StepFunction> = (1..=n).into_par_iter().map(|s| plan_block(cfg, plan, s)).collect::<Result<_>>()?;
    let mut family = decorrelation_family(16, seed)?;
    for (s, f) in blocks.iter().enumerate() {
        family.push((format!("block_{}", s + 1), f.clone()));
    }
    let vars: Vec<BigRational> = family.iter().map(|(_, f)| f.variation()).collect();
    let scale = |s: usize| plan.block_lengths[s - 1] as f64 / (s as f64).powf(beta_exp);

    let params = json!({ "beta": beta_exp, "stages": n, "pairs": pairs.len(), "seed": seed });
    let mut linear = VerificationReport::new("decorrelation_linear", CheckKind::Trend, params.clone());
    let mut per_stage = vec![0.0f64; n];
    let lin: Vec<Result<(usize, usize, BigRational)>> = (1..=n)
        .flat_map(|s| (0..family.len()).map(move |j| (s, j)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(s, j)| Ok((s, j, family[j].1.mul(&blocks[s - 1])?.integral())))
        .collect();
    for r in lin {
        let (s, j, v) = r?;
        let c = if vars[j].is_zero() { 0.0 } else { exact::to_f64(&(v.abs() / &vars[j])) * scale(s) };
        per_stage[s - 1] = per_stage[s - 1].max(c);
        linear.instances_checked += 1;
        if c >= linear.worst_ratio.hi {
            linear.worst_ratio = Bounds { lo: c, hi: c };
        }
        if family[j].0 == format!("block_{s}") {
            linear.witnesses.push(Witness {
                params: json!({ "s": s, "phi": family[j].0, "integral": v.to_string() }),
                measured: rational_bounds(&v),
                bound: None,
                ok: true,
            });
        }
    }
    linear.pass = rule.stable(&per_stage);
    linear.witnesses.push(Witness {
        params: json!({ "per_stage": per_stage }),
        measured: linear.worst_ratio,
        bound: None,
        ok: linear.pass,
    });

    let mut bilinear = VerificationReport::new("decorrelation_bilinear", CheckKind::Trend, params.clone());
    let mut per_stage_b = vec![0.0f64; n];
    let bil: Vec<Result<(usize, usize, f64)>> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let prod = blocks[s - 1].mul(&blocks[t - 1])?;
            let mut worst = 0.0f64;
            for (j, (_, phi)) in family.iter().enumerate() {
                if vars[j].is_zero() {
                    continue;
                }
                let v = phi.mul(&prod)?.integral();
                worst = worst.max(exact::to_f64(&(v.abs() / &vars[j])) * scale(s));
            }
            Ok((s, t, worst))
        })
        .collect();
    for r in bil {
        let (s, t, c) = r?;
        per_stage_b[t - 1] = per_stage_b[t - 1].max(c);
        bilinear.instances_checked += 1;
        if c >= bilinear.worst_ratio.hi {
            bilinear.worst_ratio = Bounds { lo: c, hi: c };
        }
        bilinear.witnesses.push(Witness { params: json!({ "s": s, "t": t }), measured: Bounds { lo: c, hi: c }, bound: None, ok: true });
    }
    bilinear.pass = rule.stable(&per_stage_b);
    bilinear.witnesses.push(Witness {
        params: json!({ "per_stage": per_stage_b }),
        measured: bilinear.worst_ratio,
        bound: None,
        ok: bilinear.pass,
    });
    Ok(VerificationReport::with_parts("decorrelation", params, vec![linear, bilinear]))
}

/// Three growth checks up to index `n_max`: the smallest `b` with
/// `q_{bn} >= q_n^p` for all `n` (exact); `max_{m <= q_n} ||y_m||_2 / sqrt(n)`
/// (exact `L^2`, every `m` when `q_n <= 4096`, else 257 evenly spaced `m`);
/// and `sigma_n = ||y_{r_n} / sqrt(n)||_2` bounded away from 0 (needs `psi*`).
pub fn check_growth(cfg: &BirkhoffConfig, n_max: usize, p: u32, rule: TrendRule) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let alpha = cfg.alpha();
    let params = json!({ "N": n_max, "p": p });

    let mut powers = VerificationReport::new("growth_q_power", CheckKind::Hard, params.clone());
    const B_MAX: usize = 64;
    let exp = Expansion::new(alpha, B_MAX * n_max)?;
    let q = |i: usize| &exp.convergents[i].q;
    let b = (1..=B_MAX).find(|&b| (1..=n_max).all(|n| q(b * n) >= &q(n).pow(p)));
    match b {
        Some(b) => {
            for n in 1..=n_max {
                let lhs = q(b * n);
                let rhs = q(n).pow(p);
                let ratio = BigRational::new(rhs.clone(), lhs.clone());
                powers.record(
                    Witness { params: json!({ "n": n, "b": b }), measured: rational_bounds(&ratio), bound: None, ok: lhs >= &rhs },
                    Some(rational_bounds(&ratio)),
                );
            }
            powers.params["b"] = json!(b);
        }
        None => {
            powers.record(
                Witness { params: json!({ "b_max": B_MAX }), measured: Bounds { lo: f64::INFINITY, hi: f64::INFINITY }, bound: None, ok: false },
                None,
            );
        }
    }

    let mut l2 = VerificationReport::new("growth_l2_upper", CheckKind::Trend, params.clone());
    let mut consts = Vec::new();
    for n in 1..=n_max {
        let qn = q_at(&exp, n, cfg.horizon())?;
        let ms: Vec<u64> = if qn <= 4096 {
            (1..=qn).collect()
        } else {
            let mut v: Vec<u64> = (1..=256).map(|i| (qn * i).div_ceil(256)).collect();
            v.insert(0, 1);
            v.dedup();
            v
        };
        let full = qn <= 4096;
        let sq: Vec<Result<(u64, BigRational)>> = ms
            .par_iter()
            .map(|&m| Ok((m, birkhoff_law(cfg, m, 0)?.law.moments(2).pop().expect("order 2"))))
            .collect();
        let mut best = (0u64, BigRational::zero());
        for r in sq {
            let (m, v) = r?;
            if v > best.1 {
                best = (m, v);
            }
        }
        let c = Interval::from_rational(&(&best.1 / BigInt::from(n as u64)), DEFAULT_BITS).sqrt()?;
        consts.push(c.hi_f64());
        l2.record(
            Witness {
                params: json!({ "n": n, "q": qn, "argmax_m": best.0, "scan": if full { "full" } else { "sampled" } }),
                measured: Bounds::from(&c),
                bound: None,
                ok: true,
            },
            Some(Bounds::from(&c)),
        );
    }
    l2.pass = rule.stable(&consts);

    let mut lower = VerificationReport::new("growth_sigma_lower", CheckKind::Hard, params.clone());
    if cfg.psi() != &psi_star() {
        return Err(Error::Hypothesis("the variance lower bound check needs psi = psi*".into()));
    }
    let plan = r_sequence(alpha, n_max)?;
    let sig = sigma_sequence(cfg, &plan)?;
    let mut eps: Option<Interval> = None;
    for (n, s) in sig.iter().enumerate() {
        lower.record(
            Witness { params: json!({ "n": n + 1, "r_n": plan.indices[n] }), measured: Bounds::from(s), bound: None, ok: s.is_positive() },
            None,
        );
        eps = Some(match eps {
            Some(e) => e.min(s),
            None => s.clone(),
        });
    }
    let c_max = sig.iter().skip(1).fold(sig[0].clone(), |a, b| a.max(b));
    lower.params["epsilon"] = json!(Bounds::from(&eps.expect("N >= 1")));
    lower.params["C"] = json!(Bounds::from(&c_max));

    Ok(VerificationReport::with_parts("growth", params, vec![powers, l2, lower]))
}

/// `||f_m + ... + f_{m+n}||_4 / ((n+1) ln(n+m+1))^{1/2}` over windows with
/// `m + n <= n_max`; passes when the envelope over `m + n = 1, 2, ...` is stable.
pub fn check_l4(cfg: &BirkhoffConfig, plan: &SubsequencePlan, n_max: usize, rule: TrendRule) -> Result<VerificationReport> {
    if n_max > plan.len() {
        return Err(Error::InvalidArgument(format!("window end {n_max} beyond plan length {}", plan.len())));
    }
    let mut rep = VerificationReport::new("l4_window", CheckKind::Trend, json!({ "N": n_max }));
    let windows: Vec<(usize, usize)> = (1..=n_max).flat_map(|m| (0..=n_max - m).map(move |n| (m, n))).collect();
    let start = |m: usize| if m >= 2 { plan.indices[m - 2] } else { 0 };
    let laws: Vec<Result<(usize, usize, BigRational)>> = windows
        .par_iter()
        .map(|&(m, n)| {
            let off = start(m);
            let len = plan.indices[m + n - 1] - off;
            Ok((m, n, birkhoff_law(cfg, len, off)?.law.moments(4).pop().expect("order 4")))
        })
        .collect();
    let mut envelope = vec![0.0f64; n_max];
    for r in laws {
        let (m, n, m4) = r?;
        let l4 = Interval::from_rational(&m4, DEFAULT_BITS).sqrt()?.sqrt()?;
        let norm = ((n + 1) as f64 * ((n + m + 1) as f64).ln()).sqrt();
        let c = Bounds { lo: l4.lo_f64() / norm, hi: l4.hi_f64() / norm };
        let end = m + n;
        envelope[end - 1] = envelope[end - 1].max(c.hi);
        rep.record(
            Witness { params: json!({ "m": m, "n": n, "l4": Bounds::from(&l4) }), measured: c, bound: None, ok: true },
            Some(c),
        );
    }
    for i in 1..envelope.len() {
        envelope[i] = envelope[i].max(envelope[i - 1]);
    }
    rep.pass = rule.stable(&envelope);
    rep.params["envelope"] = json!(envelope);
    Ok(rep)
}

/// Parities and approximation constants of consecutive convergents, indices `0..=n_max`:
/// (1) of `n, n+1` one has `beta < 1/2`; (2) `q_n` even implies `q_{n+1}` odd;
/// (3) `q_n, q_{n+2}` even imply `beta_{n+1} < 1/2`; (4) of four consecutive
/// convergents one is odd with `beta < 1/2`.
pub fn check_parity_lemma(alpha: &PartialQuotients, n_max: usize) -> Result<VerificationReport> {
    let mut parts = Vec::new();
    let mut exp = Expansion::new(alpha, n_max + 8)?;
    let mut good = Vec::with_capacity(n_max + 1);
    for i in 0..=n_max {
        good.push(below_half(alpha, &mut exp, i)?);
    }
    let odd: Vec<bool> = (0..=n_max).map(|i| exp.convergents[i].q_is_odd()).collect();
    let params = json!({ "N": n_max });
    let mut one = VerificationReport::new("parity_part1", CheckKind::Hard, params.clone());
    let mut two = VerificationReport::new("parity_part2", CheckKind::Hard, params.clone());
    let mut three = VerificationReport::new("parity_part3", CheckKind::Hard, params.clone());
    let mut four = VerificationReport::new("parity_part4", CheckKind::Hard, params.clone());
    let w = |n: usize, ok: bool| Witness {
        params: json!({ "n": n }),
        measured: Bounds { lo: ok as u8 as f64, hi: ok as u8 as f64 },
        bound: None,
        ok,
    };
    for n in 0..=n_max {
        if n < n_max {
            one.record(w(n, good[n] || good[n + 1]), None);
            if odd[n] {
                two.skipped += 1;
            } else {
                two.record(w(n, odd[n + 1]), None);
            }
        }
        if n + 2 <= n_max {
            if !odd[n] && !odd[n + 2] {
                three.record(w(n, good[n + 1]), None);
            } else {
                three.skipped += 1;
            }
        }
        if n + 3 <= n_max {
            four.record(w(n, (n..n + 4).any(|i| odd[i] && good[i])), None);
        }
    }
    parts.extend([one, two, three, four]);
    Ok(VerificationReport::with_parts("parity_lemma", params, parts))
}

/// All hard checks and measured constants for one configuration.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<VerificationReport>,
    pub hard_failures: Vec<String>,
}

impl SuiteReport {
    pub fn new(reports: Vec<VerificationReport>) -> Self {
        let hard_failures = reports.iter().filter(|r| r.hard_failure()).map(|r| r.lemma_id.clone()).collect();
        SuiteReport { reports, hard_failures }
    }

    pub fn pass(&self) -> bool {
        self.hard_failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(h: u64) -> BirkhoffConfig {
        BirkhoffConfig::psi_star(PartialQuotients::golden(), h).unwrap()
    }

    #[test]
    fn trend_rule() {
        let r = TrendRule::default();
        assert!(r.decreasing(&[3.0, 2.0, 2.5, 1.0]));
        assert!(!r.decreasing(&[1.0, 2.0]));
        assert!(r.stable(&[1.0, 1.0, 1.9, 2.0]));
        assert!(!r.stable(&[1.0, 1.0, 3.0]));
        assert!(r.decreasing(&[]));
    }

    #[test]
    fn denjoy_koksma_golden() {
        let cfg = golden(1000);
        let rep = check_denjoy_koksma(&cfg, 15).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.instances_checked, 15);
        assert!(rep.worst_ratio.hi <= 1.0);
    }

    #[test]
    fn denjoy_koksma_zero_psi() {
        let cfg = BirkhoffConfig::new(StepFunction::zero(), PartialQuotients::golden(), 100).unwrap();
        let rep = check_denjoy_koksma(&cfg, 8).unwrap();
        assert!(rep.pass);
        assert!(rep.witnesses.iter().all(|w| w.measured.hi == 0.0));
    }

    #[test]
    fn refined_golden_and_skips() {
        let cfg = golden(1000);
        let rep = check_refined_dk(&cfg, 15).unwrap();
        assert!(rep.pass, "{:#?}", rep.witnesses.iter().filter(|w| !w.ok).collect::<Vec<_>>());
        assert!(rep.skipped > 0);
        assert!(rep.witnesses.iter().any(|w| w.params["q"] == 5));
        for w in &rep.witnesses {
            assert_eq!(w.params["q"].as_u64().unwrap() % 2, 1);
        }
    }

    #[test]
    fn refined_needs_psi_star() {
        let psi = StepFunction::new(&[exact::int(0), exact::rat(1, 3)], &[exact::int(2), exact::int(-1)]).unwrap();
        let cfg = BirkhoffConfig::new(psi, PartialQuotients::golden(), 100).unwrap();
        assert!(matches!(check_refined_dk(&cfg, 5), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn shape_rejects_wrong_orientation() {
        let cfg = golden(100);
        // q_4 = 5, p_4 / q_4 < alpha
        let y = birkhoff_sum_sweep(&cfg, 5, 0).unwrap();
        assert!(refined_shape(&y, 5, true).is_ok());
        assert!(refined_shape(&y, 5, false).is_err());
        let y = birkhoff_sum_sweep(&cfg, 13, 0).unwrap();
        assert!(refined_shape(&y, 13, true).is_ok());
        assert!(refined_shape(&y, 13, false).is_err());
    }

    #[test]
    fn weak_null_even_coefficients_vanish() {
        let cfg = golden(1000);
        let rep = check_weak_null(&cfg, 2, 12, TrendRule::default()).unwrap();
        let literal = &rep.parts[0];
        for w in literal.witnesses.iter().filter(|w| w.params["k"] == 2) {
            assert!(w.measured.lo <= 0.0 && w.measured.hi < 1e-30);
        }
        // k = 1: trend and both bounds hold
        assert!(rep.parts[2].witnesses[0].ok);
        assert!(rep.parts[1].pass);
        assert!(literal.witnesses.iter().filter(|w| w.params["k"] == 1).all(|w| w.ok));
    }

    #[test]
    fn cohomology_golden() {
        let cfg = golden(100);
        let rep = cohomology_witness(&cfg, 5).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.instances_checked, 5);
        let ks: Vec<i64> = rep.witnesses.iter().map(|w| w.params["k"].as_i64().unwrap()).collect();
        assert_eq!(ks, vec![1, 3, 5, 13, 21]);
        assert!(cohomology_witness(&cfg, 0).unwrap().pass);
    }

    #[test]
    fn parity_examples() {
        assert!(check_parity_lemma(&PartialQuotients::golden(), 20).unwrap().pass);
        let vac = check_parity_lemma(&PartialQuotients::golden(), 0).unwrap();
        assert!(vac.pass);
        assert_eq!(vac.instances_checked, 0);
        for seed in 0..5 {
            assert!(check_parity_lemma(&PartialQuotients::ead(3, 3, seed).unwrap(), 30).unwrap().pass);
        }
    }

    #[test]
    fn growth_all_twos() {
        let cfg = BirkhoffConfig::psi_star(PartialQuotients::constant(2), 20_000).unwrap();
        let rep = check_growth(&cfg, 8, 2, TrendRule::default()).unwrap();
        let powers = &rep.parts[0];
        assert!(powers.pass);
        assert!(powers.params["b"].as_u64().unwrap() <= 3);
        assert!(rep.parts[2].pass);
    }

    #[test]
    fn l4_single_blocks_are_one() {
        let cfg = BirkhoffConfig::psi_star(PartialQuotients::constant(9), 100_000).unwrap();
        let plan = crate::limits::greedy_subsequence(&cfg, 3, &crate::limits::default_schedule(2)).unwrap();
        let rep = check_l4(&cfg, &plan, 3, TrendRule::default()).unwrap();
        for w in rep.witnesses.iter().filter(|w| w.params["n"] == 0) {
            let l4 = &w.params["l4"];
            assert!(l4["lo"].as_f64().unwrap() <= 1.0 && l4["hi"].as_f64().unwrap() >= 1.0);
        }
    }

    #[test]
    fn decorrelation_self_integral() {
        let cfg = BirkhoffConfig::psi_star(PartialQuotients::constant(8), 100_000).unwrap();
        let plan = r_sequence(cfg.alpha(), 3).unwrap();
        let rep = measure_decorrelation(&cfg, &plan, 1.0, &[], 7, TrendRule::default()).unwrap();
        for s in 1..=3 {
            let f = plan_block(&cfg, &plan, s).unwrap();
            let sq = f.norms().l2_sq.clone();
            let w = rep.parts[0].witnesses.iter().find(|w| w.params["s"] == s as u64).unwrap();
            assert_eq!(w.params["integral"], sq.to_string());
        }
        let fam = decorrelation_family(16, 7).unwrap();
        assert_eq!(fam.len(), 24);
        assert!(fam.iter().all(|(_, f)| f.integral().is_zero() && f.len() <= 8));
    }
}
