//! Acceptance suite. Every test prints one `[PASS]` or `[FAIL]` line.
//!
//! Run with `cargo test -p rotlab --test acceptance -- --nocapture --test-threads 1`
//! to see the lines in order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotlab::contfrac::convergents;
use rotlab::limits::{
    default_schedule, greedy_subsequence, r_sequence, rescaled_law, stage_laws, stage_sup_norms, PlanStatus,
};
use rotlab::stats::{ks_distance_scaled, GaussianRef, ScaledLaw};
use rotlab::verify::{
    check_denjoy_koksma, check_parity_lemma, check_refined_dk, check_weak_null_at, cohomology_witness,
    max_index_with_q_at_most, TrendRule,
};
use rotlab::birkhoff::{birkhoff_law, l2_via_parseval};
use rotlab::{birkhoff_sum, birkhoff_value, BirkhoffConfig, PartialQuotients};

/// Seeds of the random `E(3,3)` rotation numbers.
const SEEDS: u64 = 20;
/// Largest convergent denominator in the sup-norm suites.
const Q_MAX: u64 = 1_000_000;
/// Deepest index in the parity suite.
const PARITY_INDEX: usize = 30;
/// Frequency cutoff of the Parseval enclosure.
const PARSEVAL_K: u64 = 100_000;
/// Golden degeneracy: stages, and the sup-norm bound of `y_{r_j}`.
const GOLDEN_STAGES: usize = 20;
const GOLDEN_SUP: i64 = 6;
/// Finite-stage Gaussian trend for `[0; 10, 10, ...]`.
const TREND_A: u64 = 10;
const TREND_STAGES: usize = 8;
const TREND_FROM: usize = 3;
const SIGMA_RANGE: (f64, f64) = (0.3, 4.0);
const KS_FINAL_MAX: f64 = 0.25;
/// Greedy pipeline on the golden rotation.
const GREEDY_BLOCKS: usize = 6;
const GREEDY_M2: (f64, f64) = (0.8, 1.2);
const GREEDY_KS_MAX: f64 = 0.3;
/// Fourier decay frequencies and depth.
const WEAK_NULL_K: [u64; 3] = [1, 3, 5];
const WEAK_NULL_INDEX: usize = 15;
/// Witnesses of non-solvability per rotation number.
const WITNESSES: usize = 5;
/// Oracle comparison.
const ORACLE_POINTS: usize = 1000;
const ORACLE_N: [u64; 6] = [1, 7, 144, 1000, 4181, 10_000];

fn line(name: &str, ok: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn test_alphas() -> Vec<(String, PartialQuotients)> {
    let mut out = vec![("golden".to_string(), PartialQuotients::golden())];
    for seed in 0..SEEDS {
        out.push((format!("E(3,3) seed {seed}"), PartialQuotients::ead(3, 3, seed).unwrap()));
    }
    out
}

#[test]
fn denjoy_koksma_suite() {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (name, alpha) in test_alphas() {
        let max_index = max_index_with_q_at_most(&alpha, Q_MAX).unwrap();
        let cfg = BirkhoffConfig::psi_star(alpha, Q_MAX).unwrap();
        let rep = check_denjoy_koksma(&cfg, max_index).unwrap();
        checked += rep.instances_checked;
        worst = worst.max(rep.worst_ratio.hi);
        if !rep.pass {
            failures.push(name);
        }
    }
    let ok = failures.is_empty() && checked > 0;
    line("denjoy_koksma_suite", ok, &format!("{checked} convergents, worst sup/Var = {worst:.6}, failures {failures:?}"));
    assert!(ok);
}

#[test]
fn refined_denjoy_koksma_suite() {
    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for (name, alpha) in test_alphas() {
        let max_index = max_index_with_q_at_most(&alpha, Q_MAX).unwrap();
        let cfg = BirkhoffConfig::psi_star(alpha, Q_MAX).unwrap();
        let rep = check_refined_dk(&cfg, max_index).unwrap();
        checked += rep.instances_checked;
        skipped += rep.skipped;
        if !rep.pass {
            failures.push(name);
        }
    }
    let ok = failures.is_empty() && checked > 0;
    line(
        "refined_denjoy_koksma_suite",
        ok,
        &format!("{checked} odd convergents with beta < 1/2 are +-1 valued with the cell structure ({skipped} skipped), failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn parity_selection_suite() {
    let mut checked = 0;
    let mut failures = Vec::new();
    for seed in 0..SEEDS {
        let alpha = PartialQuotients::ead(3, 3, seed).unwrap();
        let rep = check_parity_lemma(&alpha, PARITY_INDEX).unwrap();
        checked += rep.instances_checked;
        if !rep.pass {
            failures.push(seed);
        }
    }
    let ok = failures.is_empty();
    line("parity_selection_suite", ok, &format!("{checked} instances over {SEEDS} seeds, failing seeds {failures:?}"));
    assert!(ok);
}

#[test]
fn parseval_cross_check() {
    let cfg = BirkhoffConfig::psi_star(PartialQuotients::golden(), 233).unwrap();
    let mut violations = Vec::new();
    let mut detail = Vec::new();
    for n in [5u64, 13, 233] {
        let exact = birkhoff_sum(&cfg, n).unwrap().norms().l2_sq;
        let bound = l2_via_parseval(&cfg, n, PARSEVAL_K).unwrap();
        if !bound.contains(&exact) {
            violations.push(n);
        }
        detail.push(format!(
            "n={n}: {:.6} in [{:.6}, {:.6}]",
            exact.to_f64().unwrap(),
            bound.lo().to_f64().unwrap(),
            bound.hi().to_f64().unwrap()
        ));
    }
    let ok = violations.is_empty();
    line("parseval_cross_check", ok, &format!("{}; violations {violations:?}", detail.join(", ")));
    assert!(ok);
}

#[test]
fn golden_degeneracy() {
    let alpha = PartialQuotients::golden();
    let plan = r_sequence(&alpha, GOLDEN_STAGES).unwrap();
    let c = convergents(&alpha, GOLDEN_STAGES + 2).unwrap();
    let identity = (1..=GOLDEN_STAGES).all(|j| BigInt::from(plan.indices[j - 1]) == &c[j + 2].q - 2);
    let cfg = BirkhoffConfig::psi_star(alpha, *plan.indices.last().unwrap()).unwrap();
    let sups = stage_sup_norms(&cfg, &plan).unwrap();
    let bound = BigRational::from_integer(GOLDEN_SUP.into());
    let sup_ok = sups.iter().all(|s| s <= &bound);
    let laws = stage_laws(&cfg, &plan).unwrap();
    // support of y_{r_j} / sqrt(j) inside [-6/sqrt(j), 6/sqrt(j)]
    let radius_ok = laws.iter().enumerate().all(|(i, l)| {
        let r = l.support_radius();
        r.hi_f64() <= GOLDEN_SUP as f64 / ((i + 1) as f64).sqrt() + 1e-12
    });
    let max_sup = sups.iter().max().unwrap();
    let last = laws.last().unwrap().support_radius().hi_f64();
    let ok = identity && sup_ok && radius_ok;
    line(
        "golden_degeneracy",
        ok,
        &format!(
            "r_j = q_(j+2) - 2 for j <= {GOLDEN_STAGES}: {identity}; max sup|y_r_j| = {max_sup}; support radius at j = {GOLDEN_STAGES}: {last:.4}"
        ),
    );
    assert!(ok);
}

#[test]
fn gaussian_trend_constant_quotients() {
    let alpha = PartialQuotients::constant(TREND_A);
    let plan = r_sequence(&alpha, TREND_STAGES).unwrap();
    let cfg = BirkhoffConfig::psi_star(alpha, *plan.indices.last().unwrap()).unwrap();
    let mut sigmas = Vec::new();
    let mut ks = Vec::new();
    for n in 1..=TREND_STAGES {
        let law = rescaled_law(&cfg, &plan, n).unwrap();
        let sigma = rotlab::limits::sigma_of(&law).unwrap();
        let d = ks_distance_scaled(&law, &GaussianRef::new(sigma.clone()).unwrap());
        sigmas.push(sigma.mid_f64());
        ks.push(d.hi_f64());
    }
    let sigma_ok = sigmas.iter().all(|&s| s >= SIGMA_RANGE.0 && s <= SIGMA_RANGE.1);
    let tail = &ks[TREND_FROM - 1..];
    let trend_ok = TrendRule::default().decreasing(tail);
    let strictly = tail.windows(2).all(|w| w[1] <= w[0]);
    let final_ok = *ks.last().unwrap() <= KS_FINAL_MAX;
    let ok = sigma_ok && trend_ok && final_ok;
    line(
        "gaussian_trend_constant_quotients",
        ok,
        &format!(
            "r_n = {:?}; sigma_n = {:?}; KS = {:?}; trend rule {trend_ok}, stage-by-stage non-increasing {strictly}",
            plan.indices,
            sigmas.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>(),
            ks.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn greedy_pipeline_golden() {
    let alpha = PartialQuotients::golden();
    let cfg = BirkhoffConfig::psi_star(alpha, 2_000_000).unwrap();
    let schedule = default_schedule(GREEDY_BLOCKS - 1);
    let plan = greedy_subsequence(&cfg, GREEDY_BLOCKS, &schedule).unwrap();
    let complete = plan.status == PlanStatus::Complete && plan.len() == GREEDY_BLOCKS;
    let deltas_ok = plan.deltas.iter().zip(&schedule).all(|(d, s)| d <= s);
    let odd = plan.block_lengths.iter().all(|q| q % 2 == 1);
    let pm_one = plan.block_lengths.iter().all(|&q| {
        let law = birkhoff_law(&cfg, q, 0).unwrap().law;
        law.atoms().iter().all(|a| a.value == BigRational::one() || a.value == -BigRational::one())
    });
    let law = ScaledLaw::new(birkhoff_law(&cfg, plan.indices[GREEDY_BLOCKS - 1], 0).unwrap().law, GREEDY_BLOCKS as u64).unwrap();
    let m2 = law.even_moment(2).to_f64().unwrap();
    let ks = ks_distance_scaled(&law, &GaussianRef::standard()).hi_f64();
    let ok = complete && deltas_ok && odd && pm_one && m2 >= GREEDY_M2.0 && m2 <= GREEDY_M2.1 && ks <= GREEDY_KS_MAX;
    line(
        "greedy_pipeline_golden",
        ok,
        &format!(
            "blocks {:?}, deltas {:?}, +-1 blocks {pm_one}, m2 = {m2:.4}, KS vs g(1) = {ks:.4}",
            plan.block_lengths,
            plan.deltas.iter().map(|d| format!("{:.3e}", d.to_f64().unwrap())).collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

#[test]
fn weak_null_fourier_decay() {
    let cfg = BirkhoffConfig::psi_star(PartialQuotients::golden(), 1000).unwrap();
    let rep = check_weak_null_at(&cfg, &WEAK_NULL_K, WEAK_NULL_INDEX, TrendRule::default()).unwrap();
    let literal = &rep.parts[0];
    let closed = &rep.parts[1];
    let trend = &rep.parts[2];
    let violations: Vec<String> = literal
        .witnesses
        .iter()
        .filter(|w| !w.ok)
        .map(|w| format!("k={} n={}", w.params["k"], w.params["n"]))
        .collect();
    let ok = literal.pass && trend.pass;
    line(
        "weak_null_fourier_decay",
        ok,
        &format!(
            "|y^_q_n(k)| <= Var|q_n alpha|: worst ratio {:.4}, violations {violations:?}; closed-form bound Var|q_n alpha|/(4|k alpha|) holds: {} (worst {:.4}); decay trend: {}",
            literal.worst_ratio.hi, closed.pass, closed.worst_ratio.hi, trend.pass
        ),
    );
    assert!(ok);
}

#[test]
fn cohomology_witnesses() {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (name, alpha) in test_alphas() {
        let cfg = BirkhoffConfig::psi_star(alpha, 16).unwrap();
        let rep = cohomology_witness(&cfg, WITNESSES).unwrap();
        worst = worst.max(rep.worst_ratio.hi);
        if !rep.pass || rep.instances_checked < WITNESSES as u64 {
            failures.push(name);
        }
    }
    let ok = failures.is_empty();
    line(
        "cohomology_witnesses",
        ok,
        &format!("{WITNESSES} odd k with |k alpha| < 1/k per alpha, worst (1/pi^2)/bound = {worst:.4}, failures {failures:?}"),
    );
    assert!(ok);
}

#[test]
fn oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for alpha in [PartialQuotients::golden(), PartialQuotients::ead(3, 3, 5).unwrap()] {
        let cfg = BirkhoffConfig::psi_star(alpha, 10_000).unwrap();
        for &n in &ORACLE_N {
            let y = birkhoff_sum(&cfg, n).unwrap();
            let bps = y.breakpoints();
            for i in 0..ORACLE_POINTS {
                // every eighth point sits exactly on a breakpoint
                let x = if i % 8 == 0 {
                    bps[rng.random_range(0..bps.len())].clone()
                } else {
                    let den: i64 = rng.random_range(1..=1_000_000_000);
                    BigRational::new(rng.random_range(0..den).into(), den.into())
                };
                checked += 1;
                if birkhoff_value(&cfg, &x, n).unwrap() != y.eval(&x) {
                    mismatches += 1;
                }
            }
        }
    }
    let ok = mismatches == 0;
    line("oracle_equivalence", ok, &format!("{checked} points, n up to 10^4, {mismatches} mismatches"));
    assert!(ok);
}
