use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use num_rational::BigRational;
use rotlab::contfrac::Expansion;
use rotlab::exact::to_f64;
use rotlab::limits::{default_schedule, greedy_subsequence, r_sequence, sigma_of, stage_laws, stage_record};
use rotlab::verify::{
    check_denjoy_koksma, check_growth, check_l4, check_parity_lemma, check_refined_dk, check_weak_null,
    cohomology_witness, max_index_with_q_at_most, measure_decorrelation,
};
use rotlab::{BirkhoffConfig, PartialQuotients, PlanStatus, QuotientSpec, SuiteReport, TrendRule};
use serde_json::{json, Value};

use crate::config::{out_dir, parse_ead, ExperimentConfig, PlanSpec, GREEDY_HORIZON};
use crate::output::{header_hash, without_comments, Header, OutDir};
use crate::AlphaArgs;

pub const HARD_FAILURE: u8 = 1;
pub const USAGE: u8 = 2;
pub const PRECISION: u8 = 3;

pub struct Globals {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub horizon: Option<u64>,
}

impl Globals {
    fn load(&self) -> Result<ExperimentConfig> {
        let Some(path) = &self.config else {
            bail!("--config <file> is required");
        };
        let mut cfg = ExperimentConfig::load(path)?;
        cfg.apply(self.seed, self.horizon);
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> Result<OutDir> {
        let dir = out_dir(self.out.clone(), Some(cfg));
        OutDir::create(&dir, Header { config_sha256: cfg.hash() })
    }
}

/// 3 for precision and horizon failures of the library, 2 for everything else.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<rotlab::Error>()) {
        Some(err) if err.is_precision() => PRECISION,
        _ => USAGE,
    }
}

pub fn alpha(g: &Globals, args: &AlphaArgs) -> Result<u8> {
    let src = &args.source;
    let spec = if src.golden {
        PartialQuotients::golden().spec().clone()
    } else if let Some(e) = &src.ead {
        parse_ead(e, g.seed)?
    } else if let Some(q) = &src.explicit {
        QuotientSpec::Explicit { quotients: q.clone() }
    } else if g.config.is_some() {
        g.load()?.alpha
    } else {
        bail!("no rotation number: use --golden, --ead, --explicit or --config");
    };
    let pq = PartialQuotients::new(spec)?;
    let n = args.n;
    pq.prefix(n)?;
    // beta_n needs the expansion a few orders deeper than n
    let depth = pq.available().unwrap_or(n + 24);
    let exp = Expansion::new(&pq, depth)?;
    let half = BigRational::new(1.into(), 2.into());

    let mut s = String::new();
    writeln!(s, "# alpha {}", serde_json::to_string(pq.spec())?)?;
    writeln!(s, "n,a_n,p_n,q_n,q_parity,beta_lo,beta_hi,beta_below_half")?;
    for c in &exp.convergents[..=n] {
        let a = if c.index == 0 { 0 } else { exp.quotients[c.index - 1] };
        let parity = if c.q_is_odd() { "odd" } else { "even" };
        let beta = match exp.beta(c.index, depth) {
            Ok(b) => {
                let below = if b.hi < half {
                    "yes"
                } else if b.lo >= half {
                    "no"
                } else {
                    "undecided"
                };
                format!("{:.12},{:.12},{below}", to_f64(&b.lo), to_f64(&b.hi))
            }
            // the list ends too early to enclose alpha
            Err(_) => "nan,nan,undecided".to_string(),
        };
        writeln!(s, "{},{a},{},{},{parity},{beta}", c.index, c.p, c.q)?;
    }
    std::io::stdout().write_all(s.as_bytes())?;
    Ok(0)
}

pub fn experiment(g: &Globals) -> Result<u8> {
    let cfg = g.load()?;
    let plan_spec = cfg.plan.clone().context("config has no \"plan\"")?;
    let alpha = cfg.alpha()?;
    let psi = cfg.psi.function();
    let (bc, mut plan) = match plan_spec {
        PlanSpec::RSequence { n } => {
            let plan = r_sequence(&alpha, n)?;
            let horizon = cfg.horizon.unwrap_or(plan.indices[n - 1]);
            (BirkhoffConfig::new(psi, alpha, horizon)?, plan)
        }
        PlanSpec::Greedy { j, schedule } => {
            let bc = BirkhoffConfig::new(psi, alpha, cfg.horizon.unwrap_or(GREEDY_HORIZON))?;
            let schedule = if schedule.is_empty() { default_schedule(j.saturating_sub(1)) } else { schedule };
            let plan = greedy_subsequence(&bc, j, &schedule)?;
            (bc, plan)
        }
    };
    let laws = stage_laws(&bc, &plan)?;
    let sigmas = laws.iter().map(sigma_of).collect::<rotlab::Result<Vec<_>>>()?;
    plan.attach_sigma(&sigmas);
    let lambda = BigRational::from_integer(1.into());
    let records = (1..=plan.len())
        .map(|n| stage_record(&plan, n, &laws[n - 1], &lambda))
        .collect::<rotlab::Result<Vec<_>>>()?;

    let out = g.out_dir(&cfg)?;
    out.json("plan.json", &plan)?;
    out.text("stages.csv", |b| {
        writeln!(b, "n,r_n,sigma_n,sigma_lo,sigma_hi,ks,m2,m4,char_gap_at_lambda1")?;
        for r in &records {
            writeln!(
                b,
                "{},{},{:.9},{:.15e},{:.15e},{:.6},{:.12},{:.12},{:.6e}",
                r.n,
                r.index,
                (r.sigma.lo + r.sigma.hi) / 2.0,
                r.sigma.lo,
                r.sigma.hi,
                r.ks.hi,
                to_f64(&r.m2),
                to_f64(&r.m4),
                r.char_gap.hi
            )?;
        }
        Ok(())
    })?;
    for (i, law) in laws.iter().enumerate() {
        let n = i + 1;
        out.text(&format!("law_n{n}.csv"), |b| Ok(law.write_csv(b)?))?;
        out.text(&format!("hist_n{n}.dat"), |b| {
            writeln!(b, "# value mass")?;
            for (x, a) in law.positions(64).iter().zip(law.law.atoms()) {
                writeln!(b, "{:.12e} {:.12e}", x.mid_f64(), to_f64(&a.mass))?;
            }
            Ok(())
        })?;
    }
    out.json(
        "experiment.json",
        &json!({ "config": cfg, "plan_kind": plan.kind, "status": plan.status, "stages": records }),
    )?;

    for r in &records {
        println!(
            "stage n={} r_n={} sigma_n={:.6} ks={:.6}",
            r.n,
            r.index,
            (r.sigma.lo + r.sigma.hi) / 2.0,
            r.ks.hi
        );
    }
    if plan.status == PlanStatus::Exhausted {
        eprintln!("error: horizon {} exhausted after {} blocks", bc.horizon(), plan.len());
        return Ok(PRECISION);
    }
    Ok(0)
}

/// Every check of the verify module that applies to the configuration.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<(SuiteReport, Vec<String>)> {
    let p = &cfg.verify;
    let rule = TrendRule { factor: p.trend_factor };
    let alpha = cfg.alpha()?;
    let psi = cfg.psi.function();
    let is_star = psi == rotlab::psi_star();
    let max_index = max_index_with_q_at_most(&alpha, p.q_max)?;
    let bc = BirkhoffConfig::new(psi.clone(), alpha.clone(), cfg.horizon.unwrap_or(p.q_max))?;
    let mut notes = Vec::new();
    let mut reports = vec![check_denjoy_koksma(&bc, max_index)?];
    if is_star {
        reports.push(check_refined_dk(&bc, max_index)?);
    } else {
        notes.push("refined_dk: needs psi_star".to_string());
    }
    reports.push(check_parity_lemma(&alpha, p.parity_index)?);
    let wn_index = p.weak_null_index.min(max_index);
    if wn_index < p.weak_null_index {
        notes.push(format!("weak_null: index capped at {wn_index} by q_max"));
    }
    reports.push(check_weak_null(&bc, p.weak_null_k, wn_index, rule)?);
    reports.push(cohomology_witness(&bc, p.witnesses)?);
    if is_star {
        reports.push(check_growth(&bc, p.growth_n, p.growth_p, rule)?);
    } else {
        notes.push("growth: needs psi_star".to_string());
    }

    let gc = BirkhoffConfig::new(psi, alpha, p.greedy_horizon)?;
    let plan = greedy_subsequence(&gc, p.greedy_blocks, &default_schedule(p.greedy_blocks.saturating_sub(1)))?;
    if plan.status == PlanStatus::Exhausted {
        notes.push(format!("greedy: horizon {} exhausted after {} blocks", p.greedy_horizon, plan.len()));
    }
    if plan.len() >= 2 {
        reports.push(measure_decorrelation(&gc, &plan, p.decorrelation_beta, &[], cfg.seed, rule)?);
        reports.push(check_l4(&gc, &plan, plan.len(), rule)?);
    } else {
        notes.push("decorrelation, l4_window: fewer than 2 greedy blocks".to_string());
    }
    Ok((SuiteReport::new(reports), notes))
}

pub fn verify(g: &Globals) -> Result<u8> {
    let cfg = g.load()?;
    let (suite, notes) = run_suite(&cfg)?;
    let out = g.out_dir(&cfg)?;
    out.json(
        "verify.json",
        &json!({
            "config": cfg,
            "pass": suite.pass(),
            "hard_failures": suite.hard_failures,
            "skipped_checks": notes,
            "reports": suite.reports,
        }),
    )?;
    for r in &suite.reports {
        println!(
            "{:<6} {:<22} {:?} instances={} worst_ratio={:.6}",
            if r.pass { "pass" } else { "FAIL" },
            r.lemma_id,
            r.kind,
            r.instances_checked,
            r.worst_ratio.hi
        );
    }
    for n in &notes {
        println!("skip   {n}");
    }
    Ok(if suite.pass() { 0 } else { HARD_FAILURE })
}

pub fn report(g: &Globals) -> Result<u8> {
    let cfg = match &g.config {
        Some(_) => Some(g.load()?),
        None => None,
    };
    let dir = out_dir(g.out.clone(), cfg.as_ref());
    let mut hashes = Vec::new();
    let mut found = 0;
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).ok();

    println!("directory {}", dir.display());
    if let Some(text) = read("experiment.json") {
        found += 1;
        hashes.push(("experiment.json", header_hash(&text)));
        let v: Value = serde_json::from_str(&text).context("experiment.json")?;
        let stages = v["stages"].as_array().cloned().unwrap_or_default();
        println!("experiment {} status={} stages={}", v["plan_kind"], v["status"], stages.len());
        for s in &stages {
            println!(
                "  n={} r_n={} sigma_n={:.6} ks={:.6}",
                s["n"],
                s["index"],
                (s["sigma"]["lo"].as_f64().unwrap_or(f64::NAN) + s["sigma"]["hi"].as_f64().unwrap_or(f64::NAN)) / 2.0,
                s["ks"]["hi"].as_f64().unwrap_or(f64::NAN)
            );
        }
    }
    for name in ["plan.json", "stages.csv"] {
        if let Some(text) = read(name) {
            found += 1;
            hashes.push((name, header_hash(&text)));
        }
    }
    if let Some(text) = read("stages.csv") {
        let (_, rows) = without_comments(&text);
        println!("stages.csv rows={}", rows.len().saturating_sub(1));
    }
    if let Some(text) = read("verify.json") {
        found += 1;
        hashes.push(("verify.json", header_hash(&text)));
        let v: Value = serde_json::from_str(&text).context("verify.json")?;
        println!("verify pass={} hard_failures={}", v["pass"], v["hard_failures"]);
        for r in v["reports"].as_array().into_iter().flatten() {
            println!(
                "  {} {} pass={} worst_ratio={:.6}",
                r["lemma_id"].as_str().unwrap_or("?"),
                r["kind"].as_str().unwrap_or("?"),
                r["pass"],
                r["worst_ratio"]["hi"].as_f64().unwrap_or(f64::NAN)
            );
        }
    }
    if found == 0 {
        bail!("no rotlab outputs in {}", dir.display());
    }
    let first = &hashes[0].1;
    if hashes.iter().all(|(_, h)| h == first) {
        println!("config_sha256 {}", first.as_deref().unwrap_or("missing"));
    } else {
        for (name, h) in &hashes {
            println!("warning: {name} has config_sha256 {}", h.as_deref().unwrap_or("missing"));
        }
    }
    Ok(0)
}
