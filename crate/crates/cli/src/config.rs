use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_rational::BigRational;
use rotlab::exact::serde_rational_vec;
use rotlab::{PartialQuotients, QuotientSpec, StepFunction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Horizon used for greedy plans when none is given.
pub const GREEDY_HORIZON: u64 = 4_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiName {
    #[default]
    #[serde(rename = "psi_star")]
    PsiStar,
}

/// `"psi_star"` or a custom step function.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiChoice {
    Named(PsiName),
    Custom(StepFunction),
}

impl Default for PsiChoice {
    fn default() -> Self {
        PsiChoice::Named(PsiName::PsiStar)
    }
}

impl PsiChoice {
    pub fn function(&self) -> StepFunction {
        match self {
            PsiChoice::Named(PsiName::PsiStar) => rotlab::psi_star(),
            PsiChoice::Custom(f) => f.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanSpec {
    RSequence {
        n: usize,
    },
    Greedy {
        j: usize,
        /// Empty means `2^{-k}`.
        #[serde(default, with = "serde_rational_vec", skip_serializing_if = "Vec::is_empty")]
        schedule: Vec<BigRational>,
    },
}

/// Sizes of the `verify` suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    /// Sup-norm suites run over convergents with `q <= q_max`.
    pub q_max: u64,
    pub parity_index: usize,
    /// Fourier frequencies `1..=weak_null_k`.
    pub weak_null_k: u64,
    pub weak_null_index: usize,
    pub witnesses: usize,
    pub growth_n: usize,
    pub growth_p: u32,
    pub greedy_blocks: usize,
    pub greedy_horizon: u64,
    pub decorrelation_beta: f64,
    pub trend_factor: f64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            q_max: 100_000,
            parity_index: 30,
            weak_null_k: 5,
            weak_null_index: 15,
            witnesses: 5,
            growth_n: 6,
            growth_p: 4,
            greedy_blocks: 4,
            greedy_horizon: 100_000,
            decorrelation_beta: 0.5,
            trend_factor: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub alpha: QuotientSpec,
    #[serde(default)]
    pub psi: PsiChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    /// Seeds the random test functions; also the `ead` seed when given on the command line.
    #[serde(default)]
    pub seed: u64,
    /// Not part of the hashed configuration.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub verify: VerifyParams,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Command-line values win over the file.
    pub fn apply(&mut self, seed: Option<u64>, horizon: Option<u64>) {
        if let Some(s) = seed {
            self.seed = s;
            if let QuotientSpec::Ead { seed, .. } = &mut self.alpha {
                *seed = s;
            }
        }
        if horizon.is_some() {
            self.horizon = horizon;
        }
    }

    pub fn alpha(&self) -> Result<PartialQuotients> {
        Ok(PartialQuotients::new(self.alpha.clone())?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `A=5,d=2,seed=1`; a missing seed falls back to `--seed`.
pub fn parse_ead(arg: &str, fallback_seed: Option<u64>) -> Result<QuotientSpec> {
    let (mut a, mut d, mut seed) = (None, None, fallback_seed);
    for part in arg.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').with_context(|| format!("expected key=value, got {part:?}"))?;
        let v: u64 = v.trim().parse().with_context(|| format!("bad number in {part:?}"))?;
        match k.trim() {
            "A" | "a" => a = Some(v),
            "d" => d = Some(v),
            "seed" => seed = Some(v),
            other => bail!("unknown key {other:?} in --ead"),
        }
    }
    match (a, d, seed) {
        (Some(a), Some(d), Some(seed)) => Ok(QuotientSpec::Ead { a, d, seed }),
        (_, _, None) => bail!("random alpha needs a seed: --ead A=..,d=..,seed=.. or --seed"),
        _ => bail!("--ead needs A=.. and d=.."),
    }
}

/// Output directory: flag, then config, then `ROTLAB_OUT`, then `rotlab-out`.
pub fn out_dir(flag: Option<PathBuf>, cfg: Option<&ExperimentConfig>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.out.clone()))
        .or_else(|| std::env::var_os("ROTLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rotlab-out"))
}
