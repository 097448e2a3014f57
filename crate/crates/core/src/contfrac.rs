//! Continued fractions of quotient-defined irrationals `alpha = [0; a_1, a_2, ...]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certified::RationalInterval;
use crate::error::{Error, Result};
use crate::exact::{self, lcm_checked, serde_rational, GRID_MAX};
use crate::stepfun::StepFunction;

/// How the partial quotients `a_1, a_2, ...` are produced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuotientSpec {
    /// A finite prefix; asking for more quotients is an error.
    Explicit { quotients: Vec<u64> },
    /// `preperiod` followed by `period` repeated forever.
    Periodic {
        #[serde(default)]
        preperiod: Vec<u64>,
        period: Vec<u64>,
    },
    /// Uniform draws from `[a, d*a]` with a ChaCha8 stream seeded by `seed`.
    Ead { a: u64, d: u64, seed: u64 },
}

/// Validated partial-quotient source. `a_0` is always 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuotientSpec", into = "QuotientSpec")]
pub struct PartialQuotients {
    spec: QuotientSpec,
}

impl TryFrom<QuotientSpec> for PartialQuotients {
    type Error = Error;

    fn try_from(spec: QuotientSpec) -> Result<Self> {
        PartialQuotients::new(spec)
    }
}

impl From<PartialQuotients> for QuotientSpec {
    fn from(p: PartialQuotients) -> Self {
        p.spec
    }
}

impl PartialQuotients {
    pub fn new(spec: QuotientSpec) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidQuotients(m.to_string()));
        match &spec {
            QuotientSpec::Explicit { quotients } => {
                if quotients.is_empty() {
                    return bad("explicit list is empty");
                }
                if quotients.contains(&0) {
                    return bad("partial quotients must be >= 1");
                }
            }
            QuotientSpec::Periodic { preperiod, period } => {
                if period.is_empty() {
                    return bad("period is empty");
                }
                if preperiod.contains(&0) || period.contains(&0) {
                    return bad("partial quotients must be >= 1");
                }
            }
            QuotientSpec::Ead { a, d, .. } => {
                if *a == 0 || *d == 0 {
                    return bad("E(A,d) needs A >= 1 and d >= 1");
                }
                if a.checked_mul(*d).is_none() {
                    return bad("d*A overflows");
                }
            }
        }
        Ok(PartialQuotients { spec })
    }

    /// `[0; 1, 1, 1, ...]`, the golden mean minus one.
    pub fn golden() -> Self {
        Self::constant(1)
    }

    /// `[0; a, a, a, ...]`.
    pub fn constant(a: u64) -> Self {
        Self::new(QuotientSpec::Periodic { preperiod: vec![], period: vec![a.max(1)] })
            .expect("valid periodic spec")
    }

    pub fn explicit(quotients: Vec<u64>) -> Result<Self> {
        Self::new(QuotientSpec::Explicit { quotients })
    }

    pub fn ead(a: u64, d: u64, seed: u64) -> Result<Self> {
        Self::new(QuotientSpec::Ead { a, d, seed })
    }

    pub fn spec(&self) -> &QuotientSpec {
        &self.spec
    }

    pub fn is_random(&self) -> bool {
        matches!(self.spec, QuotientSpec::Ead { .. })
    }

    /// Number of quotients available, `None` when unbounded.
    pub fn available(&self) -> Option<usize> {
        match &self.spec {
            QuotientSpec::Explicit { quotients } => Some(quotients.len()),
            _ => None,
        }
    }

    /// `a_1, ..., a_len`.
    pub fn prefix(&self, len: usize) -> Result<Vec<u64>> {
        match &self.spec {
            QuotientSpec::Explicit { quotients } => {
                if len > quotients.len() {
                    return Err(Error::QuotientsExhausted { requested: len, available: quotients.len() });
                }
                Ok(quotients[..len].to_vec())
            }
            QuotientSpec::Periodic { preperiod, period } => Ok((0..len)
                .map(|i| {
                    if i < preperiod.len() {
                        preperiod[i]
                    } else {
                        period[(i - preperiod.len()) % period.len()]
                    }
                })
                .collect()),
            QuotientSpec::Ead { a, d, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..len).map(|_| rng.random_range(*a..=a * d)).collect())
            }
        }
    }
}

/// `p_n / q_n`, the `n`-th convergent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub index: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }

    pub fn q_is_odd(&self) -> bool {
        self.q.is_odd()
    }
}

/// Convergents `0..=n`.
pub fn convergents(pq: &PartialQuotients, n: usize) -> Result<Vec<Convergent>> {
    let a = pq.prefix(n)?;
    Ok(convergents_from(&a))
}

fn convergents_from(a: &[u64]) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(a.len() + 1);
    // seeds p_{-1} = 1, q_{-1} = 0 and p_0 = a_0 = 0, q_0 = 1
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::zero(), BigInt::one());
    out.push(Convergent { index: 0, p: p.clone(), q: q.clone() });
    for (i, &ai) in a.iter().enumerate() {
        let ai = BigInt::from(ai);
        let p_next = &ai * &p + &p_prev;
        let q_next = &ai * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push(Convergent { index: i + 1, p: p.clone(), q: q.clone() });
    }
    out
}

/// Partial quotients and convergents up to a fixed depth.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub quotients: Vec<u64>,
    pub convergents: Vec<Convergent>,
}

impl Expansion {
    pub fn new(pq: &PartialQuotients, depth: usize) -> Result<Self> {
        let quotients = pq.prefix(depth)?;
        let convergents = convergents_from(&quotients);
        Ok(Expansion { quotients, convergents })
    }

    /// Deepest convergent index available.
    pub fn depth(&self) -> usize {
        self.quotients.len()
    }

    /// `alpha` lies strictly between the convergents of order `m - 1` and `m`.
    pub fn alpha_enclosure(&self, m: usize) -> Result<RationalInterval> {
        if m == 0 || m > self.depth() {
            return Err(Error::InsufficientPrecision { required: m.max(1), given: self.depth() });
        }
        Ok(RationalInterval::new(self.convergents[m - 1].value(), self.convergents[m].value()))
    }

    /// `beta_n = q_n^2 |alpha - p_n/q_n|` with `alpha` enclosed at `order`.
    pub fn quality(&self, n: usize, order: usize) -> Result<ApproxQuality> {
        let beta = self.beta(n, order)?;
        let half = exact::rat(1, 2);
        let below_half = if beta.hi < half {
            true
        } else if beta.lo >= half {
            false
        } else {
            return Err(Error::InsufficientPrecision { required: order + 2, given: order });
        };
        Ok(ApproxQuality { index: n, value: beta.lo.clone(), beta, below_half })
    }

    /// Enclosure of `beta_n` from the enclosure of alpha at `order > n + 2`.
    pub fn beta(&self, n: usize, order: usize) -> Result<RationalInterval> {
        if order <= n + 2 {
            return Err(Error::InsufficientPrecision { required: n + 3, given: order });
        }
        let enc = self.alpha_enclosure(order)?;
        let c = &self.convergents[n];
        let target = c.value();
        let q2 = BigRational::from_integer(&c.q * &c.q);
        let at = |x: &BigRational| (x - &target).abs() * &q2;
        Ok(RationalInterval::new(at(&enc.lo), at(&enc.hi)))
    }

    /// Quality at the deepest order, growing `order` is up to the caller.
    pub fn quality_auto(&self, n: usize) -> Result<ApproxQuality> {
        self.quality(n, self.depth())
    }
}

/// Certified `beta_n`. The enclosure `beta` contains the true value, `value` is its lower end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxQuality {
    pub index: usize,
    pub value: BigRational,
    pub beta: RationalInterval,
    /// Strict `beta < 1/2`.
    pub below_half: bool,
}

/// Certified approximation constant of the `n`-th convergent.
pub fn approx_quality(pq: &PartialQuotients, n: usize, precision_order: usize) -> Result<ApproxQuality> {
    if precision_order <= n + 2 {
        return Err(Error::InsufficientPrecision { required: n + 3, given: precision_order });
    }
    Expansion::new(pq, precision_order)?.quality(n, precision_order)
}

/// Rational enclosure of alpha from the convergents of order `m - 1` and `m`.
pub fn alpha_enclosure(pq: &PartialQuotients, m: usize) -> Result<RationalInterval> {
    Expansion::new(pq, m)?.alpha_enclosure(m)
}

/// Distance to the nearest integer.
pub fn circle_norm(x: &BigRational) -> BigRational {
    let f = exact::frac(x);
    let g = BigRational::one() - &f;
    f.min(g)
}

/// Enclosure of `|x|_T` for `x` in an interval.
pub fn circle_norm_interval(x: &RationalInterval) -> RationalInterval {
    let half = exact::rat(1, 2);
    if x.width() >= BigRational::one() {
        return RationalInterval::new(BigRational::zero(), half);
    }
    let shift = x.lo.floor();
    let lo = &x.lo - &shift;
    let hi = &x.hi - &shift;
    let (a, b) = (circle_norm(&lo), circle_norm(&hi));
    let one = BigRational::one();
    let contains = |p: &BigRational| &lo <= p && p <= &hi;
    let min = if contains(&one) || lo.is_zero() { BigRational::zero() } else { a.clone().min(b.clone()) };
    let max = if contains(&half) || contains(&exact::rat(3, 2)) { half } else { a.max(b) };
    RationalInterval::new(min, max)
}

/// Convergents of index `<= n` with odd denominator and `beta < 1/2`.
pub fn odd_good_convergents(pq: &PartialQuotients, n: usize, precision_order: usize) -> Result<Vec<Convergent>> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("need N >= 4, got {n}")));
    }
    if precision_order <= n + 2 {
        return Err(Error::InsufficientPrecision { required: n + 3, given: precision_order });
    }
    let exp = Expansion::new(pq, precision_order)?;
    let mut out = Vec::new();
    for i in 0..=n {
        let c = &exp.convergents[i];
        if c.q_is_odd() && exp.quality(i, precision_order)?.below_half {
            out.push(c.clone());
        }
    }
    Ok(out)
}

/// Certified lower bound of `min_{1<=k<=n} k |k alpha|_T`.
pub fn constant_type_bound(pq: &PartialQuotients, n: u64, precision_order: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("need N >= 1".into()));
    }
    let enc = alpha_enclosure(pq, precision_order)?;
    let mut best: Option<BigRational> = None;
    for k in 1..=n {
        let kk = BigRational::from_integer(BigInt::from(k));
        let norm = circle_norm_interval(&enc.scale(&kk));
        let v = norm.lo * kk;
        if v.is_zero() {
            return Err(Error::InsufficientPrecision { required: precision_order + 2, given: precision_order });
        }
        best = Some(match best {
            Some(b) if b <= v => b,
            _ => v,
        });
    }
    Ok(best.expect("n >= 1"))
}

/// A convergent `P/Q` used as an exact stand-in for alpha up to `horizon` iterates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowRational {
    pub order: usize,
    pub p: u64,
    pub q: u64,
    pub horizon: u64,
    /// Common grid denominator of the shadow rotation and the observable.
    pub grid: u64,
    #[serde(with = "serde_rational")]
    pub margin: BigRational,
}

impl ShadowRational {
    /// Smallest-order convergent with `Q > horizon^2` and positive separation margin
    /// with respect to the breakpoints of `psi`.
    pub fn certify(alpha: &PartialQuotients, psi: &StepFunction, horizon: u64) -> Result<Self> {
        let h = horizon.max(1) as u128;
        let need = h * h;
        let mut depth = 16;
        let exp = loop {
            let exp = Expansion::new(alpha, depth)?;
            if exp.convergents[..depth].iter().any(|c| c.q > BigInt::from(need)) {
                break exp;
            }
            depth *= 2;
            if depth > 4096 {
                return Err(Error::ShadowFailure("no convergent large enough".into()));
            }
        };
        let first = exp
            .convergents
            .iter()
            .position(|c| c.q > BigInt::from(need))
            .expect("found above");
        const EXTRA_ORDERS: usize = 6;
        for m in first..(first + EXTRA_ORDERS).min(exp.depth()) {
            let c = &exp.convergents[m];
            let next = &exp.convergents[m + 1];
            let (Some(p), Some(q)) = (c.p.to_u64(), c.q.to_u64()) else {
                return Err(Error::GridOverflow("shadow denominator exceeds u64".into()));
            };
            let grid = lcm_checked(psi.grid(), q)
                .filter(|&g| g <= GRID_MAX)
                .ok_or_else(|| Error::GridOverflow(format!("grid lcm({}, {q}) exceeds 2^62", psi.grid())))?;
            let margin = separation_margin(psi, p, q, grid, horizon, &next.q);
            if margin.is_positive() {
                return Ok(ShadowRational { order: m, p, q, horizon, grid, margin });
            }
        }
        Err(Error::ShadowFailure(format!(
            "no positive margin among orders {first}..{}",
            first + EXTRA_ORDERS
        )))
    }

    pub fn value(&self) -> BigRational {
        exact::ratio_u(self.p as u128, self.q as u128)
    }

    /// Rotation step on the common grid: `P/Q = step/grid`.
    pub fn step(&self) -> u64 {
        self.p * (self.grid / self.q)
    }

    pub fn check(&self, n: u64) -> Result<()> {
        if n > self.horizon {
            return Err(Error::HorizonExceeded { required: n, horizon: self.horizon });
        }
        Ok(())
    }
}

/// `min_{1<=k<=N} dist(kP/Q, D) - N / (Q Q')` where `D` holds the pairwise
/// breakpoint differences of `psi` modulo 1.
fn separation_margin(psi: &StepFunction, p: u64, q: u64, grid: u64, horizon: u64, q_next: &BigInt) -> BigRational {
    let m = grid / psi.grid();
    let bps: Vec<u64> = psi.breaks().iter().map(|&b| b * m).collect();
    let mut diffs: Vec<u64> = Vec::new();
    for &a in &bps {
        for &b in &bps {
            diffs.push((a + grid - b) % grid);
        }
    }
    diffs.sort_unstable();
    diffs.dedup();
    let step = p * (grid / q);
    let mut x: u64 = 0;
    let mut best = grid;
    for _ in 0..horizon {
        x += step;
        if x >= grid {
            x -= grid;
        }
        for &d in &diffs {
            let dd = x.abs_diff(d);
            let dist = dd.min(grid - dd);
            if dist < best {
                best = dist;
            }
        }
    }
    let drift = BigRational::new(BigInt::from(horizon), BigInt::from(q) * q_next);
    exact::ratio_u(best as u128, grid as u128) - drift
}
