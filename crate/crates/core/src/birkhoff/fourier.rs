//! Certified Fourier coefficients of `psi` and `y_n`, and the Parseval check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certified::{pi, ComplexInterval, Interval, DEFAULT_BITS};
use crate::error::{Error, Result};
use crate::exact;
use crate::stepfun::StepFunction;

use super::BirkhoffConfig;

/// Largest working precision tried before giving up.
const MAX_BITS: u32 = 1024;

/// Consecutive values `e^{2 pi i k t}`, re-anchored exactly every few steps
/// so that rectangular wrapping never compounds for long.
struct PhaseWalker {
    t: BigRational,
    bits: u32,
    k: i64,
    cur: ComplexInterval,
    unit: ComplexInterval,
}

const ANCHOR: i64 = 16;

impl PhaseWalker {
    fn new(t: BigRational, k0: i64, bits: u32) -> Self {
        let cur = ComplexInterval::cis_turns(&(&t * BigInt::from(k0)), bits);
        let unit = ComplexInterval::cis_turns(&t, bits);
        PhaseWalker { t, bits, k: k0, cur, unit }
    }

    fn value(&self) -> &ComplexInterval {
        &self.cur
    }

    fn advance(&mut self) {
        self.k += 1;
        self.cur = if self.k % ANCHOR == 0 {
            ComplexInterval::cis_turns(&(&self.t * BigInt::from(self.k)), self.bits)
        } else {
            self.cur.mul(&self.unit)
        };
    }
}

/// `sum_i J_i e^{-2 pi i k b_i}` over the jumps of `psi`.
fn jump_sum(psi: &StepFunction, k: i64, bits: u32) -> ComplexInterval {
    let scale = BigInt::from(psi.scale());
    let mut s = ComplexInterval::zero(bits);
    for (b, j) in psi.breakpoints().iter().zip(psi.jumps()) {
        let z = ComplexInterval::cis_turns(&(-b * BigInt::from(k)), bits);
        let w = Interval::from_rational(&BigRational::new(j.into(), scale.clone()), bits);
        s = s.add(&z.scale(&w));
    }
    s
}

/// `hat u(k) = (1 / 2 pi i k) sum_i J_i e^{-2 pi i k b_i}` from the jump sum.
fn from_jump_sum(s: &ComplexInterval, k: i64, bits: u32) -> ComplexInterval {
    let two_pi_k = pi(bits).mul_int(&BigInt::from(2 * k));
    // (a + ib) / (i c) = b/c - i a/c
    let re = s.im.div(&two_pi_k).expect("k != 0");
    let im = s.re.neg().div(&two_pi_k).expect("k != 0");
    ComplexInterval::new(re, im)
}

/// `hat psi(k)`; `k = 0` gives the mean.
pub fn fourier_psi(psi: &StepFunction, k: i64) -> ComplexInterval {
    fourier_psi_bits(psi, k, DEFAULT_BITS)
}

pub(crate) fn fourier_psi_bits(psi: &StepFunction, k: i64, bits: u32) -> ComplexInterval {
    if k == 0 {
        return ComplexInterval::new(Interval::from_rational(&psi.integral(), bits), Interval::zero(bits));
    }
    from_jump_sum(&jump_sum(psi, k, bits), k, bits)
}

/// `hat y_n(k) = hat psi(k) (1 - e^{2 pi i n k gamma}) / (1 - e^{2 pi i k gamma})`
/// for the shadow rotation `gamma = P/Q`.
pub fn fourier_y(cfg: &BirkhoffConfig, n: u64, k: i64) -> Result<ComplexInterval> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument("fourier_y needs k != 0 and n >= 1".into()));
    }
    cfg.ensure(n)?;
    let gamma = cfg.shadow().value();
    let q = cfg.shadow().q as i64;
    let mut bits = DEFAULT_BITS;
    loop {
        let psi_hat = fourier_psi_bits(cfg.psi(), k, bits);
        if k % q == 0 {
            let nn = Interval::from_int(n as i64, bits);
            return Ok(psi_hat.scale(&nn));
        }
        let kg = &gamma * BigInt::from(k);
        let one = ComplexInterval::one(bits);
        let num = one.sub(&ComplexInterval::cis_turns(&(&kg * BigInt::from(n)), bits));
        let den = one.sub(&ComplexInterval::cis_turns(&kg, bits));
        if let Ok(r) = num.div(&den) {
            return Ok(psi_hat.mul(&r).with_bits(DEFAULT_BITS));
        }
        bits *= 2;
        if bits > MAX_BITS {
            return Err(Error::Precision { bits, what: format!("1 - e^(2 pi i k gamma) at k = {k}") });
        }
    }
}

/// JSON record of a Fourier enclosure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierRecord {
    pub k: i64,
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl FourierRecord {
    pub fn new(k: i64, z: &ComplexInterval) -> Self {
        FourierRecord {
            k,
            re_lo: z.re.lo_f64(),
            re_hi: z.re.hi_f64(),
            im_lo: z.im.lo_f64(),
            im_hi: z.im.hi_f64(),
        }
    }
}

/// Enclosure of `||y_n||_2^2` from the coefficients `0 < |k| <= K` plus a tail bound.
#[derive(Clone, Debug)]
pub struct ParsevalBound {
    pub k_max: u64,
    pub partial: Interval,
    pub tail: BigRational,
}

impl ParsevalBound {
    pub fn lo(&self) -> BigRational {
        self.partial.lo_rational()
    }

    pub fn hi(&self) -> BigRational {
        self.partial.hi_rational() + &self.tail
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo() <= x && x <= &self.hi()
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }
}

const CHUNK: u64 = 2048;

/// Parseval enclosure of `||y_n||_2^2`. The tail uses `|hat y_n(k)| <= n Var(psi) / (2 pi |k|)`
/// and `sum_{k > K} 1/k^2 <= 1/K`.
pub fn l2_via_parseval(cfg: &BirkhoffConfig, n: u64, k_max: u64) -> Result<ParsevalBound> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("K must be >= 1".into()));
    }
    cfg.ensure(n)?;
    let bits = DEFAULT_BITS + 32;
    let psi = cfg.psi();
    let scale = BigInt::from(psi.scale());
    let jumps: Vec<Interval> = psi
        .jumps()
        .iter()
        .map(|&j| Interval::from_rational(&BigRational::new(j.into(), scale.clone()), bits))
        .collect();
    let gamma = cfg.shadow().value();
    let q = cfg.shadow().q;
    let nn = BigInt::from(n);
    let n_sq = Interval::from_bigint(&(&nn * &nn), bits);

    let chunks: Vec<(u64, u64)> = (0..k_max.div_ceil(CHUNK))
        .map(|c| (1 + c * CHUNK, (1 + (c + 1) * CHUNK).min(k_max + 1)))
        .collect();
    let partials: Vec<Result<Interval>> = chunks
        .par_iter()
        .map(|&(k0, k1)| {
            let mut z = PhaseWalker::new(gamma.clone(), k0 as i64, bits);
            let mut w = PhaseWalker::new(&gamma * &nn, k0 as i64, bits);
            let mut phases: Vec<PhaseWalker> = psi
                .breakpoints()
                .iter()
                .map(|b| PhaseWalker::new(-b, k0 as i64, bits))
                .collect();
            let mut acc = Interval::zero(bits);
            for k in k0..k1 {
                let mut s = ComplexInterval::zero(bits);
                for (ph, j) in phases.iter().zip(&jumps) {
                    s = s.add(&ph.value().scale(j));
                }
                // |S_k|^2 / k^2 times the geometric factor
                let mag = s.norm_sq();
                if !mag.contains_zero() || !mag.hi_rational().is_zero() {
                    let factor = if k % q == 0 {
                        n_sq.clone()
                    } else {
                        let one = Interval::one(bits);
                        let num = one.sub(&w.value().re);
                        let den = one.sub(&z.value().re);
                        num.div(&den).map_err(|_| Error::Precision {
                            bits,
                            what: format!("|1 - e^(2 pi i k gamma)| at k = {k}"),
                        })?
                    };
                    let kk = BigInt::from(k) * BigInt::from(k);
                    acc = acc.add(&mag.mul(&factor).div_int(&kk));
                }
                z.advance();
                w.advance();
                phases.iter_mut().for_each(PhaseWalker::advance);
            }
            Ok(acc)
        })
        .collect();
    let mut total = Interval::zero(bits);
    for p in partials {
        total = total.add(&p?);
    }
    // both signs of k, and |hat psi|^2 = |S|^2 / (4 pi^2 k^2)
    let pi2 = pi(bits).sqr();
    let partial = total
        .div(&pi2.mul_int(&BigInt::from(2)))
        .expect("pi^2 > 0")
        .with_bits(DEFAULT_BITS);
    let var = psi.variation() * BigInt::from(n);
    // pi^2 > 9.8696
    let pi2_lo = exact::rat(98_696, 10_000);
    let tail = &var * &var / (BigRational::from_integer(BigInt::from(2 * k_max)) * pi2_lo);
    debug_assert!(!tail.is_negative());
    Ok(ParsevalBound { k_max, partial, tail })
}
