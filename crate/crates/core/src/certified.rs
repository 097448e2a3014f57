//! Certified real and complex enclosures.
//!
//! An [`Interval`] is a closed interval `[lo, hi] * 2^-bits` with arbitrary
//! precision integer endpoints. Every operation rounds outward, so the true
//! value of any expression evaluated with these types is always contained in
//! the result. Transcendental functions are evaluated by truncated series
//! with an explicit remainder term added to the enclosure.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of fractional bits carried by enclosures.
pub const DEFAULT_BITS: u32 = 128;

/// Extra bits used inside series evaluations before rounding back.
const GUARD_BITS: u32 = 32;

fn floor_shr(a: &BigInt, s: u32) -> BigInt {
    // num-bigint shifts of negative values round toward -inf
    a >> s
}

fn ceil_shr(a: &BigInt, s: u32) -> BigInt {
    -((-a) >> s)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Closed interval with dyadic endpoints `lo / 2^bits` and `hi / 2^bits`.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

impl Interval {
    fn raw(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, bits }
    }

    pub fn zero(bits: u32) -> Self {
        Self::raw(BigInt::zero(), BigInt::zero(), bits)
    }

    pub fn one(bits: u32) -> Self {
        Self::from_int(1, bits)
    }

    pub fn from_int(v: i64, bits: u32) -> Self {
        let m = BigInt::from(v) << bits;
        Self::raw(m.clone(), m, bits)
    }

    pub fn from_bigint(v: &BigInt, bits: u32) -> Self {
        let m = v << bits;
        Self::raw(m.clone(), m, bits)
    }

    /// Tightest dyadic enclosure of an exact rational.
    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let num = r.numer() << bits;
        let den = r.denom();
        Self::raw(num.div_floor(den), ceil_div(&num, den), bits)
    }

    /// Enclosure of `[lo, hi]` for exact rational endpoints.
    pub fn from_rational_bounds(lo: &BigRational, hi: &BigRational, bits: u32) -> Self {
        assert!(lo <= hi, "inverted rational bounds");
        let a = Self::from_rational(lo, bits);
        let b = Self::from_rational(hi, bits);
        Self::raw(a.lo, b.hi, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Re-express the interval at another precision, rounding outward.
    pub fn with_bits(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let d = bits - self.bits;
                Self::raw(&self.lo << d, &self.hi << d, bits)
            }
            Ordering::Less => {
                let d = self.bits - bits;
                Self::raw(floor_shr(&self.lo, d), ceil_shr(&self.hi, d), bits)
            }
        }
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    /// Lower endpoint rounded down to `f64`.
    pub fn lo_f64(&self) -> f64 {
        let v = self.lo_rational().to_f64().unwrap_or(f64::NEG_INFINITY);
        if self.lo.is_zero() {
            0.0
        } else {
            v.next_down()
        }
    }

    /// Upper endpoint rounded up to `f64`.
    pub fn hi_f64(&self) -> f64 {
        let v = self.hi_rational().to_f64().unwrap_or(f64::INFINITY);
        if self.hi.is_zero() {
            0.0
        } else {
            v.next_up()
        }
    }

    pub fn mid_f64(&self) -> f64 {
        let s = &self.lo + &self.hi;
        BigRational::new(s, BigInt::one() << (self.bits + 1))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn width_f64(&self) -> f64 {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << self.bits)
            .to_f64()
            .unwrap_or(f64::INFINITY)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo_rational() <= r && r <= &self.hi_rational()
    }

    /// True when every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi_rational() <= other.lo_rational()
    }

    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi_rational() < other.lo_rational()
    }

    pub fn certainly_le_rational(&self, r: &BigRational) -> bool {
        &self.hi_rational() <= r
    }

    pub fn certainly_ge_rational(&self, r: &BigRational) -> bool {
        &self.lo_rational() >= r
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    fn aligned(&self, other: &Interval) -> (Interval, Interval) {
        let b = self.bits.max(other.bits);
        (self.with_bits(b), other.with_bits(b))
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Self::raw(&a.lo + &b.lo, &a.hi + &b.hi, a.bits)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Self::raw(&a.lo - &b.hi, &a.hi - &b.lo, a.bits)
    }

    pub fn neg(&self) -> Interval {
        Self::raw(-&self.hi, -&self.lo, self.bits)
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        let bits = a.bits;
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().expect("four products");
        let max = products.iter().max().expect("four products");
        Self::raw(floor_shr(min, bits), ceil_shr(max, bits), bits)
    }

    pub fn sqr(&self) -> Interval {
        let bits = self.bits;
        let (lo2, hi2) = (&self.lo * &self.lo, &self.hi * &self.hi);
        if self.contains_zero() {
            Self::raw(BigInt::zero(), ceil_shr(&lo2.max(hi2), bits), bits)
        } else {
            let (mn, mx) = if lo2 < hi2 { (lo2, hi2) } else { (hi2, lo2) };
            Self::raw(floor_shr(&mn, bits), ceil_shr(&mx, bits), bits)
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        if k.is_negative() {
            Self::raw(&self.hi * k, &self.lo * k, self.bits)
        } else {
            Self::raw(&self.lo * k, &self.hi * k, self.bits)
        }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Interval {
        self.mul(&Interval::from_rational(r, self.bits))
    }

    /// Division by a nonzero integer.
    pub fn div_int(&self, k: &BigInt) -> Interval {
        assert!(!k.is_zero(), "division by zero");
        let (k, this) = if k.is_negative() {
            (-k, self.neg())
        } else {
            (k.clone(), self.clone())
        };
        Self::raw(this.lo.div_floor(&k), ceil_div(&this.hi, &k), this.bits)
    }

    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::Precision {
                bits: self.bits,
                what: "reciprocal of an interval containing zero".into(),
            });
        }
        let bits = self.bits;
        let one = BigInt::one() << (2 * bits);
        // 1/[lo,hi] = [1/hi, 1/lo] for intervals of constant sign
        Ok(Self::raw(one.div_floor(&self.hi), ceil_div(&one, &self.lo), bits))
    }

    pub fn div(&self, other: &Interval) -> Result<Interval> {
        let (a, b) = self.aligned(other);
        Ok(a.mul(&b.recip()?))
    }

    pub fn abs(&self) -> Interval {
        if self.contains_zero() {
            let m = (-&self.lo).max(self.hi.clone());
            Self::raw(BigInt::zero(), m, self.bits)
        } else if self.lo.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Upper bound of `|x|` over the interval, as a dyadic numerator.
    fn mag_numer(&self) -> BigInt {
        (-&self.lo).max(self.hi.clone())
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Self::raw(a.lo.min(b.lo), a.hi.max(b.hi), a.bits)
    }

    /// Maximum of two enclosures (pointwise).
    pub fn max(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Self::raw(a.lo.max(b.lo), a.hi.max(b.hi), a.bits)
    }

    pub fn min(&self, other: &Interval) -> Interval {
        let (a, b) = self.aligned(other);
        Self::raw(a.lo.min(b.lo), a.hi.min(b.hi), a.bits)
    }

    /// Square root; the negative part of the interval is clipped at zero.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.hi.is_negative() {
            return Err(Error::InvalidArgument("sqrt of a negative interval".into()));
        }
        let bits = self.bits;
        let lo = if self.lo.is_positive() {
            (&self.lo << bits).sqrt()
        } else {
            BigInt::zero()
        };
        let x = &self.hi << bits;
        let mut hi = x.sqrt();
        if &hi * &hi < x {
            hi += 1;
        }
        Ok(Self::raw(lo, hi, bits))
    }

    /// Widen symmetrically by an error bound `r >= 0`.
    fn widen(&self, r: &BigInt) -> Interval {
        Self::raw(&self.lo - r, &self.hi + r, self.bits)
    }
}

/// Enclosure of pi at `bits` fractional bits (cached per precision).
pub fn pi(bits: u32) -> Interval {
    static CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("pi cache").get(&bits) {
        return v.clone();
    }
    let work = bits + GUARD_BITS;
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_inv(5, work).mul_int(&BigInt::from(16));
    let b = atan_inv(239, work).mul_int(&BigInt::from(4));
    let v = a.sub(&b).with_bits(bits);
    cache.lock().expect("pi cache").insert(bits, v.clone());
    v
}

/// atan(1/x) for an integer x >= 2 by its alternating series.
fn atan_inv(x: u32, bits: u32) -> Interval {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = x.clone();
    let mut sum = Interval::zero(bits);
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut m: u64 = 0;
    loop {
        let term = BigRational::new(BigInt::one(), &power * BigInt::from(2 * m + 1));
        if term < eps {
            // alternating with decreasing terms: the tail is bounded by this term
            let t = Interval::from_rational(&term, bits);
            return sum.widen(&t.hi);
        }
        let t = Interval::from_rational(&term, bits);
        sum = if m.is_multiple_of(2) { sum.add(&t) } else { sum.sub(&t) };
        power *= &x2;
        m += 1;
    }
}

/// Taylor enclosures of sin and cos for |x| <= 1.
fn sin_cos_small(x: &Interval) -> (Interval, Interval) {
    let bits = x.bits;
    let x2 = x.sqr();
    let eps = BigInt::one();
    // sin
    let mut term = x.clone();
    let mut sin = Interval::zero(bits);
    let mut k: u64 = 1;
    loop {
        if term.mag_numer() <= eps {
            sin = sin.widen(&term.mag_numer());
            break;
        }
        sin = if (k / 2).is_multiple_of(2) { sin.add(&term) } else { sin.sub(&term) };
        term = term.mul(&x2).div_int(&BigInt::from((k + 1) * (k + 2)));
        k += 2;
    }
    // cos
    let mut term = Interval::one(bits);
    let mut cos = Interval::zero(bits);
    let mut k: u64 = 0;
    loop {
        if term.mag_numer() <= eps {
            cos = cos.widen(&term.mag_numer());
            break;
        }
        cos = if (k / 2).is_multiple_of(2) { cos.add(&term) } else { cos.sub(&term) };
        term = term.mul(&x2).div_int(&BigInt::from((k + 1) * (k + 2)));
        k += 2;
    }
    (sin, cos)
}

/// Enclosures of `(sin x, cos x)` for any interval `x`.
pub fn sin_cos(x: &Interval) -> (Interval, Interval) {
    let bits = x.bits;
    let work = bits + GUARD_BITS;
    let xw = x.with_bits(work);
    let p = pi(work);
    let half_pi = p.div_int(&BigInt::from(2));
    // quadrant index j = round(x / (pi/2)) from midpoints
    let mid = (&xw.lo + &xw.hi) >> 1u32;
    let hp_mid = (&half_pi.lo + &half_pi.hi) >> 1u32;
    let j = (&(mid << 1u32) + &hp_mid).div_floor(&(&hp_mid << 1u32));
    let r = xw.sub(&half_pi.mul_int(&j));
    let (s, c) = sin_cos_small(&r);
    let (s, c) = match j.mod_floor(&BigInt::from(4)).to_u8().expect("quadrant") {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    };
    let clip = |v: Interval| {
        let one = BigInt::one() << work;
        let lo = v.lo.clone().max(-one.clone());
        let hi = v.hi.clone().min(one);
        Interval::raw(lo.min(hi.clone()), hi, work)
    };
    (clip(s).with_bits(bits), clip(c).with_bits(bits))
}

/// `exp(x)` for a point-like or narrow interval.
pub fn exp(x: &Interval) -> Interval {
    let bits = x.bits;
    let lo = exp_point(&x.lo_rational(), bits);
    let hi = exp_point(&x.hi_rational(), bits);
    Interval::raw(lo.lo, hi.hi, bits)
}

fn exp_point(r: &BigRational, bits: u32) -> Interval {
    if r.is_negative() {
        let e = exp_point(&-r, bits + 8);
        return e.recip().expect("exp is positive").with_bits(bits);
    }
    // scale into [0, 1/2] and square back
    let mut s: u32 = 0;
    let mut y = r.clone();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    while y > half {
        y /= BigInt::from(2);
        s += 1;
    }
    let work = bits + GUARD_BITS + s;
    let yi = Interval::from_rational(&y, work);
    let mut term = Interval::one(work);
    let mut sum = Interval::zero(work);
    let mut n: u64 = 0;
    loop {
        if term.mag_numer() <= BigInt::one() {
            // geometric tail with ratio <= 1/2
            sum = sum.widen(&(term.mag_numer() * 2));
            break;
        }
        sum = sum.add(&term);
        n += 1;
        term = term.mul(&yi).div_int(&BigInt::from(n));
    }
    for _ in 0..s {
        sum = sum.sqr();
    }
    sum.with_bits(bits)
}

/// Standard normal CDF, monotone enclosure over the interval `x`.
pub fn normal_cdf(x: &Interval) -> Interval {
    let bits = x.bits;
    let lo = normal_cdf_point(&x.lo_rational(), bits);
    let hi = normal_cdf_point(&x.hi_rational(), bits);
    Interval::raw(lo.lo, hi.hi, bits)
}

fn normal_cdf_point(x: &BigRational, bits: u32) -> Interval {
    // Phi(x) = (1 + erf(x / sqrt 2)) / 2
    let work = bits + GUARD_BITS;
    let xi = Interval::from_rational(x, work);
    let sqrt2 = Interval::from_int(2, work).sqrt().expect("sqrt 2");
    let z = xi.div(&sqrt2).expect("sqrt 2 is positive");
    let e = erf(&z);
    e.add(&Interval::one(work))
        .div_int(&BigInt::from(2))
        .with_bits(bits)
}

/// erf over a narrow interval (monotone, so endpoints suffice).
pub fn erf(z: &Interval) -> Interval {
    let bits = z.bits;
    let lo = erf_point(&z.lo_rational(), bits);
    let hi = erf_point(&z.hi_rational(), bits);
    Interval::raw(lo.lo, hi.hi, bits)
}

fn erf_point(z: &BigRational, bits: u32) -> Interval {
    if z.is_negative() {
        return erf_point(&-z, bits).neg();
    }
    let six = BigRational::from_integer(BigInt::from(6));
    if z > &six {
        // erfc(z) <= exp(-z^2) / (z sqrt(pi)) < 2.3e-17 < 2^-55 for z > 6
        let tail = BigInt::one() << bits.saturating_sub(55);
        let one = BigInt::one() << bits;
        return Interval::raw(&one - tail, one, bits);
    }
    // terms grow up to ~exp(z^2) < 2^52 before decaying
    let work = bits + GUARD_BITS + 56;
    let zi = Interval::from_rational(z, work);
    let z2 = zi.sqr();
    let z2_ceil = z.clone() * z.clone();
    let mut a = zi.clone(); // z^(2n+1) / n!
    let mut sum = Interval::zero(work);
    let mut n: u64 = 0;
    loop {
        let term = a.div_int(&BigInt::from(2 * n + 1));
        let past_peak = BigRational::from_integer(BigInt::from(n + 1)) > z2_ceil;
        if past_peak && term.mag_numer() <= BigInt::one() {
            sum = sum.widen(&term.mag_numer());
            break;
        }
        sum = if n.is_multiple_of(2) { sum.add(&term) } else { sum.sub(&term) };
        n += 1;
        a = a.mul(&z2).div_int(&BigInt::from(n));
    }
    let sqrt_pi = pi(work).sqrt().expect("pi is positive");
    let scale = Interval::from_int(2, work).div(&sqrt_pi).expect("sqrt pi > 0");
    let v = sum.mul(&scale);
    // erf is bounded by [-1, 1]
    let one = BigInt::one() << work;
    let hi = v.hi.clone().min(one);
    Interval::raw(v.lo.clone().min(hi.clone()), hi, work).with_bits(bits)
}

/// Complex enclosure as a pair of real intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Self::new(Interval::zero(bits), Interval::zero(bits))
    }

    pub fn one(bits: u32) -> Self {
        Self::new(Interval::one(bits), Interval::zero(bits))
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &Interval) -> Self {
        let (s, c) = sin_cos(theta);
        Self::new(c, s)
    }

    /// `e^{2 pi i t}` for an exact rational `t`; reduction mod 1 is exact.
    pub fn cis_turns(t: &BigRational, bits: u32) -> Self {
        let frac = t - t.floor();
        // quarter turns are exact
        let four = &frac * BigInt::from(4);
        if four.is_integer() {
            let (re, im) = match four.to_integer().to_u8().expect("0..4") {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            return Self::new(Interval::from_int(re, bits), Interval::from_int(im, bits));
        }
        let work = bits + GUARD_BITS;
        let theta = pi(work)
            .mul_int(&BigInt::from(2))
            .mul(&Interval::from_rational(&frac, work));
        let z = Self::cis(&theta);
        Self::new(z.re.with_bits(bits), z.im.with_bits(bits))
    }

    /// `e^{2 pi i t}` for `t` in a rational interval.
    pub fn cis_turns_interval(t: &RationalInterval, bits: u32) -> Self {
        let shift = t.lo.floor();
        let work = bits + GUARD_BITS;
        let iv = Interval::from_rational_bounds(&(&t.lo - &shift), &(&t.hi - &shift), work);
        let theta = pi(work).mul_int(&BigInt::from(2)).mul(&iv);
        let z = Self::cis(&theta);
        Self::new(z.re.with_bits(bits), z.im.with_bits(bits))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Self::new(re, im)
    }

    pub fn scale(&self, s: &Interval) -> Self {
        Self::new(self.re.mul(s), self.im.mul(s))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    /// `|z|^2`.
    pub fn norm_sq(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Interval {
        self.norm_sq().sqrt().expect("norm is nonnegative")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        let d = o.norm_sq();
        let n = self.mul(&o.conj());
        Ok(Self::new(n.re.div(&d)?, n.im.div(&d)?))
    }

    pub fn bits(&self) -> u32 {
        self.re.bits().max(self.im.bits())
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        Self::new(self.re.with_bits(bits), self.im.with_bits(bits))
    }
}

/// Exact closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RationalInterval {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        if a <= b {
            RationalInterval { lo: a, hi: b }
        } else {
            RationalInterval { lo: b, hi: a }
        }
    }

    pub fn point(v: BigRational) -> Self {
        RationalInterval { lo: v.clone(), hi: v }
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Multiply by an exact rational.
    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.lo * k, &self.hi * k)
    }

    pub fn shift(&self, c: &BigRational) -> Self {
        Self::new(&self.lo + c, &self.hi + c)
    }

    pub fn to_interval(&self, bits: u32) -> Interval {
        Interval::from_rational_bounds(&self.lo, &self.hi, bits)
    }
}

/// Serializable rendering of a certified real: outward-rounded `f64` bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl From<&Interval> for Bounds {
    fn from(v: &Interval) -> Self {
        Bounds {
            lo: v.lo_f64(),
            hi: v.hi_f64(),
        }
    }
}

impl Bounds {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Sign of an exact rational as a `std::cmp::Ordering` against zero.
pub fn sign_of(r: &BigRational) -> Ordering {
    match r.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}
