//! Comparison of exact atomic laws with centred Gaussians `g(sigma)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::certified::{exp, normal_cdf, sin_cos, Bounds, ComplexInterval, Interval, DEFAULT_BITS};
use crate::error::{Error, Result};
use crate::stepfun::ValueDistribution;

/// Centred Gaussian reference with a certified standard deviation.
#[derive(Clone, Debug)]
pub struct GaussianRef {
    sigma: Interval,
}

impl GaussianRef {
    pub fn new(sigma: Interval) -> Result<Self> {
        if !sigma.is_positive() {
            return Err(Error::InvalidArgument("sigma must be certainly positive".into()));
        }
        Ok(GaussianRef { sigma })
    }

    pub fn standard() -> Self {
        GaussianRef { sigma: Interval::one(DEFAULT_BITS) }
    }

    /// `g(sqrt(var))` for an exact positive variance.
    pub fn from_variance(var: &BigRational) -> Result<Self> {
        Self::new(Interval::from_rational(var, DEFAULT_BITS).sqrt()?)
    }

    pub fn sigma(&self) -> &Interval {
        &self.sigma
    }
}

/// A law whose atoms `v` stand for the values `v / sqrt(divisor)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledLaw {
    pub law: ValueDistribution,
    pub divisor: u64,
}

impl ScaledLaw {
    pub fn new(law: ValueDistribution, divisor: u64) -> Result<Self> {
        if divisor == 0 {
            return Err(Error::InvalidArgument("divisor must be >= 1".into()));
        }
        Ok(ScaledLaw { law, divisor })
    }

    pub fn unscaled(law: ValueDistribution) -> Self {
        ScaledLaw { law, divisor: 1 }
    }

    fn sqrt_divisor(&self, bits: u32) -> Interval {
        Interval::from_int(self.divisor as i64, bits).sqrt().expect("positive")
    }

    /// Atom positions `v / sqrt(d)` as certified reals.
    pub fn positions(&self, bits: u32) -> Vec<Interval> {
        let s = self.sqrt_divisor(bits);
        self.law
            .atoms()
            .iter()
            .map(|a| Interval::from_rational(&a.value, bits).div(&s).expect("sqrt d > 0"))
            .collect()
    }

    /// Exact moment of even order `k`: `sum v^k mass / d^{k/2}`.
    pub fn even_moment(&self, k: u32) -> BigRational {
        assert!(k.is_multiple_of(2), "even order only");
        let m = self.law.moments(k).pop().unwrap_or_else(BigRational::zero);
        m / BigRational::from_integer(BigInt::from(self.divisor).pow(k / 2))
    }

    /// Certified moment of any order.
    pub fn moment(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::one(DEFAULT_BITS);
        }
        if k.is_multiple_of(2) {
            return Interval::from_rational(&self.even_moment(k), DEFAULT_BITS);
        }
        let m = self.law.moments(k).pop().unwrap_or_else(BigRational::zero);
        let d = BigInt::from(self.divisor).pow(k / 2);
        Interval::from_rational(&(m / BigRational::from_integer(d)), DEFAULT_BITS)
            .div(&self.sqrt_divisor(DEFAULT_BITS))
            .expect("sqrt d > 0")
    }

    /// Largest `|v| / sqrt(d)` over the support.
    pub fn support_radius(&self) -> Interval {
        let m = self.law.support_max_abs();
        Interval::from_rational(&m, DEFAULT_BITS)
            .div(&self.sqrt_divisor(DEFAULT_BITS))
            .expect("sqrt d > 0")
    }

    /// CSV rows of atoms `value_num / sqrt(value_den_sqrt_n)` with exact masses,
    /// where `value_den_sqrt_n = den^2 * divisor`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["value_num", "value_den_sqrt_n", "mass_num", "mass_den"])?;
        for a in self.law.atoms() {
            let den = a.value.denom() * a.value.denom() * BigInt::from(self.divisor);
            wr.write_record([
                a.value.numer().to_string(),
                den.to_string(),
                a.mass.numer().to_string(),
                a.mass.denom().to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Kolmogorov distance `sup_x |F(x) - Phi(x / sigma)|` between an atomic law
/// and `g(sigma)`, checked at both one-sided limits of every atom.
pub fn ks_distance(law: &ValueDistribution, reference: &GaussianRef) -> Interval {
    ks_distance_scaled(&ScaledLaw::unscaled(law.clone()), reference)
}

pub fn ks_distance_scaled(law: &ScaledLaw, reference: &GaussianRef) -> Interval {
    let bits = DEFAULT_BITS;
    let sigma = reference.sigma.with_bits(bits);
    let mut below = BigRational::zero();
    let mut best = Interval::zero(bits);
    for (atom, x) in law.law.atoms().iter().zip(law.positions(bits)) {
        let phi = normal_cdf(&x.div(&sigma).expect("sigma > 0"));
        let above = &below + &atom.mass;
        for f in [&below, &above] {
            let gap = Interval::from_rational(f, bits).sub(&phi).abs();
            best = best.max(&gap);
        }
        below = above;
    }
    debug_assert!(below.is_one());
    best
}

/// Exact moments `m_1 ..= m_max_order`.
pub fn moments(law: &ValueDistribution, max_order: u32) -> Result<Vec<BigRational>> {
    if max_order == 0 {
        return Err(Error::InvalidArgument("max_order must be >= 1".into()));
    }
    Ok(law.moments(max_order))
}

/// `E e^{i lambda X}` for the law.
pub fn char_fn(law: &ValueDistribution, lambda: &BigRational) -> ComplexInterval {
    char_fn_scaled(&ScaledLaw::unscaled(law.clone()), lambda)
}

pub fn char_fn_scaled(law: &ScaledLaw, lambda: &BigRational) -> ComplexInterval {
    let bits = DEFAULT_BITS;
    let l = Interval::from_rational(lambda, bits);
    let mut acc = ComplexInterval::zero(bits);
    for (atom, x) in law.law.atoms().iter().zip(law.positions(bits)) {
        let (s, c) = sin_cos(&l.mul(&x));
        let m = Interval::from_rational(&atom.mass, bits);
        acc = acc.add(&ComplexInterval::new(c.mul(&m), s.mul(&m)));
    }
    acc
}

/// `e^{-lambda^2 sigma^2 / 2}`.
pub fn gaussian_char(lambda: &BigRational, sigma: &Interval) -> Interval {
    let bits = DEFAULT_BITS;
    let l = Interval::from_rational(lambda, bits);
    let t = l.mul(&sigma.with_bits(bits)).sqr().div_int(&BigInt::from(-2));
    exp(&t)
}

/// `|E e^{i lambda X} - e^{-lambda^2 sigma^2 / 2}|`.
pub fn char_gap(law: &ScaledLaw, lambda: &BigRational, sigma: &Interval) -> Interval {
    let phi = char_fn_scaled(law, lambda);
    let g = gaussian_char(lambda, sigma);
    ComplexInterval::new(phi.re.sub(&g), phi.im).abs()
}

/// Decimal rendering used in tables.
pub fn render(v: &Interval) -> Bounds {
    Bounds::from(v)
}
