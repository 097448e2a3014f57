//! Exact step functions on the circle `T = R/Z`.
//!
//! A [`StepFunction`] stores its breakpoints as integers over a common grid
//! denominator and its values as integers over a common value denominator.
//! The value `values[i] / scale` holds on `[breaks[i], breaks[i+1]) / grid`,
//! the last piece wrapping around through 0. The canonical form has adjacent
//! values distinct (cyclically), the grid and value denominators reduced, and
//! a constant function is the single breakpoint 0.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, lcm_checked, serde_rational, RationalRepr, GRID_MAX};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    grid: u64,
    scale: i64,
    breaks: Vec<u64>,
    values: Vec<i64>,
}

fn overflow(what: &str) -> Error {
    Error::GridOverflow(what.to_string())
}

/// Drop breakpoints whose value equals the previous one (cyclically).
pub(crate) fn canonicalize(breaks: Vec<u64>, values: Vec<i64>) -> (Vec<u64>, Vec<i64>) {
    let n = values.len();
    if n == 0 {
        return (vec![0], vec![0]);
    }
    let mut ob = Vec::with_capacity(n);
    let mut ov = Vec::with_capacity(n);
    for i in 0..n {
        let prev = values[(i + n - 1) % n];
        if values[i] != prev {
            ob.push(breaks[i]);
            ov.push(values[i]);
        }
    }
    if ob.is_empty() {
        (vec![0], vec![values[0]])
    } else {
        (ob, ov)
    }
}

/// Pointwise combination of two cyclic functions on the same grid.
pub(crate) fn merge_raw(
    ab: &[u64],
    av: &[i64],
    bb: &[u64],
    bv: &[i64],
    op: impl Fn(i64, i64) -> Option<i64>,
) -> Result<(Vec<u64>, Vec<i64>)> {
    let mut ob = Vec::with_capacity(ab.len() + bb.len());
    let mut ov = Vec::with_capacity(ab.len() + bb.len());
    let (mut i, mut j) = (0, 0);
    let mut ca = *av.last().expect("nonempty");
    let mut cb = *bv.last().expect("nonempty");
    while i < ab.len() || j < bb.len() {
        let x = match (ab.get(i), bb.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if ab.get(i) == Some(&x) {
            ca = av[i];
            i += 1;
        }
        if bb.get(j) == Some(&x) {
            cb = bv[j];
            j += 1;
        }
        ob.push(x);
        ov.push(op(ca, cb).ok_or_else(|| overflow("value numerator exceeds i64"))?);
    }
    Ok(canonicalize(ob, ov))
}

/// `f(x + shift/grid)` for a cyclic function on the given grid.
pub(crate) fn rotate_raw(breaks: &[u64], values: &[i64], shift: u64, grid: u64) -> (Vec<u64>, Vec<i64>) {
    let shift = shift % grid;
    let n = breaks.len();
    let k = breaks.partition_point(|&b| b < shift);
    let mut nb = Vec::with_capacity(n);
    let mut nv = Vec::with_capacity(n);
    for idx in (k..n).chain(0..k) {
        let b = breaks[idx];
        nb.push(if b >= shift { b - shift } else { b + grid - shift });
        nv.push(values[idx]);
    }
    (nb, nv)
}

/// Value at a grid position of a cyclic function.
pub(crate) fn value_at_raw(breaks: &[u64], values: &[i64], x: u64) -> i64 {
    match breaks.partition_point(|&b| b <= x) {
        0 => *values.last().expect("nonempty"),
        i => values[i - 1],
    }
}

impl StepFunction {
    /// Build from rational breakpoints in `[0, 1)` and the values that start at them.
    pub fn new(breakpoints: &[BigRational], values: &[BigRational]) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidStepFunction("breakpoints not strictly increasing".into()));
            }
        }
        if breakpoints[0] < zero || breakpoints[breakpoints.len() - 1] >= one {
            return Err(Error::InvalidStepFunction("breakpoints must lie in [0, 1)".into()));
        }
        let grid = denominators_lcm(breakpoints)?;
        let scale = denominators_lcm(values)?;
        let scale = i64::try_from(scale).map_err(|_| overflow("value denominator exceeds i64"))?;
        let breaks = breakpoints
            .iter()
            .map(|b| {
                (b * BigInt::from(grid))
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| overflow("breakpoint"))
            })
            .collect::<Result<Vec<_>>>()?;
        let vals = values
            .iter()
            .map(|v| {
                (v * BigInt::from(scale))
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| overflow("value numerator exceeds i64"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_grid(grid, breaks, vals, scale)
    }

    /// Build from integer data: breakpoints `breaks[i]/grid`, values `values[i]/scale`.
    pub fn from_grid(grid: u64, breaks: Vec<u64>, values: Vec<i64>, scale: i64) -> Result<Self> {
        if grid == 0 || grid > GRID_MAX || scale <= 0 {
            return Err(Error::InvalidStepFunction("grid and scale must be positive".into()));
        }
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(Error::InvalidStepFunction("breakpoint and value counts differ".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) || breaks[breaks.len() - 1] >= grid {
            return Err(Error::InvalidStepFunction(
                "breakpoints must be strictly increasing in [0, grid)".into(),
            ));
        }
        Ok(Self::from_raw(grid, scale, breaks, values))
    }

    /// Trusted constructor: input already valid, possibly non-canonical.
    pub(crate) fn from_raw(grid: u64, scale: i64, breaks: Vec<u64>, values: Vec<i64>) -> Self {
        let (mut breaks, mut values) = canonicalize(breaks, values);
        let g = breaks.iter().fold(grid, |g, &b| g.gcd(&b));
        let grid = grid / g;
        if g > 1 {
            breaks.iter_mut().for_each(|b| *b /= g);
        }
        let s = values.iter().fold(scale, |s, &v| s.gcd(&v));
        let scale = scale / s;
        if s > 1 {
            values.iter_mut().for_each(|v| *v /= s);
        }
        StepFunction { grid, scale, breaks, values }
    }

    pub fn zero() -> Self {
        StepFunction { grid: 1, scale: 1, breaks: vec![0], values: vec![0] }
    }

    pub fn constant(c: &BigRational) -> Result<Self> {
        Self::new(&[BigRational::zero()], std::slice::from_ref(c))
    }

    /// `c` on `[a, b)` and 0 elsewhere, for `0 <= a < b <= 1`.
    pub fn indicator(a: &BigRational, b: &BigRational, c: &BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        if !(zero <= *a && a < b && *b <= one) {
            return Err(Error::InvalidStepFunction("indicator needs 0 <= a < b <= 1".into()));
        }
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        if *a > zero {
            bps.push(zero.clone());
            vals.push(zero.clone());
        }
        bps.push(a.clone());
        vals.push(c.clone());
        if *b < one {
            bps.push(b.clone());
            vals.push(zero);
        }
        Self::new(&bps, &vals)
    }

    pub fn grid(&self) -> u64 {
        self.grid
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    /// Raw breakpoint numerators over [`grid`](Self::grid).
    pub fn breaks(&self) -> &[u64] {
        &self.breaks
    }

    /// Raw value numerators over [`scale`](Self::scale).
    pub fn raw_values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.breaks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.breaks.len() == 1
    }

    pub fn breakpoints(&self) -> Vec<BigRational> {
        self.breaks.iter().map(|&b| exact::ratio_u(b as u128, self.grid as u128)).collect()
    }

    pub fn values(&self) -> Vec<BigRational> {
        self.values.iter().map(|&v| exact::rat(v, self.scale)).collect()
    }

    /// Jump numerators: `values[i] - values[i-1]` at `breaks[i]`, cyclically.
    pub fn jumps(&self) -> Vec<i64> {
        let n = self.values.len();
        (0..n).map(|i| self.values[i] - self.values[(i + n - 1) % n]).collect()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let y = exact::frac(x);
        let target = &y * BigInt::from(self.grid);
        // last breakpoint <= y
        let i = self.breaks.partition_point(|&b| BigRational::from_integer(BigInt::from(b)) <= target);
        let v = if i == 0 { *self.values.last().expect("nonempty") } else { self.values[i - 1] };
        exact::rat(v, self.scale)
    }

    /// Breakpoints and values re-expressed on a multiple `grid` of the own grid.
    pub(crate) fn on_grid(&self, grid: u64) -> Result<Vec<u64>> {
        if !grid.is_multiple_of(self.grid) {
            return Err(overflow("target grid is not a multiple"));
        }
        let m = grid / self.grid;
        Ok(self.breaks.iter().map(|&b| b * m).collect())
    }

    fn common_grid(&self, other: &Self) -> Result<u64> {
        lcm_checked(self.grid, other.grid)
            .filter(|&g| g <= GRID_MAX)
            .ok_or_else(|| overflow("common grid exceeds 2^62"))
    }

    fn common_scale(&self, other: &Self) -> Result<i64> {
        let g = self.scale.gcd(&other.scale);
        (self.scale / g)
            .checked_mul(other.scale)
            .ok_or_else(|| overflow("common value denominator exceeds i64"))
    }

    /// `x -> f(x + gamma)`.
    pub fn rotate(&self, gamma: &BigRational) -> Result<Self> {
        let g = exact::frac(gamma);
        let den = g.denom().to_u64().ok_or_else(|| overflow("rotation denominator"))?;
        let grid = lcm_checked(self.grid, den)
            .filter(|&v| v <= GRID_MAX)
            .ok_or_else(|| overflow("rotation grid exceeds 2^62"))?;
        let breaks = self.on_grid(grid)?;
        let shift = (g.numer() * BigInt::from(grid / den))
            .to_u64()
            .expect("shift below grid");
        let (b, v) = rotate_raw(&breaks, &self.values, shift, grid);
        Ok(Self::from_raw(grid, self.scale, b, v))
    }

    fn combine(&self, other: &Self, op: impl Fn(i64, i64) -> Option<i64>, scale: i64) -> Result<Self> {
        let grid = self.common_grid(other)?;
        let ab = self.on_grid(grid)?;
        let bb = other.on_grid(grid)?;
        let (b, v) = merge_raw(&ab, &self.values, &bb, &other.values, op)?;
        Ok(Self::from_raw(grid, scale, b, v))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let scale = self.common_scale(other)?;
        let (ma, mb) = (scale / self.scale, scale / other.scale);
        self.combine(
            other,
            move |x, y| x.checked_mul(ma)?.checked_add(y.checked_mul(mb)?),
            scale,
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        StepFunction {
            grid: self.grid,
            scale: self.scale,
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let scale = self
            .scale
            .checked_mul(other.scale)
            .ok_or_else(|| overflow("product value denominator exceeds i64"))?;
        self.combine(other, |x, y| x.checked_mul(y), scale)
    }

    pub fn scale_by(&self, k: i64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|&v| v.checked_mul(k).ok_or_else(|| overflow("value numerator exceeds i64")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_raw(self.grid, self.scale, self.breaks.clone(), values))
    }

    /// Sum of many functions by balanced pairwise merging.
    pub fn sum_balanced(mut fs: Vec<StepFunction>) -> Result<Self> {
        if fs.is_empty() {
            return Ok(Self::zero());
        }
        while fs.len() > 1 {
            let mut next = Vec::with_capacity(fs.len().div_ceil(2));
            let mut it = fs.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(a.add(&b)?),
                    None => next.push(a),
                }
            }
            fs = next;
        }
        Ok(fs.pop().expect("one left"))
    }

    /// Total variation: sum of absolute jumps including the wrap-around jump.
    pub fn variation(&self) -> BigRational {
        let total: i128 = self.jumps().iter().map(|&j| (j as i128).abs()).sum();
        BigRational::new(BigInt::from(total), BigInt::from(self.scale))
    }

    /// Lengths of the pieces, in grid units, in breakpoint order.
    pub(crate) fn lengths(&self) -> Vec<u64> {
        let n = self.breaks.len();
        (0..n)
            .map(|i| {
                if i + 1 < n {
                    self.breaks[i + 1] - self.breaks[i]
                } else {
                    self.grid - self.breaks[i] + self.breaks[0]
                }
            })
            .collect()
    }

    pub fn distribution(&self) -> ValueDistribution {
        let mut counts: BTreeMap<i64, u128> = BTreeMap::new();
        for (v, len) in self.values.iter().zip(self.lengths()) {
            *counts.entry(*v).or_default() += len as u128;
        }
        ValueDistribution::from_counts(&counts, self.scale, self.grid as u128)
    }

    pub fn integral(&self) -> BigRational {
        let s: i128 = self
            .values
            .iter()
            .zip(self.lengths())
            .map(|(&v, l)| v as i128 * l as i128)
            .sum();
        BigRational::new(BigInt::from(s), BigInt::from(self.grid as i128 * self.scale as i128))
    }

    pub fn norms(&self) -> Norms {
        Norms::of(&self.distribution())
    }

    pub fn sup_norm(&self) -> BigRational {
        let m = self.values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        BigRational::new(BigInt::from(m), BigInt::from(self.scale))
    }

    /// CSV rows `(breakpoint, value)` with exact and decimal renderings.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["breakpoint", "value", "breakpoint_exact", "value_exact"])?;
        for (b, v) in self.breakpoints().iter().zip(self.values()) {
            wr.write_record([
                format!("{:.17e}", exact::to_f64(b)),
                format!("{:.17e}", exact::to_f64(&v)),
                b.to_string(),
                v.to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn denominators_lcm(xs: &[BigRational]) -> Result<u64> {
    let mut l = BigInt::from(1);
    for x in xs {
        l = l.lcm(x.denom());
    }
    l.to_u64()
        .filter(|&v| v <= GRID_MAX)
        .ok_or_else(|| overflow("denominator lcm exceeds 2^62"))
}

#[derive(Serialize, Deserialize)]
struct StepFunctionRepr {
    breakpoints: Vec<RationalRepr>,
    values: Vec<RationalRepr>,
}

impl Serialize for StepFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepFunctionRepr {
            breakpoints: self.breakpoints().iter().map(RationalRepr::from).collect(),
            values: self.values().iter().map(RationalRepr::from).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StepFunctionRepr::deserialize(d)?;
        let conv = |xs: &[RationalRepr]| {
            xs.iter()
                .map(|x| BigRational::try_from(x).map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        StepFunction::new(&conv(&r.breakpoints)?, &conv(&r.values)?).map_err(D::Error::custom)
    }
}

/// Exact mean, `L^2` and `L^4` norms (as even powers) and sup norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Norms {
    #[serde(with = "serde_rational")]
    pub mean: BigRational,
    #[serde(with = "serde_rational")]
    pub l2_sq: BigRational,
    #[serde(with = "serde_rational")]
    pub l4_4: BigRational,
    #[serde(with = "serde_rational")]
    pub sup: BigRational,
}

impl Norms {
    pub fn of(law: &ValueDistribution) -> Self {
        let m = law.moments(4);
        let sup = law
            .atoms()
            .iter()
            .map(|a| a.value.abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        Norms {
            mean: m[0].clone(),
            l2_sq: m[1].clone(),
            l4_4: m[3].clone(),
            sup,
        }
    }

    pub fn l2(&self) -> f64 {
        exact::to_f64(&self.l2_sq).sqrt()
    }

    pub fn l4(&self) -> f64 {
        exact::to_f64(&self.l4_4).sqrt().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "serde_rational")]
    pub value: BigRational,
    #[serde(with = "serde_rational")]
    pub mass: BigRational,
}

/// Law of a step function under Lebesgue measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueDistribution {
    atoms: Vec<Atom>,
}

impl ValueDistribution {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort_by(|a, b| a.value.cmp(&b.value));
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("distribution needs at least one atom".into()));
        }
        if atoms.windows(2).any(|w| w[0].value == w[1].value) {
            return Err(Error::InvalidArgument("duplicate atom values".into()));
        }
        if atoms.iter().any(|a| !a.mass.is_positive()) {
            return Err(Error::InvalidArgument("atom masses must be positive".into()));
        }
        let total: BigRational = atoms.iter().map(|a| a.mass.clone()).sum();
        if total != BigRational::from_integer(1.into()) {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, not 1")));
        }
        Ok(ValueDistribution { atoms })
    }

    /// Law from value numerators over `scale` with lengths over `total`.
    pub(crate) fn from_counts(counts: &BTreeMap<i64, u128>, scale: i64, total: u128) -> Self {
        let atoms = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&v, &c)| Atom {
                value: exact::rat(v, scale),
                mass: exact::ratio_u(c, total),
            })
            .collect();
        ValueDistribution { atoms }
    }

    pub fn point_mass(c: BigRational) -> Self {
        ValueDistribution {
            atoms: vec![Atom { value: c, mass: BigRational::from_integer(1.into()) }],
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Exact moments `sum v^m mass` for `m = 1..=max_order`.
    pub fn moments(&self, max_order: u32) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); max_order as usize];
        for a in &self.atoms {
            let mut p = a.mass.clone();
            for slot in out.iter_mut() {
                p *= &a.value;
                *slot += &p;
            }
        }
        out
    }

    pub fn mean(&self) -> BigRational {
        self.moments(1).remove(0)
    }

    pub fn support_max_abs(&self) -> BigRational {
        self.atoms.iter().map(|a| a.value.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// CSV rows `(value, mass)` with exact and decimal renderings.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["value", "mass", "value_num", "value_den", "mass_num", "mass_den"])?;
        for a in &self.atoms {
            wr.write_record([
                format!("{:.17e}", exact::to_f64(&a.value)),
                format!("{:.17e}", exact::to_f64(&a.mass)),
                a.value.numer().to_string(),
                a.value.denom().to_string(),
                a.mass.numer().to_string(),
                a.mass.denom().to_string(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

impl<'de> Deserialize<'de> for ValueDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            atoms: Vec<Atom>,
        }
        let r = Repr::deserialize(d)?;
        ValueDistribution::new(r.atoms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn psi_star() -> StepFunction {
        StepFunction::new(&[int(0), rat(1, 2)], &[int(1), int(-1)]).unwrap()
    }

    #[test]
    fn rotate_identity_and_half_turn() {
        let p = psi_star();
        assert_eq!(p.rotate(&int(0)).unwrap(), p);
        assert_eq!(p.rotate(&rat(1, 2)).unwrap(), p.neg());
        assert_eq!(p.rotate(&rat(3, 2)).unwrap(), p.neg());
    }

    #[test]
    fn rotate_group_action() {
        let p = psi_star();
        let a = p.rotate(&rat(1, 3)).unwrap().rotate(&rat(2, 7)).unwrap();
        let b = p.rotate(&(rat(1, 3) + rat(2, 7))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn add_examples() {
        let p = psi_star();
        assert_eq!(p.add(&p.neg()).unwrap(), StepFunction::zero());
        assert_eq!(p.add(&p).unwrap(), p.scale_by(2).unwrap());
        let s = p.add(&p.rotate(&rat(1, 4)).unwrap()).unwrap();
        assert_eq!(s.breakpoints(), vec![int(0), rat(1, 4), rat(1, 2), rat(3, 4)]);
        assert_eq!(s.values(), vec![int(2), int(0), int(-2), int(0)]);
        let d = s.distribution();
        let got: Vec<_> = d.atoms().iter().map(|a| (a.value.clone(), a.mass.clone())).collect();
        assert_eq!(got, vec![(int(-2), rat(1, 4)), (int(0), rat(1, 2)), (int(2), rat(1, 4))]);
    }

    #[test]
    fn variation_examples() {
        assert_eq!(StepFunction::constant(&rat(5, 3)).unwrap().variation(), int(0));
        assert_eq!(psi_star().variation(), int(4));
    }

    #[test]
    fn norms_examples() {
        let n = psi_star().norms();
        assert_eq!((n.mean, n.l2_sq, n.sup), (int(0), int(1), int(1)));
        let z = StepFunction::zero().norms();
        assert!(z.mean.is_zero() && z.l2_sq.is_zero() && z.l4_4.is_zero() && z.sup.is_zero());
        let f = StepFunction::indicator(&int(0), &rat(1, 3), &int(3)).unwrap();
        let n = f.norms();
        assert_eq!((n.mean, n.l2_sq, n.l4_4, n.sup), (int(1), int(3), int(27), int(3)));
    }

    #[test]
    fn distribution_examples() {
        let d = psi_star().distribution();
        assert_eq!(d.atoms()[0], Atom { value: int(-1), mass: rat(1, 2) });
        assert_eq!(d.atoms()[1], Atom { value: int(1), mass: rat(1, 2) });
        let c = StepFunction::constant(&rat(-7, 2)).unwrap().distribution();
        assert_eq!(c, ValueDistribution::point_mass(rat(-7, 2)));
    }

    #[test]
    fn eval_left_closed() {
        let p = psi_star();
        assert_eq!(p.eval(&rat(1, 4)), int(1));
        assert_eq!(p.eval(&rat(1, 2)), int(-1));
        assert_eq!(p.eval(&int(0)), int(1));
        assert_eq!(p.eval(&rat(-1, 4)), int(-1));
    }

    #[test]
    fn invalid_input_rejected() {
        assert!(StepFunction::new(&[rat(1, 2), int(0)], &[int(1), int(2)]).is_err());
        assert!(StepFunction::new(&[int(1)], &[int(1)]).is_err());
        assert!(StepFunction::new(&[], &[]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = psi_star().rotate(&rat(1, 3)).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"num\""));
        let g: StepFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        let d = f.distribution();
        let t: ValueDistribution = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(t, d);
    }

    #[test]
    fn sum_balanced_matches_fold() {
        let p = psi_star();
        let fs: Vec<_> = (0..13).map(|k| p.rotate(&rat(k * 5, 13)).unwrap()).collect();
        let fold = fs.iter().skip(1).fold(fs[0].clone(), |acc, f| acc.add(f).unwrap());
        assert_eq!(StepFunction::sum_balanced(fs).unwrap(), fold);
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        (1u64..6, prop::collection::vec((0u64..24, -5i64..6), 1..7)).prop_map(|(den, pts)| {
            let grid = 24 * den;
            let mut m = BTreeMap::new();
            for (b, v) in pts {
                m.insert(b * den, v);
            }
            let (b, v): (Vec<_>, Vec<_>) = m.into_iter().unzip();
            StepFunction::from_grid(grid, b, v, den as i64).unwrap()
        })
    }

    proptest! {
        #[test]
        fn variation_subadditive_and_rotation_invariant(f in arb_step(), g in arb_step(), a in 0i64..50) {
            let s = f.add(&g).unwrap();
            prop_assert!(s.variation() <= f.variation() + g.variation());
            let r = f.rotate(&rat(a, 37)).unwrap();
            prop_assert_eq!(r.variation(), f.variation());
            prop_assert_eq!(r.distribution(), f.distribution());
        }

        #[test]
        fn norms_agree_with_distribution(f in arb_step()) {
            let d = f.distribution();
            let n = f.norms();
            let total: BigRational = d.atoms().iter().map(|a| a.mass.clone()).sum();
            prop_assert_eq!(total, int(1));
            let m1: BigRational = d.atoms().iter().map(|a| &a.value * &a.mass).sum();
            let m2: BigRational = d.atoms().iter().map(|a| &a.value * &a.value * &a.mass).sum();
            prop_assert_eq!(m1, n.mean.clone());
            prop_assert_eq!(m2, n.l2_sq.clone());
            prop_assert_eq!(f.integral(), n.mean);
        }

        #[test]
        fn canonical_form_idempotent(f in arb_step()) {
            let again = StepFunction::from_grid(f.grid(), f.breaks().to_vec(), f.raw_values().to_vec(), f.scale()).unwrap();
            prop_assert_eq!(&again, &f);
            let n = f.len();
            if n > 1 {
                for i in 0..n {
                    prop_assert_ne!(f.raw_values()[i], f.raw_values()[(i + 1) % n]);
                }
            }
        }

        #[test]
        fn pointwise_sum_and_product(f in arb_step(), g in arb_step(), x in 0i64..1000) {
            let x = rat(x, 1000);
            prop_assert_eq!(f.add(&g).unwrap().eval(&x), f.eval(&x) + g.eval(&x));
            prop_assert_eq!(f.mul(&g).unwrap().eval(&x), f.eval(&x) * g.eval(&x));
            let r = f.rotate(&rat(3, 11)).unwrap();
            prop_assert_eq!(r.eval(&x), f.eval(&(x.clone() + rat(3, 11))));
        }
    }
}
