//! Formal group laws presented by their logarithms.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{CoeffV3, PAdicScalar, Ring, ScalarError, TeichmullerRoot};
use crate::series::{Bounds, SeriesError, SeriesVar, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FglError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("logarithm must start with x")]
    BadLinearTerm,
    #[error("logarithm known to degree {have}, need {need}")]
    DegreeTooSmall { need: u32, have: u32 },
}

/// Truncation parameters for the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FglConfig {
    pub p: u32,
    /// Exclusive bound on the x-degree.
    pub x_bound: u32,
    /// Exclusive bound on the α-degree.
    pub alpha_bound: u32,
}

impl FglConfig {
    pub fn for_prime(p: u32) -> Self {
        FglConfig { p, x_bound: p * p, alpha_bound: default_alpha_bound(p) }
    }

    /// Degree to which the logarithm and its inverse are carried.
    pub fn degree(&self) -> u32 {
        let p3 = self.p.pow(3);
        (2 * (p3 + 1)).max(self.x_bound + self.alpha_bound)
    }
}

/// `p^3 + p(p-1)^2 + 2(p-1)`: enough room to divide by `χ^2` (forming `k`)
/// and then by `χ^{p(p-1)}` and still see everything below `α^{p^3}`.
pub fn default_alpha_bound(p: u32) -> u32 {
    p.pow(3) + p * (p - 1) * (p - 1) + 2 * (p - 1)
}

/// `ℓ(x) = Σ m_n x^n` with `m_1 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Logarithm {
    ring: Ring,
    bound: u32,
    coeffs: BTreeMap<u32, CoeffV3>,
}

impl Logarithm {
    pub fn from_coeffs(ring: Ring, bound: u32, coeffs: impl IntoIterator<Item = (u32, CoeffV3)>) -> Result<Self, FglError> {
        let coeffs: BTreeMap<u32, CoeffV3> =
            coeffs.into_iter().filter(|(n, c)| *n < bound && !c.is_zero()).collect();
        let one = CoeffV3::scalar(ring.one());
        if coeffs.get(&1) != Some(&one) || coeffs.contains_key(&0) {
            return Err(FglError::BadLinearTerm);
        }
        Ok(Logarithm { ring, bound, coeffs })
    }

    /// `x + (v3/p) x^{p^3}`.
    pub fn target(ring: Ring, bound: u32) -> Self {
        let p = ring.p;
        let top = CoeffV3::v3(ring.p_power(-1));
        Self::from_coeffs(ring, bound, [(1, CoeffV3::scalar(ring.one())), (p.pow(3), top)])
            .expect("target logarithm is well formed")
    }

    pub fn additive(ring: Ring, bound: u32) -> Self {
        Self::from_coeffs(ring, bound, [(1, CoeffV3::scalar(ring.one()))]).expect("additive logarithm")
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn coefficient(&self, n: u32) -> CoeffV3 {
        self.coeffs.get(&n).copied().unwrap_or_else(|| CoeffV3::zero(self.ring.p))
    }

    pub fn series(&self) -> TruncatedSeries {
        TruncatedSeries::univariate(self.ring, SeriesVar::X, self.bound, self.coeffs.iter().map(|(n, c)| (*n, *c)))
    }
}

#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    config: FglConfig,
    log: Logarithm,
    log_series: TruncatedSeries,
    inv_log: TruncatedSeries,
    omega: TeichmullerRoot,
    p_series: TruncatedSeries,
    angle_p: TruncatedSeries,
    euler: TruncatedSeries,
}

impl FormalGroupLaw {
    pub fn new(log: Logarithm, config: FglConfig) -> Result<Self, FglError> {
        let need = config.degree();
        if log.bound() < need {
            return Err(FglError::DegreeTooSmall { need, have: log.bound() });
        }
        let ring = log.ring();
        let log_series = log.series();
        let inv_log = log_series.lagrange_invert(SeriesVar::X)?;
        let omega = TeichmullerRoot::primitive(&ring);
        let mut fgl = FormalGroupLaw {
            config,
            log,
            log_series,
            inv_log,
            omega,
            p_series: TruncatedSeries::zero(ring, Bounds::none()),
            angle_p: TruncatedSeries::zero(ring, Bounds::none()),
            euler: TruncatedSeries::zero(ring, Bounds::none()),
        };
        let abound = Bounds::none().with(SeriesVar::Alpha, config.alpha_bound);
        let alpha = TruncatedSeries::var(ring, abound, SeriesVar::Alpha);
        fgl.p_series = fgl.scalar_series_of(&ring.int(ring.p as i64), &alpha)?;
        fgl.angle_p = fgl.p_series.divide_by_alpha_power(1)?.with_bounds(abound);
        let mut euler = TruncatedSeries::one(ring, abound);
        for i in 1..ring.p as u64 {
            euler = euler.mul(&fgl.scalar_series_of(&omega.power(i), &alpha)?);
        }
        fgl.euler = euler;
        Ok(fgl)
    }

    /// The law with logarithm `x + (v3/p) x^{p^3}` at default bounds.
    pub fn target(p: u32, digits: u32) -> Result<Self, FglError> {
        Self::target_with(Ring::new(p, digits)?, FglConfig::for_prime(p))
    }

    pub fn target_with(ring: Ring, config: FglConfig) -> Result<Self, FglError> {
        Self::new(Logarithm::target(ring, config.degree()), config)
    }

    pub fn additive(p: u32, digits: u32) -> Result<Self, FglError> {
        let ring = Ring::new(p, digits)?;
        let config = FglConfig::for_prime(p);
        Self::new(Logarithm::additive(ring, config.degree()), config)
    }

    pub fn ring(&self) -> Ring {
        self.log.ring()
    }

    pub fn prime(&self) -> u32 {
        self.log.ring().p
    }

    pub fn config(&self) -> FglConfig {
        self.config
    }

    pub fn logarithm(&self) -> &Logarithm {
        &self.log
    }

    pub fn log_series(&self) -> &TruncatedSeries {
        &self.log_series
    }

    pub fn inverse_log(&self) -> &TruncatedSeries {
        &self.inv_log
    }

    pub fn omega(&self) -> &TeichmullerRoot {
        &self.omega
    }

    fn check_degree(&self, s: &TruncatedSeries) -> Result<(), FglError> {
        let need: u32 = s.bounds().0.iter().filter(|&&b| b != u32::MAX).sum();
        if need > self.log.bound() {
            return Err(FglError::DegreeTooSmall { need, have: self.log.bound() });
        }
        Ok(())
    }

    /// `ℓ(a)` for `a` without constant term.
    pub fn log_of(&self, a: &TruncatedSeries) -> Result<TruncatedSeries, FglError> {
        self.check_degree(a)?;
        Ok(self.log_series.compose(SeriesVar::X, a)?)
    }

    /// `ℓ^{-1}(a)` for `a` without constant term.
    pub fn exp_of(&self, a: &TruncatedSeries) -> Result<TruncatedSeries, FglError> {
        self.check_degree(a)?;
        Ok(self.inv_log.compose(SeriesVar::X, a)?)
    }

    /// `a +_F b`.
    pub fn formal_sum(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, FglError> {
        let s = self.log_of(a)?.add(&self.log_of(b)?);
        let out = self.exp_of(&s)?;
        out.ensure_integral()?;
        Ok(out)
    }

    /// `F(x, y)` with exclusive bounds `bx`, `by`.
    pub fn addition_series(&self, bx: u32, by: u32) -> Result<TruncatedSeries, FglError> {
        let ring = self.ring();
        let b = Bounds::none().with(SeriesVar::X, bx).with(SeriesVar::Y, by);
        let x = TruncatedSeries::var(ring, b, SeriesVar::X);
        let y = TruncatedSeries::var(ring, b, SeriesVar::Y);
        self.formal_sum(&x, &y)
    }

    /// `[c]_F(a) = ℓ^{-1}(c·ℓ(a))`.
    pub fn scalar_series_of(&self, c: &PAdicScalar, a: &TruncatedSeries) -> Result<TruncatedSeries, FglError> {
        let out = self.exp_of(&self.log_of(a)?.scale_scalar(c))?;
        out.ensure_integral()?;
        Ok(out)
    }

    /// `[c]_F(x)` in `x`, carried to x-degree `bound`.
    pub fn scalar_series(&self, c: &PAdicScalar, bound: u32) -> Result<TruncatedSeries, FglError> {
        let x = TruncatedSeries::var(self.ring(), Bounds::none().with(SeriesVar::X, bound), SeriesVar::X);
        self.scalar_series_of(c, &x)
    }

    /// `[p]_F(v)` truncated at the configured α-bound.
    pub fn p_series_in(&self, v: SeriesVar) -> TruncatedSeries {
        if v == SeriesVar::Alpha {
            return self.p_series.clone();
        }
        rename(&self.p_series, SeriesVar::Alpha, v)
    }

    /// `⟨p⟩_F(α) = [p]_F(α)/α`.
    pub fn angle_p_series(&self) -> &TruncatedSeries {
        &self.angle_p
    }

    /// `χ = ∏_{i=1}^{p-1} [ω^i]_F(α)`.
    pub fn euler_class(&self) -> &TruncatedSeries {
        &self.euler
    }
}

/// Moves every exponent of `from` onto `to`; `to` must be absent.
pub fn rename(s: &TruncatedSeries, from: SeriesVar, to: SeriesVar) -> TruncatedSeries {
    let mut bounds = s.bounds();
    bounds.0[to.index()] = bounds.0[from.index()];
    bounds = bounds.without(from);
    let mut out = TruncatedSeries::zero(s.ring(), bounds);
    for (e, c) in s.terms() {
        let mut d = *e;
        d[to.index()] = e[from.index()];
        d[from.index()] = 0;
        out.add_term(d, *c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::binomial;
    use proptest::prelude::*;

    fn target(p: u32) -> FormalGroupLaw {
        FormalGroupLaw::target(p, 8).unwrap()
    }

    /// `x + y + (v3/p)(x^{p^3} + y^{p^3} - (x+y)^{p^3})`, expanded.
    fn closed_form(fgl: &FormalGroupLaw, bx: u32, by: u32) -> TruncatedSeries {
        let r = fgl.ring();
        let p = r.p;
        let n = p.pow(3);
        let b = Bounds::none().with(SeriesVar::X, bx).with(SeriesVar::Y, by);
        let mut s = TruncatedSeries::var(r, b, SeriesVar::X).add(&TruncatedSeries::var(r, b, SeriesVar::Y));
        for j in 1..n {
            let c = r.biguint(&binomial(n as u64, j as u64)).shift(-1);
            s.add_term([j, n - j, 0, 0], CoeffV3::v3(-c));
        }
        s
    }

    #[test]
    fn addition_series_examples() {
        let add = FormalGroupLaw::additive(3, 8).unwrap();
        let r = add.ring();
        let f = add.addition_series(28, 28).unwrap();
        let b = Bounds::none().with(SeriesVar::X, 28).with(SeriesVar::Y, 28);
        assert_eq!(f, TruncatedSeries::var(r, b, SeriesVar::X).add(&TruncatedSeries::var(r, b, SeriesVar::Y)));
        for p in [3, 5] {
            let fgl = target(p);
            let n = p.pow(3);
            let f = fgl.addition_series(n + 1, n + 1).unwrap();
            assert_eq!(f, closed_form(&fgl, n + 1, n + 1), "p = {p}");
            let r = fgl.ring();
            assert_eq!(f.coeff(&[1, n - 1, 0, 0]), CoeffV3::v3(-r.int((p * p) as i64)));
        }
    }

    #[test]
    fn scalar_series_examples() {
        for p in [3, 5] {
            let fgl = target(p);
            let r = fgl.ring();
            let n = p.pow(3);
            let bound = n + 1;
            let x = TruncatedSeries::var(r, Bounds::none().with(SeriesVar::X, bound), SeriesVar::X);
            assert_eq!(fgl.scalar_series(&r.one(), bound).unwrap(), x);
            for i in 1..p as u64 {
                let w = fgl.omega().power(i);
                assert_eq!(fgl.scalar_series(&w, bound).unwrap(), x.scale_scalar(&w));
            }
            let ps = fgl.scalar_series(&r.int(p as i64), bound).unwrap();
            let u = r.int(p as i64).pow((n - 1) as u64) - r.one();
            let expect = x.scale_scalar(&r.int(p as i64)).add(&x.pow(n as u64).scale(&CoeffV3::v3(-u)));
            assert_eq!(ps, expect);
        }
    }

    #[test]
    fn angle_p_and_euler_class() {
        for p in [3, 5, 7] {
            let fgl = target(p);
            let r = fgl.ring();
            let n = p.pow(3);
            let b = Bounds::none().with(SeriesVar::Alpha, fgl.config().alpha_bound);
            let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
            let u = r.int(p as i64).pow((n - 1) as u64) - r.one();
            let expect = TruncatedSeries::constant(r, b, CoeffV3::scalar(r.int(p as i64)))
                .sub(&a.pow((n - 1) as u64).scale(&CoeffV3::v3(u)));
            assert_eq!(fgl.angle_p_series(), &expect);
            assert_eq!(fgl.angle_p_series().mul(&a), fgl.p_series_in(SeriesVar::Alpha));
            assert_eq!(fgl.euler_class(), &a.pow((p - 1) as u64).neg());
        }
        let add = FormalGroupLaw::additive(5, 8).unwrap();
        let r = add.ring();
        let b = Bounds::none().with(SeriesVar::Alpha, add.config().alpha_bound);
        let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
        assert_eq!(add.angle_p_series(), &TruncatedSeries::constant(r, b, CoeffV3::scalar(r.int(5))));
        assert_eq!(add.euler_class(), &a.pow(4).neg());
    }

    #[test]
    fn unit_and_commutativity() {
        let fgl = target(3);
        let f = fgl.addition_series(28, 28).unwrap();
        let r = fgl.ring();
        let bx = Bounds::none().with(SeriesVar::X, 28);
        let zero = TruncatedSeries::zero(r, bx);
        assert_eq!(f.substitute(SeriesVar::Y, &zero), TruncatedSeries::var(r, bx, SeriesVar::X));
        let swapped = rename(&rename(&rename(&f, SeriesVar::X, SeriesVar::Z), SeriesVar::Y, SeriesVar::X), SeriesVar::Z, SeriesVar::Y);
        assert_eq!(swapped, f);
    }

    #[test]
    fn associativity_reduced_bounds() {
        let fgl = target(3);
        let r = fgl.ring();
        let b = Bounds::none().with(SeriesVar::X, 14).with(SeriesVar::Y, 14).with(SeriesVar::Z, 14);
        let x = TruncatedSeries::var(r, b, SeriesVar::X);
        let y = TruncatedSeries::var(r, b, SeriesVar::Y);
        let z = TruncatedSeries::var(r, b, SeriesVar::Z);
        let lhs = fgl.formal_sum(&fgl.formal_sum(&x, &y).unwrap(), &z).unwrap();
        let rhs = fgl.formal_sum(&x, &fgl.formal_sum(&y, &z).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn log_identity() {
        let fgl = target(3);
        let f = fgl.addition_series(28, 28).unwrap();
        let r = fgl.ring();
        let b = f.bounds();
        let lhs = fgl.log_of(&f).unwrap();
        let rhs = fgl.log_of(&TruncatedSeries::var(r, b, SeriesVar::X)).unwrap()
            .add(&fgl.log_of(&TruncatedSeries::var(r, b, SeriesVar::Y)).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rejects_bad_logarithm() {
        let r = Ring::new(3, 8).unwrap();
        let bad = Logarithm::from_coeffs(r, 60, [(1, CoeffV3::scalar(r.int(2)))]);
        assert_eq!(bad, Err(FglError::BadLinearTerm));
        let short = Logarithm::target(r, 10);
        assert!(matches!(FormalGroupLaw::new(short, FglConfig::for_prime(3)), Err(FglError::DegreeTooSmall { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn scalar_series_additive(a in -6i64..6, b in -6i64..6) {
            let fgl = FormalGroupLaw::target(3, 8).unwrap();
            let r = fgl.ring();
            let bound = 28;
            let sa = fgl.scalar_series(&r.int(a), bound).unwrap();
            let sb = fgl.scalar_series(&r.int(b), bound).unwrap();
            let sum = fgl.scalar_series(&r.int(a + b), bound).unwrap();
            prop_assert_eq!(fgl.formal_sum(&sa, &sb).unwrap(), sum);
        }
    }
}
