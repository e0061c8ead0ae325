//! The power operation on `χ^n P(CP^n)` for the law `x + (v3/p)x^{p^3}` and
//! the Dyer-Lashof coefficients read off from it.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fgl::{FglError, FormalGroupLaw};
use crate::scalar::{binomial, CoeffV3, PAdicScalar, ScalarError};
use crate::series::{quotient_normalize, Bounds, QuotientNormalForm, SeriesError, SeriesVar, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PowerOpError {
    #[error(transparent)]
    Fgl(#[from] FglError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("k(y, α) = g(χy, α)/χ^2 has no unit linear term")]
    NotDivisibleByChi,
    #[error("h_n solve: coefficient of α^{0} is not divisible by p")]
    InexactDivision(u32),
    #[error("f_n - h_n⟨p⟩ is nonzero at α^{0}, inside the ideal range")]
    CongruenceFailed(u32),
    #[error("need y-degree {need}, bound is {bound}")]
    YBoundTooSmall { need: u32, bound: u32 },
    #[error("index {index} is outside the truncation range {bound}")]
    IndexOutOfRange { index: u32, bound: u32 },
    #[error("i must lie in 2..=p, got {0}")]
    BadIndex(u32),
}

/// Intermediate series of the pipeline.
#[derive(Clone, Debug)]
pub struct PipelineTrace {
    /// `x ∏ (x +_F [ω^i](α))` before reduction.
    pub g_raw: TruncatedSeries,
    /// `g_raw` with `p·v3·α^{≥1}` killed.
    pub g: TruncatedSeries,
    pub chi: TruncatedSeries,
    /// `g(χy, α) = χ^2 k(y, α)`.
    pub k: TruncatedSeries,
    pub k_inverse: TruncatedSeries,
    /// `ℓ'(χ k^{-1})`.
    pub log_derivative: TruncatedSeries,
    /// `ℓ'(χ k^{-1}) · (k^{-1})'`; `f_n` is its `y^n` coefficient.
    pub f_generating: TruncatedSeries,
}

impl PipelineTrace {
    pub fn build(fgl: &FormalGroupLaw) -> Result<Self, PowerOpError> {
        let chi = fgl.euler_class().clone();
        let g_raw = g_series_raw(fgl)?;
        let g = reduce_v3_torsion(&g_raw);
        let k = k_series(&g, &chi)?;
        let k_inverse = k.lagrange_invert(SeriesVar::Y)?;
        let dlog = fgl.log_series().derivative(SeriesVar::X);
        let log_derivative = dlog.compose(SeriesVar::X, &k_inverse.mul(&chi))?;
        let f_generating = log_derivative.mul(&k_inverse.derivative(SeriesVar::Y));
        Ok(PipelineTrace { g_raw, g, chi, k, k_inverse, log_derivative, f_generating })
    }

    /// True when `ℓ'(χ k^{-1}) = 1` at the bounds in use.
    pub fn log_derivative_is_one(&self) -> bool {
        let one = TruncatedSeries::one(self.log_derivative.ring(), self.log_derivative.bounds());
        self.log_derivative == one
    }

    pub fn y_bound(&self) -> u32 {
        self.f_generating.bounds().get(SeriesVar::Y).unwrap_or(u32::MAX)
    }

    /// `f_n(α)`: the coefficient of `y^n`.
    pub fn f_coefficient(&self, n: u32) -> Result<TruncatedSeries, PowerOpError> {
        if n >= self.y_bound() {
            return Err(PowerOpError::YBoundTooSmall { need: n + 1, bound: self.y_bound() });
        }
        Ok(self.f_generating.coefficient(SeriesVar::Y, n))
    }
}

/// `x ∏_{i=1}^{p-1} (x +_F [ω^i]_F(α))`, truncated at the configured bounds.
pub fn g_series_raw(fgl: &FormalGroupLaw) -> Result<TruncatedSeries, PowerOpError> {
    let ring = fgl.ring();
    let cfg = fgl.config();
    let b = Bounds::none().with(SeriesVar::X, cfg.x_bound).with(SeriesVar::Alpha, cfg.alpha_bound);
    let x = TruncatedSeries::var(ring, b, SeriesVar::X);
    let alpha = TruncatedSeries::var(ring, b, SeriesVar::Alpha);
    let mut g = x.clone();
    for i in 1..ring.p as u64 {
        let root = fgl.scalar_series_of(&fgl.omega().power(i), &alpha)?;
        g = g.mul(&fgl.formal_sum(&x, &root)?);
    }
    Ok(g)
}

/// The reduced `g`: equal to `x ∏ (x +_F [ω^i](α))` modulo `⟨p⟩_F(α)`.
pub fn g_series(fgl: &FormalGroupLaw) -> Result<TruncatedSeries, PowerOpError> {
    Ok(reduce_v3_torsion(&g_series_raw(fgl)?))
}

/// Replaces the v3-part of every coefficient with positive α-degree by its
/// residue mod p. Since `p·α ≡ (unit)·v3·α^{p^3}` modulo `[p]_F(α)` and
/// `v3^2 = 0`, `p·v3·α^k` vanishes in the quotient for `k ≥ 1`.
pub fn reduce_v3_torsion(s: &TruncatedSeries) -> TruncatedSeries {
    let ring = s.ring();
    let ai = SeriesVar::Alpha.index();
    s.map_coeffs(|e, c| {
        if e[ai] == 0 || c.v3part.is_zero() || c.v3part.valuation().is_some_and(|v| v < 0) {
            return *c;
        }
        let r = c.v3part.reduce_mod_p().unwrap_or(0);
        CoeffV3::new(c.plain, PAdicScalar::from_parts(ring.p, 0, r as u64, ring.digits))
    })
}

/// Splits `χ = α^m · w` with `w(0)` a unit.
fn chi_split(chi: &TruncatedSeries) -> Result<(u32, TruncatedSeries), PowerOpError> {
    let m = chi.order_in(SeriesVar::Alpha).ok_or(PowerOpError::NotDivisibleByChi)?;
    let w = chi.divide_by_alpha_power(m)?;
    let w0 = w.constant_term();
    if w0.plain.valuation() != Some(0) {
        return Err(PowerOpError::NotDivisibleByChi);
    }
    Ok((m, w))
}

/// Divides an α-series (possibly also in other variables) by `χ^n` in `R[[α]]`.
pub fn divide_by_chi_power(s: &TruncatedSeries, chi: &TruncatedSeries, n: u32) -> Result<TruncatedSeries, PowerOpError> {
    let (m, w) = chi_split(chi)?;
    let shifted = s.divide_by_alpha_power(m * n)?;
    let ab = shifted.bounds().get(SeriesVar::Alpha).unwrap_or(u32::MAX);
    let winv = w.truncate(Bounds::none().with(SeriesVar::Alpha, ab)).reciprocal()?;
    Ok(shifted.mul(&winv.pow(n as u64)))
}

/// `k(y, α)` with `g(χy, α) = χ^2 k(y, α)`.
pub fn k_series(g: &TruncatedSeries, chi: &TruncatedSeries) -> Result<TruncatedSeries, PowerOpError> {
    let xb = g.bounds().get(SeriesVar::X).unwrap_or(u32::MAX);
    let yb = Bounds::none().with(SeriesVar::Y, xb);
    let y = TruncatedSeries::var(g.ring(), yb, SeriesVar::Y);
    let sub = g.substitute(SeriesVar::X, &chi.mul(&y).with_bounds(chi.bounds().meet(&yb)));
    let k = divide_by_chi_power(&sub, chi, 2).map_err(|_| PowerOpError::NotDivisibleByChi)?;
    let lin = k.coefficient(SeriesVar::Y, 1);
    if lin != TruncatedSeries::one(g.ring(), lin.bounds()) || !k.coefficient(SeriesVar::Y, 0).is_zero() {
        return Err(PowerOpError::NotDivisibleByChi);
    }
    Ok(k)
}

/// The unique `h_n` with `f_n - h_n ⟨p⟩_F(α) ≡ cpn_pth` modulo `α^{2n(p-1)+1}`.
pub fn h_polynomial(
    f_n: &TruncatedSeries,
    cpn_pth: &CoeffV3,
    fgl: &FormalGroupLaw,
    n: u32,
) -> Result<TruncatedSeries, PowerOpError> {
    let ring = fgl.ring();
    let p = ring.p;
    let top = 2 * n * (p - 1);
    let ai = SeriesVar::Alpha.index();
    let angle = fgl.angle_p_series();
    let a: Vec<CoeffV3> = (0..=top).map(|j| angle.coeff(&alpha_exp(j))).collect();
    let a0 = a[0];
    let mut h: Vec<CoeffV3> = Vec::with_capacity(top as usize + 1);
    for j in 0..=top {
        let mut t = f_n.coeff(&alpha_exp(j));
        if j == 0 {
            t -= *cpn_pth;
        }
        for s in 1..=j {
            if !a[s as usize].is_zero() && !h[(j - s) as usize].is_zero() {
                t -= a[s as usize] * h[(j - s) as usize];
            }
        }
        let hj = divide_exact(&t, &a0).ok_or(PowerOpError::InexactDivision(j))?;
        h.push(hj);
    }
    let bound = Bounds::none().with(SeriesVar::Alpha, top + 1);
    let out = TruncatedSeries::univariate(ring, SeriesVar::Alpha, top + 1, h.into_iter().enumerate().map(|(j, c)| (j as u32, c)));
    debug_assert!(out.terms().all(|(e, _)| e[ai] <= top) && out.bounds() == bound);
    Ok(out)
}

fn alpha_exp(j: u32) -> [u32; 4] {
    [0, 0, 0, j]
}

/// `t / a0` when `a0 = p·(unit)` and the quotient stays integral.
fn divide_exact(t: &CoeffV3, a0: &CoeffV3) -> Option<CoeffV3> {
    let q = *t * a0.inverse().ok()?;
    if q.min_valuation().is_some_and(|v| v < 0) {
        None
    } else {
        Some(q)
    }
}

#[derive(Clone, Debug)]
pub struct PowerOpResult {
    pub p: u32,
    pub i: u32,
    /// Half-degree of `CP^n`, here `i(p-1)`.
    pub n: u32,
    pub f_n: TruncatedSeries,
    pub h_n: TruncatedSeries,
    /// `(f_n - h_n⟨p⟩)/χ^n` in `R[[α]]`, before normalization.
    pub raw: TruncatedSeries,
    pub value: QuotientNormalForm,
    pub c: BTreeMap<u32, CoeffV3>,
}

impl PowerOpResult {
    pub fn render(&self) -> String {
        self.value.render()
    }
}

/// Runs the pipeline for `n = i(p-1)` using a prebuilt trace.
pub fn power_operation_from_trace(
    fgl: &FormalGroupLaw,
    trace: &PipelineTrace,
    i: u32,
) -> Result<PowerOpResult, PowerOpError> {
    let p = fgl.prime();
    if i < 2 || i > p {
        return Err(PowerOpError::BadIndex(i));
    }
    let n = i * (p - 1);
    let f_n = trace.f_coefficient(n)?;
    let zero = CoeffV3::zero(p);
    let h_n = h_polynomial(&f_n, &zero, fgl, n)?;
    let s = f_n.sub(&h_n.with_bounds(f_n.bounds()).mul(fgl.angle_p_series()));
    let top = 2 * n * (p - 1);
    if let Some(j) = s.order_in(SeriesVar::Alpha).filter(|&j| j <= top) {
        return Err(PowerOpError::CongruenceFailed(j));
    }
    let raw = divide_by_chi_power(&s, &trace.chi, n)?;
    let value = quotient_normalize(&raw, fgl)?;
    let c = value.terms().map(|(k, c)| (k, *c)).collect();
    Ok(PowerOpResult { p, i, n, f_n, h_n, raw, value, c })
}

/// `q∘r^*(χ^n P(CP^n))` for `n = i(p-1)`.
pub fn power_operation_value(fgl: &FormalGroupLaw, i: u32) -> Result<PowerOpResult, PowerOpError> {
    let trace = PipelineTrace::build(fgl)?;
    power_operation_from_trace(fgl, &trace, i)
}

/// `c_{k(p-1)}`, the coefficient giving `Q^k(σ CP^n)` in terms of `σ x_{p^3-1}`.
pub fn sigma_dl_coefficient(res: &PowerOpResult, k: u32) -> Result<CoeffV3, PowerOpError> {
    let index = k * (res.p - 1);
    let bound = res.p.pow(3);
    if index >= bound {
        return Err(PowerOpError::IndexOutOfRange { index, bound });
    }
    Ok(res.value.coefficient(index))
}

/// `p^3 - 1 - i(p-1)`.
pub fn expected_exponent(p: u32, i: u32) -> u32 {
    p.pow(3) - 1 - i * (p - 1)
}

/// `-(C(ip, i)/p) mod p`, as a symmetric residue.
pub fn expected_v3_coefficient(p: u32, i: u32) -> i64 {
    let c = binomial((i * p) as u64, i as u64) / num_bigint::BigUint::from(p);
    let r = (c % num_bigint::BigUint::from(p)).to_u32_digits().first().copied().unwrap_or(0) as i64;
    symmetric(-r, p)
}

pub fn symmetric(r: i64, p: u32) -> i64 {
    let p = p as i64;
    let r = r.rem_euclid(p);
    if r > p / 2 {
        r - p
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ring;

    fn target(p: u32) -> FormalGroupLaw {
        FormalGroupLaw::target(p, 8).unwrap()
    }

    fn alpha(fgl: &FormalGroupLaw, bound: u32) -> TruncatedSeries {
        TruncatedSeries::var(fgl.ring(), Bounds::none().with(SeriesVar::Alpha, bound), SeriesVar::Alpha)
    }

    #[test]
    fn g_is_chi_x_plus_x_to_the_p() {
        for p in [3, 5] {
            let fgl = target(p);
            let g = g_series(&fgl).unwrap();
            let b = g.bounds();
            let x = TruncatedSeries::var(fgl.ring(), b, SeriesVar::X);
            let chi = fgl.euler_class().with_bounds(b);
            assert_eq!(g, chi.mul(&x).add(&x.pow(p as u64)), "p = {p}");
            let raw = g_series_raw(&fgl).unwrap();
            let lin = raw.coefficient(SeriesVar::X, 1).sub(&chi.with_bounds(raw.bounds().without(SeriesVar::X)));
            assert!(lin.terms().all(|(_, c)| c.plain.is_zero() && c.v3part.valuation().unwrap() >= 1));
        }
    }

    #[test]
    fn additive_g() {
        let fgl = FormalGroupLaw::additive(5, 8).unwrap();
        let g = g_series_raw(&fgl).unwrap();
        let x = TruncatedSeries::var(fgl.ring(), g.bounds(), SeriesVar::X);
        let a = TruncatedSeries::var(fgl.ring(), g.bounds(), SeriesVar::Alpha);
        assert_eq!(g, x.mul(&x.pow(4).sub(&a.pow(4))));
    }

    #[test]
    fn k_has_positive_sign() {
        let fgl = target(3);
        let trace = PipelineTrace::build(&fgl).unwrap();
        let b = trace.k.bounds();
        let y = TruncatedSeries::var(fgl.ring(), b, SeriesVar::Y);
        let chi = trace.chi.with_bounds(b);
        assert_eq!(trace.k, y.add(&chi.mul(&y.pow(3))));
        assert_eq!(trace.k.substitute(SeriesVar::Y, &trace.k_inverse), y);
        assert!(trace.log_derivative_is_one());
        let f1 = trace.f_coefficient(1).unwrap();
        assert!(f1.is_zero(), "no y^1 term since k^{{-1}} is odd in y^(p-1)");
        let f0 = trace.f_coefficient(0).unwrap();
        assert_eq!(f0, TruncatedSeries::one(fgl.ring(), f0.bounds()));
    }

    #[test]
    fn p3_stage_values() {
        let fgl = target(3);
        let trace = PipelineTrace::build(&fgl).unwrap();
        let f4 = trace.f_coefficient(4).unwrap();
        let a = alpha(&fgl, f4.bounds().get(SeriesVar::Alpha).unwrap());
        assert_eq!(f4, a.pow(4).scale(&CoeffV3::scalar(fgl.ring().int(15))));
        let h4 = h_polynomial(&f4, &CoeffV3::zero(3), &fgl, 4).unwrap();
        assert_eq!(h4, a.pow(4).scale(&CoeffV3::scalar(fgl.ring().int(5))).truncate(h4.bounds()));
        let angle = fgl.angle_p_series().clone();
        let h = h_polynomial(&angle, &CoeffV3::zero(3), &fgl, 4).unwrap();
        assert_eq!(h, TruncatedSeries::one(fgl.ring(), h.bounds()));
    }

    #[test]
    fn h_solve_rejects_unsolvable() {
        let fgl = target(3);
        let f = alpha(&fgl, 40).pow(2);
        assert_eq!(h_polynomial(&f, &CoeffV3::zero(3), &fgl, 4), Err(PowerOpError::InexactDivision(2)));
    }

    #[test]
    fn power_operation_small_primes() {
        for p in [3, 5] {
            let fgl = target(p);
            let trace = PipelineTrace::build(&fgl).unwrap();
            for i in 2..=p {
                let res = power_operation_from_trace(&fgl, &trace, i).unwrap();
                let e = expected_exponent(p, i);
                let want = expected_v3_coefficient(p, i);
                let terms: Vec<(u32, CoeffV3)> = res.c.iter().map(|(k, c)| (*k, *c)).collect();
                if want == 0 {
                    assert!(terms.is_empty(), "p={p} i={i}: {}", res.render());
                    continue;
                }
                assert_eq!(terms.len(), 1, "p={p} i={i}: {}", res.render());
                assert_eq!(terms[0].0, e);
                assert!(terms[0].1.plain.is_zero());
                assert_eq!(terms[0].1.v3part.symmetric_mod_p().unwrap(), want);
            }
            let two = power_operation_from_trace(&fgl, &trace, 2).unwrap();
            assert_eq!(two.render(), format!("v3 * alpha^{}", expected_exponent(p, 2)));
            let last = power_operation_from_trace(&fgl, &trace, p).unwrap();
            assert_eq!(last.render(), format!("-v3 * alpha^{}", expected_exponent(p, p)));
            let first = sigma_dl_coefficient(&two, p * p + p - 1).unwrap();
            assert_eq!(first.v3part.symmetric_mod_p().unwrap(), 1);
            let second = sigma_dl_coefficient(&last, p * p + 1).unwrap();
            assert_eq!(second.v3part.symmetric_mod_p().unwrap(), -1);
            assert!(first.plain.is_zero() && second.plain.is_zero());
            assert_eq!(two.value.bound(), p.pow(3));
            assert!(sigma_dl_coefficient(&two, 1).unwrap().is_zero());
            assert!(matches!(sigma_dl_coefficient(&two, p * p * p), Err(PowerOpError::IndexOutOfRange { .. })));
        }
    }

    #[test]
    fn precision_stability() {
        let p = 3;
        let lo = FormalGroupLaw::target(p, 6).unwrap();
        let hi = FormalGroupLaw::target(p, 12).unwrap();
        for i in 2..=p {
            let a = power_operation_value(&lo, i).unwrap();
            let b = power_operation_value(&hi, i).unwrap();
            assert_eq!(a.render(), b.render());
        }
    }

    #[test]
    fn alpha_headroom_does_not_matter() {
        let p = 3;
        let ring = Ring::new(p, 8).unwrap();
        let mut cfg = crate::fgl::FglConfig::for_prime(p);
        cfg.alpha_bound += 10;
        let wide = FormalGroupLaw::target_with(ring, cfg).unwrap();
        let base = target(p);
        for i in 2..=p {
            assert_eq!(power_operation_value(&wide, i).unwrap().value, power_operation_value(&base, i).unwrap().value);
        }
    }

    #[test]
    fn expected_coefficients() {
        assert_eq!(expected_v3_coefficient(3, 2), 1);
        assert_eq!(expected_v3_coefficient(3, 3), -1);
        assert_eq!(expected_v3_coefficient(5, 2), 1);
        assert_eq!(expected_v3_coefficient(5, 5), -1);
        assert_eq!(expected_exponent(5, 2), 116);
        assert_eq!(expected_exponent(7, 2), 330);
    }
}
