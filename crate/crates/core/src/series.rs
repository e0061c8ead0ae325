//! Sparse truncated power series in up to four variables over `Z_p[v3]/(v3^2)`.
//!
//! Every series carries a truncation bound per variable: exponents at or above
//! the bound are discarded. A bound of `u32::MAX` marks a variable the series
//! does not involve. Ring operations take the componentwise minimum of the
//! operand bounds.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::exec;
use crate::fgl::FormalGroupLaw;
use crate::scalar::{CoeffV3, PAdicScalar, Ring, ScalarError};

pub const NVARS: usize = 4;

pub type Exponents = [u32; NVARS];

const UNBOUNDED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesVar {
    X,
    Y,
    Z,
    Alpha,
}

impl SeriesVar {
    pub const ALL: [SeriesVar; NVARS] = [SeriesVar::X, SeriesVar::Y, SeriesVar::Z, SeriesVar::Alpha];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesVar::X => "x",
            SeriesVar::Y => "y",
            SeriesVar::Z => "z",
            SeriesVar::Alpha => "alpha",
        }
    }

    /// Topological degree; all variables sit in degree 2.
    pub fn degree(self) -> u32 {
        2
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("substituted series has a nonzero constant term")]
    NonzeroConstant,
    #[error("linear coefficient is not a unit")]
    NonUnitLinear,
    #[error("constant term is not a unit")]
    NonUnitConstant,
    #[error("term with {var}-exponent {exponent} is not divisible by {var}^{by}")]
    NotDivisible { var: &'static str, exponent: u32, by: u32 },
    #[error("series involves variables other than {0}")]
    UnexpectedVariable(&'static str),
    #[error("coefficient of {0} has negative valuation")]
    NonIntegral(String),
    #[error("iteration did not converge within {0} steps")]
    NotConverged(usize),
}

/// Per-variable truncation bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bounds(pub [u32; NVARS]);

impl Bounds {
    pub fn none() -> Self {
        Bounds([UNBOUNDED; NVARS])
    }

    pub fn with(mut self, v: SeriesVar, bound: u32) -> Self {
        self.0[v.index()] = bound;
        self
    }

    pub fn get(&self, v: SeriesVar) -> Option<u32> {
        let b = self.0[v.index()];
        (b != UNBOUNDED).then_some(b)
    }

    pub fn without(mut self, v: SeriesVar) -> Self {
        self.0[v.index()] = UNBOUNDED;
        self
    }

    pub fn meet(&self, other: &Bounds) -> Bounds {
        let mut out = [0; NVARS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i].min(other.0[i]);
        }
        Bounds(out)
    }

    pub fn admits(&self, e: &Exponents) -> bool {
        e.iter().zip(self.0.iter()).all(|(x, b)| x < b)
    }

    pub fn involves(&self, v: SeriesVar) -> bool {
        self.0[v.index()] != UNBOUNDED
    }

    /// Number of Newton steps that suffices for any iteration whose
    /// correct order at least doubles each step.
    fn newton_steps(&self) -> usize {
        let total: u64 = self.0.iter().filter(|&&b| b != UNBOUNDED).map(|&b| b as u64).sum();
        (64 - total.max(1).leading_zeros()) as usize + 3
    }
}

fn add_exps(a: &Exponents, b: &Exponents) -> Exponents {
    let mut out = [0; NVARS];
    for i in 0..NVARS {
        out[i] = a[i] + b[i];
    }
    out
}

#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    ring: Ring,
    bounds: Bounds,
    terms: BTreeMap<Exponents, CoeffV3>,
}

impl TruncatedSeries {
    pub fn zero(ring: Ring, bounds: Bounds) -> Self {
        TruncatedSeries { ring, bounds, terms: BTreeMap::new() }
    }

    pub fn constant(ring: Ring, bounds: Bounds, c: CoeffV3) -> Self {
        Self::monomial(ring, bounds, [0; NVARS], c)
    }

    pub fn one(ring: Ring, bounds: Bounds) -> Self {
        Self::constant(ring, bounds, CoeffV3::scalar(ring.one()))
    }

    pub fn monomial(ring: Ring, bounds: Bounds, exps: Exponents, c: CoeffV3) -> Self {
        let mut s = Self::zero(ring, bounds);
        s.add_term(exps, c);
        s
    }

    pub fn var(ring: Ring, bounds: Bounds, v: SeriesVar) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Self::monomial(ring, bounds, e, CoeffV3::scalar(ring.one()))
    }

    /// Univariate series `Σ coeffs[n] v^n`, keyed by exponent.
    pub fn univariate(ring: Ring, v: SeriesVar, bound: u32, coeffs: impl IntoIterator<Item = (u32, CoeffV3)>) -> Self {
        let mut s = Self::zero(ring, Bounds::none().with(v, bound));
        for (n, c) in coeffs {
            let mut e = [0; NVARS];
            e[v.index()] = n;
            s.add_term(e, c);
        }
        s
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &CoeffV3)> {
        self.terms.iter()
    }

    fn zero_coeff(&self) -> CoeffV3 {
        CoeffV3::zero(self.ring.p)
    }

    pub fn coeff(&self, e: &Exponents) -> CoeffV3 {
        self.terms.get(e).copied().unwrap_or_else(|| self.zero_coeff())
    }

    pub fn constant_term(&self) -> CoeffV3 {
        self.coeff(&[0; NVARS])
    }

    /// Adds `c * monomial(e)` in place, respecting bounds and dropping zeros.
    pub fn add_term(&mut self, e: Exponents, c: CoeffV3) {
        if c.is_zero() || !self.bounds.admits(&e) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn truncate(&self, bounds: Bounds) -> Self {
        let bounds = self.bounds.meet(&bounds);
        let terms = self.terms.iter().filter(|(e, _)| bounds.admits(e)).map(|(e, c)| (*e, *c)).collect();
        TruncatedSeries { ring: self.ring, bounds, terms }
    }

    /// Replaces the bounds, keeping admissible terms. Used to widen a bound
    /// when a series is known to be exact (e.g. a polynomial).
    pub fn with_bounds(&self, bounds: Bounds) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| bounds.admits(e)).map(|(e, c)| (*e, *c)).collect();
        TruncatedSeries { ring: self.ring, bounds, terms }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Exponents, &CoeffV3) -> CoeffV3) -> Self {
        let mut out = Self::zero(self.ring, self.bounds);
        for (e, c) in &self.terms {
            out.add_term(*e, f(e, c));
        }
        out
    }

    pub fn scale(&self, c: &CoeffV3) -> Self {
        self.map_coeffs(|_, x| *x * *c)
    }

    pub fn scale_scalar(&self, c: &PAdicScalar) -> Self {
        self.map_coeffs(|_, x| x.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.bounds);
        for (e, c) in &other.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|_, c| -*c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bounds = self.bounds.meet(&other.bounds);
        let left: Vec<(Exponents, CoeffV3)> = self.terms.iter().map(|(e, c)| (*e, *c)).collect();
        let right: Vec<(Exponents, CoeffV3)> = other.terms.iter().map(|(e, c)| (*e, *c)).collect();
        let chunk = (4096 / right.len().max(1)).max(1);
        let acc = exec::chunked_fold(
            &left,
            chunk,
            HashMap::<Exponents, CoeffV3>::new,
            |mut acc, (ea, ca)| {
                for (eb, cb) in &right {
                    let e = add_exps(ea, eb);
                    if !bounds.admits(&e) {
                        continue;
                    }
                    let c = *ca * *cb;
                    if c.is_zero() {
                        continue;
                    }
                    acc.entry(e).and_modify(|x| *x += c).or_insert(c);
                }
                acc
            },
            |mut a, b| {
                if a.len() < b.len() {
                    return merge_into(b, a);
                }
                for (e, c) in b {
                    a.entry(e).and_modify(|x| *x += c).or_insert(c);
                }
                a
            },
        );
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        TruncatedSeries { ring: self.ring, bounds, terms }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.ring, self.bounds);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
                if base.is_zero() {
                    return if e > 0 { Self::zero(self.ring, self.bounds) } else { acc };
                }
            }
        }
        acc
    }

    /// Formal partial derivative; the bound in `v` drops by one.
    pub fn derivative(&self, v: SeriesVar) -> Self {
        let i = v.index();
        let mut bounds = self.bounds;
        if bounds.0[i] != UNBOUNDED {
            bounds.0[i] = bounds.0[i].saturating_sub(1);
        }
        let mut out = Self::zero(self.ring, bounds);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = *e;
            d[i] -= 1;
            out.add_term(d, c.scale(&self.ring.int(e[i] as i64)));
        }
        out
    }

    /// Coefficient of `v^n`, as a series in the remaining variables.
    pub fn coefficient(&self, v: SeriesVar, n: u32) -> Self {
        let i = v.index();
        let mut out = Self::zero(self.ring, self.bounds.without(v));
        for (e, c) in &self.terms {
            if e[i] == n {
                let mut d = *e;
                d[i] = 0;
                out.add_term(d, *c);
            }
        }
        out
    }

    /// Exact division by `v^m`.
    pub fn divide_by_var_power(&self, v: SeriesVar, m: u32) -> Result<Self, SeriesError> {
        let i = v.index();
        let mut bounds = self.bounds;
        if bounds.0[i] != UNBOUNDED {
            bounds.0[i] = bounds.0[i].saturating_sub(m);
        }
        let mut out = Self::zero(self.ring, bounds);
        for (e, c) in &self.terms {
            if e[i] < m {
                return Err(SeriesError::NotDivisible { var: v.name(), exponent: e[i], by: m });
            }
            let mut d = *e;
            d[i] -= m;
            out.add_term(d, *c);
        }
        Ok(out)
    }

    pub fn divide_by_alpha_power(&self, m: u32) -> Result<Self, SeriesError> {
        self.divide_by_var_power(SeriesVar::Alpha, m)
    }

    /// Multiplies by `v^m`, extending the bound in `v` by `m`.
    pub fn multiply_by_var_power(&self, v: SeriesVar, m: u32) -> Self {
        let i = v.index();
        let mut bounds = self.bounds;
        if bounds.0[i] != UNBOUNDED {
            bounds.0[i] = bounds.0[i].saturating_add(m);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut d = *e;
                d[i] += m;
                (d, *c)
            })
            .collect();
        TruncatedSeries { ring: self.ring, bounds, terms }
    }

    /// Lowest exponent of `v` among nonzero terms.
    pub fn order_in(&self, v: SeriesVar) -> Option<u32> {
        self.terms.keys().map(|e| e[v.index()]).min()
    }

    pub fn involves_only(&self, vars: &[SeriesVar]) -> bool {
        self.terms
            .keys()
            .all(|e| SeriesVar::ALL.iter().all(|v| vars.contains(v) || e[v.index()] == 0))
    }

    /// Substitutes `g` for `v`: `Σ_n f_n · g^n` where `f_n` is the
    /// coefficient of `v^n`.
    pub fn substitute(&self, v: SeriesVar, g: &TruncatedSeries) -> Self {
        let i = v.index();
        let mut groups: BTreeMap<u32, TruncatedSeries> = BTreeMap::new();
        let rest_bounds = self.bounds.without(v);
        for (e, c) in &self.terms {
            let mut d = *e;
            d[i] = 0;
            groups
                .entry(e[i])
                .or_insert_with(|| Self::zero(self.ring, rest_bounds))
                .add_term(d, *c);
        }
        let out_bounds = rest_bounds.meet(&g.bounds);
        let mut out = Self::zero(self.ring, out_bounds);
        let mut cur_exp = 0u32;
        let mut cur_pow = Self::one(self.ring, g.bounds);
        for (n, fn_) in groups {
            if n > cur_exp {
                cur_pow = cur_pow.mul(&g.pow((n - cur_exp) as u64));
                cur_exp = n;
            }
            if cur_pow.is_zero() {
                break;
            }
            out = out.add(&fn_.mul(&cur_pow));
        }
        out
    }

    /// Composition `f ∘ g` for `f` in the single variable `v`; `g(0)` must vanish.
    pub fn compose(&self, v: SeriesVar, g: &TruncatedSeries) -> Result<Self, SeriesError> {
        if !self.involves_only(&[v]) {
            return Err(SeriesError::UnexpectedVariable(v.name()));
        }
        if !g.constant_term().is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        Ok(self.substitute(v, g))
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if c0.plain.is_zero() || c0.plain.valuation() != Some(0) {
            return Err(SeriesError::NonUnitConstant);
        }
        let two = Self::constant(self.ring, self.bounds, CoeffV3::scalar(self.ring.int(2)));
        let mut u = Self::constant(self.ring, self.bounds, c0.inverse()?);
        let steps = self.bounds.newton_steps();
        for _ in 0..steps {
            let next = u.mul(&two.sub(&self.mul(&u)));
            if next == u {
                return Ok(u);
            }
            u = next;
        }
        if u.mul(self) == Self::one(self.ring, self.bounds) {
            Ok(u)
        } else {
            Err(SeriesError::NotConverged(steps))
        }
    }

    /// Compositional inverse in `v` by Newton iteration
    /// `g <- g - (k∘g - v) / (k'∘g)`.
    pub fn lagrange_invert(&self, v: SeriesVar) -> Result<Self, SeriesError> {
        if !self.coefficient(v, 0).is_zero() {
            return Err(SeriesError::NonzeroConstant);
        }
        let lin = self.coefficient(v, 1);
        let l0 = lin.constant_term();
        if l0.plain.is_zero() || l0.plain.valuation() != Some(0) {
            return Err(SeriesError::NonUnitLinear);
        }
        let y = Self::var(self.ring, self.bounds, v);
        let dk = self.derivative(v);
        let mut g = y.mul(&lin.reciprocal()?);
        let steps = self.bounds.newton_steps();
        for _ in 0..steps {
            let err = self.substitute(v, &g).sub(&y);
            if err.is_zero() {
                return Ok(g);
            }
            let slope = dk.substitute(v, &g).with_bounds(self.bounds).reciprocal()?;
            let next = g.sub(&err.mul(&slope));
            if next == g {
                return Ok(g);
            }
            g = next;
        }
        Err(SeriesError::NotConverged(steps))
    }

    /// Smallest precision among all stored scalars.
    pub fn min_precision(&self) -> Option<u32> {
        self.terms.values().filter_map(|c| c.min_precision()).min()
    }

    pub fn ensure_precision(&self, floor: u32) -> Result<(), SeriesError> {
        match self.min_precision() {
            Some(got) if got < floor => Err(ScalarError::PrecisionFloor { got, floor }.into()),
            _ => Ok(()),
        }
    }

    /// Errors if any coefficient has negative valuation.
    pub fn ensure_integral(&self) -> Result<(), SeriesError> {
        for (e, c) in &self.terms {
            if c.min_valuation().is_some_and(|v| v < 0) {
                return Err(SeriesError::NonIntegral(render_monomial(e)));
            }
        }
        Ok(())
    }

    /// Equality on the common truncation range.
    pub fn eq_to_bounds(&self, other: &Self) -> bool {
        let b = self.bounds.meet(&other.bounds);
        let a = self.truncate(b);
        let c = other.truncate(b);
        a.terms.len() == c.terms.len() && a.terms.iter().all(|(e, x)| c.terms.get(e) == Some(x))
    }
}

fn merge_into(mut big: HashMap<Exponents, CoeffV3>, small: HashMap<Exponents, CoeffV3>) -> HashMap<Exponents, CoeffV3> {
    for (e, c) in small {
        big.entry(e).and_modify(|x| *x += c).or_insert(c);
    }
    big
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.eq_to_bounds(other)
    }
}

pub fn render_monomial(e: &Exponents) -> String {
    let parts: Vec<String> = SeriesVar::ALL
        .iter()
        .filter(|v| e[v.index()] > 0)
        .map(|v| match e[v.index()] {
            1 => v.name().to_string(),
            n => format!("{}^{n}", v.name()),
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({c})*{}", render_monomial(e)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical representative of an element of `R[[α]]/[p]_F(α)` truncated at
/// `α^bound`: for `k >= 1` both parts of the coefficient of `α^k` lie in
/// `{0, …, p-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientNormalForm {
    ring: Ring,
    bound: u32,
    coeffs: BTreeMap<u32, CoeffV3>,
}

impl QuotientNormalForm {
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn coefficient(&self, k: u32) -> CoeffV3 {
        self.coeffs.get(&k).copied().unwrap_or_else(|| CoeffV3::zero(self.ring.p))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &CoeffV3)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_series(&self) -> TruncatedSeries {
        TruncatedSeries::univariate(self.ring, SeriesVar::Alpha, self.bound, self.coeffs.iter().map(|(k, c)| (*k, *c)))
    }

    /// Renders with symmetric residues, e.g. `-v3 * alpha^104`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, c) in &self.coeffs {
            let coeff = if *k == 0 { c.to_string() } else { render_residue_coeff(c) };
            let term = match (*k, coeff.as_str()) {
                (0, _) => coeff.clone(),
                (_, "1") => alpha_power(*k),
                (_, "-1") => format!("-{}", alpha_power(*k)),
                _ => format!("{coeff} * {}", alpha_power(*k)),
            };
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }
}

fn alpha_power(k: u32) -> String {
    if k == 1 {
        "alpha".to_string()
    } else {
        format!("alpha^{k}")
    }
}

fn render_residue_coeff(c: &CoeffV3) -> String {
    let a = c.plain.symmetric_mod_p().unwrap_or(0);
    let b = c.v3part.symmetric_mod_p().unwrap_or(0);
    match (a, b) {
        (0, 0) => "0".to_string(),
        (a, 0) => a.to_string(),
        (0, 1) => "v3".to_string(),
        (0, -1) => "-v3".to_string(),
        (0, b) => format!("{b}*v3"),
        (a, b) => format!("({a} + {b}*v3)"),
    }
}

/// Reduces `f ∈ R[[α]]` to its canonical form modulo `[p]_F(α)`, truncated at
/// `α^min(p^3, bound)`.
pub fn quotient_normalize(f: &TruncatedSeries, fgl: &FormalGroupLaw) -> Result<QuotientNormalForm, SeriesError> {
    quotient_normalize_with(f, &fgl.p_series_in(SeriesVar::Alpha), fgl.ring().p.pow(3))
}

/// Same as [`quotient_normalize`] with an explicit p-series `[p](α)` and cutoff.
pub fn quotient_normalize_with(
    f: &TruncatedSeries,
    p_series: &TruncatedSeries,
    cutoff: u32,
) -> Result<QuotientNormalForm, SeriesError> {
    if !f.involves_only(&[SeriesVar::Alpha]) {
        return Err(SeriesError::UnexpectedVariable("alpha"));
    }
    let ring = f.ring();
    let bound = f.bounds().get(SeriesVar::Alpha).unwrap_or(cutoff).min(cutoff);
    let ai = SeriesVar::Alpha.index();
    // [p](α) = p·u·α + Σ_{j≥2} e_j α^j; rewrite p·α^k -> -u^{-1} Σ e_j α^{k-1+j}.
    let mut lin = CoeffV3::zero(ring.p);
    let mut tail: Vec<(u32, CoeffV3)> = Vec::new();
    for (e, c) in p_series.terms() {
        match e[ai] {
            0 => {}
            1 => lin = *c,
            j => tail.push((j, *c)),
        }
    }
    let u_inv = CoeffV3::scalar(lin.plain.shift(-1)).inverse()?;
    let rewrite: Vec<(u32, CoeffV3)> = tail.into_iter().map(|(j, e)| (j, -(e * u_inv))).collect();

    let mut coeffs: BTreeMap<u32, CoeffV3> = BTreeMap::new();
    for (e, c) in f.terms() {
        if e[ai] < bound {
            coeffs.insert(e[ai], *c);
        }
    }
    let mut k = 1;
    while k < bound {
        let Some(c) = coeffs.remove(&k) else {
            match coeffs.range(k + 1..).next() {
                Some((&next, _)) => {
                    k = next;
                    continue;
                }
                None => break,
            }
        };
        let (a0, a_rest) = split(&c.plain, &format!("alpha^{k}"))?;
        let (b0, b_rest) = split(&c.v3part, &format!("v3*alpha^{k}"))?;
        let head = CoeffV3::new(canonical(&ring, a0), canonical(&ring, b0));
        if !head.is_zero() {
            coeffs.insert(k, head);
        }
        let rest = CoeffV3::new(a_rest, b_rest);
        if !rest.is_zero() {
            for (j, r) in &rewrite {
                let target = k - 1 + j;
                if target < bound {
                    let add = rest * *r;
                    let entry = coeffs.entry(target).or_insert_with(|| CoeffV3::zero(ring.p));
                    *entry += add;
                    if entry.is_zero() {
                        coeffs.remove(&target);
                    }
                }
            }
        }
        k += 1;
    }
    if let Some(c0) = coeffs.get(&0) {
        if c0.min_valuation().is_some_and(|v| v < 0) {
            return Err(SeriesError::NonIntegral("1".to_string()));
        }
    }
    Ok(QuotientNormalForm { ring, bound, coeffs })
}

fn split(x: &PAdicScalar, what: &str) -> Result<(u32, PAdicScalar), SeriesError> {
    x.split_residue().map_err(|_| SeriesError::NonIntegral(what.to_string()))
}

fn canonical(ring: &Ring, r: u32) -> PAdicScalar {
    PAdicScalar::from_parts(ring.p, 0, r as u64, ring.digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgl::{FglConfig, FormalGroupLaw, Logarithm};
    use proptest::prelude::*;

    fn ring(p: u32) -> Ring {
        Ring::new(p, 8).unwrap()
    }

    fn c(r: &Ring, n: i64) -> CoeffV3 {
        CoeffV3::scalar(r.int(n))
    }

    fn xa_bounds(bx: u32, ba: u32) -> Bounds {
        Bounds::none().with(SeriesVar::X, bx).with(SeriesVar::Alpha, ba)
    }

    #[test]
    fn mul_examples() {
        let r = ring(5);
        let b = xa_bounds(25, 40);
        let x = TruncatedSeries::var(r, b, SeriesVar::X);
        let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
        let xa = x.mul(&a);
        assert_eq!(xa, TruncatedSeries::monomial(r, b, [1, 0, 0, 1], c(&r, 1)));
        let lhs = x.pow(4).sub(&a.pow(4)).mul(&x);
        let rhs = x.pow(5).sub(&a.pow(4).mul(&x));
        assert_eq!(lhs, rhs);
        assert!(lhs.sub(&lhs).is_zero());
    }

    #[test]
    fn compose_examples() {
        let r = ring(3);
        let b = Bounds::none().with(SeriesVar::X, 10).with(SeriesVar::Y, 10);
        let x = TruncatedSeries::var(r, b, SeriesVar::X);
        let y = TruncatedSeries::var(r, b, SeriesVar::Y);
        let f = x.add(&x.pow(2)).truncate(Bounds::none().with(SeriesVar::X, 10));
        assert_eq!(f.compose(SeriesVar::X, &x).unwrap(), f);
        let two_y = y.scale(&c(&r, 2));
        let got = f.compose(SeriesVar::X, &two_y).unwrap();
        assert_eq!(got, two_y.add(&y.pow(2).scale(&c(&r, 4))));
        let shifted = two_y.add(&TruncatedSeries::one(r, b));
        assert_eq!(f.compose(SeriesVar::X, &shifted), Err(SeriesError::NonzeroConstant));
    }

    #[test]
    fn derivative_examples() {
        let p = 3u32;
        let r = ring(p);
        let n = p.pow(3);
        let b = xa_bounds(n + 5, 10);
        let log = TruncatedSeries::univariate(
            r,
            SeriesVar::X,
            n + 5,
            [(1, c(&r, 1)), (n, CoeffV3::v3(r.ratio(1, p as i64).unwrap()))],
        );
        let d = log.derivative(SeriesVar::X);
        let expect = TruncatedSeries::univariate(
            r,
            SeriesVar::X,
            n + 4,
            [(0, c(&r, 1)), (n - 1, CoeffV3::v3(r.int((p * p) as i64)))],
        );
        assert_eq!(d, expect);
        let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
        assert!(a.pow(3).derivative(SeriesVar::X).is_zero());
        let x = TruncatedSeries::var(r, b, SeriesVar::X);
        assert_eq!(x.mul(&a).derivative(SeriesVar::X), a);
    }

    #[test]
    fn lagrange_examples() {
        let r = ring(3);
        let b = Bounds::none().with(SeriesVar::Y, 9).with(SeriesVar::Alpha, 40);
        let y = TruncatedSeries::var(r, b, SeriesVar::Y);
        assert_eq!(y.lagrange_invert(SeriesVar::Y).unwrap(), y);
        // chi = -alpha^2
        let chi = TruncatedSeries::var(r, b, SeriesVar::Alpha).pow(2).neg();
        let k = y.sub(&chi.mul(&y.pow(3)));
        let inv = k.lagrange_invert(SeriesVar::Y).unwrap();
        let expect = y
            .add(&chi.mul(&y.pow(3)))
            .add(&chi.pow(2).mul(&y.pow(5)).scale(&c(&r, 3)))
            .add(&chi.pow(3).mul(&y.pow(7)).scale(&c(&r, 12)));
        assert_eq!(inv, expect);
        assert_eq!(k.substitute(SeriesVar::Y, &inv), y);
        let bad = y.scale(&c(&r, 3));
        assert_eq!(bad.lagrange_invert(SeriesVar::Y), Err(SeriesError::NonUnitLinear));
    }

    /// Single-variable Lagrange inversion by the residue formula:
    /// `[y^n] k^{-1} = (1/n) [w^{n-1}] (w / k(w))^n`.
    fn residue_inverse(k: &TruncatedSeries, n_max: u32) -> Vec<CoeffV3> {
        let r = k.ring();
        let v = SeriesVar::Y;
        let quotient = k.divide_by_var_power(v, 1).unwrap().with_bounds(Bounds::none().with(v, n_max + 1));
        let phi = quotient.reciprocal().unwrap();
        (1..=n_max)
            .map(|n| {
                let pw = phi.pow(n as u64);
                pw.coeff(&[0, n - 1, 0, 0]).scale(&r.ratio(1, n as i64).unwrap())
            })
            .collect()
    }

    #[test]
    fn newton_inverse_matches_residue_formula() {
        let r = ring(5);
        let b = Bounds::none().with(SeriesVar::Y, 14);
        let y = TruncatedSeries::var(r, b, SeriesVar::Y);
        let k = y
            .add(&y.pow(2).scale(&c(&r, 3)))
            .sub(&y.pow(5).scale(&c(&r, 7)))
            .add(&y.pow(6).scale(&CoeffV3::new(r.int(1), r.int(2))));
        let inv = k.lagrange_invert(SeriesVar::Y).unwrap();
        for (i, want) in residue_inverse(&k, 13).into_iter().enumerate() {
            assert_eq!(inv.coeff(&[0, i as u32 + 1, 0, 0]), want, "degree {}", i + 1);
        }
    }

    #[test]
    fn divide_by_alpha_power_examples() {
        let r = ring(5);
        let b = Bounds::none().with(SeriesVar::Alpha, 20);
        let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
        assert_eq!(a.pow(5).divide_by_alpha_power(2).unwrap(), a.pow(3).truncate(Bounds::none().with(SeriesVar::Alpha, 18)));
        let one_plus = TruncatedSeries::one(r, b).add(&a);
        assert!(matches!(one_plus.divide_by_alpha_power(1), Err(SeriesError::NotDivisible { exponent: 0, .. })));
        // v3·α^{p³-1}·χ^{i(p-2)} / α^{i(p-1)²}, p = 3, i = 2: exponent 26 + 4 - 8 = 22
        let p = 3u32;
        let r3 = ring(p);
        let big = Bounds::none().with(SeriesVar::Alpha, 40);
        let al = TruncatedSeries::var(r3, big, SeriesVar::Alpha);
        let chi = al.pow(2).neg();
        let f = al.pow(26).mul(&chi.pow(2)).scale(&CoeffV3::v3(r3.one()));
        let got = f.divide_by_alpha_power(2 * 4).unwrap();
        assert_eq!(got.coeff(&[0, 0, 0, 22]), CoeffV3::v3(r3.one()));
        assert_eq!(got.len(), 1);
    }

    fn target(p: u32) -> FormalGroupLaw {
        let r = ring(p);
        let cfg = FglConfig::for_prime(p);
        FormalGroupLaw::new(Logarithm::target(r, cfg.degree()), cfg).unwrap()
    }

    #[test]
    fn quotient_normalize_examples() {
        let p = 3u32;
        let fgl = target(p);
        let r = fgl.ring();
        let b = Bounds::none().with(SeriesVar::Alpha, 40);
        let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
        let pv3a = a.scale(&CoeffV3::v3(r.int(p as i64)));
        assert!(quotient_normalize(&pv3a, &fgl).unwrap().is_zero());
        let pa = a.scale(&c(&r, p as i64));
        assert!(quotient_normalize(&pa, &fgl).unwrap().is_zero());
        let n = p.pow(3) - 1 - 2 * (p - 1);
        let normal = a.pow(n as u64).scale(&CoeffV3::v3(r.one()));
        let qn = quotient_normalize(&normal, &fgl).unwrap();
        assert_eq!(qn.to_series(), normal.truncate(Bounds::none().with(SeriesVar::Alpha, 27)));
        assert_eq!(qn.render(), "v3 * alpha^22");
        let neg = quotient_normalize(&normal.neg(), &fgl).unwrap();
        assert_eq!(neg.render(), "-v3 * alpha^22");
        let frac = a.scale(&CoeffV3::v3(r.ratio(1, 3).unwrap()));
        assert!(matches!(quotient_normalize(&frac, &fgl), Err(SeriesError::NonIntegral(_))));
    }

    #[test]
    fn quotient_rewrite_reaches_v3_terms() {
        // p·α^k only vanishes after truncation; with a short pseudo p-series the
        // rewrite must land inside the range.
        let p = 3u32;
        let r = ring(p);
        let b = Bounds::none().with(SeriesVar::Alpha, 12);
        let a = TruncatedSeries::var(r, b, SeriesVar::Alpha);
        // [p](α) = 3α + v3·α^3
        let ps = a.scale(&c(&r, 3)).add(&a.pow(3).scale(&CoeffV3::v3(r.one())));
        let f = a.pow(2).scale(&c(&r, 3 * 2 + 1));
        let qn = quotient_normalize_with(&f, &ps, 12).unwrap();
        // 7α² = α² + 2·3α² -> α² - 2·v3·α⁴ = α² + v3·α⁴ after reduction
        assert_eq!(qn.coefficient(2), c(&r, 1));
        assert_eq!(qn.coefficient(4), CoeffV3::v3(r.one()));
        assert_eq!(qn.render(), "alpha^2 + v3 * alpha^4");
    }

    fn arb_alpha_series(p: u32) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((0u32..30, -20i64..20, -20i64..20), 0..8).prop_map(move |ts| {
            let r = Ring::new(p, 8).unwrap();
            TruncatedSeries::univariate(
                r,
                SeriesVar::Alpha,
                30,
                ts.into_iter().map(|(k, a, b)| (k, CoeffV3::new(r.int(a), r.int(b)))),
            )
        })
    }

    fn arb_xa(p: u32) -> impl Strategy<Value = TruncatedSeries> {
        proptest::collection::vec((0u32..6, 0u32..6, -9i64..9, -9i64..9), 0..6).prop_map(move |ts| {
            let r = Ring::new(p, 8).unwrap();
            let mut s = TruncatedSeries::zero(r, xa_bounds(6, 6));
            for (i, j, a, b) in ts {
                s.add_term([i, 0, 0, j], CoeffV3::new(r.int(a), r.int(b)));
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn normalize_is_idempotent_and_additive(f in arb_alpha_series(3), g in arb_alpha_series(3)) {
            let fgl = target(3);
            let nf = quotient_normalize(&f, &fgl).unwrap();
            prop_assert_eq!(quotient_normalize(&nf.to_series(), &fgl).unwrap(), nf.clone());
            let ng = quotient_normalize(&g, &fgl).unwrap();
            let lhs = quotient_normalize(&f.add(&g), &fgl).unwrap();
            let rhs = quotient_normalize(&nf.to_series().add(&ng.to_series()), &fgl).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mul_commutes_and_associates(a in arb_xa(5), b in arb_xa(5), c in arb_xa(5)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn leibniz_rule(a in arb_xa(3), b in arb_xa(3)) {
            let lhs = a.mul(&b).derivative(SeriesVar::X);
            let rhs = a.derivative(SeriesVar::X).mul(&b).add(&a.mul(&b.derivative(SeriesVar::X)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lagrange_round_trip(coeffs in proptest::collection::vec((2u32..9, 0u32..5, -6i64..6, -6i64..6), 0..6)) {
            let r = Ring::new(3, 8).unwrap();
            let b = Bounds::none().with(SeriesVar::Y, 9).with(SeriesVar::Alpha, 5);
            let mut k = TruncatedSeries::var(r, b, SeriesVar::Y);
            for (i, j, a, v) in coeffs {
                k.add_term([0, i, 0, j], CoeffV3::new(r.int(a), r.int(v)));
            }
            let inv = k.lagrange_invert(SeriesVar::Y).unwrap();
            let y = TruncatedSeries::var(r, b, SeriesVar::Y);
            prop_assert_eq!(k.substitute(SeriesVar::Y, &inv), y.clone());
            prop_assert_eq!(inv.substitute(SeriesVar::Y, &k), y);
        }
    }
}
