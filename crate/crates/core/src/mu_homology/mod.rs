//! Newton classes in `H_*(MU) = F_p[b_1, b_2, ...]` and in the ξ-part of the
//! dual Steenrod algebra, together with Kochman's Dyer-Lashof action.
//!
//! Classes are kept lazily as polynomials in the Newton classes `N_m` with
//! `p ∤ m`; `N_{pm}` is folded into `N_m^p`. The expanded form lives in
//! [`expand`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::binomial_mod_p;

pub mod eval;
pub mod expand;
pub mod verify;

pub use eval::{failure_bound, symmetric_evaluate, RandomizedTest};
pub use expand::{Expanded, NewtonExpander};
pub use verify::{verify_mudl, verify_stdl, IdentityResult, Method, MuConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MuError {
    #[error("Newton index {m} exceeds the degree budget {budget}")]
    DegreeBudget { m: u32, budget: u32 },
    #[error("sample has {got} points but the class needs at least {needed}")]
    SampleTooSmall { needed: u32, got: usize },
    #[error("operation mixes classes from different contexts")]
    ContextMismatch,
}

/// Which ring the Newton classes are evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Context {
    /// `t_i = b_i`, `|b_i| = 2i`.
    B,
    /// `t_{p^k-1} = ξ_k`, all other `t_n = 0`.
    Xi,
}

impl Context {
    fn suffix(self) -> &'static str {
        match self {
            Context::B => "b",
            Context::Xi => "xi",
        }
    }
}

/// Sorted `(m, e)` pairs with `p ∤ m`, meaning `∏ N_m^e`.
pub type NewtonMonomial = Vec<(u32, u32)>;

fn mono_mul(a: &[(u32, u32)], b: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn symmetric(c: u32, p: u32) -> i64 {
    if c > p / 2 {
        c as i64 - p as i64
    } else {
        c as i64
    }
}

/// An F_p-linear combination of products of Newton classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricClass {
    p: u32,
    context: Context,
    terms: BTreeMap<NewtonMonomial, u32>,
}

impl SymmetricClass {
    pub fn zero(p: u32, context: Context) -> Self {
        SymmetricClass { p, context, terms: BTreeMap::new() }
    }

    pub fn one(p: u32, context: Context) -> Self {
        Self::monomial(p, context, Vec::new(), 1)
    }

    pub fn constant(p: u32, context: Context, c: i64) -> Self {
        Self::monomial(p, context, Vec::new(), c)
    }

    fn monomial(p: u32, context: Context, m: NewtonMonomial, c: i64) -> Self {
        let mut out = Self::zero(p, context);
        out.add_term(m, c.rem_euclid(p as i64) as u32);
        out
    }

    /// `N_m`, with `N_{m p^v}` stored as `N_m^{p^v}`. `N_0` is taken as 0.
    pub fn newton(p: u32, context: Context, m: u32) -> Self {
        if m == 0 {
            return Self::zero(p, context);
        }
        let (mut base, mut e) = (m, 1u32);
        while base % p == 0 {
            base /= p;
            e *= p;
        }
        Self::monomial(p, context, vec![(base, e)], 1)
    }

    /// `ξ̄_k = −N_{p^k−1}(ξ)`.
    pub fn xi_bar(p: u32, k: u32) -> Self {
        Self::newton(p, Context::Xi, p.pow(k) - 1).neg()
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn context(&self) -> Context {
        self.context
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NewtonMonomial, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: NewtonMonomial, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = (*o.get() + c) % self.p;
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "prime mismatch");
        assert_eq!(self.context, other.context, "{}", MuError::ContextMismatch);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> Self {
        let c = c.rem_euclid(self.p as i64) as u64;
        let mut out = Self::zero(self.p, self.context);
        for (m, &v) in &self.terms {
            out.add_term(m.clone(), (v as u64 * c % self.p as u64) as u32);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = Self::zero(self.p, self.context);
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                out.add_term(mono_mul(a, b), (x as u64 * y as u64 % self.p as u64) as u32);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.p, self.context);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Half the topological degree of each term, i.e. `Σ m·e`.
    pub fn weights(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.terms.keys().map(|m| m.iter().map(|&(a, e)| a * e).sum()).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn max_weight(&self) -> u32 {
        self.weights().last().copied().unwrap_or(0)
    }

    /// Topological degree, if every term has the same one.
    pub fn degree(&self) -> Option<u32> {
        match self.weights().as_slice() {
            [w] => Some(2 * w),
            _ => None,
        }
    }

    /// Largest Newton index `m` appearing, before Frobenius folding.
    pub fn max_index(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.iter().map(|&(a, _)| a)).max().unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(NewtonMonomial, i64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m.clone(), symmetric(c, self.p)))
    }

    pub fn render_monomial(context: Context, m: &[(u32, u32)]) -> String {
        if m.is_empty() {
            return "1".to_string();
        }
        m.iter()
            .map(|&(a, e)| {
                if e == 1 {
                    format!("N_{a}({})", context.suffix())
                } else {
                    format!("N_{a}({})^{e}", context.suffix())
                }
            })
            .collect::<Vec<_>>()
            .join(" · ")
    }
}

impl fmt::Display for SymmetricClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, &c)) in self.terms.iter().rev().enumerate() {
            let c = symmetric(c, self.p);
            let body = Self::render_monomial(self.context, m);
            let sign = if c < 0 { "-" } else { "+" };
            if idx == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (c.abs(), m.is_empty()) {
                (1, false) => write!(f, "{body}")?,
                (a, true) => write!(f, "{a}")?,
                (a, false) => write!(f, "{a} {body}")?,
            }
        }
        Ok(())
    }
}

/// Kochman's formula `Q^r N_n = (−1)^{r+n} C(r−1, n−1) N_{n+r(p−1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KochmanAction {
    p: u32,
}

impl KochmanAction {
    pub fn new(p: u32) -> Self {
        KochmanAction { p }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Coefficient of `N_{n+r(p−1)}` in `Q^r N_n`, in `0..p`.
    pub fn coefficient(&self, r: u32, n: u32) -> u32 {
        if r == 0 || n == 0 {
            return 0;
        }
        let c = binomial_mod_p(r as i64 - 1, n as i64 - 1, self.p);
        if (r + n) % 2 == 1 {
            (self.p - c) % self.p
        } else {
            c
        }
    }

    /// `Q^r N_n` by the formula directly, for any `n`.
    pub fn kochman_q(&self, r: u32, n: u32, context: Context) -> SymmetricClass {
        let c = self.coefficient(r, n);
        SymmetricClass::newton(self.p, context, n + r * (self.p - 1)).scale(c as i64)
    }

    /// `Q^s` of an arbitrary class, through the Cartan formula on the
    /// canonical Newton factors.
    pub fn apply(&self, s: u32, x: &SymmetricClass) -> SymmetricClass {
        let mut out = SymmetricClass::zero(self.p, x.context);
        for (m, c) in x.terms() {
            out = out.add(&self.apply_monomial(s, m, x.context).scale(c as i64));
        }
        out
    }

    fn apply_monomial(&self, s: u32, m: &[(u32, u32)], context: Context) -> SymmetricClass {
        let p = self.p;
        // expand exponents into factors N_a^{p^k}
        let mut factors: Vec<(u32, u32)> = Vec::new();
        for &(a, e) in m {
            let (mut e, mut pk) = (e, 1u32);
            while e > 0 {
                for _ in 0..e % p {
                    factors.push((a, pk));
                }
                e /= p;
                pk *= p;
            }
        }
        if factors.is_empty() {
            // Q^0 fixes the unit; higher operations kill it
            return if s == 0 { SymmetricClass::one(p, context) } else { SymmetricClass::zero(p, context) };
        }
        // Q^j vanishes below the instability bound j = a·p^k
        let lows: Vec<u32> = factors.iter().map(|&(a, pk)| a * pk).collect();
        let mut rest_low = vec![0u32; factors.len() + 1];
        for i in (0..factors.len()).rev() {
            rest_low[i] = rest_low[i + 1] + lows[i];
        }
        if rest_low[0] > s {
            return SymmetricClass::zero(p, context);
        }
        let mut states: BTreeMap<u32, SymmetricClass> = BTreeMap::new();
        states.insert(0, SymmetricClass::one(p, context));
        for (idx, &(a, pk)) in factors.iter().enumerate() {
            let mut next: BTreeMap<u32, SymmetricClass> = BTreeMap::new();
            for (&used, acc) in &states {
                let mut j = a;
                while used + j * pk + rest_low[idx + 1] <= s {
                    let c = self.coefficient(j, a);
                    if c != 0 {
                        let term = SymmetricClass::newton(p, context, (a + j * (p - 1)) * pk).scale(c as i64);
                        let key = used + j * pk;
                        let prod = acc.mul(&term);
                        let slot = next.entry(key).or_insert_with(|| SymmetricClass::zero(p, context));
                        *slot = slot.add(&prod);
                    }
                    j += 1;
                }
            }
            states = next;
        }
        states.remove(&s).unwrap_or_else(|| SymmetricClass::zero(p, context))
    }

    /// `Q^s(∏ factors)` as the sum over compositions of `s` of products of
    /// `Q^{s_i}` of the factors.
    pub fn q_on_product(&self, s: u32, factors: &[SymmetricClass]) -> SymmetricClass {
        let p = self.p;
        let context = factors.first().map(|f| f.context).unwrap_or(Context::B);
        let mut states: BTreeMap<u32, SymmetricClass> = BTreeMap::new();
        states.insert(0, SymmetricClass::one(p, context));
        for f in factors {
            let ops: Vec<SymmetricClass> = (0..=s).map(|j| self.apply(j, f)).collect();
            let mut next: BTreeMap<u32, SymmetricClass> = BTreeMap::new();
            for (&used, acc) in &states {
                for (j, q) in ops.iter().enumerate().take((s - used + 1) as usize) {
                    if q.is_zero() {
                        continue;
                    }
                    let slot = next.entry(used + j as u32).or_insert_with(|| SymmetricClass::zero(p, context));
                    *slot = slot.add(&acc.mul(q));
                }
            }
            states = next;
        }
        states.remove(&s).unwrap_or_else(|| SymmetricClass::zero(p, context))
    }
}
