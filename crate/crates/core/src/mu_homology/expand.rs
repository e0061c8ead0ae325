//! Expansion of Newton classes into sparse polynomials in the generators
//! `b_i` or `ξ_k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use super::{mono_mul, symmetric, Context, MuError, SymmetricClass};

/// Sparse F_p-polynomial; monomials are sorted `(generator index, exponent)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expanded {
    p: u32,
    context: Context,
    terms: BTreeMap<Vec<(u32, u32)>, u32>,
}

impl Expanded {
    pub fn zero(p: u32, context: Context) -> Self {
        Expanded { p, context, terms: BTreeMap::new() }
    }

    pub fn one(p: u32, context: Context) -> Self {
        let mut out = Self::zero(p, context);
        out.add_term(Vec::new(), 1);
        out
    }

    pub fn generator(p: u32, context: Context, index: u32) -> Self {
        let mut out = Self::zero(p, context);
        out.add_term(vec![(index, 1)], 1);
        out
    }

    pub fn context(&self) -> Context {
        self.context
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<(u32, u32)>, u32)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &[(u32, u32)]) -> i64 {
        symmetric(self.terms.get(m).copied().unwrap_or(0), self.p)
    }

    fn add_term(&mut self, m: Vec<(u32, u32)>, c: u32) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let v = (self.terms.get(&m).copied().unwrap_or(0) + c) % self.p;
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
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
        let mut out = Self::zero(self.p, self.context);
        for (a, &x) in &self.terms {
            for (b, &y) in &other.terms {
                out.add_term(mono_mul(a, b), (x as u64 * y as u64 % self.p as u64) as u32);
            }
        }
        out
    }

    /// `f^p`, which over F_p raises every exponent by `p`.
    pub fn frobenius(&self) -> Self {
        let mut out = Self::zero(self.p, self.context);
        for (m, &c) in &self.terms {
            out.add_term(m.iter().map(|&(i, e)| (i, e * self.p)).collect(), c);
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.p, self.context);
        let mut base = self.clone();
        while e > 0 {
            let digit = e % self.p;
            for _ in 0..digit {
                acc = acc.mul(&base);
            }
            e /= self.p;
            if e > 0 {
                base = base.frobenius();
            }
        }
        acc
    }

    pub fn leading_monomial(&self) -> Option<String> {
        self.terms.iter().next_back().map(|(m, &c)| {
            let mut single = Self::zero(self.p, self.context);
            single.add_term(m.clone(), c);
            single.to_string()
        })
    }
}

impl fmt::Display for Expanded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let name = match self.context {
            Context::B => "b",
            Context::Xi => "xi",
        };
        for (idx, (m, &c)) in self.terms.iter().rev().enumerate() {
            let c = symmetric(c, self.p);
            if idx == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { "-" } else { "+" })?;
            }
            let body: Vec<String> = m
                .iter()
                .map(|&(i, e)| if e == 1 { format!("{name}_{i}") } else { format!("{name}_{i}^{e}") })
                .collect();
            match (c.abs(), body.is_empty()) {
                (a, true) => write!(f, "{a}")?,
                (1, false) => write!(f, "{}", body.join(" "))?,
                (a, false) => write!(f, "{a} {}", body.join(" "))?,
            }
        }
        Ok(())
    }
}

/// Memoized Newton expansion `N_n = t_1 N_{n−1} − t_2 N_{n−2} + … + (−1)^{n−1} n t_n`.
#[derive(Debug)]
pub struct NewtonExpander {
    p: u32,
    context: Context,
    budget: u32,
    memo: RwLock<HashMap<u32, Arc<Expanded>>>,
}

impl NewtonExpander {
    /// Budget `p(p²−1)`, the largest index the in-scope operations reach.
    pub fn new(p: u32, context: Context) -> Self {
        Self::with_budget(p, context, p * (p * p - 1))
    }

    pub fn with_budget(p: u32, context: Context, budget: u32) -> Self {
        NewtonExpander { p, context, budget, memo: RwLock::new(HashMap::new()) }
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// The generator standing for `t_i`, if nonzero in this context.
    fn t(&self, i: u32) -> Option<u32> {
        match self.context {
            Context::B => Some(i),
            Context::Xi => {
                let (mut q, mut k) = (self.p, 1);
                while q - 1 < i {
                    q *= self.p;
                    k += 1;
                }
                (q - 1 == i).then_some(k)
            }
        }
    }

    fn cached(&self, m: u32) -> Option<Arc<Expanded>> {
        self.memo.read().expect("memo lock").get(&m).cloned()
    }

    pub fn newton_expand(&self, m: u32) -> Result<Arc<Expanded>, MuError> {
        if m > self.budget {
            return Err(MuError::DegreeBudget { m, budget: self.budget });
        }
        if let Some(hit) = self.cached(m) {
            return Ok(hit);
        }
        let p = self.p;
        if m == 0 {
            return Ok(Arc::new(Expanded::zero(p, self.context)));
        }
        let value = if m % p == 0 { self.newton_expand(m / p)?.frobenius() } else { self.by_recursion(m)? };
        let value = Arc::new(value);
        self.memo.write().expect("memo lock").entry(m).or_insert_with(|| value.clone());
        Ok(value)
    }

    /// One step of the Newton recursion at `m`, lower indices from the memo.
    pub fn by_recursion(&self, m: u32) -> Result<Expanded, MuError> {
        if m > self.budget {
            return Err(MuError::DegreeBudget { m, budget: self.budget });
        }
        let p = self.p;
        let mut acc = Expanded::zero(p, self.context);
        for i in 1..m {
            if let Some(g) = self.t(i) {
                let prev = self.newton_expand(m - i)?;
                let sign = if i % 2 == 1 { 1 } else { -1 };
                acc = acc.add(&Expanded::generator(p, self.context, g).mul(&prev).scale(sign));
            }
        }
        if let Some(g) = self.t(m) {
            let sign = if m % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&Expanded::generator(p, self.context, g).scale(sign * m as i64));
        }
        Ok(acc)
    }

    /// Full expansion; substitutes the memoized `N_m` and multiplies out.
    pub fn expand(&self, x: &SymmetricClass) -> Result<Expanded, MuError> {
        if x.context() != self.context || x.prime() != self.p {
            return Err(MuError::ContextMismatch);
        }
        let mut out = Expanded::zero(self.p, self.context);
        for (m, c) in x.terms() {
            let mut term = Expanded::one(self.p, self.context);
            for &(a, e) in m {
                term = term.mul(&self.newton_expand(a)?.pow(e));
            }
            out = out.add(&term.scale(c as i64));
        }
        Ok(out)
    }
}
