//! Mod-p Dyer-Lashof operations on free graded-commutative algebras.
//!
//! Elements are F_p-polynomials in admissible words `Q^{s_1} ... Q^{s_k} g` on
//! even-degree generators `g`. Operations are normalized with the Adem
//! relation (no Bockstein), instability and the Cartan formula.

mod relation;

pub use relation::*;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::RwLock;

use thiserror::Error;

use crate::exec;
use crate::scalar::{binomial_mod_p, is_odd_prime};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DLError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("generator {name} has odd or zero degree {degree}")]
    BadDegree { name: String, degree: u32 },
    #[error("duplicate generator {0}")]
    DuplicateGenerator(String),
    #[error("linear system is inconsistent; residual {0}")]
    Inconsistent(String),
    #[error("expression is not homogeneous: degrees {0:?}")]
    Inhomogeneous(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// `Q^{ops[0]} Q^{ops[1]} ... g`, outermost operation first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub ops: Vec<u32>,
    pub gen: u16,
}

impl Word {
    pub fn generator(gen: u16) -> Self {
        Word { ops: Vec::new(), gen }
    }

    pub fn tail(&self) -> Word {
        Word { ops: self.ops[1..].to_vec(), gen: self.gen }
    }

    pub fn is_admissible(&self, p: u32) -> bool {
        self.ops.windows(2).all(|w| w[0] <= p * w[1])
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ops.len(), &self.ops, self.gen).cmp(&(other.ops.len(), &other.ops, other.gen))
    }
}

/// Sorted list of distinct words with positive exponents.
pub type Monomial = Vec<(Word, u64)>;

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// F_p-linear combination of monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DLPolynomial {
    p: u32,
    terms: BTreeMap<Monomial, u32>,
}

impl DLPolynomial {
    pub fn zero(p: u32) -> Self {
        DLPolynomial { p, terms: BTreeMap::new() }
    }

    pub fn one(p: u32) -> Self {
        Self::monomial(p, Vec::new(), 1)
    }

    pub fn constant(p: u32, c: i64) -> Self {
        Self::monomial(p, Vec::new(), c)
    }

    pub fn monomial(p: u32, m: Monomial, c: i64) -> Self {
        let mut out = Self::zero(p);
        out.add_term(m, c);
        out
    }

    pub fn word(p: u32, w: Word) -> Self {
        Self::monomial(p, vec![(w, 1)], 1)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u32)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        let p = self.p as i64;
        let c = c.rem_euclid(p) as u32;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (*o.get() + c) % self.p;
                if s == 0 {
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

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), *c as i64);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, k: i64) {
        let k = k.rem_euclid(self.p as i64);
        if k == 0 {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), *c as i64 * k);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.p);
        out.add_scaled(self, k);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.p);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(mul_monomials(a, b), (*ca as i64) * (*cb as i64));
            }
        }
        out
    }

    /// `f^{p^k}`: exponents times `p^k`, coefficients fixed by Frobenius.
    pub fn frobenius(&self, pk: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.iter().map(|(w, e)| (w.clone(), e * pk)).collect(), *c))
            .collect();
        DLPolynomial { p: self.p, terms }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let p = self.p as u64;
        let mut acc = Self::one(self.p);
        let mut pk = 1u64;
        while e > 0 {
            let d = e % p;
            if d > 0 {
                let f = self.frobenius(pk);
                for _ in 0..d {
                    acc = acc.mul(&f);
                }
            }
            e /= p;
            pk *= p;
        }
        acc
    }

    /// True if some monomial involves the generator `gen`.
    pub fn involves(&self, gen: u16) -> bool {
        self.terms.keys().any(|m| m.iter().any(|(w, _)| w.gen == gen))
    }
}

/// The free algebra on a fixed set of generators, with a memo of `Q^s w`.
pub struct DLEngine {
    p: u32,
    gens: Vec<Generator>,
    index: HashMap<String, u16>,
    cache: RwLock<HashMap<(u32, Word), DLPolynomial>>,
}

impl std::fmt::Debug for DLEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DLEngine").field("p", &self.p).field("gens", &self.gens).finish()
    }
}

impl DLEngine {
    /// Generators are ordered by name, which fixes their ids.
    pub fn new(p: u32, gens: &[(&str, u32)]) -> Result<Self, DLError> {
        if !is_odd_prime(p) {
            return Err(DLError::NotOddPrime(p));
        }
        let mut sorted: Vec<Generator> =
            gens.iter().map(|(n, d)| Generator { name: n.to_string(), degree: *d }).collect();
        sorted.sort_by(|a, b| a.name.cmp(&b.name));
        let mut index = HashMap::new();
        for (i, g) in sorted.iter().enumerate() {
            if g.degree == 0 || g.degree % 2 == 1 {
                return Err(DLError::BadDegree { name: g.name.clone(), degree: g.degree });
            }
            if index.insert(g.name.clone(), i as u16).is_some() {
                return Err(DLError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(DLEngine { p, gens: sorted, index, cache: RwLock::new(HashMap::new()) })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn gen_id(&self, name: &str) -> Result<u16, DLError> {
        self.index.get(name).copied().ok_or_else(|| DLError::UnknownGenerator(name.to_string()))
    }

    /// The generator `name` as a polynomial.
    pub fn gen(&self, name: &str) -> Result<DLPolynomial, DLError> {
        Ok(DLPolynomial::word(self.p, Word::generator(self.gen_id(name)?)))
    }

    pub fn zero(&self) -> DLPolynomial {
        DLPolynomial::zero(self.p)
    }

    pub fn one(&self) -> DLPolynomial {
        DLPolynomial::one(self.p)
    }

    pub fn constant(&self, c: i64) -> DLPolynomial {
        DLPolynomial::constant(self.p, c)
    }

    /// `1/2` in F_p.
    pub fn half(&self) -> i64 {
        ((self.p + 1) / 2) as i64
    }

    pub fn word_degree(&self, w: &Word) -> u64 {
        let base = self.gens[w.gen as usize].degree as u64;
        base + 2 * (self.p as u64 - 1) * w.ops.iter().map(|&s| s as u64).sum::<u64>()
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u64 {
        m.iter().map(|(w, e)| e * self.word_degree(w)).sum()
    }

    pub fn degrees(&self, f: &DLPolynomial) -> BTreeSet<u64> {
        f.terms().map(|(m, _)| self.monomial_degree(m)).collect()
    }

    /// The common degree of all monomials; `None` for zero.
    pub fn homogeneous_degree(&self, f: &DLPolynomial) -> Result<Option<u64>, DLError> {
        let d = self.degrees(f);
        match d.len() {
            0 => Ok(None),
            1 => Ok(d.into_iter().next()),
            _ => Err(DLError::Inhomogeneous(d.into_iter().collect())),
        }
    }

    /// Every word admissible and above the instability range.
    pub fn is_normalized(&self, f: &DLPolynomial) -> bool {
        f.terms().all(|(m, _)| {
            m.iter().all(|(w, _)| {
                w.is_admissible(self.p)
                    && (0..w.ops.len()).all(|j| {
                        let below = Word { ops: w.ops[j + 1..].to_vec(), gen: w.gen };
                        2 * w.ops[j] as u64 > self.word_degree(&below)
                    })
            })
        })
    }

    /// `Q^s w` for a basis word, normalized.
    pub fn q_word(&self, s: u32, w: &Word) -> DLPolynomial {
        let key = (s, w.clone());
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let out = self.q_word_uncached(s, w);
        self.cache.write().expect("cache lock").insert(key, out.clone());
        out
    }

    fn q_word_uncached(&self, s: u32, w: &Word) -> DLPolynomial {
        let p = self.p;
        let dw = self.word_degree(w);
        let two_s = 2 * s as u64;
        if two_s < dw {
            return self.zero();
        }
        if two_s == dw {
            return DLPolynomial::monomial(p, vec![(w.clone(), p as u64)], 1);
        }
        let Some(&s1) = w.ops.first() else {
            return DLPolynomial::word(p, Word { ops: vec![s], gen: w.gen });
        };
        if s <= p * s1 {
            let mut ops = Vec::with_capacity(w.ops.len() + 1);
            ops.push(s);
            ops.extend_from_slice(&w.ops);
            return DLPolynomial::word(p, Word { ops, gen: w.gen });
        }
        // Adem: Q^s Q^{s1} = Σ_i (-1)^{s+i} C((p-1)(i-s1)-1, pi-s) Q^{s+s1-i} Q^i
        let tail = w.tail();
        let (s, s1, pp) = (s as i64, s1 as i64, p as i64);
        let lo = (s + pp - 1) / pp;
        let hi = s - (pp - 1) * s1 - 1;
        let mut out = self.zero();
        for i in lo..=hi {
            let c = binomial_mod_p((pp - 1) * (i - s1) - 1, pp * i - s, p) as i64;
            if c == 0 {
                continue;
            }
            let sign = if (s + i) % 2 == 0 { 1 } else { -1 };
            let inner = self.q_word(i as u32, &tail);
            if inner.is_zero() {
                continue;
            }
            let outer = self.apply_q((s + s1 - i) as u32, &inner);
            out.add_scaled(&outer, sign * c);
        }
        out
    }

    /// `Q^s f`, by linearity and the Cartan formula.
    pub fn apply_q(&self, s: u32, f: &DLPolynomial) -> DLPolynomial {
        let terms: Vec<(&Monomial, u32)> = f.terms().collect();
        let parts = if terms.len() > 4 {
            exec::map_collect(&terms, |(m, c)| self.q_monomial(s, m).scale(*c as i64))
        } else {
            terms.iter().map(|(m, c)| self.q_monomial(s, m).scale(*c as i64)).collect()
        };
        let mut out = self.zero();
        for part in parts {
            out.add_assign(&part);
        }
        out
    }

    /// `Q^{ops[0]} Q^{ops[1]} ... f`, innermost applied first.
    pub fn q_chain(&self, ops: &[u32], f: &DLPolynomial) -> DLPolynomial {
        let mut cur = f.clone();
        for &s in ops.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.apply_q(s, &cur);
        }
        cur
    }

    /// Normal form of a possibly inadmissible word.
    pub fn adem_normalize(&self, w: &Word) -> DLPolynomial {
        self.q_chain(&w.ops, &DLPolynomial::word(self.p, Word::generator(w.gen)))
    }

    /// Coefficient of `t^s` in the total operation `Q_t(m) = ∏ Q_t(w)^e`, with
    /// `Q_t(w^{p^k}) = Σ_a (Q^a w)^{p^k} t^{a p^k}`.
    fn q_monomial(&self, s: u32, m: &Monomial) -> DLPolynomial {
        let p = self.p as u64;
        if m.is_empty() {
            return if s == 0 { self.one() } else { self.zero() };
        }
        if m.len() == 1 && m[0].1 == 1 {
            return self.q_word(s, &m[0].0);
        }
        let s = s as u64;
        struct Factor<'a> {
            word: &'a Word,
            pk: u64,
            lo: u64,
        }
        let mut factors = Vec::new();
        for (w, e) in m {
            let half = self.word_degree(w) / 2;
            let (mut e, mut pk) = (*e, 1u64);
            while e > 0 {
                for _ in 0..e % p {
                    factors.push(Factor { word: w, pk, lo: half * pk });
                }
                e /= p;
                pk *= p;
            }
        }
        let mut rest_min: u64 = factors.iter().map(|f| f.lo).sum();
        if rest_min > s {
            return self.zero();
        }
        let mut powers: HashMap<(u32, u64, &Word), DLPolynomial> = HashMap::new();
        let mut acc: BTreeMap<u64, DLPolynomial> = BTreeMap::new();
        acc.insert(0, self.one());
        for f in &factors {
            rest_min -= f.lo;
            let mut next: BTreeMap<u64, DLPolynomial> = BTreeMap::new();
            for (deg, poly) in &acc {
                let room = s - deg - rest_min;
                let a_lo = f.lo / f.pk;
                let a_hi = room / f.pk;
                for a in a_lo..=a_hi {
                    let term = powers
                        .entry((a as u32, f.pk, f.word))
                        .or_insert_with(|| self.q_word(a as u32, f.word).frobenius(f.pk));
                    if term.is_zero() {
                        continue;
                    }
                    let d = deg + a * f.pk;
                    let prod = poly.mul(term);
                    next.entry(d).or_insert_with(|| self.zero()).add_assign(&prod);
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
            if acc.is_empty() {
                return self.zero();
            }
        }
        acc.remove(&s).unwrap_or_else(|| self.zero())
    }

    /// Applies the algebra map sending generator `g` to `map[g]` (others fixed).
    /// Commutes with every `Q^s`.
    pub fn substitute(&self, f: &DLPolynomial, map: &BTreeMap<u16, DLPolynomial>) -> DLPolynomial {
        let mut images: HashMap<Word, DLPolynomial> = HashMap::new();
        let mut out = self.zero();
        for (m, c) in f.terms() {
            let mut prod = self.one();
            for (w, e) in m {
                let img = images.entry(w.clone()).or_insert_with(|| match map.get(&w.gen) {
                    Some(g) => self.q_chain(&w.ops, g),
                    None => DLPolynomial::word(self.p, w.clone()),
                });
                prod = prod.mul(&img.pow(*e));
                if prod.is_zero() {
                    break;
                }
            }
            out.add_scaled(&prod, c as i64);
        }
        out
    }

    /// Convenience for building substitution maps by name.
    pub fn map_of(&self, pairs: Vec<(&str, DLPolynomial)>) -> Result<BTreeMap<u16, DLPolynomial>, DLError> {
        pairs.into_iter().map(|(n, f)| Ok((self.gen_id(n)?, f))).collect()
    }

    pub fn render_word(&self, w: &Word) -> String {
        let mut s = String::new();
        for op in &w.ops {
            let _ = write!(s, "Q^{op} ");
        }
        s.push_str(&self.gens[w.gen as usize].name);
        s
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        if m.is_empty() {
            return "1".to_string();
        }
        m.iter()
            .map(|(w, e)| {
                let base = self.render_word(w);
                match (w.ops.is_empty(), *e) {
                    (_, 1) => base,
                    (true, e) => format!("{base}^{e}"),
                    (false, e) => format!("({base})^{e}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" · ")
    }

    /// Symmetric-residue rendering, e.g. `2 x^27 · Q^9 Q^3 x - Q^3 x`.
    pub fn render(&self, f: &DLPolynomial) -> String {
        if f.is_zero() {
            return "0".to_string();
        }
        let p = self.p as i64;
        let mut out = String::new();
        for (m, c) in f.terms() {
            let mut c = c as i64;
            if c > p / 2 {
                c -= p;
            }
            let body = self.render_monomial(m);
            let mag = c.abs();
            let term = if mag == 1 { body } else { format!("{mag} {body}") };
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn engine(p: u32) -> DLEngine {
        DLEngine::new(p, &[("x", 2 * (p - 1)), ("y", 4 * (p - 1)), ("u", 2)]).unwrap()
    }

    fn qx(e: &DLEngine, ops: &[u32]) -> DLPolynomial {
        e.q_chain(ops, &e.gen("x").unwrap())
    }

    fn wordx(e: &DLEngine, ops: &[u32]) -> DLPolynomial {
        DLPolynomial::word(e.prime(), Word { ops: ops.to_vec(), gen: e.gen_id("x").unwrap() })
    }

    #[test]
    fn instability_examples() {
        for p in [3, 5, 7] {
            let e = engine(p);
            let x = e.gen("x").unwrap();
            assert!(e.apply_q(p - 2, &x).is_zero());
            assert_eq!(e.apply_q(p - 1, &x), x.pow(p as u64));
            assert_eq!(e.apply_q(p, &x), wordx(&e, &[p]));
        }
    }

    #[test]
    fn adem_examples() {
        for p in [3, 5] {
            let e = engine(p);
            let p2 = p * p;
            assert_eq!(qx(&e, &[2 * p2, p]), wordx(&e, &[2 * p2 - p, 2 * p]), "p = {p}");
            let lhs = qx(&e, &[p * p2 + p, p2]);
            let mut rhs = e.zero();
            for i in 1..p {
                let sign = if i % 2 == 1 { 1 } else { -1 };
                rhs.add_scaled(&wordx(&e, &[p * p2 + p - i, p2 + i]), sign);
            }
            assert_eq!(lhs, rhs, "p = {p}: {}", e.render(&lhs));
            let qpx = qx(&e, &[p]);
            assert!(e.apply_q(p * p2 + 1, &qpx.pow(p as u64)).is_zero());
        }
    }

    #[test]
    fn admissible_words_are_fixed() {
        let e = engine(5);
        let w = Word { ops: vec![45, 9], gen: e.gen_id("x").unwrap() };
        assert_eq!(e.adem_normalize(&w), DLPolynomial::word(5, w));
    }

    #[test]
    fn cartan_on_products() {
        let p = 3;
        let e = engine(p);
        let x = e.gen("x").unwrap();
        let u = e.gen("u").unwrap();
        let s = 7;
        let lhs = e.apply_q(s, &x.mul(&u));
        let mut rhs = e.zero();
        for a in 0..=s {
            rhs.add_assign(&e.apply_q(a, &x).mul(&e.apply_q(s - a, &u)));
        }
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn render_is_readable() {
        let e = engine(3);
        let f = wordx(&e, &[9, 3]).mul(&e.gen("x").unwrap().pow(27)).scale(2).add(&wordx(&e, &[3]));
        assert_eq!(e.render(&f), "-x^27 · Q^9 Q^3 x + Q^3 x");
    }

    fn arb_word(p: u32) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(1u32..(3 * p * p), 1..3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adem_idempotent_and_degree_preserving(ops in arb_word(3)) {
            let e = engine(3);
            let w = Word { ops: ops.clone(), gen: e.gen_id("x").unwrap() };
            let n = e.adem_normalize(&w);
            prop_assert!(e.is_normalized(&n));
            let d = e.word_degree(&w);
            for deg in e.degrees(&n) {
                prop_assert_eq!(deg, d);
            }
            let again = e.substitute(&n, &BTreeMap::new());
            prop_assert_eq!(again, n);
        }

        #[test]
        fn total_operation_multiplicative(a in 1u32..4, b in 1u32..4, s in 0u32..30) {
            let p = 3;
            let e = engine(p);
            let u = qx(&e, &[a + 1]);
            let v = e.gen("u").unwrap().pow(b as u64);
            let lhs = e.apply_q(s, &u.mul(&v));
            let mut rhs = e.zero();
            for i in 0..=s {
                rhs.add_assign(&e.apply_q(i, &u).mul(&e.apply_q(s - i, &v)));
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn frobenius_compatibility(ops in arb_word(3), s in 1u32..20) {
            let p = 3;
            let e = engine(p);
            let f = e.adem_normalize(&Word { ops, gen: e.gen_id("x").unwrap() });
            for (m, _) in f.terms().take(2) {
                let mono = DLPolynomial::monomial(p, m.clone(), 1);
                let lhs = e.apply_q(p * s, &mono.pow(p as u64));
                let rhs = e.apply_q(s, &mono).pow(p as u64);
                prop_assert_eq!(lhs, rhs);
                prop_assert!(e.apply_q(p * s + 1, &mono.pow(p as u64)).is_zero());
            }
        }
    }
}
