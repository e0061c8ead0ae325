//! The relation among primary operations on a class `x` of degree `2(p-1)`,
//! its factorization through `x, y`, and the E_n range bookkeeping.

use std::collections::BTreeMap;

use super::{DLEngine, DLError, DLPolynomial, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definedness {
    Undefined,
    DefinedUnstable,
    DefinedWithProperties,
}

/// Whether `Q^s` on a degree-`d` class exists on E_n-algebras.
pub fn op_definedness(n: i64, s: i64, d: i64) -> Definedness {
    let excess = 2 * s - d;
    if excess <= n - 2 {
        Definedness::DefinedWithProperties
    } else if excess == n - 1 {
        Definedness::DefinedUnstable
    } else {
        Definedness::Undefined
    }
}

/// Least `n` for which `Q^{p^3+p} a_0` behaves as expected:
/// `2(p^3+p) - 2(p-1)(p^2+1) + 2`.
pub fn relation_threshold(p: u32) -> i64 {
    let p = p as i64;
    2 * (p * p * p + p) - 2 * (p - 1) * (p * p + 1) + 2
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub lhs: DLPolynomial,
    pub rhs: DLPolynomial,
    pub residual: DLPolynomial,
}

impl IdentityCheck {
    fn new(name: &str, lhs: DLPolynomial, rhs: DLPolynomial) -> Self {
        let residual = lhs.sub(&rhs);
        IdentityCheck { name: name.to_string(), lhs, rhs, residual }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct SigmaSolution {
    /// `σ_1, …, σ_{p-2}` in `0..p`.
    pub sigma: Vec<u32>,
    pub lhs: DLPolynomial,
    pub residual: DLPolynomial,
}

#[derive(Clone, Debug)]
pub struct FactorizationCheck {
    pub mu_r: DLPolynomial,
    pub qbar_nu: DLPolynomial,
    pub beta_alpha: DLPolynomial,
    pub residual: DLPolynomial,
    /// Degree of the relation class `d`.
    pub expected_degree: u64,
    /// Degrees found in the three composites.
    pub degrees: Vec<u64>,
}

impl FactorizationCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn homogeneous(&self) -> bool {
        self.degrees.iter().all(|&d| d == self.expected_degree)
    }
}

/// Free algebra on `x`, `y`, the relation inputs `a_i, b, c_i`, the relation
/// class `d` and the auxiliary classes `w_i, z_j` (`|z_j| = 2j`).
#[derive(Debug)]
pub struct RelationSpec {
    p: u32,
    engine: DLEngine,
}

impl RelationSpec {
    pub fn new(p: u32) -> Result<Self, DLError> {
        let q = p.checked_sub(1).ok_or(DLError::NotOddPrime(p))?;
        let mut gens: Vec<(String, u32)> = vec![("x".into(), 2 * q), ("y".into(), 4 * q)];
        gens.push(("a0".into(), 2 * q * (p * p + 1)));
        for i in 1..p {
            gens.push((format!("a{i}"), 2 * q * (p * p + i + 1)));
        }
        gens.push(("b".into(), 2 * q * p * p));
        for i in 1..p {
            gens.push((format!("c{i}"), 2 * q * (1 + p + p * p + p * i)));
        }
        gens.push((format!("c{p}"), 2 * q * (2 * p + 1)));
        gens.push(("d".into(), 2 * q * (p * p * p + p * p + p + 1)));
        for i in 1..p.saturating_sub(1) {
            gens.push((format!("w{i}"), 2 * q * (p * p + i + 2)));
        }
        for j in Self::z_indices(p) {
            gens.push((format!("z{j}"), 2 * j));
        }
        let refs: Vec<(&str, u32)> = gens.iter().map(|(n, d)| (n.as_str(), *d)).collect();
        Ok(RelationSpec { p, engine: DLEngine::new(p, &refs)? })
    }

    fn z_indices(p: u32) -> [u32; 3] {
        [p * p * p - 1, p * p * (p - 1), (2 * p + 1) * (p - 1)]
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn engine(&self) -> &DLEngine {
        &self.engine
    }

    fn g(&self, name: &str) -> DLPolynomial {
        self.engine.gen(name).expect("generator registered")
    }

    fn q(&self, ops: &[u32], f: &DLPolynomial) -> DLPolynomial {
        self.engine.q_chain(ops, f)
    }

    fn x(&self) -> DLPolynomial {
        self.g("x")
    }

    /// `Q^{p^2} Q^p x`.
    fn qp2_qp_x(&self) -> DLPolynomial {
        let p = self.p;
        self.q(&[p * p, p], &self.x())
    }

    /// `(Q^{p^2-p-i+1}(x^{p-1}))^p`.
    fn cartan_coefficient(&self, i: u32) -> DLPolynomial {
        let p = self.p;
        self.q(&[p * p - p - i + 1], &self.x().pow((p - 1) as u64)).pow(p as u64)
    }

    /// The relation `R(d)` in the inputs.
    pub fn relation(&self) -> DLPolynomial {
        self.relation_with(true)
    }

    /// The relation without its `b^p Q^{p^2} Q^p x` term.
    pub fn perturbed_relation(&self) -> DLPolynomial {
        self.relation_with(false)
    }

    fn relation_with(&self, keep_b: bool) -> DLPolynomial {
        let p = self.p;
        let p3 = p * p * p;
        let mut r = self.q(&[p3 + p], &self.g("a0"));
        for i in 1..p - 1 {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            r.add_scaled(&self.q(&[p3 + p - i], &self.g(&format!("a{i}"))), sign);
        }
        r.add_assign(&self.q(&[p3 + 1], &self.g(&format!("a{}", p - 1))));
        if keep_b {
            r.add_assign(&self.g("b").pow(p as u64).mul(&self.qp2_qp_x()));
        }
        for i in 1..p {
            r.add_assign(&self.cartan_coefficient(i).mul(&self.g(&format!("c{i}"))));
        }
        let xp1 = self.x().pow((p - 1) as u64);
        r.add_assign(&xp1.pow((p * p) as u64).mul(&self.q(&[2 * p * p - p], &self.g(&format!("c{p}")))));
        r
    }

    /// The map sending each input to its defining expression in `x`.
    pub fn input_map(&self) -> BTreeMap<u16, DLPolynomial> {
        let p = self.p;
        let x = self.x();
        let xp1 = x.pow((p - 1) as u64);
        let qpx = self.q(&[p], &x);
        let mut m = Vec::new();
        m.push(("a0".to_string(), self.q(&[p * p], &x).sub(&xp1.pow(p as u64).mul(&qpx))));
        for i in 1..p - 1 {
            m.push((format!("a{i}"), self.q(&[p * p + i], &x)));
        }
        m.push((format!("a{}", p - 1), self.q(&[p * p + p - 1], &x).add(&qpx.pow(p as u64))));
        m.push(("b".into(), self.q(&[p * p - p + 1], &xp1).add(&x.pow((p * p) as u64))));
        for i in 1..p {
            m.push((format!("c{i}"), self.q(&[p * p + p * i], &qpx)));
        }
        m.push((format!("c{p}"), self.q(&[2 * p], &x).add(&qpx.mul(&x.pow(p as u64)))));
        self.named(m)
    }

    fn named(&self, m: Vec<(String, DLPolynomial)>) -> BTreeMap<u16, DLPolynomial> {
        m.into_iter().map(|(n, f)| (self.engine.gen_id(&n).expect("generator registered"), f)).collect()
    }

    /// The relation with all inputs substituted; zero when the relation holds.
    pub fn grand_residual(&self) -> DLPolynomial {
        self.engine.substitute(&self.relation(), &self.input_map())
    }

    pub fn perturbed_residual(&self) -> DLPolynomial {
        self.engine.substitute(&self.perturbed_relation(), &self.input_map())
    }

    /// The five identities the relation is assembled from.
    pub fn identities(&self) -> Vec<IdentityCheck> {
        let p = self.p;
        let (p2, p3) = (p * p, p * p * p);
        let x = self.x();
        let xp1 = x.pow((p - 1) as u64);
        let qpx = self.q(&[p], &x);
        let e = &self.engine;
        let mut out = Vec::new();

        let lhs = self.q(&[p3 + p, p2], &x);
        let mut rhs = e.zero();
        for i in 1..p {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            rhs.add_scaled(&self.q(&[p3 + p - i, p2 + i], &x), sign);
        }
        out.push(IdentityCheck::new("adem_top", lhs, rhs));

        let lhs = self.q(&[p3 + 1], &qpx.pow(p as u64));
        out.push(IdentityCheck::new("frobenius_vanishing", lhs, e.zero()));

        let lhs = self.q(&[p3 + p], &xp1.pow(p as u64).mul(&qpx));
        let mut rhs = e.zero();
        for i in 0..=p {
            rhs.add_assign(&self.cartan_coefficient(i).mul(&self.q(&[p2 + p * i], &qpx)));
        }
        out.push(IdentityCheck::new("cartan_expansion", lhs, rhs));

        let lhs = self.q(&[2 * p2, p], &x);
        let rhs = self.q(&[2 * p2 - p, 2 * p], &x);
        out.push(IdentityCheck::new("adem_low", lhs, rhs));

        let lhs = self.q(&[2 * p2 - p], &x.pow(p as u64).mul(&qpx));
        let rhs = x.pow(p2 as u64).mul(&self.qp2_qp_x());
        out.push(IdentityCheck::new("cartan_low", lhs, rhs));
        out
    }

    fn y_word(&self, ops: [u32; 2]) -> DLPolynomial {
        let gen = self.engine.gen_id("y").expect("y registered");
        DLPolynomial::word(self.p, Word { ops: ops.to_vec(), gen })
    }

    /// `Q^{p^3+p-(i+1)} Q^{p^2+i} y`.
    fn sigma_basis(&self, i: u32) -> DLPolynomial {
        let p = self.p;
        self.y_word([p * p * p + p - (i + 1), p * p + i])
    }

    /// Finds `σ_i` with `Q^{p^3+p}Q^{p^2-1}y = Σ σ_i Q^{p^3+p-(i+1)}Q^{p^2+i}y - Q^{p^3}Q^{p^2+p-1}y`.
    pub fn solve_sigma(&self) -> Result<SigmaSolution, DLError> {
        let p = self.p;
        let lhs = self.q(&[p * p * p + p, p * p - 1], &self.g("y"));
        let mut sigma = Vec::new();
        let mut residual = lhs.add(&self.sigma_basis(p - 1));
        for i in 1..p - 1 {
            let basis = self.sigma_basis(i);
            let (m, _) = basis.terms().next().expect("basis word");
            let c = lhs.coefficient(m);
            sigma.push(c);
            residual.add_scaled(&basis, -(c as i64));
        }
        if !residual.is_zero() {
            return Err(DLError::Inconsistent(self.engine.render(&residual)));
        }
        Ok(SigmaSolution { sigma, lhs, residual })
    }

    /// Residual of the σ relation for arbitrary `σ`.
    pub fn sigma_residual(&self, sigma: &[u32]) -> DLPolynomial {
        let p = self.p;
        let mut r = self.q(&[p * p * p + p, p * p - 1], &self.g("y"));
        r.add_assign(&self.sigma_basis(p - 1));
        for (i, s) in sigma.iter().enumerate() {
            r.add_scaled(&self.sigma_basis(i as u32 + 1), -(*s as i64));
        }
        r
    }

    pub fn mu_map(&self) -> BTreeMap<u16, DLPolynomial> {
        let p = self.p;
        let (x, y) = (self.x(), self.g("y"));
        let xp1 = x.pow((p - 1) as u64);
        let qpx = self.q(&[p], &x);
        let e = &self.engine;
        let mut m = Vec::new();
        m.push(("a0".to_string(), self.q(&[p * p - 1], &y).sub(&xp1.pow(p as u64).mul(&qpx))));
        for i in 1..p {
            m.push((format!("a{i}"), e.zero()));
        }
        let b = x.pow(((p - 2) * p) as u64).mul(&y.pow(p as u64)).scale(-2).add(&x.pow((p * p) as u64));
        m.push(("b".into(), b));
        for i in 1..p {
            m.push((format!("c{i}"), e.zero()));
        }
        m.push((format!("c{p}"), self.q(&[2 * p - 1], &y).neg().add(&qpx.mul(&x.pow(p as u64)))));
        self.named(m)
    }

    fn z(&self, j: usize) -> String {
        format!("z{}", Self::z_indices(self.p)[j])
    }

    pub fn qbar_map(&self) -> BTreeMap<u16, DLPolynomial> {
        let p = self.p;
        self.named(vec![(self.z(0), self.q(&[p * p + p - 1], &self.g("y")))])
    }

    /// `ν(d) = -Q^{p^3} z_{p^3-1}`.
    pub fn nu_of_d(&self) -> DLPolynomial {
        self.q(&[self.p.pow(3)], &self.g(&self.z(0))).neg()
    }

    pub fn alpha_of_d(&self, sigma: &[u32]) -> DLPolynomial {
        let p = self.p;
        let (p2, p3) = (p * p, p * p * p);
        let mut a = self.engine.zero();
        for (i, s) in sigma.iter().enumerate() {
            let i = i as u32 + 1;
            a.add_scaled(&self.q(&[p3 + p - (i + 1)], &self.g(&format!("w{i}"))), *s as i64);
        }
        a.add_scaled(&self.g(&self.z(1)).pow(p as u64).mul(&self.qp2_qp_x()), -1);
        for i in 1..p {
            a.add_scaled(&self.cartan_coefficient(i).mul(&self.g(&format!("c{i}"))), -1);
        }
        let xp1 = self.x().pow((p - 1) as u64);
        a.add_scaled(&xp1.pow(p2 as u64).mul(&self.q(&[2 * p2 - p], &self.g(&self.z(2)))), -1);
        a
    }

    pub fn beta_map(&self) -> BTreeMap<u16, DLPolynomial> {
        let p = self.p;
        let (x, y) = (self.x(), self.g("y"));
        let qpx = self.q(&[p], &x);
        let mut m = Vec::new();
        for i in 1..p - 1 {
            m.push((format!("w{i}"), self.q(&[p * p + i], &y)));
        }
        for i in 1..p {
            m.push((format!("c{i}"), self.q(&[p * p + p * i], &qpx)));
        }
        let half = self.engine.half();
        let zb = x
            .pow((p * (p - 2)) as u64)
            .mul(&y.pow(p as u64))
            .scale(half)
            .add(&self.q(&[p * p - p + 1], &x.pow((p - 1) as u64)));
        m.push((self.z(1), zb));
        m.push((self.z(2), self.q(&[2 * p - 1], &y).add(&self.q(&[2 * p], &x))));
        self.named(m)
    }

    /// `μR - Q̄ν - βα` for the given `σ`.
    pub fn factorization(&self, sigma: &[u32]) -> FactorizationCheck {
        let e = &self.engine;
        let mu_r = e.substitute(&self.relation(), &self.mu_map());
        let qbar_nu = e.substitute(&self.nu_of_d(), &self.qbar_map());
        let beta_alpha = e.substitute(&self.alpha_of_d(sigma), &self.beta_map());
        let residual = mu_r.sub(&qbar_nu).sub(&beta_alpha);
        let expected_degree = e.word_degree(&Word::generator(e.gen_id("d").expect("d registered")));
        let mut degrees: Vec<u64> = [&mu_r, &qbar_nu, &beta_alpha].iter().flat_map(|f| e.degrees(f)).collect();
        degrees.sort_unstable();
        degrees.dedup();
        FactorizationCheck { mu_r, qbar_nu, beta_alpha, residual, expected_degree, degrees }
    }
}
