//! The six Dyer-Lashof identities on `ξ̄_1` in the dual Steenrod algebra and
//! their counterparts on `N_{p−1}(b)` in `H_*(MU)`.

use serde::{Deserialize, Serialize};

use super::eval::RandomizedTest;
use super::{Context, KochmanAction, MuError, NewtonExpander, SymmetricClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Coefficient comparison of the lazy Newton forms.
    Exact,
    /// Full sparse expansion in the generators.
    Expanded,
    /// Random symmetric evaluation.
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuConfig {
    pub samples: usize,
    pub seed: u64,
    /// Decide the product identity exactly at every prime.
    pub expensive: bool,
}

impl Default for MuConfig {
    fn default() -> Self {
        MuConfig { samples: 64, seed: 0x5EED_0001, expensive: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub method: Method,
    pub holds: bool,
    /// Leading monomial of a nonzero difference.
    pub witness: Option<String>,
    pub randomized: Option<RandomizedTest>,
}

pub const IDENTITY_NAMES: [&str; 6] =
    ["top_operation", "vanishing_band", "frobenius_top", "power_product", "vanishing_iterated", "low_operation"];

struct Pair {
    name: &'static str,
    lhs: Vec<SymmetricClass>,
    rhs: Vec<SymmetricClass>,
}

fn pair(name: &'static str, lhs: SymmetricClass, rhs: SymmetricClass) -> Pair {
    Pair { name, lhs: vec![lhs], rhs: vec![rhs] }
}

fn render(xs: &[SymmetricClass]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// The identities as (lhs, rhs) lists, for `x` the base class and `y` the
/// companion class used by the `b` versions.
fn pairs(p: u32, x: &SymmetricClass, companion: Option<&SymmetricClass>) -> Vec<Pair> {
    let k = KochmanAction::new(p);
    let zero = SymmetricClass::zero(p, x.context());
    let half = (p as i64 + 1) / 2;
    let qp = k.apply(p, x);
    let first = match companion {
        Some(y) => pair("top_operation", k.apply(p * p, x), k.apply(p * p - 1, y).scale(half)),
        None => pair("top_operation", k.apply(p * p, x), x.pow(p - 1).pow(p).mul(&qp)),
    };
    let band: Vec<SymmetricClass> = (1..=p - 2).map(|i| k.apply(p * p + i, x)).collect();
    let third = pair("frobenius_top", k.apply(p * p + p - 1, x), qp.pow(p).neg());
    let factors = vec![x.clone(); (p - 1) as usize];
    let product_rhs = match companion {
        Some(y) => x.pow((p - 2) * p).mul(&y.pow(p)).neg(),
        None => x.pow(p * p).neg(),
    };
    let fourth = pair("power_product", k.q_on_product(p * p - p + 1, &factors), product_rhs);
    let iterated: Vec<SymmetricClass> = (1..=p - 1).map(|i| k.apply(p * p + p * i, &qp)).collect();
    let sixth = match companion {
        Some(y) => pair("low_operation", k.apply(2 * p, x), k.apply(2 * p - 1, y).scale(-half)),
        None => pair("low_operation", k.apply(2 * p, x), x.pow(p).mul(&qp).neg()),
    };
    vec![
        first,
        Pair { name: "vanishing_band", rhs: vec![zero.clone(); band.len()], lhs: band },
        third,
        fourth,
        Pair { name: "vanishing_iterated", rhs: vec![zero; iterated.len()], lhs: iterated },
        sixth,
    ]
}

fn decide_exact(pr: &Pair) -> IdentityResult {
    let mut witness = None;
    for (l, r) in pr.lhs.iter().zip(&pr.rhs) {
        let d = l.sub(r);
        if let Some((m, c)) = d.leading_term() {
            let mut t = SymmetricClass::one(d.prime(), d.context()).scale(c);
            for &(a, e) in &m {
                t = t.mul(&SymmetricClass::newton(d.prime(), d.context(), a).pow(e));
            }
            witness = Some(t.to_string());
            break;
        }
    }
    result(pr, Method::Exact, witness, None)
}

fn decide_expanded(pr: &Pair, ex: &NewtonExpander) -> Result<IdentityResult, MuError> {
    let mut witness = None;
    for (l, r) in pr.lhs.iter().zip(&pr.rhs) {
        let d = ex.expand(l)?.sub(&ex.expand(r)?);
        if !d.is_zero() {
            witness = d.leading_monomial();
            break;
        }
    }
    Ok(result(pr, Method::Expanded, witness, None))
}

fn result(pr: &Pair, method: Method, witness: Option<String>, randomized: Option<RandomizedTest>) -> IdentityResult {
    let holds = witness.is_none() && randomized.as_ref().map_or(true, |t| t.holds());
    IdentityResult {
        name: pr.name.to_string(),
        lhs: render(&pr.lhs),
        rhs: render(&pr.rhs),
        method,
        holds,
        witness,
        randomized,
    }
}

/// Identities for `ξ̄_1`. Newton classes are not independent in the ξ
/// context, so every comparison goes through the expansion, which is cheap
/// there; the product identity is additionally tested at random points for
/// `p ≥ 5`.
pub fn verify_stdl(p: u32, cfg: &MuConfig) -> Result<Vec<IdentityResult>, MuError> {
    let x = SymmetricClass::xi_bar(p, 1);
    let ex = NewtonExpander::new(p, Context::Xi);
    let mut out = Vec::new();
    for pr in pairs(p, &x, None) {
        if pr.name == "power_product" && p >= 5 && !cfg.expensive {
            let l = ex.expand(&pr.lhs[0])?;
            let r = ex.expand(&pr.rhs[0])?;
            let weight = pr.lhs[0].max_weight().max(pr.rhs[0].max_weight());
            let t = RandomizedTest::compare_xi(&l, &r, p, weight, cfg.samples, cfg.seed);
            let witness = (!t.holds()).then(|| l.sub(&r).leading_monomial().unwrap_or_default());
            out.push(result(&pr, Method::Randomized, witness, Some(t)));
            let mut exact = decide_expanded(&pr, &ex)?;
            exact.name = "power_product_exact".to_string();
            out.push(exact);
        } else {
            out.push(decide_expanded(&pr, &ex)?);
        }
    }
    Ok(out)
}

/// Identities for `N_{p−1}(b)`. The classes `N_m`, `p ∤ m`, are algebraically
/// independent in `H_*(MU)`, so Newton-form comparison is exact. The product
/// identity is expanded at `p = 3` and tested at random samples otherwise.
pub fn verify_mudl(p: u32, cfg: &MuConfig) -> Result<Vec<IdentityResult>, MuError> {
    let x = SymmetricClass::newton(p, Context::B, p - 1);
    let y = SymmetricClass::newton(p, Context::B, 2 * (p - 1));
    let mut out = Vec::new();
    for pr in pairs(p, &x, Some(&y)) {
        if pr.name != "power_product" {
            out.push(decide_exact(&pr));
        } else if p == 3 {
            out.push(decide_expanded(&pr, &NewtonExpander::new(p, Context::B))?);
        } else if cfg.expensive {
            out.push(decide_exact(&pr));
        } else {
            let t = RandomizedTest::compare_b(&pr.lhs[0], &pr.rhs[0], cfg.samples, cfg.seed)?;
            let witness = (!t.holds()).then(|| pr.lhs[0].sub(&pr.rhs[0]).to_string());
            out.push(result(&pr, Method::Randomized, witness, Some(t)));
            let mut exact = decide_exact(&pr);
            exact.name = "power_product_exact".to_string();
            out.push(exact);
        }
    }
    Ok(out)
}
