//! Suites over the Dyer-Lashof engine and the Newton-class models.

use super::{SuiteError, VerifyConfig};
use crate::dl_engine::{op_definedness, relation_threshold, Definedness, RelationSpec};
use crate::mu_homology::{verify_mudl, verify_stdl, IdentityResult, Method, MuConfig};
use crate::report::{timed, Check, SuiteReport};

fn mu_config(cfg: &VerifyConfig) -> MuConfig {
    MuConfig { samples: cfg.samples, seed: cfg.seed, expensive: cfg.expensive }
}

fn identity_checks(rs: &[IdentityResult]) -> Vec<Check> {
    let mut out = Vec::new();
    for r in rs {
        let mut actual = r.lhs.clone();
        if let Some(t) = &r.randomized {
            actual.push_str(&format!(
                " [{}/{} samples agree over GF({}), degree {}]",
                t.agreed, t.samples, t.field_size, t.total_degree
            ));
        }
        if let Some(w) = &r.witness {
            actual.push_str(&format!(" [difference leads with {w}]"));
        }
        out.push(Check::new(format!("identity.{}", r.name), r.rhs.clone(), actual, r.holds));
        if let (Method::Randomized, Some(t)) = (r.method, &r.randomized) {
            let bits = -t.failure_bound.log2();
            let shown = if bits.is_finite() { format!("2^-{}", bits.floor() as i64) } else { "0".to_string() };
            out.push(Check::new(format!("identity.{}.failure_bound", r.name), "< 2^-30", shown, t.failure_bound < 2f64.powi(-30)));
        }
    }
    out
}

pub fn stdl_suite(p: u32, cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let rs = verify_stdl(p, &mu_config(cfg)).map_err(|e| SuiteError::Config(e.to_string()))?;
    Ok(SuiteReport::new("stdl", p, timed(|| identity_checks(&rs))))
}

pub fn mudl_suite(p: u32, cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let rs = verify_mudl(p, &mu_config(cfg)).map_err(|e| SuiteError::Config(e.to_string()))?;
    Ok(SuiteReport::new("mudl", p, timed(|| identity_checks(&rs))))
}

fn spec(p: u32) -> Result<RelationSpec, SuiteError> {
    RelationSpec::new(p).map_err(|e| SuiteError::Config(e.to_string()))
}

fn definedness_label(d: Definedness) -> &'static str {
    match d {
        Definedness::Undefined => "undefined",
        Definedness::DefinedUnstable => "defined_unstable",
        Definedness::DefinedWithProperties => "defined_with_properties",
    }
}

pub fn relation_suite(p: u32, _cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let pi = p as i64;
    let n = relation_threshold(p);
    let s = pi * pi * pi + pi;
    let d = 2 * (pi - 1) * (pi * pi + 1);
    let mut checks = vec![
        Check::eq("threshold", (2 * (pi * pi + 2)).to_string(), n.to_string()),
        Check::eq("definedness.at_threshold", "defined_with_properties", definedness_label(op_definedness(n, s, d))),
        Check::eq("definedness.below_threshold", "defined_unstable", definedness_label(op_definedness(n - 1, s, d))),
    ];
    let spec = spec(p)?;
    let e = spec.engine();
    checks.extend(timed(|| {
        spec.identities()
            .into_iter()
            .map(|id| Check::new(format!("identity.{}", id.name), e.render(&id.rhs), e.render(&id.lhs), id.holds()))
            .collect()
    }));
    checks.extend(timed(|| {
        let r = spec.grand_residual();
        let homogeneous = e.homogeneous_degree(&spec.relation()).map(|d| d.is_some()).unwrap_or(false);
        let perturbed = spec.perturbed_residual();
        vec![
            Check::eq("grand_residual", "0", e.render(&r)),
            Check::new("relation.homogeneous", "single degree", if homogeneous { "single degree" } else { "mixed" }, homogeneous),
            Check::new("perturbation_detected", "nonzero", e.render(&perturbed), !perturbed.is_zero()),
        ]
    }));
    Ok(SuiteReport::new("relation", p, checks))
}

pub fn sigma_suite(p: u32, _cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let spec = spec(p)?;
    let checks = timed(|| match spec.solve_sigma() {
        Ok(sol) => vec![
            Check::new("solve", "consistent", format!("sigma = {:?}", sol.sigma), true),
            Check::eq("residual", "0", spec.engine().render(&spec.sigma_residual(&sol.sigma))),
        ],
        Err(e) => vec![Check::new("solve", "consistent", e.to_string(), false)],
    });
    Ok(SuiteReport::new("sigma", p, checks))
}

pub fn factorization_suite(p: u32, _cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let spec = spec(p)?;
    let checks = timed(|| {
        let sigma = match spec.solve_sigma() {
            Ok(s) => s.sigma,
            Err(e) => return vec![Check::new("residual", "0", format!("sigma solve failed: {e}"), false)],
        };
        let f = spec.factorization(&sigma);
        let degrees = f.degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
        vec![
            Check::eq("residual", "0", spec.engine().render(&f.residual)),
            Check::new("homogeneous", f.expected_degree.to_string(), degrees, f.homogeneous()),
        ]
    });
    Ok(SuiteReport::new("factorization", p, checks))
}
