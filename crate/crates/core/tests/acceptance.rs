//! Acceptance checks, one PASS/FAIL line each.
//!
//! The process fails when a check outside `KNOWN_FAILURES` fails, or when a
//! listed one starts passing (so the list cannot go stale). The listed checks
//! are discussed under "Known discrepancies" in the README.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use powerops::dl_engine::{relation_threshold, RelationSpec};
use powerops::mu_homology::{verify_mudl, verify_stdl, IdentityResult, Method, MuConfig};
use powerops::powerop::{expected_exponent, power_operation_from_trace, sigma_dl_coefficient, PipelineTrace};
use powerops::report::CheckStatus;
use powerops::scalar::binomial;
use powerops::suites::{power_op_suite, properties_suite, relation_suite, VerifyConfig};
use powerops::fgl::FormalGroupLaw;

/// Exact arithmetic throughout; these are the only tolerances.
const DIGITS: u32 = 8;
const SMALL_PRIME_LIMIT: Duration = Duration::from_secs(1);
const P7_LIMIT: Duration = Duration::from_secs(30);
const RELATION_P5_LIMIT: Duration = Duration::from_secs(300);
const SAMPLES: usize = 64;
const FAILURE_BOUND: f64 = 9.313225746154785e-10; // 2^-30

const KNOWN_FAILURES: [u32; 4] = [3, 5, 6, 7];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn fgl(p: u32) -> FormalGroupLaw {
    FormalGroupLaw::target(p, DIGITS).expect("law")
}

fn limit(p: u32) -> Duration {
    if p >= 7 {
        P7_LIMIT
    } else {
        SMALL_PRIME_LIMIT
    }
}

/// Single term `c·v3·α^e` with `c` the given symmetric residue.
fn power_op_case(i_of: fn(u32) -> u32, sign: i64) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for p in [3u32, 5, 7] {
        let start = Instant::now();
        let law = fgl(p);
        let i = i_of(p);
        let res = PipelineTrace::build(&law).and_then(|t| power_operation_from_trace(&law, &t, i));
        let elapsed = start.elapsed();
        match res {
            Ok(r) => {
                let e = expected_exponent(p, i);
                let terms: Vec<_> = r.value.terms().map(|(k, c)| (k, *c)).collect();
                let exact = terms.len() == 1
                    && terms[0].0 == e
                    && terms[0].1.plain.is_zero()
                    && terms[0].1.v3part.symmetric_mod_p() == Ok(sign);
                let fast = elapsed < limit(p);
                ok &= exact && fast;
                notes.push(format!("p={p}: {} in {:.0?}", r.render(), elapsed));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("p={p}: {e}"));
            }
        }
    }
    outcome(ok, notes.join("; "))
}

fn criterion_1() -> Outcome {
    power_op_case(|_| 2, 1)
}

fn criterion_2() -> Outcome {
    power_op_case(|p| p, -1)
}

fn criterion_3() -> Outcome {
    let cfg = VerifyConfig::default();
    let mut failing = Vec::new();
    for p in [3u32, 5] {
        let suite = power_op_suite(p, &cfg).expect("suite");
        for c in suite.checks.iter().filter(|c| c.name.starts_with("stage.")) {
            if c.status != CheckStatus::Pass {
                failing.push(format!("p={p} {}", c.name));
            }
        }
    }
    let detail = if failing.is_empty() { "all stage values exact".to_string() } else { format!("mismatch: {}", failing.join(", ")) };
    outcome(failing.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3u32, 5, 7] {
        let law = fgl(p);
        let trace = PipelineTrace::build(&law).expect("trace");
        let two = power_operation_from_trace(&law, &trace, 2).expect("i = 2");
        let last = power_operation_from_trace(&law, &trace, p).expect("i = p");
        let a = sigma_dl_coefficient(&two, p * p + p - 1).expect("in range");
        let b = sigma_dl_coefficient(&last, p * p + 1).expect("in range");
        let (ra, rb) = (a.v3part.symmetric_mod_p().unwrap_or(0), b.v3part.symmetric_mod_p().unwrap_or(0));
        ok &= a.plain.is_zero() && b.plain.is_zero() && ra == 1 && rb == -1;
        notes.push(format!("p={p}: {ra}, {rb}"));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3u32, 5] {
        let start = Instant::now();
        let spec = RelationSpec::new(p).expect("spec");
        let ids = spec.identities();
        let bad: Vec<String> = ids.iter().filter(|c| !c.holds()).map(|c| c.name.clone()).collect();
        let residual = spec.grand_residual();
        let elapsed = start.elapsed();
        let in_time = p != 5 || elapsed < RELATION_P5_LIMIT;
        ok &= bad.is_empty() && residual.is_zero() && in_time;
        notes.push(format!(
            "p={p}: {}/5 identities, residual {} ({:.0?})",
            ids.len() - bad.len(),
            spec.engine().render(&residual),
            elapsed
        ));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3u32, 5] {
        let spec = RelationSpec::new(p).expect("spec");
        match spec.solve_sigma() {
            Ok(sol) => {
                let zero = spec.sigma_residual(&sol.sigma).is_zero();
                let f = spec.factorization(&sol.sigma);
                ok &= zero && f.holds();
                notes.push(format!(
                    "p={p}: sigma {:?} (residual {}), factorization residual {}",
                    sol.sigma,
                    if zero { "0" } else { "nonzero" },
                    spec.engine().render(&f.residual)
                ));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("p={p}: {e}"));
            }
        }
    }
    outcome(ok, notes.join("; "))
}

fn judge_identities(p: u32, rs: &[IdentityResult]) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut bad = Vec::new();
    for r in rs.iter().filter(|r| !r.name.ends_with("_exact")) {
        let method_ok = match (p, r.name.as_str()) {
            (3, _) => r.method != Method::Randomized,
            (_, "power_product") => {
                r.method == Method::Randomized
                    && r.randomized.as_ref().is_some_and(|t| t.samples == SAMPLES && t.failure_bound < FAILURE_BOUND)
            }
            _ => r.method != Method::Randomized,
        };
        if !(r.holds && method_ok) {
            ok = false;
            bad.push(format!("p={p} {}", r.name));
        }
    }
    (ok, bad)
}

fn criterion_7() -> Outcome {
    let cfg = MuConfig { samples: SAMPLES, ..MuConfig::default() };
    let mut ok = true;
    let mut bad = Vec::new();
    for p in [3u32, 5, 7] {
        for (label, rs) in [("StDL", verify_stdl(p, &cfg)), ("MUDL", verify_mudl(p, &cfg))] {
            let rs = rs.expect("verification runs");
            let (good, mut names) = judge_identities(p, &rs);
            ok &= good;
            bad.extend(names.drain(..).map(|n| format!("{label} {n}")));
        }
    }
    let detail = if bad.is_empty() { "all identities hold".to_string() } else { format!("failing: {}", bad.join(", ")) };
    outcome(ok, detail)
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3u64, 5, 7, 11, 13] {
        let r = |n: u64, k: u64| {
            let c = binomial(n, k) / num_bigint::BigUint::from(p);
            let v = (c % num_bigint::BigUint::from(p)).to_u32_digits().first().copied().unwrap_or(0) as i64;
            if v > (p / 2) as i64 {
                v - p as i64
            } else {
                v
            }
        };
        let (a, b) = (r(2 * p, 2), r(p * p, p));
        ok &= a == -1 && b == 1;
        notes.push(format!("p={p}: {a}, {b}"));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let cfg = VerifyConfig::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3u32, 5, 7] {
        let s = properties_suite(p, &cfg).expect("suite");
        let failed: Vec<&str> = s.checks.iter().filter(|c| c.status == CheckStatus::Fail).map(|c| c.name.as_str()).collect();
        let stable = s.checks.iter().any(|c| c.name.starts_with("precision_stability") && c.status == CheckStatus::Pass);
        ok &= failed.is_empty() && stable;
        let ran = s.checks.iter().filter(|c| c.status == CheckStatus::Pass).count();
        notes.push(if failed.is_empty() { format!("p={p}: {ran} passed") } else { format!("p={p}: failed {}", failed.join(", ")) });
    }
    outcome(ok, notes.join("; "))
}

fn criterion_10() -> Outcome {
    let cfg = VerifyConfig::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, want) in [(3u32, 22i64), (5, 54), (7, 102)] {
        let n = relation_threshold(p);
        let reported = relation_suite(p, &cfg).expect("suite").check("threshold").map(|c| c.actual.clone());
        ok &= n == want && reported.as_deref() == Some(want.to_string().as_str());
        notes.push(format!("p={p}: {n}"));
    }
    outcome(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "power operation at i = 2", criterion_1),
        (2, "power operation at i = p", criterion_2),
        (3, "intermediate stage values", criterion_3),
        (4, "Dyer-Lashof coefficients", criterion_4),
        (5, "composite relation and its five identities", criterion_5),
        (6, "sigma solve and factorization", criterion_6),
        (7, "Newton-class identities", criterion_7),
        (8, "binomial congruences", criterion_8),
        (9, "property suites", criterion_9),
        (10, "definedness threshold", criterion_10),
    ];
    let mut unexpected = 0;
    for (n, label, run) in criteria {
        let o = run();
        let known = KNOWN_FAILURES.contains(&n);
        println!("{} criterion {n} ({label}): {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        if o.ok == known {
            unexpected += 1;
            println!("  unexpected: criterion {n} is {} the known-failure list", if known { "on" } else { "not on" });
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
