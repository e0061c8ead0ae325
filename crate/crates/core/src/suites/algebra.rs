//! Power-operation and algebraic-property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SuiteError, VerifyConfig};
use crate::dl_engine::{DLEngine, Word};
use crate::fgl::FormalGroupLaw;
use crate::mu_homology::{Context, Expanded, NewtonExpander};
use crate::powerop::{
    expected_exponent, expected_v3_coefficient, power_operation_from_trace, sigma_dl_coefficient, PipelineTrace,
};
use crate::report::{timed, Check, SuiteReport};
use crate::scalar::{binomial, CoeffV3, TeichmullerRoot};
use crate::series::{quotient_normalize, Bounds, SeriesVar, TruncatedSeries};

/// The closed form `−(C(ip, i)/p) v3 α^{p³−1−i(p−1)}` as the normal form renders it.
pub fn expected_render(p: u32, i: u32) -> String {
    let e = expected_exponent(p, i);
    match expected_v3_coefficient(p, i) {
        0 => "0".to_string(),
        1 => format!("v3 * alpha^{e}"),
        -1 => format!("-v3 * alpha^{e}"),
        c => format!("{c}*v3 * alpha^{e}"),
    }
}

fn err(e: impl std::fmt::Display) -> SuiteError {
    SuiteError::Config(e.to_string())
}

fn series_check(name: &str, expected: &TruncatedSeries, actual: &TruncatedSeries, k: u32) -> Check {
    Check::new(name, expected.to_string(), actual.to_string(), expected == actual).with_precision(k)
}

fn scalar_series(fgl: &FormalGroupLaw, c: &num_bigint::BigUint, base: &TruncatedSeries) -> TruncatedSeries {
    base.scale_scalar(&fgl.ring().biguint(c))
}

/// Stage values along the pipeline, compared literally.
fn stage_checks(fgl: &FormalGroupLaw, trace: &PipelineTrace) -> Vec<Check> {
    let ring = fgl.ring();
    let (p, k) = (ring.p, ring.digits);
    let p3 = p.pow(3);
    let mut out = Vec::new();

    let angle = fgl.angle_p_series();
    let ab = angle.bounds().get(SeriesVar::Alpha).unwrap_or(p3 + 1);
    let top = CoeffV3::v3(ring.one() - ring.p_power(p3 as i64 - 1));
    let want = TruncatedSeries::univariate(ring, SeriesVar::Alpha, ab, [(0, CoeffV3::scalar(ring.int(p as i64))), (p3 - 1, top)]);
    out.push(series_check("stage.angle_p", &want, angle, k));

    let chi = &trace.chi;
    let cb = chi.bounds().get(SeriesVar::Alpha).unwrap_or(p3);
    let want = TruncatedSeries::univariate(ring, SeriesVar::Alpha, cb, [(p - 1, CoeffV3::scalar(ring.int(-1)))]);
    out.push(series_check("stage.chi", &want, chi, k));

    let gb = trace.g.bounds().with(SeriesVar::X, p * p);
    let x = TruncatedSeries::var(ring, gb, SeriesVar::X);
    let want = chi.with_bounds(gb).mul(&x).add(&x.pow(p as u64));
    out.push(series_check("stage.g", &want, &trace.g.truncate(gb), k));

    let kb = trace.k.bounds();
    let y = TruncatedSeries::var(ring, kb, SeriesVar::Y);
    let want = y.sub(&chi.with_bounds(kb).pow((p - 2) as u64).mul(&y.pow(p as u64)));
    out.push(series_check("stage.k", &want, &trace.k, k));

    for n in 1..=p {
        let e = n * (p - 1) + 1;
        let actual = trace.k_inverse.coefficient(SeriesVar::Y, e);
        let c = binomial((n * p) as u64, n as u64) / num_bigint::BigUint::from(e);
        let want = scalar_series(fgl, &c, &chi.with_bounds(actual.bounds()).pow((n * (p - 2)) as u64));
        out.push(series_check(&format!("stage.k_inverse.n{n}"), &want, &actual, k));
    }

    let one = TruncatedSeries::one(ring, trace.log_derivative.bounds());
    out.push(series_check("stage.log_derivative", &one, &trace.log_derivative, k));

    for i in 1..=p {
        let n = i * (p - 1);
        let c = binomial((i * p) as u64, i as u64);
        match trace.f_coefficient(n) {
            Ok(f) => {
                let chi_pow = chi.with_bounds(f.bounds()).pow((i * (p - 2)) as u64);
                out.push(series_check(&format!("stage.f.i{i}"), &scalar_series(fgl, &c, &chi_pow), &f, k));
                match crate::powerop::h_polynomial(&f, &CoeffV3::zero(p), fgl, n) {
                    Ok(h) => {
                        let cp = c / num_bigint::BigUint::from(p);
                        let want = scalar_series(fgl, &cp, &chi.with_bounds(h.bounds()).pow((i * (p - 2)) as u64));
                        out.push(series_check(&format!("stage.h.i{i}"), &want, &h, k));
                    }
                    Err(e) => out.push(Check::new(format!("stage.h.i{i}"), "solvable", e.to_string(), false)),
                }
            }
            Err(e) => out.push(Check::new(format!("stage.f.i{i}"), "in range", e.to_string(), false)),
        }
    }
    out
}

pub fn power_op_suite(p: u32, cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let fgl = cfg.fgl(p)?;
    let k = cfg.precision;
    let trace = PipelineTrace::build(&fgl).map_err(err)?;
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for i in 2..=p {
        let mut res = None;
        let mut c = timed(|| {
            let r = power_operation_from_trace(&fgl, &trace, i);
            let check = match &r {
                Ok(v) => Check::eq(format!("value.i{i}"), expected_render(p, i), v.render()),
                Err(e) => Check::new(format!("value.i{i}"), expected_render(p, i), e.to_string(), false),
            };
            res = r.ok();
            vec![check.with_precision(k)]
        });
        checks.append(&mut c);
        results.push(res);
    }
    let first = results.first().cloned().flatten();
    let last = results.last().cloned().flatten();
    let dl = |name: &str, r: &Option<crate::powerop::PowerOpResult>, op: u32, want: i64| match r {
        Some(r) => match sigma_dl_coefficient(r, op) {
            Ok(c) => {
                let v = c.v3part.symmetric_mod_p().unwrap_or(0);
                Check::new(name, format!("{want}*v3"), format!("{v}*v3"), c.plain.is_zero() && v == want)
            }
            Err(e) => Check::new(name, format!("{want}*v3"), e.to_string(), false),
        },
        None => Check::new(name, format!("{want}*v3"), "power operation failed", false),
    };
    checks.push(dl("dl_coefficient.first", &first, p * p + p - 1, 1));
    checks.push(dl("dl_coefficient.second", &last, p * p + 1, -1));
    checks.extend(timed(|| stage_checks(&fgl, &trace)));
    Ok(SuiteReport::new("powerop", p, checks))
}

fn fgl_axiom_checks(fgl: &FormalGroupLaw, expensive: bool) -> Vec<Check> {
    let ring = fgl.ring();
    let p = ring.p;
    let b = p.pow(3) + 1;
    let mut out = Vec::new();
    match fgl.addition_series(b, b) {
        Ok(f) => {
            let bx = Bounds::none().with(SeriesVar::X, b);
            let unit = f.substitute(SeriesVar::Y, &TruncatedSeries::zero(ring, bx));
            let x = TruncatedSeries::var(ring, bx, SeriesVar::X);
            out.push(Check::new("fgl.unit", "x", unit.to_string(), unit == x));
            let swap = |s: &TruncatedSeries| {
                let s = crate::fgl::rename(s, SeriesVar::X, SeriesVar::Z);
                let s = crate::fgl::rename(&s, SeriesVar::Y, SeriesVar::X);
                crate::fgl::rename(&s, SeriesVar::Z, SeriesVar::Y)
            };
            out.push(Check::new("fgl.commutativity", "F(y, x)", "F(x, y)", swap(&f) == f));
        }
        Err(e) => out.push(Check::new("fgl.unit", "x", e.to_string(), false)),
    }
    // full associativity needs total degree p^3 in three variables
    if p <= 5 || expensive {
        let a = p.pow(3) / 3 + 2;
        let bb = Bounds::none().with(SeriesVar::X, a).with(SeriesVar::Y, a).with(SeriesVar::Z, a);
        let [x, y, z] = [SeriesVar::X, SeriesVar::Y, SeriesVar::Z].map(|v| TruncatedSeries::var(ring, bb, v));
        let lhs = fgl.formal_sum(&x, &y).and_then(|s| fgl.formal_sum(&s, &z));
        let rhs = fgl.formal_sum(&y, &z).and_then(|s| fgl.formal_sum(&x, &s));
        let ok = matches!((&lhs, &rhs), (Ok(l), Ok(r)) if l == r);
        out.push(Check::new("fgl.associativity", "F(F(x, y), z)", "F(x, F(y, z))", ok));
    } else {
        out.push(Check::skipped("fgl.associativity", "three-variable check runs with --expensive for p >= 7"));
    }
    out
}

fn lagrange_checks(fgl: &FormalGroupLaw, trace: &PipelineTrace, seed: u64) -> Vec<Check> {
    let ring = fgl.ring();
    let kb = trace.k.bounds();
    let y = TruncatedSeries::var(ring, kb, SeriesVar::Y);
    let there = trace.k.substitute(SeriesVar::Y, &trace.k_inverse);
    let back = trace.k_inverse.substitute(SeriesVar::Y, &trace.k);
    let mut out = vec![Check::new("lagrange.pipeline", "y", "k(k^-1(y))", there == y && back == y)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 16;
    let coeffs: Vec<(u32, CoeffV3)> = std::iter::once((1, CoeffV3::scalar(ring.one())))
        .chain((2..bound).map(|j| (j, CoeffV3::scalar(ring.int(rng.gen_range(-50..50))))))
        .collect();
    let s = TruncatedSeries::univariate(ring, SeriesVar::Y, bound, coeffs);
    let ok = match s.lagrange_invert(SeriesVar::Y) {
        Ok(inv) => {
            let id = TruncatedSeries::var(ring, s.bounds(), SeriesVar::Y);
            s.substitute(SeriesVar::Y, &inv) == id && inv.substitute(SeriesVar::Y, &s) == id
        }
        Err(_) => false,
    };
    out.push(Check::new("lagrange.random", "y", "s(s^-1(y))", ok));
    out
}

fn normalize_checks(fgl: &FormalGroupLaw, seed: u64) -> Vec<Check> {
    let ring = fgl.ring();
    let p = ring.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let bound = p.pow(3) + 4;
    let mut coeffs: Vec<(u32, CoeffV3)> = Vec::new();
    for j in 0..bound {
        if rng.gen_bool(0.3) {
            let a = ring.int(rng.gen_range(-1000..1000));
            let b = ring.int(rng.gen_range(-1000..1000));
            coeffs.push((j, CoeffV3::new(a, b)));
        }
    }
    let f = TruncatedSeries::univariate(ring, SeriesVar::Alpha, bound, coeffs);
    let ok = match quotient_normalize(&f, fgl) {
        Ok(n) => quotient_normalize(&n.to_series(), fgl).map(|m| m == n).unwrap_or(false),
        Err(_) => false,
    };
    vec![Check::new("quotient_normalize.idempotent", "N(N(f)) = N(f)", if ok { "equal" } else { "differs" }, ok)]
}

fn adem_checks(p: u32, seed: u64) -> Vec<Check> {
    let e = DLEngine::new(p, &[("x", 2 * (p - 1))]).expect("engine");
    let gen = e.gen_id("x").expect("x");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD1);
    let (mut idem, mut degree) = (true, true);
    for _ in 0..24 {
        let len = rng.gen_range(2..=3);
        let ops: Vec<u32> = (0..len).map(|_| rng.gen_range(1..p * p * 2)).collect();
        let w = Word { ops, gen };
        let n = e.adem_normalize(&w);
        idem &= e.is_normalized(&n) && e.substitute(&n, &Default::default()) == n;
        let d = e.word_degree(&w);
        degree &= e.degrees(&n).into_iter().all(|x| x == d);
    }
    vec![
        Check::new("adem.idempotent", "normal form is stable", if idem { "stable" } else { "changed" }, idem),
        Check::new("adem.degree", "degree preserved", if degree { "preserved" } else { "changed" }, degree),
    ]
}

fn newton_checks(p: u32) -> Vec<Check> {
    let mut ok = true;
    let xi = NewtonExpander::new(p, Context::Xi);
    for m in 1..=xi.budget() / p {
        let lhs = xi.by_recursion(p * m);
        let rhs: Result<Expanded, _> = xi.newton_expand(m).map(|n| n.pow(p));
        ok &= matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b);
    }
    let b = NewtonExpander::with_budget(p, Context::B, 24);
    for m in 1..=24 / p {
        let lhs = b.by_recursion(p * m);
        let rhs = b.newton_expand(m).map(|n| n.pow(p));
        ok &= matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b);
    }
    vec![Check::new("newton.frobenius", "N_pm = N_m^p", if ok { "holds" } else { "fails" }, ok)]
}

fn teichmuller_checks(fgl: &FormalGroupLaw) -> Vec<Check> {
    let ring = fgl.ring();
    let p = ring.p;
    let w = TeichmullerRoot::primitive(&ring);
    let top = w.power((p - 1) as u64);
    let proper = (1..p - 1).all(|i| w.power(i as u64) != ring.one());
    vec![Check::new("teichmuller.order", "1", top.to_string(), top == ring.one() && proper).with_precision(ring.digits)]
}

fn stability_checks(p: u32, cfg: &VerifyConfig) -> Result<Vec<Check>, SuiteError> {
    let lo = cfg.fgl_with_precision(p, 8)?;
    let hi = cfg.fgl_with_precision(p, 12.min(crate::scalar::max_digits(p)))?;
    let (tl, th) = (PipelineTrace::build(&lo).map_err(err)?, PipelineTrace::build(&hi).map_err(err)?);
    let mut out = Vec::new();
    for i in [2, p] {
        let a = power_operation_from_trace(&lo, &tl, i).map(|r| r.render());
        let b = power_operation_from_trace(&hi, &th, i).map(|r| r.render());
        let ok = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);
        out.push(Check::new(
            format!("precision_stability.i{i}"),
            format!("{:?}", a.as_ref().map_err(|e| e.to_string())),
            format!("{:?}", b.as_ref().map_err(|e| e.to_string())),
            ok,
        ));
    }
    Ok(out)
}

pub fn properties_suite(p: u32, cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    let fgl = cfg.fgl(p)?;
    let trace = PipelineTrace::build(&fgl).map_err(err)?;
    let mut checks = Vec::new();
    checks.extend(timed(|| fgl_axiom_checks(&fgl, cfg.expensive)));
    checks.extend(timed(|| lagrange_checks(&fgl, &trace, cfg.seed)));
    checks.extend(timed(|| normalize_checks(&fgl, cfg.seed)));
    checks.extend(timed(|| adem_checks(p, cfg.seed)));
    checks.extend(timed(|| newton_checks(p)));
    checks.extend(timed(|| teichmuller_checks(&fgl)));
    let stability = stability_checks(p, cfg)?;
    checks.extend(stability);
    Ok(SuiteReport::new("properties", p, checks))
}
