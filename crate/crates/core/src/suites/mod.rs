//! Named verification suites producing [`SuiteReport`]s.

use thiserror::Error;

use crate::exec;
use crate::fgl::{FglConfig, FormalGroupLaw};
use crate::report::{Check, Report, SuiteReport};
use crate::scalar::{binomial, is_odd_prime, max_digits, Ring};

mod algebra;
mod homology;

pub use algebra::{expected_render, power_op_suite, properties_suite};
pub use homology::{factorization_suite, mudl_suite, relation_suite, sigma_suite, stdl_suite};

pub const DEFAULT_SEED: u64 = 0x5EED_0001;
pub const DEFAULT_PRECISION: u32 = 8;
pub const DEFAULT_MAX_PRIME: u32 = 13;
pub const SEED_ENV: &str = "POWEROPS_SEED";

pub const SUITES: [&str; 8] =
    ["powerop", "stdl", "mudl", "relation", "sigma", "factorization", "congruence", "properties"];

/// Suites included in `--suite all`.
pub const ALL_SUITES: [&str; 8] = SUITES;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("p = {p} is not an odd prime at most {max}")]
    BadPrime { p: u32, max: u32 },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("configuration error: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub precision: u32,
    pub xdeg: Option<u32>,
    pub adeg: Option<u32>,
    pub seed: u64,
    pub expensive: bool,
    pub samples: usize,
    pub max_prime: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            precision: DEFAULT_PRECISION,
            xdeg: None,
            adeg: None,
            seed: DEFAULT_SEED,
            expensive: false,
            samples: 64,
            max_prime: DEFAULT_MAX_PRIME,
        }
    }
}

impl VerifyConfig {
    pub fn check_prime(&self, p: u32) -> Result<(), SuiteError> {
        if is_odd_prime(p) && p <= self.max_prime {
            Ok(())
        } else {
            Err(SuiteError::BadPrime { p, max: self.max_prime })
        }
    }

    pub fn fgl(&self, p: u32) -> Result<FormalGroupLaw, SuiteError> {
        self.fgl_with_precision(p, self.precision)
    }

    pub fn fgl_with_precision(&self, p: u32, digits: u32) -> Result<FormalGroupLaw, SuiteError> {
        if digits < 2 || digits > max_digits(p) {
            return Err(SuiteError::Config(format!("precision {digits} outside 2..={}", max_digits(p))));
        }
        let ring = Ring::new(p, digits).map_err(|e| SuiteError::Config(e.to_string()))?;
        let mut cfg = FglConfig::for_prime(p);
        if let Some(x) = self.xdeg {
            cfg.x_bound = x;
        }
        if let Some(a) = self.adeg {
            cfg.alpha_bound = a;
        }
        FormalGroupLaw::target_with(ring, cfg).map_err(|e| SuiteError::Config(e.to_string()))
    }
}

/// Parses `POWEROPS_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>, SuiteError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| SuiteError::Config(format!("{SEED_ENV}={v} is not a u64"))),
        Err(_) => Ok(None),
    }
}

/// Flag beats environment beats default.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, SuiteError> {
    Ok(match flag {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
    })
}

pub fn run_suite(name: &str, p: u32, cfg: &VerifyConfig) -> Result<SuiteReport, SuiteError> {
    cfg.check_prime(p)?;
    match name {
        "powerop" => power_op_suite(p, cfg),
        "stdl" => stdl_suite(p, cfg),
        "mudl" => mudl_suite(p, cfg),
        "relation" => relation_suite(p, cfg),
        "sigma" => sigma_suite(p, cfg),
        "factorization" => factorization_suite(p, cfg),
        "congruence" => Ok(congruence_suite(p)),
        "properties" => properties_suite(p, cfg),
        other => Err(SuiteError::UnknownSuite(other.to_string())),
    }
}

/// Runs every (prime, suite) pair; the order of the result follows the
/// order of the inputs.
pub fn run(primes: &[u32], names: &[&str], cfg: &VerifyConfig) -> Result<Report, SuiteError> {
    for n in names {
        if !SUITES.contains(n) {
            return Err(SuiteError::UnknownSuite(n.to_string()));
        }
    }
    for &p in primes {
        cfg.check_prime(p)?;
    }
    let jobs: Vec<(u32, &str)> = primes.iter().flat_map(|&p| names.iter().map(move |&n| (p, n))).collect();
    let suites = exec::map_collect(&jobs, |&(p, n)| run_suite(n, p, cfg));
    Ok(Report::new(cfg.seed, suites.into_iter().collect::<Result<Vec<_>, _>>()?))
}

fn binomial_over_p_mod_p(n: u64, k: u64, p: u32) -> i64 {
    let c = binomial(n, k) / num_bigint::BigUint::from(p);
    let r = (c % num_bigint::BigUint::from(p)).to_u32_digits().first().copied().unwrap_or(0) as i64;
    crate::powerop::symmetric(r, p)
}

pub fn congruence_suite(p: u32) -> SuiteReport {
    let p64 = p as u64;
    let checks = crate::report::timed(|| {
        vec![
            Check::eq("binomial_2p_2", "-1", binomial_over_p_mod_p(2 * p64, 2, p).to_string()),
            Check::eq("binomial_p2_p", "1", binomial_over_p_mod_p(p64 * p64, p64, p).to_string()),
        ]
    });
    SuiteReport::new("congruence", p, checks)
}
