//! Randomized identity testing by evaluation at symmetric-function samples.
//!
//! In the `b` context, `b_i ↦ e_i(z_1, …, z_M)` sends `N_m` to the power sum
//! `Σ z_j^m`. With `M` at least the weight, distinct classes give distinct
//! symmetric polynomials, so a nonzero difference of total degree `D`
//! survives a uniform sample with probability at least `1 − D/q`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Context, Expanded, MuError, SymmetricClass};
use crate::exec;
use crate::field::{GaloisField, Gf};

/// `N_m ↦ Σ sample_j^m`.
pub fn symmetric_evaluate(c: &SymmetricClass, sample: &[Gf], field: &GaloisField) -> Result<Gf, MuError> {
    let needed = c.max_weight();
    if (sample.len() as u64) < needed as u64 {
        return Err(MuError::SampleTooSmall { needed, got: sample.len() });
    }
    let max_m = c.max_index() as usize;
    // power sums for every index that occurs
    let mut sums = vec![field.zero(); max_m + 1];
    for z in sample {
        let mut zp = field.one();
        for s in sums.iter_mut().skip(1) {
            zp = field.mul(&zp, z);
            *s = field.add(s, &zp);
        }
    }
    let mut out = field.zero();
    for (m, coeff) in c.terms() {
        let mut term = field.from_int(coeff as i64);
        for &(a, e) in m {
            term = field.mul(&term, &field.pow(&sums[a as usize], e as u64));
        }
        out = field.add(&out, &term);
    }
    Ok(out)
}

/// Evaluates an expanded `b`-polynomial at `b_i = e_i(sample)`.
pub fn evaluate_elementary(f: &Expanded, sample: &[Gf], field: &GaloisField) -> Gf {
    let top = f.terms().flat_map(|(m, _)| m.iter().map(|&(i, _)| i)).max().unwrap_or(0) as usize;
    // coefficients of ∏ (1 + z_j T), truncated at T^top
    let mut e = vec![field.zero(); top + 1];
    e[0] = field.one();
    for z in sample {
        for i in (1..=top).rev() {
            let add = field.mul(&e[i - 1], z);
            e[i] = field.add(&e[i], &add);
        }
    }
    evaluate_at(f, &e, field)
}

/// Evaluates at explicit generator values, `values[i]` for generator `i`.
pub fn evaluate_at(f: &Expanded, values: &[Gf], field: &GaloisField) -> Gf {
    let mut out = field.zero();
    for (m, c) in f.terms() {
        let mut term = field.from_int(c as i64);
        for &(i, e) in m {
            term = field.mul(&term, &field.pow(&values[i as usize], e as u64));
        }
        out = field.add(&out, &term);
    }
    out
}

/// Upper bound `(D/q)^samples` on the chance that a nonzero difference of
/// total degree `D` vanishes at every sample.
pub fn failure_bound(total_degree: u64, field_size: u64, samples: usize) -> f64 {
    let per = (total_degree as f64 / field_size as f64).min(1.0);
    per.powi(samples as i32)
}

/// Outcome of comparing two classes at random samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomizedTest {
    pub samples: usize,
    pub field_size: u64,
    pub total_degree: u64,
    pub agreed: usize,
    pub failure_bound: f64,
}

impl RandomizedTest {
    pub fn holds(&self) -> bool {
        self.agreed == self.samples
    }

    /// Smallest field with at least `8D` elements, so each sample errs with
    /// probability at most 1/8.
    pub fn field_for(p: u32, total_degree: u64) -> GaloisField {
        GaloisField::with_min_size(p, 8 * total_degree.max(1)).expect("field size fits")
    }

    /// `b` context: samples of `M = weight` points, compared through power sums.
    pub fn compare_b(lhs: &SymmetricClass, rhs: &SymmetricClass, samples: usize, seed: u64) -> Result<Self, MuError> {
        if lhs.context() != Context::B || rhs.context() != Context::B {
            return Err(MuError::ContextMismatch);
        }
        let p = lhs.prime();
        let weight = lhs.max_weight().max(rhs.max_weight());
        let field = Self::field_for(p, weight as u64);
        let seeds: Vec<u64> = (0..samples as u64).collect();
        let eq = exec::map_collect(&seeds, |&i| -> Result<bool, MuError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let sample: Vec<Gf> = (0..weight).map(|_| field.random(&mut rng)).collect();
            Ok(symmetric_evaluate(lhs, &sample, &field)? == symmetric_evaluate(rhs, &sample, &field)?)
        });
        let agreed = eq.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().filter(|&b| b).count();
        Ok(RandomizedTest {
            samples,
            field_size: field.size(),
            total_degree: weight as u64,
            agreed,
            failure_bound: failure_bound(weight as u64, field.size(), samples),
        })
    }

    /// ξ context: uniform values for `ξ_1, …` substituted into expansions.
    /// The total degree is at most `weight/(p−1)`.
    pub fn compare_xi(lhs: &Expanded, rhs: &Expanded, p: u32, weight: u32, samples: usize, seed: u64) -> Self {
        let total = (weight / (p - 1)).max(1) as u64;
        let field = Self::field_for(p, total);
        let gens = lhs
            .terms()
            .chain(rhs.terms())
            .flat_map(|(m, _)| m.iter().map(|&(i, _)| i))
            .max()
            .unwrap_or(0) as usize;
        let seeds: Vec<u64> = (0..samples as u64).collect();
        let agreed = exec::map_collect(&seeds, |&i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let values: Vec<Gf> = (0..=gens).map(|_| field.random(&mut rng)).collect();
            evaluate_at(lhs, &values, &field) == evaluate_at(rhs, &values, &field)
        })
        .into_iter()
        .filter(|&b| b)
        .count();
        RandomizedTest {
            samples,
            field_size: field.size(),
            total_degree: total,
            agreed,
            failure_bound: failure_bound(total, field.size(), samples),
        }
    }
}
