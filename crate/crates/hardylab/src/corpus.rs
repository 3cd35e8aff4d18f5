//! Seeded test corpora.

use std::f64::consts::TAU;

use hardylab_core::{AnalyticFunction, Complex64, FunctionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: usize = 64;
pub const CORPUS_MAX_DEGREE: usize = 16;
pub const PARSEVAL_MAX_DEGREE: usize = 256;

/// Uniform point of the closed unit disc.
fn disc_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, TAU * rng.gen::<f64>())
}

/// `count` polynomials of degree in `2..=max_degree` with coefficients drawn
/// uniformly from the unit disc.
pub fn random_polynomials(seed: u64, count: usize, max_degree: usize) -> Vec<AnalyticFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let degree = rng.gen_range(2..=max_degree.max(2));
            AnalyticFunction::polynomial((0..=degree).map(|_| disc_point(&mut rng)))
        })
        .collect()
}

/// The 64 seeded random polynomials.
pub fn random_corpus(seed: u64) -> Vec<AnalyticFunction> {
    random_polynomials(seed, CORPUS_SIZE, CORPUS_MAX_DEGREE)
}

/// The functions 1, z and z² used by the necessity arguments.
pub fn witness_functions() -> Vec<AnalyticFunction> {
    (0..3).map(AnalyticFunction::monomial).collect()
}

/// Kernels `(1 - a z)^(-s)` for a few centers and exponents.
pub fn kernel_family(degree: usize) -> Vec<AnalyticFunction> {
    let mut out = Vec::new();
    for a in [0.5, 0.8, 0.9] {
        for s in [0.5, 1.0, 2.0] {
            let spec = FunctionSpec::kernel(Complex64::new(a, 0.0), s);
            out.push(spec.expand(degree).expect("centers are below the kernel limit"));
        }
    }
    out
}

/// Random corpus, witness functions and kernel family.
pub fn full_corpus(seed: u64, degree: usize) -> Vec<AnalyticFunction> {
    let mut out = random_corpus(seed);
    out.extend(witness_functions());
    out.extend(kernel_family(degree));
    out
}

/// Polynomials of degree 16, 32, ..., 256 for the Parseval cross-check.
pub fn parseval_corpus(seed: u64) -> Vec<AnalyticFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5052_5356);
    (1..=PARSEVAL_MAX_DEGREE / 16)
        .map(|k| AnalyticFunction::polynomial((0..=16 * k).map(|_| disc_point(&mut rng))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded_and_in_range() {
        let a = random_corpus(42);
        assert_eq!(a.len(), CORPUS_SIZE);
        assert_eq!(a, random_corpus(42));
        assert_ne!(a, random_corpus(43));
        for f in &a {
            assert!(f.degree() <= CORPUS_MAX_DEGREE);
            assert!(f.coeffs().iter().all(|c| c.norm() <= 1.0));
        }
        let p = parseval_corpus(42);
        assert_eq!(p.last().unwrap().coeffs().len(), PARSEVAL_MAX_DEGREE + 1);
    }
}
