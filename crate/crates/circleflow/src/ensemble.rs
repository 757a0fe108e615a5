//! Reproducible random test functions.
//!
//! The standard ensemble is `u = exp(T)` with `T` a trigonometric polynomial
//! of degree ≤ 6 and coefficients drawn uniformly from `[-amp, amp]`: smooth,
//! strictly positive, and reproducible from a seed.

use crate::spectral::PeriodicFunction;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_DEGREE: usize = 6;
pub const DEFAULT_AMPLITUDE: f64 = 0.3;

/// Seeded RNG used everywhere randomness is needed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random smooth strictly positive function `exp(trig poly)`.
pub fn random_positive(rng: &mut impl Rng, n: usize, degree: usize, amp: f64) -> PeriodicFunction {
    let coef: Vec<(f64, f64)> = (0..degree)
        .map(|_| (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
        .collect();
    PeriodicFunction::from_fn(n, |t| {
        let mut s = 0.0;
        for (m, (a, b)) in coef.iter().enumerate() {
            let k = (m + 1) as f64;
            s += a * (k * t).cos() + b * (k * t).sin();
        }
        s.exp()
    })
    .expect("valid grid")
}

/// Default-parameter variant of [`random_positive`].
pub fn random_smooth(rng: &mut impl Rng, n: usize) -> PeriodicFunction {
    random_positive(rng, n, DEFAULT_DEGREE, DEFAULT_AMPLITUDE)
}

/// A random trigonometric polynomial (not exponentiated), handy as a test
/// direction for gradient checks.
pub fn random_trig(rng: &mut impl Rng, n: usize, degree: usize, amp: f64) -> PeriodicFunction {
    let coef: Vec<(f64, f64)> = (0..degree)
        .map(|_| (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
        .collect();
    let c0 = rng.gen_range(-amp..amp);
    PeriodicFunction::from_fn(n, |t| {
        let mut s = c0;
        for (m, (a, b)) in coef.iter().enumerate() {
            let k = (m + 1) as f64;
            s += a * (k * t).cos() + b * (k * t).sin();
        }
        s
    })
    .expect("valid grid")
}
