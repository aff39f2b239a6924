//! Seeded random inputs for property checks and the `verify --random` mode.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::params::HeunParams;
use crate::series::TruncatedSeries;

/// Half-width of the sampling box `|Re|, |Im| ≤ BOX`.
pub const BOX: f64 = 2.0;

/// Samples closer than this to a negative integer are redrawn.
pub const NEG_INT_GUARD: f64 = 1e-6;

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, half_width: f64) -> Complex64 {
    Complex64::new(
        rng.random_range(-half_width..=half_width),
        rng.random_range(-half_width..=half_width),
    )
}

fn near_negative_integer(x: Complex64) -> bool {
    let nearest = x.re.round().min(-1.0);
    (x - nearest).norm() < NEG_INT_GUARD
}

fn guarded<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    loop {
        let x = random_complex(rng, BOX);
        if !near_negative_integer(x) {
            return x;
        }
    }
}

/// `(α, β, γ)` from the box, with `β` and `γ` kept away from negative
/// integers (`γ` plays the role of `β` after the `z → 1 − z` swap).
pub fn random_abg<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64, Complex64) {
    let alpha = random_complex(rng, BOX);
    let beta = guarded(rng);
    let gamma = guarded(rng);
    (alpha, beta, gamma)
}

pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> HeunParams {
    let (alpha, beta, gamma) = random_abg(rng);
    let delta = random_complex(rng, BOX);
    let eta = random_complex(rng, BOX);
    HeunParams::new(alpha, beta, gamma, delta, eta).expect("beta is guarded away from negative integers")
}

/// Parameters of trial `trial` under `seed`: each trial reads its own
/// ChaCha stream, so trials can be drawn in any order or in parallel.
pub fn trial_params(seed: u64, trial: u64) -> HeunParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    random_params(&mut rng)
}

/// A series with `len` independent coefficients in the unit box; not a
/// solution of anything.
pub fn random_series<R: Rng + ?Sized>(rng: &mut R, len: usize) -> TruncatedSeries {
    TruncatedSeries::exact((0..len).map(|_| random_complex(rng, 1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_are_independent_streams() {
        assert_eq!(trial_params(42, 3), trial_params(42, 3));
        assert_ne!(trial_params(42, 3), trial_params(42, 4));
        assert_ne!(trial_params(42, 3), trial_params(43, 3));
    }

    #[test]
    fn guard_detects_neighbourhood() {
        assert!(near_negative_integer(Complex64::new(-2.0, 5e-7)));
        assert!(!near_negative_integer(Complex64::new(-2.0, 1e-3)));
        assert!(!near_negative_integer(Complex64::new(-0.5, 0.0)));
        assert!(!near_negative_integer(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: Vec<_> = (0..5)
            .map(|_| ())
            .scan(ChaCha8Rng::seed_from_u64(1), |r, _| Some(random_params(r)))
            .collect();
        let b: Vec<_> = (0..5)
            .map(|_| ())
            .scan(ChaCha8Rng::seed_from_u64(1), |r, _| Some(random_params(r)))
            .collect();
        assert_eq!(a, b);
        for p in &a {
            assert!(p.alpha().re.abs() <= BOX && p.eta().im.abs() <= BOX);
        }
    }
}
