//! Seeded generators for the property checks.
//!
//! ChaCha8 is used so a seed gives the same stream on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::solver::HolomorphicCoeffs;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the closed disc of the given radius.
pub fn point_in_disc<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.gen::<f64>();
    Complex64::from_polar(r, theta)
}

/// Polynomial of exact degree `degree` whose coefficients are uniform in
/// the unit square `[-1, 1]²`, leading coefficient kept away from zero.
pub fn polynomial<R: Rng>(rng: &mut R, degree: usize) -> HolomorphicCoeffs {
    let mut coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    if coeffs[degree].norm() < 1e-3 {
        coeffs[degree] = Complex64::new(1.0, 0.0);
    }
    HolomorphicCoeffs::new(coeffs)
}

/// [`polynomial`] with degree drawn uniformly from `0..=max_degree`.
pub fn polynomial_up_to<R: Rng>(rng: &mut R, max_degree: usize) -> HolomorphicCoeffs {
    let degree = rng.gen_range(0..=max_degree);
    polynomial(rng, degree)
}
