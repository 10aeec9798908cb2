//! The unit ball of `ℂ²` with weight `(1 - |z_1|² - |z_2|²)^α`.
//!
//! Moments are `c_{n1,n2}² = π² n1! n2! / ((α+n1+n2+2)⋯(α+1))`, and the
//! energy of `S` on each basis form `u_{n1,n2} dz̄_j` is a ratio difference
//! of these moments. The double sum of the energies diverges, so `S` is not
//! Hilbert-Schmidt on `(0,1)`-forms over the ball.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain_err, Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};

/// Term budget for [`ball_kernel_series`].
pub const BALL_KERNEL_MAX_TERMS: usize = 1_000_000;

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        domain_err(format!("ball weight requires alpha >= 0, got {alpha}"))
    }
}

/// `ln c_{n1,n2}²`.
pub fn ball_moment_log(alpha: f64, n1: usize, n2: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let ln_fact = |n: usize| (1..=n).map(|j| (j as f64).ln()).sum::<f64>();
    let denom: f64 = (1..=n1 + n2 + 2).map(|j| (alpha + j as f64).ln()).sum();
    // Fixed order so that swapping the indices is bit-exact.
    let (lo, hi) = (n1.min(n2), n1.max(n2));
    Ok(2.0 * PI.ln() + ln_fact(lo) + ln_fact(hi) - denom)
}

/// `ln c_{n1,n2}²` for `0 <= n1, n2 <= n_max`, row-major in `n1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMomentGrid {
    pub alpha: f64,
    pub n_max: usize,
    log_moments: Vec<f64>,
}

impl BallMomentGrid {
    pub fn new(alpha: f64, n_max: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let side = n_max + 1;
        let mut log_moments = Vec::with_capacity(side * side);
        for n1 in 0..side {
            for n2 in 0..side {
                log_moments.push(ball_moment_log(alpha, n1, n2)?);
            }
        }
        Ok(Self {
            alpha,
            n_max,
            log_moments,
        })
    }

    pub fn get(&self, n1: usize, n2: usize) -> Option<f64> {
        (n1 <= self.n_max && n2 <= self.n_max).then(|| self.log_moments[n1 * (self.n_max + 1) + n2])
    }
}

/// Which `dz̄_j` the basis form carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Z1,
    Z2,
}

impl TryFrom<u8> for Direction {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Direction::Z1),
            2 => Ok(Direction::Z2),
            other => domain_err(format!("direction must be 1 or 2, got {other}")),
        }
    }
}

/// `‖S(u_{n1,n2} dz̄_1)‖² = (α+n2+2) / ((α+n1+n2+3)(α+n1+n2+2))`, and the
/// mirror image for `dz̄_2`.
pub fn form_energy(alpha: f64, n1: usize, n2: usize, direction: Direction) -> Result<f64> {
    check_alpha(alpha)?;
    let (_, other) = match direction {
        Direction::Z1 => (n1, n2),
        Direction::Z2 => (n2, n1),
    };
    let total = alpha + (n1 + n2) as f64;
    Ok((alpha + other as f64 + 2.0) / ((total + 3.0) * (total + 2.0)))
}

/// `ln(c_{ν+e_j}² / c_ν²) = ln(ν_j + 1) - ln(α + |ν| + 3)`, read off the
/// product form of the moments.
pub fn ball_log_ratio(alpha: f64, n1: usize, n2: usize, direction: Direction) -> Result<f64> {
    check_alpha(alpha)?;
    let own = match direction {
        Direction::Z1 => n1,
        Direction::Z2 => n2,
    };
    Ok((own as f64 + 1.0).ln() - (alpha + (n1 + n2) as f64 + 3.0).ln())
}

/// The same energy as the difference of consecutive moment ratios along
/// the chosen direction, `r_ν - r_{ν-e_j}`, evaluated as
/// `-r_ν expm1(-δ)` with the log-ratio step `δ` formed without cancellation.
pub fn form_energy_from_moments(
    alpha: f64,
    n1: usize,
    n2: usize,
    direction: Direction,
) -> Result<f64> {
    let up = ball_log_ratio(alpha, n1, n2, direction)?.exp();
    let (own, other) = match direction {
        Direction::Z1 => (n1, n2),
        Direction::Z2 => (n2, n1),
    };
    if own == 0 {
        return Ok(up);
    }
    let own = own as f64;
    let total = alpha + own + other as f64;
    let step = ((alpha + other as f64 + 2.0) / (own * (total + 3.0))).ln_1p();
    Ok(-up * (-step).exp_m1())
}

/// `Σ_{n1,n2=1}^{N} [energy(dz̄_1) + energy(dz̄_2)]`, row-major.
pub fn ball_hs_partial_sum(alpha: f64, n_max: usize) -> Result<f64> {
    check_alpha(alpha)?;
    let mut sum = 0.0;
    for n1 in 1..=n_max {
        for n2 in 1..=n_max {
            sum += form_energy(alpha, n1, n2, Direction::Z1)?
                + form_energy(alpha, n1, n2, Direction::Z2)?;
        }
    }
    Ok(sum)
}

fn ball_norm_sq(p: [Complex64; 2]) -> f64 {
    p[0].norm_sqr() + p[1].norm_sqr()
}

/// Weighted Bergman kernel of the ball as the multi-index series
/// `Σ_ν z^ν w̄^ν / c_ν²`, summed by total degree.
///
/// The degree-`d` block is dominated by `b_d = s^d / c_{(d)}` with
/// `s = |z_1 w̄_1| + |z_2 w̄_2| <= |z||w| < 1`; consecutive `b_d` have the
/// nonincreasing ratio `s (α+d+3)/(d+1)`, which gives a geometric tail bound.
pub fn ball_kernel_series(
    alpha: f64,
    z: [Complex64; 2],
    w: [Complex64; 2],
    rel_tol: f64,
) -> Result<Complex64> {
    check_alpha(alpha)?;
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return domain_err(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
    }
    if !(ball_norm_sq(z) < 1.0 && ball_norm_sq(w) < 1.0) {
        return Err(Error::Domain(
            "ball kernel needs |z| < 1 and |w| < 1".into(),
        ));
    }
    let u = [z[0] * w[0].conj(), z[1] * w[1].conj()];
    let s = u[0].norm() + u[1].norm();
    let mut pow1 = vec![Complex64::new(1.0, 0.0)];
    let mut pow2 = vec![Complex64::new(1.0, 0.0)];
    let mut sum = Complex64::new(0.0, 0.0);
    let mut bound = (alpha + 1.0) * (alpha + 2.0) / (PI * PI);
    let mut terms = 0usize;
    let mut d = 0usize;
    loop {
        for n1 in 0..=d {
            let n2 = d - n1;
            sum += pow1[n1] * pow2[n2] * (-ball_moment_log(alpha, n1, n2)?).exp();
        }
        terms += d + 1;
        // Bound on the next block, then on everything after it.
        bound *= s * (alpha + d as f64 + 3.0) / (d as f64 + 1.0);
        let q = s * (alpha + d as f64 + 4.0) / (d as f64 + 2.0);
        let tail = if q < 1.0 {
            bound / (1.0 - q)
        } else {
            f64::INFINITY
        };
        if tail <= rel_tol * sum.norm() {
            return Ok(sum);
        }
        if terms >= BALL_KERNEL_MAX_TERMS {
            return Err(Error::TruncationFailure {
                terms,
                tail_bound: tail,
            });
        }
        d += 1;
        pow1.push(pow1[d - 1] * u[0]);
        pow2.push(pow2[d - 1] * u[1]);
    }
}

/// `(α+1)(α+2)/π²`, the constant that makes the closed form agree with the
/// series (its value at `z = w = 0` is `1 / c_{0,0}²`).
pub fn ball_kernel_prefactor(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((alpha + 1.0) * (alpha + 2.0) / (PI * PI))
}

/// `prefactor · (1 - z_1 w̄_1 - z_2 w̄_2)^{-(α+3)}`.
pub fn ball_kernel_closed(
    alpha: f64,
    z: [Complex64; 2],
    w: [Complex64; 2],
    prefactor: f64,
) -> Result<Complex64> {
    check_alpha(alpha)?;
    if !(ball_norm_sq(z) < 1.0 && ball_norm_sq(w) < 1.0) {
        return Err(Error::Domain(
            "ball kernel needs |z| < 1 and |w| < 1".into(),
        ));
    }
    let base = Complex64::new(1.0, 0.0) - z[0] * w[0].conj() - z[1] * w[1].conj();
    Ok(prefactor * (-(alpha + 3.0) * base.ln()).exp())
}

/// Prefactor recovered numerically: `series(z, w) · (1 - ⟨z, w⟩)^{α+3}`.
pub fn fit_kernel_prefactor(
    alpha: f64,
    z: [Complex64; 2],
    w: [Complex64; 2],
    rel_tol: f64,
) -> Result<Complex64> {
    let series = ball_kernel_series(alpha, z, w, rel_tol)?;
    let shape = ball_kernel_closed(alpha, z, w, 1.0)?;
    Ok(series / shape)
}

/// `ln c_{n1,n2}²` from the nested integral
/// `π² ∫_0^1 ∫_0^{s2} (s2-s1)^{n1} (1-s2)^{n2} s1^α ds1 ds2`.
pub fn ball_moment_quadrature(alpha: f64, n1: usize, n2: usize, rel_tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return domain_err(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
    }
    let inner_opts = QuadratureOptions::relative((rel_tol * 1e-2).max(2e-15));
    let failure = std::cell::Cell::new(None);
    let outer = |s2: f64| -> f64 {
        if s2 <= 0.0 {
            return 0.0;
        }
        let inner =
            |s1: f64| (s2 - s1).powi(n1 as i32) * if alpha == 0.0 { 1.0 } else { s1.powf(alpha) };
        match integrate(inner, 0.0, s2, inner_opts) {
            Ok(v) => v.value * (1.0 - s2).powi(n2 as i32),
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let result = integrate(outer, 0.0, 1.0, QuadratureOptions::relative(rel_tol));
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(2.0 * PI.ln() + result?.value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moment_examples() {
        let pi2 = PI * PI;
        assert!((ball_moment_log(0.0, 0, 0).unwrap() - (pi2 / 2.0).ln()).abs() < 1e-15);
        assert!((ball_moment_log(0.0, 1, 0).unwrap() - (pi2 / 6.0).ln()).abs() < 1e-15);
        for alpha in [0.0, 0.5, 3.0] {
            assert_eq!(
                ball_moment_log(alpha, 4, 9).unwrap(),
                ball_moment_log(alpha, 9, 4).unwrap()
            );
        }
        assert!(ball_moment_log(-0.1, 0, 0).is_err());
    }

    #[test]
    fn grid_is_symmetric() {
        let g = BallMomentGrid::new(1.5, 12).unwrap();
        for a in 0..=12 {
            for b in 0..=12 {
                assert_eq!(g.get(a, b), g.get(b, a));
                assert!(g.get(a, b).unwrap().is_finite());
            }
        }
        assert_eq!(g.get(13, 0), None);
    }

    #[test]
    fn energy_examples() {
        assert!((form_energy(0.0, 1, 1, Direction::Z1).unwrap() - 3.0 / 20.0).abs() < 1e-16);
        assert!((form_energy(0.0, 1, 1, Direction::Z2).unwrap() - 3.0 / 20.0).abs() < 1e-16);
        assert!((form_energy(1.0, 2, 0, Direction::Z1).unwrap() - 0.1).abs() < 1e-16);
        assert!((form_energy_from_moments(1.0, 2, 0, Direction::Z1).unwrap() - 0.1).abs() < 1e-14);
        assert!(Direction::try_from(3).is_err());
        for (n1, n2) in [(0, 0), (3, 7), (25, 25)] {
            let lr = ball_log_ratio(1.5, n1, n2, Direction::Z1).unwrap();
            let diff =
                ball_moment_log(1.5, n1 + 1, n2).unwrap() - ball_moment_log(1.5, n1, n2).unwrap();
            assert!((lr - diff).abs() < 1e-13);
            let lr2 = ball_log_ratio(1.5, n1, n2, Direction::Z2).unwrap();
            let diff2 =
                ball_moment_log(1.5, n1, n2 + 1).unwrap() - ball_moment_log(1.5, n1, n2).unwrap();
            assert!((lr2 - diff2).abs() < 1e-13);
        }
    }

    #[test]
    fn partial_sum_examples() {
        assert!((ball_hs_partial_sum(0.0, 1).unwrap() - 0.3).abs() < 1e-16);
        assert_eq!(ball_hs_partial_sum(2.0, 0).unwrap(), 0.0);
        let a = ball_hs_partial_sum(0.0, 100).unwrap();
        let b = ball_hs_partial_sum(0.0, 200).unwrap();
        assert!(b - a > 0.5);
    }

    #[test]
    fn kernel_examples() {
        let zero = [c(0.0, 0.0); 2];
        for alpha in [0.0, 1.0, 2.5] {
            let k = ball_kernel_series(alpha, zero, zero, 1e-12).unwrap();
            assert!((k.re - (alpha + 2.0) * (alpha + 1.0) / (PI * PI)).abs() < 1e-15);
        }
        let z = [c(0.5, 0.0), c(0.0, 0.0)];
        let k = ball_kernel_series(0.0, z, z, 1e-13).unwrap();
        let want = 2.0 / (PI * PI) * 64.0 / 27.0;
        assert!((k.re - want).abs() < 1e-12 * want);
        assert!(ball_kernel_series(0.0, [c(0.8, 0.0), c(0.7, 0.0)], zero, 1e-10).is_err());
    }

    #[test]
    fn prefactor_is_pinned_by_the_series() {
        let pts = [
            ([c(0.3, 0.1), c(-0.2, 0.4)], [c(0.1, -0.5), c(0.6, 0.2)]),
            ([c(0.5, 0.0), c(0.0, 0.5)], [c(0.5, 0.0), c(0.0, -0.5)]),
        ];
        for alpha in [0.0, 1.0, 3.5] {
            let want = ball_kernel_prefactor(alpha).unwrap();
            for (z, w) in pts {
                let fitted = fit_kernel_prefactor(alpha, z, w, 1e-13).unwrap();
                assert!(
                    (fitted - c(want, 0.0)).norm() < 1e-11 * want,
                    "alpha={alpha}"
                );
                assert!((fitted.re - (alpha + 1.0) / (PI * PI)).abs() > 0.1 / (PI * PI));
            }
        }
    }

    #[test]
    fn quadrature_oracle_agrees() {
        for alpha in [0.0, 0.5, 2.0] {
            for (n1, n2) in [(0, 0), (1, 0), (3, 4), (10, 0), (2, 8)] {
                let closed = ball_moment_log(alpha, n1, n2).unwrap();
                let quad = ball_moment_quadrature(alpha, n1, n2, 1e-11).unwrap();
                assert!((closed - quad).abs() < 1e-9, "alpha={alpha} ({n1},{n2})");
            }
        }
    }
}
