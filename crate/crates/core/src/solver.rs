//! The canonical solution operator on polynomial data.
//!
//! For `f = Σ a_k z^k` the canonical solution of `∂̄u = f` orthogonal to
//! the holomorphic subspace is
//!
//! ```text
//! S(f)(z) = z̄ f(z) - Σ_{k≥1} a_k (c_k² / c_{k-1}²) z^{k-1},
//! ```
//!
//! which is kept in the structural form `z̄ g(z) + h(z)`. Both `∂̄S(f) = f`
//! and `S(f) ⊥ z^j` then reduce to coefficient identities, and quadrature
//! is only used as an independent check.

use num_complex::Complex64;

use crate::error::{domain_err, Error, Result};
use crate::quadrature::{integrate, integrate_half_line, periodic_trapezoid, QuadratureOptions};
use crate::spectrum::eigenvalue;
use crate::weights::MomentSequence;

/// Term budget for kernel series.
pub const KERNEL_MAX_TERMS: usize = 1_000_000;

/// Default central-difference step for [`dbar_residual`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Highest degree accepted by [`reproduce_check`].
pub const REPRODUCE_MAX_DEGREE: usize = 10;

/// Taylor coefficients `a_0, …, a_d` of a polynomial; trailing zeros are
/// dropped so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HolomorphicCoeffs {
    coeffs: Vec<Complex64>,
}

impl HolomorphicCoeffs {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `a_k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `‖f‖² = Σ |a_k|² c_k²` in the weighted space.
    pub fn norm_sq(&self, moments: &MomentSequence) -> Result<f64> {
        let mut sum = 0.0;
        for (k, a) in self.coeffs.iter().enumerate() {
            if *a != Complex64::new(0.0, 0.0) {
                sum += a.norm_sqr() * moments.moment(k)?;
            }
        }
        Ok(sum)
    }
}

/// `z ↦ conj(z) g(z) + h(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridFunction {
    pub conj_factor: HolomorphicCoeffs,
    pub holo_part: HolomorphicCoeffs,
}

impl HybridFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        z.conj() * self.conj_factor.eval(z) + self.holo_part.eval(z)
    }

    /// `∂F/∂z̄`, exactly: the holomorphic part drops out and `∂̄ z̄ = 1`.
    pub fn dbar(&self) -> &HolomorphicCoeffs {
        &self.conj_factor
    }
}

/// `S(f)` in hybrid form.
pub fn apply_solution_operator(
    f: &HolomorphicCoeffs,
    moments: &MomentSequence,
) -> Result<HybridFunction> {
    let mut holo = Vec::with_capacity(f.coeffs().len().saturating_sub(1));
    for (k, a) in f.coeffs().iter().enumerate().skip(1) {
        holo.push(-*a * moments.ratio(k - 1)?);
    }
    Ok(HybridFunction {
        conj_factor: f.clone(),
        holo_part: HolomorphicCoeffs::new(holo),
    })
}

fn check_in_support(moments: &MomentSequence, points: &[Complex64]) -> Result<()> {
    let radius = moments.weight().support_radius();
    if radius.is_finite() {
        for p in points {
            if !(p.norm() < radius) {
                return Err(Error::Domain(format!(
                    "point {p} lies outside the open disc of radius {radius} for {}",
                    moments.weight()
                )));
            }
        }
    }
    Ok(())
}

/// Reproducing kernel `K(z, w) = Σ_k (z w̄)^k / c_k²`.
///
/// Since `r_k = c_{k+1}²/c_k²` is nondecreasing (log-convexity of the
/// moments), successive term ratios `|z w̄| / r_k` are nonincreasing and
/// the geometric bound `t_{k+1} / (1 - q_{k+1})` dominates the tail.
pub fn kernel_eval(
    moments: &MomentSequence,
    z: Complex64,
    w: Complex64,
    rel_tol: f64,
) -> Result<Complex64> {
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return domain_err(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
    }
    check_in_support(moments, &[z, w])?;
    let u = z * w.conj();
    let mut term = Complex64::new((-moments.log_moment(0)?).exp(), 0.0);
    let mut sum = term;
    if u.norm() == 0.0 {
        return Ok(sum);
    }
    let mut tail_bound = f64::INFINITY;
    for k in 0..KERNEL_MAX_TERMS {
        // term is (z w̄)^k / c_k²; next is (z w̄)^{k+1} / c_{k+1}².
        term = term * u / moments.ratio(k)?;
        let q = u.norm() / moments.ratio(k + 1)?;
        tail_bound = if q < 1.0 {
            term.norm() / (1.0 - q)
        } else {
            f64::INFINITY
        };
        if tail_bound <= rel_tol * sum.norm() {
            return Ok(sum);
        }
        sum += term;
    }
    Err(Error::TruncationFailure {
        terms: KERNEL_MAX_TERMS,
        tail_bound,
    })
}

/// Bergman projection of the dilated product `z̄ f(ρz)`: coefficient `k-1`
/// of the result is `a_k (c_k²/c_{k-1}²) ρ^k`.
pub fn project_dilated(
    f: &HolomorphicCoeffs,
    rho: f64,
    moments: &MomentSequence,
) -> Result<HolomorphicCoeffs> {
    if !(rho > 0.0 && rho < 1.0) {
        return domain_err(format!("rho must lie in (0, 1), got {rho}"));
    }
    let mut out = Vec::with_capacity(f.coeffs().len().saturating_sub(1));
    for (k, a) in f.coeffs().iter().enumerate().skip(1) {
        out.push(*a * moments.ratio(k - 1)? * rho.powi(k as i32));
    }
    Ok(HolomorphicCoeffs::new(out))
}

/// `‖z̄ f_ρ - P(z̄ f_ρ)‖² = |a_0|² c_1² + Σ_{k≥1} |a_k|² c_k² ρ^{2k} λ_k`;
/// with `ρ = 1` this is `‖S(f)‖²`.
pub fn defect_norm_sq(f: &HolomorphicCoeffs, rho: f64, moments: &MomentSequence) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return domain_err(format!("rho must lie in (0, 1], got {rho}"));
    }
    let mut sum = 0.0;
    for (k, a) in f.coeffs().iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let term = if k == 0 {
            a.norm_sqr() * moments.moment(1)?
        } else {
            a.norm_sqr() * moments.moment(k)? * rho.powi(2 * k as i32) * eigenvalue(moments, k)?
        };
        sum += term;
    }
    Ok(sum)
}

/// `max(λ_0, max_{1≤k≤N} λ_k)`: a constant `C` with
/// `defect_norm_sq(f, ρ) ≤ C ‖f‖²` for every `f` of degree at most `N`.
pub fn bound_constant(moments: &MomentSequence, n_max: usize) -> Result<f64> {
    if n_max == 0 {
        return domain_err("bound_constant requires N >= 1");
    }
    let mut best = eigenvalue(moments, 0)?;
    for k in 1..=n_max {
        best = best.max(eigenvalue(moments, k)?);
    }
    Ok(best)
}

/// `⟨F, z^j⟩ = ∫ F z̄^j dμ`, from `⟨z̄ z^k, z^j⟩ = c_{j+1}² δ_{k,j+1}` and
/// `⟨z^i, z^j⟩ = c_j² δ_{ij}`.
pub fn monomial_inner_product(
    f: &HybridFunction,
    j: usize,
    moments: &MomentSequence,
) -> Result<Complex64> {
    let g = f.conj_factor.coeff(j + 1);
    let h = f.holo_part.coeff(j);
    let mut acc = Complex64::new(0.0, 0.0);
    if g != Complex64::new(0.0, 0.0) {
        acc += g * moments.moment(j + 1)?;
    }
    if h != Complex64::new(0.0, 0.0) {
        acc += h * moments.moment(j)?;
    }
    Ok(acc)
}

/// `⟨F, u_j⟩` against the orthonormal basis `u_j = z^j / c_j`.
pub fn normalized_inner_product(
    f: &HybridFunction,
    j: usize,
    moments: &MomentSequence,
) -> Result<Complex64> {
    let raw = monomial_inner_product(f, j, moments)?;
    Ok(raw * (-0.5 * moments.log_moment(j)?).exp())
}

/// `max_z |∂̄F(z) - f(z)|` with `∂̄ = (∂_x + i ∂_y)/2` taken by central
/// differences of step `h` on point values of `F`.
pub fn dbar_residual(
    f_hybrid: &HybridFunction,
    f: &HolomorphicCoeffs,
    points: &[Complex64],
    h: f64,
) -> Result<f64> {
    if !(h > 1e-8 && h < 1e-3) {
        return domain_err(format!(
            "finite-difference step must lie in (1e-8, 1e-3), got {h}"
        ));
    }
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let mut worst: f64 = 0.0;
    for &z in points {
        let fx = (f_hybrid.eval(z + dx) - f_hybrid.eval(z - dx)) / (2.0 * h);
        let fy = (f_hybrid.eval(z + dy) - f_hybrid.eval(z - dy)) / (2.0 * h);
        let wirtinger = 0.5 * (fx + Complex64::i() * fy);
        worst = worst.max((wirtinger - f.eval(z)).norm());
    }
    Ok(worst)
}

fn radial_integral<F>(
    moments: &MomentSequence,
    opts: QuadratureOptions,
    angular: F,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let weight = moments.weight();
    let radial = |r: f64| {
        let d = weight.density(r);
        if d == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            angular(r) * (d * r)
        }
    };
    let support = weight.support_radius();
    let integral = if support.is_finite() {
        integrate(radial, 0.0, support, opts)?
    } else {
        integrate_half_line(radial, 0.0, opts)?
    };
    Ok(integral.value)
}

/// `∫ K(z, w) f(w) dμ(w)` by radial adaptive quadrature and an angular
/// trapezoid rule, with the kernel from [`kernel_eval`]. Equals `f(z)` by
/// the reproducing property.
pub fn reproduce_check(
    moments: &MomentSequence,
    f: &HolomorphicCoeffs,
    z: Complex64,
    rel_tol: f64,
) -> Result<Complex64> {
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return domain_err(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
    }
    let degree = f.degree().unwrap_or(0);
    if degree > REPRODUCE_MAX_DEGREE {
        return domain_err(format!(
            "reproduce_check supports degree <= {REPRODUCE_MAX_DEGREE}, got {degree}"
        ));
    }
    check_in_support(moments, &[z])?;
    let kernel_tol = (rel_tol * 1e-3).max(2e-14);
    let points = 64.max(8 * (degree + 1));
    let opts = QuadratureOptions::relative(rel_tol * 1e-2);
    let failure = std::cell::Cell::new(None);
    let angular = |r: f64| -> Complex64 {
        periodic_trapezoid(
            |theta| {
                let w = Complex64::from_polar(r, theta);
                match kernel_eval(moments, z, w, kernel_tol) {
                    Ok(k) => k * f.eval(w),
                    Err(e) => {
                        failure.set(Some(e));
                        Complex64::new(f64::NAN, 0.0)
                    }
                }
            },
            points,
        )
    };
    let value = radial_integral(moments, opts, angular);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    value
}

/// `‖z̄ f_ρ - P(z̄ f_ρ)‖²` by direct two-dimensional quadrature of the
/// point values; the independent check for [`defect_norm_sq`].
pub fn defect_norm_sq_quadrature(
    f: &HolomorphicCoeffs,
    rho: f64,
    moments: &MomentSequence,
    rel_tol: f64,
) -> Result<f64> {
    let projected = project_dilated(f, rho, moments)?;
    let degree = f.degree().unwrap_or(0);
    // |z̄ f(ρz) - p(z)|² is a trigonometric polynomial of degree <= 2(d+1) in θ.
    let points = 4 * (degree + 2);
    let opts = QuadratureOptions::relative(rel_tol);
    let rho_c = Complex64::new(rho, 0.0);
    let angular = |r: f64| -> Complex64 {
        let v: f64 = periodic_trapezoid(
            |theta| {
                let z = Complex64::from_polar(r, theta);
                (z.conj() * f.eval(rho_c * z) - projected.eval(z)).norm_sqr()
            },
            points,
        );
        Complex64::new(v, 0.0)
    };
    Ok(radial_integral(moments, opts, angular)?.re)
}

/// `∫ |F|² dμ` for a hybrid function, by the same quadrature.
pub fn hybrid_norm_sq_quadrature(
    f: &HybridFunction,
    moments: &MomentSequence,
    rel_tol: f64,
) -> Result<f64> {
    let degree = f.conj_factor.coeffs().len().max(f.holo_part.coeffs().len());
    let points = 4 * (degree + 2);
    let opts = QuadratureOptions::relative(rel_tol);
    let angular = |r: f64| -> Complex64 {
        let v: f64 = periodic_trapezoid(
            |theta| f.eval(Complex64::from_polar(r, theta)).norm_sqr(),
            points,
        );
        Complex64::new(v, 0.0)
    };
    Ok(radial_integral(moments, opts, angular)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::weights::WeightSpec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn seq(w: WeightSpec) -> MomentSequence {
        MomentSequence::new(w).unwrap()
    }

    #[test]
    fn coefficients_normalize_trailing_zeros() {
        let f = HolomorphicCoeffs::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(f.degree(), Some(1));
        assert!(HolomorphicCoeffs::from_real(&[0.0, 0.0]).is_zero());
        assert_eq!(HolomorphicCoeffs::zero().degree(), None);
    }

    #[test]
    fn solution_operator_examples() {
        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        let one = HolomorphicCoeffs::from_real(&[1.0]);
        let s = apply_solution_operator(&one, &disc).unwrap();
        assert!(s.holo_part.is_zero());
        let z = c(0.3, -0.7);
        assert_eq!(s.eval(z), z.conj());

        let id = HolomorphicCoeffs::from_real(&[0.0, 1.0]);
        let s = apply_solution_operator(&id, &fock).unwrap();
        assert_eq!(s.holo_part.coeffs(), &[c(-1.0, 0.0)]);
        assert!((s.eval(z) - c(z.norm_sqr() - 1.0, 0.0)).norm() < 1e-15);
        let s = apply_solution_operator(&id, &disc).unwrap();
        assert_eq!(s.holo_part.coeffs(), &[c(-0.5, 0.0)]);
    }

    #[test]
    fn kernel_examples() {
        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let k = kernel_eval(&fock, c(0.0, 0.0), c(0.0, 0.0), 1e-12).unwrap();
        assert!((k - c(1.0 / PI, 0.0)).norm() < 1e-15);
        let k = kernel_eval(&fock, c(1.0, 0.0), c(1.0, 0.0), 1e-12).unwrap();
        assert!((k.re - std::f64::consts::E / PI).abs() < 1e-12);
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        let k = kernel_eval(&disc, c(0.5, 0.0), c(0.5, 0.0), 1e-12).unwrap();
        assert!((k.re - 16.0 / (9.0 * PI)).abs() < 1e-11);
        // Fock kernel is e^{z w̄}/π.
        let (z, w) = (c(1.5, -0.5), c(-0.7, 2.0));
        let k = kernel_eval(&fock, z, w, 1e-13).unwrap();
        let want = (z * w.conj()).exp() / PI;
        assert!((k - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn kernel_domain_errors() {
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        assert!(matches!(
            kernel_eval(&disc, c(1.0, 0.0), c(0.0, 0.0), 1e-10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            kernel_eval(&disc, c(0.1, 0.0), c(0.1, 0.0), 0.5),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn kernel_truncation_budget() {
        // Near the boundary the geometric tail needs ~ln(tol)/ln|zw̄| terms.
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        let r = 1.0 - 1e-9;
        let e = kernel_eval(&disc, c(r, 0.0), c(r, 0.0), 1e-13).unwrap_err();
        assert!(matches!(
            e,
            Error::TruncationFailure {
                terms: KERNEL_MAX_TERMS,
                ..
            }
        ));
    }

    #[test]
    fn projection_examples() {
        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        assert!(
            project_dilated(&HolomorphicCoeffs::from_real(&[1.0]), 0.5, &fock)
                .unwrap()
                .is_zero()
        );
        let p = project_dilated(&HolomorphicCoeffs::from_real(&[0.0, 1.0]), 0.5, &fock).unwrap();
        assert_eq!(p.coeffs(), &[c(0.5, 0.0)]);
        let p =
            project_dilated(&HolomorphicCoeffs::from_real(&[0.0, 0.0, 1.0]), 0.9, &disc).unwrap();
        assert!((p.coeff(1).re - 0.81 * 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.coeff(0), c(0.0, 0.0));
        assert!(project_dilated(&HolomorphicCoeffs::from_real(&[1.0]), 1.0, &disc).is_err());
        assert!(project_dilated(&HolomorphicCoeffs::from_real(&[1.0]), 0.0, &disc).is_err());
    }

    #[test]
    fn defect_norm_examples() {
        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        let one = HolomorphicCoeffs::from_real(&[1.0]);
        for rho in [0.2, 0.7, 1.0] {
            assert!((defect_norm_sq(&one, rho, &disc).unwrap() - PI / 2.0).abs() < 1e-15);
            assert!((defect_norm_sq(&one, rho, &fock).unwrap() - PI).abs() < 1e-14);
        }
        let id = HolomorphicCoeffs::from_real(&[0.0, 1.0]);
        assert!((defect_norm_sq(&id, 1.0, &fock).unwrap() - PI).abs() < 1e-14);
        assert!((defect_norm_sq(&id, 1.0, &disc).unwrap() - PI / 12.0).abs() < 1e-15);
        assert!(defect_norm_sq(&id, 1.5, &disc).is_err());
    }

    #[test]
    fn bound_constant_examples() {
        let fock2 = seq(WeightSpec::fock(2.0).unwrap());
        assert!((bound_constant(&fock2, 100).unwrap() - 1.0).abs() < 1e-13);
        let disc = seq(WeightSpec::disc(0.0).unwrap());
        assert_eq!(bound_constant(&disc, 100).unwrap(), 0.5);
        let fock4 = seq(WeightSpec::fock(4.0).unwrap());
        let want = 1.0 / PI.sqrt();
        assert!((bound_constant(&fock4, 10).unwrap() - want).abs() < 1e-14);
        assert!(bound_constant(&disc, 0).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let s = apply_solution_operator(&HolomorphicCoeffs::from_real(&[0.0, 1.0]), &fock).unwrap();
        assert_eq!(monomial_inner_product(&s, 0, &fock).unwrap(), c(0.0, 0.0));
        let zbar = HybridFunction {
            conj_factor: HolomorphicCoeffs::from_real(&[1.0]),
            holo_part: HolomorphicCoeffs::zero(),
        };
        for j in 0..5 {
            assert_eq!(
                monomial_inner_product(&zbar, j, &fock).unwrap(),
                c(0.0, 0.0)
            );
        }
        let disc2 = seq(WeightSpec::disc(2.0).unwrap());
        let mut rng = random::rng(7);
        let f = random::polynomial(&mut rng, 10);
        let s = apply_solution_operator(&f, &disc2).unwrap();
        for j in 0..=10 {
            assert!(monomial_inner_product(&s, j, &disc2).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn dbar_examples() {
        let one = HolomorphicCoeffs::from_real(&[1.0]);
        let zbar = HybridFunction {
            conj_factor: one.clone(),
            holo_part: HolomorphicCoeffs::zero(),
        };
        let pts = [c(0.0, 0.0), c(1.0, 2.0), c(-3.0, 0.5)];
        assert!(dbar_residual(&zbar, &one, &pts, 1e-5).unwrap() <= 1e-9);

        let mut rng = random::rng(11);
        let pts: Vec<_> = (0..100)
            .map(|_| random::point_in_disc(&mut rng, 2.0))
            .collect();
        let fock2 = seq(WeightSpec::fock(2.0).unwrap());
        let id = HolomorphicCoeffs::from_real(&[0.0, 1.0]);
        let s = apply_solution_operator(&id, &fock2).unwrap();
        assert!(dbar_residual(&s, &id, &pts, 1e-5).unwrap() <= 1e-6);

        let fock4 = seq(WeightSpec::fock(4.0).unwrap());
        let f = random::polynomial(&mut rng, 20);
        let s = apply_solution_operator(&f, &fock4).unwrap();
        let max_f = pts.iter().map(|&p| f.eval(p).norm()).fold(0.0, f64::max);
        assert!(dbar_residual(&s, &f, &pts, 1e-5).unwrap() <= 1e-6 * max_f);

        assert!(dbar_residual(&s, &f, &pts, 1e-2).is_err());
    }

    #[test]
    fn reproduce_examples() {
        let disc0 = seq(WeightSpec::disc(0.0).unwrap());
        let z = c(0.3, 0.1);
        let v = reproduce_check(&disc0, &HolomorphicCoeffs::from_real(&[1.0]), z, 1e-8).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-8);

        let disc1 = seq(WeightSpec::disc(1.0).unwrap());
        let v = reproduce_check(
            &disc1,
            &HolomorphicCoeffs::from_real(&[0.0, 1.0]),
            c(0.5, 0.0),
            1e-8,
        )
        .unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 0.5e-8);

        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let z = c(1.0, 0.5);
        let v = reproduce_check(
            &fock,
            &HolomorphicCoeffs::from_real(&[0.0, 0.0, 1.0]),
            z,
            1e-8,
        )
        .unwrap();
        assert!((v - z * z).norm() < 1e-8 * (z * z).norm());
    }

    #[test]
    fn quadrature_matches_norm_identity() {
        let fock = seq(WeightSpec::fock(2.0).unwrap());
        let f = HolomorphicCoeffs::new(vec![c(1.0, 0.5), c(-0.25, 1.0), c(0.0, 0.3)]);
        for rho in [0.5, 0.9] {
            let exact = defect_norm_sq(&f, rho, &fock).unwrap();
            let quad = defect_norm_sq_quadrature(&f, rho, &fock, 1e-12).unwrap();
            assert!(
                (exact - quad).abs() < 1e-10 * exact,
                "rho={rho}: {exact} vs {quad}"
            );
        }
        let s = apply_solution_operator(&f, &fock).unwrap();
        let quad = hybrid_norm_sq_quadrature(&s, &fock, 1e-12).unwrap();
        let exact = defect_norm_sq(&f, 1.0, &fock).unwrap();
        assert!((exact - quad).abs() < 1e-10 * exact);
    }
}
