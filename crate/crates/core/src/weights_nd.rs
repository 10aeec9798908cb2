//! Transforms of plurisubharmonic weights on `ℂⁿ` and a numerical check of
//! the growth hypotheses under which the canonical solution operator on
//! `(0,1)`-forms with holomorphic coefficients is Hilbert-Schmidt.
//!
//! Suprema are found by a grid search over `ℝ^{2n}` followed by a projected
//! compass search. Passing checks are evidence only: the report describes
//! each result as "consistent with" the hypothesis.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{domain_err, Error, Result};
use crate::quadrature::{integrate_half_line, QuadratureOptions};

pub const MAX_DIMENSION: usize = 3;
pub const DEFAULT_GRID: usize = 64;
/// Cap on grid evaluations for one supremum; higher dimensions get a
/// coarser grid per real axis.
pub const MAX_GRID_EVALUATIONS: usize = 4_000_000;
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 10.0;
pub const SHIFT_RATIO_TOLERANCE: f64 = 1e-2;

const ASCENT_MIN_STEP: f64 = 1e-10;
const ASCENT_MAX_EVALS: usize = 200_000;
const DIRECTIONS_PER_PLANE: usize = 16;

pub type PshFn = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct PshWeight {
    dimension: usize,
    p: PshFn,
    sample_radii: Vec<f64>,
}

impl fmt::Debug for PshWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PshWeight")
            .field("dimension", &self.dimension)
            .field("sample_radii", &self.sample_radii)
            .finish_non_exhaustive()
    }
}

impl PshWeight {
    pub fn new(dimension: usize, p: PshFn, sample_radii: Vec<f64>) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return domain_err(format!(
                "dimension must lie in 1..={MAX_DIMENSION}, got {dimension}"
            ));
        }
        if sample_radii.is_empty()
            || sample_radii[0] <= 0.0
            || sample_radii.windows(2).any(|w| !(w[1] > w[0]))
            || sample_radii.iter().any(|r| !r.is_finite())
        {
            return domain_err("sample_radii must be a nonempty increasing list of positive reals");
        }
        Ok(Self {
            dimension,
            p,
            sample_radii,
        })
    }

    /// Radial weight `φ(|z|)`.
    pub fn radial(
        dimension: usize,
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sample_radii: Vec<f64>,
    ) -> Result<Self> {
        let p: PshFn = Arc::new(move |z: &[Complex64]| {
            profile(z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        });
        Self::new(dimension, p, sample_radii)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sample_radii(&self) -> &[f64] {
        &self.sample_radii
    }

    /// `τ·p`, same sample radii.
    pub fn scaled(&self, tau: f64) -> Self {
        let p = self.p.clone();
        Self {
            dimension: self.dimension,
            p: Arc::new(move |z: &[Complex64]| tau * p(z)),
            sample_radii: self.sample_radii.clone(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<f64> {
        self.check_point(z)?;
        let v = (self.p)(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("weight is not finite at {z:?}")))
        }
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.dimension {
            return domain_err(format!(
                "point has {} coordinates, weight has dimension {}",
                z.len(),
                self.dimension
            ));
        }
        Ok(())
    }

    fn eval_real(&self, x: &[f64]) -> f64 {
        (self.p)(&to_complex(x))
    }
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect()
}

fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Grid points per real axis after applying [`MAX_GRID_EVALUATIONS`].
pub fn effective_grid(grid: usize, real_dim: usize) -> usize {
    let cap = (MAX_GRID_EVALUATIONS as f64)
        .powf(1.0 / real_dim as f64)
        .floor() as usize;
    grid.min(cap).max(2)
}

struct Maximum {
    value: f64,
    point: Vec<f64>,
    spacing: f64,
}

/// Max of `f` over the closed ball `|x - centre| <= radius` in `ℝ^d`.
/// Non-finite values are treated as `-∞`.
fn maximize_in_ball(
    f: &dyn Fn(&[f64]) -> f64,
    centre: &[f64],
    radius: f64,
    grid: usize,
) -> Result<Maximum> {
    let d = centre.len();
    let g = effective_grid(grid, d);
    let spacing = 2.0 * radius / (g - 1) as f64;
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let mut index = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut best: Option<(f64, Vec<f64>)> = None;
    'grid: loop {
        let mut r2 = 0.0;
        for k in 0..d {
            let off = -radius + index[k] as f64 * spacing;
            x[k] = centre[k] + off;
            r2 += off * off;
        }
        if r2 <= radius * radius * (1.0 + 1e-12) {
            let v = eval(&x);
            // strict comparison keeps the lexicographically first maximizer
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, x.clone()));
            }
        }
        for k in (0..d).rev() {
            index[k] += 1;
            if index[k] < g {
                continue 'grid;
            }
            index[k] = 0;
        }
        break;
    }
    let (mut value, mut point) = best.expect("grid contains the centre region");
    if !value.is_finite() && value < 0.0 {
        return Err(Error::Domain(
            "supremand is not finite anywhere on the search grid".into(),
        ));
    }

    let project = |y: &mut [f64]| {
        let off: Vec<f64> = y.iter().zip(centre).map(|(a, c)| a - c).collect();
        let n = norm(&off);
        if n > radius {
            for k in 0..d {
                y[k] = centre[k] + off[k] * radius / n;
            }
        }
    };
    let mut step = spacing;
    let mut evals = 0usize;
    let min_step = ASCENT_MIN_STEP * (1.0 + radius);
    let mut cand = point.clone();
    while step > min_step && evals < ASCENT_MAX_EVALS {
        let mut improved = false;
        for k in 0..d {
            for sign in [1.0, -1.0] {
                cand.copy_from_slice(&point);
                cand[k] += sign * step;
                project(&mut cand);
                let v = eval(&cand);
                evals += 1;
                if v > value {
                    value = v;
                    point.copy_from_slice(&cand);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(Maximum {
        value,
        point,
        spacing,
    })
}

/// Default search radius `8(1 + |w|)`.
pub fn default_search_radius(w: &[Complex64]) -> f64 {
    8.0 * (1.0 + norm(&to_real(w)))
}

/// `p*(w) = sup_z Re⟨z, w⟩ - p(z)` over `|z| <= search_radius`.
pub fn conjugate_transform(
    weight: &PshWeight,
    w: &[Complex64],
    search_radius: f64,
    grid: usize,
) -> Result<f64> {
    weight.check_point(w)?;
    if !(search_radius > 0.0 && search_radius.is_finite()) || grid == 0 {
        return domain_err("search_radius must be positive and grid nonzero");
    }
    let wr = to_real(w);
    let supremand =
        |x: &[f64]| x.iter().zip(&wr).map(|(a, b)| a * b).sum::<f64>() - weight.eval_real(x);
    let centre = vec![0.0; wr.len()];
    let max = maximize_in_ball(&supremand, &centre, search_radius, grid)?;
    if norm(&max.point) > search_radius - 0.5 * max.spacing {
        return Err(Error::InconclusiveSupremum {
            radius: search_radius,
        });
    }
    Ok(max.value)
}

/// `p**(z) = sup_w Re⟨z, w⟩ - p*(w)` over `|w| <= search_radius`, with
/// each inner `p*` at the default radius.
pub fn double_conjugate(
    weight: &PshWeight,
    z: &[Complex64],
    search_radius: f64,
    grid: usize,
) -> Result<f64> {
    weight.check_point(z)?;
    if !(search_radius > 0.0 && search_radius.is_finite()) || grid == 0 {
        return domain_err("search_radius must be positive and grid nonzero");
    }
    let zr = to_real(z);
    let failure = std::cell::RefCell::new(None);
    let supremand = |x: &[f64]| {
        let w = to_complex(x);
        match conjugate_transform(weight, &w, default_search_radius(&w), grid) {
            Ok(pstar) => x.iter().zip(&zr).map(|(a, b)| a * b).sum::<f64>() - pstar,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    let centre = vec![0.0; zr.len()];
    let max = maximize_in_ball(&supremand, &centre, search_radius, grid)?;
    if norm(&max.point) > search_radius - 0.5 * max.spacing {
        return Err(failure.into_inner().unwrap_or(Error::InconclusiveSupremum {
            radius: search_radius,
        }));
    }
    Ok(max.value)
}

/// `p̃(z) = sup_{|ζ| <= 1} p(z + ζ)`.
pub fn sup_shift(weight: &PshWeight, z: &[Complex64], grid: usize) -> Result<f64> {
    weight.check_point(z)?;
    if grid == 0 {
        return domain_err("grid must be nonzero");
    }
    let f = |x: &[f64]| weight.eval_real(x);
    Ok(maximize_in_ball(&f, &to_real(z), 1.0, grid)?.value)
}

/// Unit directions used to probe growth: a circle in each coordinate plane
/// plus the normalized all-ones diagonal.
fn probe_directions(n: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for k in 0..n {
        for j in 0..DIRECTIONS_PER_PLANE {
            let mut u = vec![Complex64::new(0.0, 0.0); n];
            u[k] = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / DIRECTIONS_PER_PLANE as f64);
            out.push(u);
        }
    }
    if n > 1 {
        out.push(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]);
    }
    out
}

fn scale(u: &[Complex64], r: f64) -> Vec<Complex64> {
    u.iter().map(|c| c * r).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub passed: bool,
    pub values: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub tau: f64,
    pub sigma: f64,
    /// `p*` finite at probe points.
    pub conjugate_finite: HypothesisCheck,
    /// `p(z)/|z|` increasing along the sample radii.
    pub superlinear_growth: HypothesisCheck,
    /// `p̃/p` approaching 1 along the sample radii.
    pub shift_ratio: HypothesisCheck,
    /// `∫ exp((τ-σ) p)` finite.
    pub integrability: HypothesisCheck,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed)
    }

    pub fn checks(&self) -> [(&'static str, &HypothesisCheck); 4] {
        [
            ("conjugate_finite", &self.conjugate_finite),
            ("superlinear_growth", &self.superlinear_growth),
            ("shift_ratio", &self.shift_ratio),
            ("integrability", &self.integrability),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisParams {
    pub grid: usize,
    pub growth_threshold: f64,
    pub ratio_tolerance: f64,
}

impl Default for HypothesisParams {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            growth_threshold: DEFAULT_GROWTH_THRESHOLD,
            ratio_tolerance: SHIFT_RATIO_TOLERANCE,
        }
    }
}

pub fn check_growth_hypotheses(
    weight: &PshWeight,
    tau: f64,
    sigma: f64,
) -> Result<HypothesisReport> {
    check_hypotheses_with(weight, tau, sigma, HypothesisParams::default())
}

pub fn check_hypotheses_with(
    weight: &PshWeight,
    tau: f64,
    sigma: f64,
    params: HypothesisParams,
) -> Result<HypothesisReport> {
    if !(tau > 0.0 && sigma > 0.0 && tau < sigma) {
        return Err(Error::ParameterDomain(format!(
            "need 0 < tau < sigma, got tau={tau}, sigma={sigma}"
        )));
    }
    let n = weight.dimension;
    let dirs = probe_directions(n);
    let radii = weight.sample_radii.clone();

    // (a)
    let mut values = Vec::new();
    let mut failed = None;
    for r in [0.5, 1.0, 2.0] {
        for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            w[0] = phase * r;
            match conjugate_transform(weight, &w, default_search_radius(&w), params.grid) {
                Ok(v) => values.push(v),
                Err(e) => {
                    values.push(f64::INFINITY);
                    failed.get_or_insert(format!("|w|={r}: {e}"));
                }
            }
        }
    }
    let conjugate_finite = HypothesisCheck {
        passed: failed.is_none(),
        detail: failed.unwrap_or_else(|| "p* finite at all probe points".into()),
        values,
    };

    // (b)
    let mut growth = Vec::with_capacity(radii.len());
    for &r in &radii {
        let mut m = f64::INFINITY;
        for u in &dirs {
            m = m.min(weight.eval(&scale(u, r))? / r);
        }
        growth.push(m);
    }
    let increasing = growth.windows(2).all(|w| w[1] > w[0]);
    let last = *growth.last().expect("sample radii nonempty");
    let passed = increasing && last > params.growth_threshold;
    let superlinear_growth = HypothesisCheck {
        passed,
        detail: if passed {
            format!(
                "consistent with p/|z| -> inf: increasing, final {last:.6e} > {}",
                params.growth_threshold
            )
        } else if !increasing {
            "p/|z| not increasing along sample radii".into()
        } else {
            format!(
                "final p/|z| = {last:.6e} not above {}",
                params.growth_threshold
            )
        },
        values: growth,
    };

    // (c)
    let mut ratios = Vec::with_capacity(radii.len());
    let mut nonpositive = false;
    for &r in &radii {
        let mut worst: f64 = 1.0;
        for u in &dirs {
            let z = scale(u, r);
            let pz = weight.eval(&z)?;
            if pz <= 0.0 {
                nonpositive = true;
                continue;
            }
            let ratio = sup_shift(weight, &z, params.grid)? / pz;
            if (ratio - 1.0).abs() > (worst - 1.0).abs() {
                worst = ratio;
            }
        }
        ratios.push(worst);
    }
    let gaps: Vec<f64> = ratios.iter().map(|q| (q - 1.0).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let final_gap = *gaps.last().expect("sample radii nonempty");
    let passed = !nonpositive && monotone && final_gap <= params.ratio_tolerance;
    let shift_ratio = HypothesisCheck {
        passed,
        detail: if passed {
            format!("consistent with p~/p -> 1: final gap {final_gap:.3e}")
        } else if nonpositive {
            "p not positive at a sample point".into()
        } else if !monotone {
            "p~/p does not approach 1 monotonically".into()
        } else {
            format!("final gap {final_gap:.3e} above {}", params.ratio_tolerance)
        },
        values: ratios,
    };

    // (d)
    let integrability = integrability_check(weight, tau - sigma, &dirs, &radii);

    Ok(HypothesisReport {
        tau,
        sigma,
        conjugate_finite,
        superlinear_growth,
        shift_ratio,
        integrability,
    })
}

fn integrability_check(
    weight: &PshWeight,
    coeff: f64,
    dirs: &[Vec<Complex64>],
    radii: &[f64],
) -> HypothesisCheck {
    let n = weight.dimension;
    let sphere: f64 = 2.0 * PI.powi(n as i32) / (1..n).map(|k| k as f64).product::<f64>();
    let profile = |r: f64| {
        let mean = dirs
            .iter()
            .map(|u| (coeff * (weight.p)(&scale(u, r))).exp())
            .sum::<f64>()
            / dirs.len() as f64;
        sphere * mean * r.powi(2 * n as i32 - 1)
    };
    let far = 10.0 * radii.last().copied().unwrap_or(1.0);
    match integrate_half_line(profile, 0.0, QuadratureOptions::relative(1e-8)) {
        Ok(v) if v.value.is_finite() => {
            let tail = profile(far);
            let passed = tail <= 1e-10 * v.value.abs().max(f64::MIN_POSITIVE);
            HypothesisCheck {
                passed,
                detail: if passed {
                    format!("consistent with a finite integral: {:.10e}", v.value)
                } else {
                    format!("integrand not decaying: {tail:.3e} at r={far}")
                },
                values: vec![v.value, tail],
            }
        }
        Ok(v) => HypothesisCheck {
            passed: false,
            detail: "integral not finite".into(),
            values: vec![v.value],
        },
        Err(e) => HypothesisCheck {
            passed: false,
            detail: format!("integration failed: {e}"),
            values: vec![],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn power(dim: usize, k: i32) -> PshWeight {
        PshWeight::radial(dim, move |r| r.powi(k), vec![1.0, 10.0, 100.0, 1000.0]).unwrap()
    }

    #[test]
    fn conjugate_of_square() {
        let p = power(1, 2);
        for (w, want) in [
            (c(2.0, 0.0), 1.0),
            (c(0.0, 0.0), 0.0),
            (c(1.0, 1.0), 0.5),
            (c(1.0, 0.0), 0.25),
        ] {
            let got =
                conjugate_transform(&p, &[w], default_search_radius(&[w]), DEFAULT_GRID).unwrap();
            assert!((got - want).abs() < 1e-9, "w={w}: {got}");
        }
    }

    #[test]
    fn linear_weight_has_unbounded_conjugate() {
        let p = power(1, 1);
        let w = [c(2.0, 0.0)];
        let err = conjugate_transform(&p, &w, default_search_radius(&w), DEFAULT_GRID).unwrap_err();
        assert!(matches!(err, Error::InconclusiveSupremum { .. }));
    }

    #[test]
    fn sup_shift_examples() {
        let p = power(1, 2);
        assert!((sup_shift(&p, &[c(3.0, 0.0)], DEFAULT_GRID).unwrap() - 16.0).abs() < 1e-9);
        assert!((sup_shift(&p, &[c(0.0, 0.0)], DEFAULT_GRID).unwrap() - 1.0).abs() < 1e-9);
        let z = [c(1e3 / 2f64.sqrt(), 1e3 / 2f64.sqrt())];
        let ratio = sup_shift(&p, &z, DEFAULT_GRID).unwrap() / p.eval(&z).unwrap();
        assert!((ratio - 1.002001).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn double_conjugate_is_an_involution() {
        for (k, radius) in [(2, 16.0), (4, 64.0)] {
            let p = power(1, k);
            for r in [0.5, 1.0, 2.0] {
                let z = [c(r, 0.0)];
                let got = double_conjugate(&p, &z, radius, 16).unwrap();
                let want = p.eval(&z).unwrap();
                assert!((got - want).abs() < 1e-3, "k={k} r={r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn conjugate_scaling() {
        let p = power(1, 2);
        let w = [c(1.5, -0.5)];
        for tau in [0.5, 2.0] {
            let lhs =
                conjugate_transform(&p.scaled(tau), &w, default_search_radius(&w), DEFAULT_GRID)
                    .unwrap();
            let ws = [w[0] / tau];
            let rhs = tau
                * conjugate_transform(&p, &ws, default_search_radius(&ws), DEFAULT_GRID).unwrap();
            assert!((lhs - rhs).abs() < 1e-3);
        }
    }

    #[test]
    fn hypotheses_for_square_and_linear() {
        let report = check_growth_hypotheses(&power(1, 2), 1.0, 2.0).unwrap();
        assert!(report.all_passed(), "{report:?}");
        // ∫_ℂ e^{-|z|²} = π
        assert!((report.integrability.values[0] - PI).abs() < 1e-7);

        let report = check_growth_hypotheses(&power(1, 1), 1.0, 2.0).unwrap();
        assert!(!report.superlinear_growth.passed);
        assert!(report.integrability.passed);

        assert!(matches!(
            check_growth_hypotheses(&power(1, 2), 2.0, 1.0),
            Err(Error::ParameterDomain(_))
        ));
    }

    #[test]
    fn two_dimensional_square() {
        let p = power(2, 2);
        let w = [c(1.0, 0.0), c(0.0, 1.0)];
        let got = conjugate_transform(&p, &w, default_search_radius(&w), DEFAULT_GRID).unwrap();
        assert!((got - 0.5).abs() < 1e-6, "{got}");
        assert_eq!(effective_grid(64, 4), 44);
    }

    #[test]
    fn rejects_bad_weights() {
        let f: PshFn = Arc::new(|_: &[Complex64]| 0.0);
        assert!(PshWeight::new(4, f.clone(), vec![1.0]).is_err());
        assert!(PshWeight::new(1, f.clone(), vec![2.0, 1.0]).is_err());
        assert!(PshWeight::new(1, f, vec![]).is_err());
    }
}
