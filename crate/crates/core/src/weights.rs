//! Radial weights and their monomial moments `c_n² = ∫ |z|^{2n} dμ(z)`.
//!
//! Moments are carried as natural logarithms throughout: `n!`-sized values
//! overflow an `f64` long before the indices the spectral checks need.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{domain_err, Error, Result};
use crate::gamma::{gamma_ratio, ln_gamma_ratio, ln_gamma_second_difference, log_gamma};
use crate::quadrature::{integrate, integrate_half_line, QuadratureOptions};

/// Default relative tolerance for moment quadrature.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Default subdivision budget for moment quadrature.
pub const DEFAULT_MAX_INTERVALS: usize = 1_000_000;

/// Highest moment order a sequence will extend to for closed-form weights.
pub const MAX_CLOSED_FORM_ORDER: usize = 10_000_000;

/// Highest moment order a sequence will extend to for quadrature-backed weights.
pub const MAX_QUADRATURE_ORDER: usize = 100_000;

pub type RadialDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A rotation-invariant measure on a disc (or the plane), given by its
/// density with respect to Lebesgue measure as a function of `|z|`.
#[derive(Clone)]
pub enum WeightSpec {
    /// `(1 - |z|²)^α` on the unit disc.
    DiscPolynomial { alpha: f64 },
    /// `exp(-|z|^m)` on the whole plane.
    FockExponential { m: f64 },
    /// User-supplied radial density on `|z| < support_radius`
    /// (`f64::INFINITY` for the plane).
    ///
    /// Radial symmetry makes the monomials orthogonal; that they are also
    /// complete in the weighted space is assumed, not checked.
    CustomRadial {
        label: String,
        density: RadialDensity,
        support_radius: f64,
    },
}

impl WeightSpec {
    pub fn disc(alpha: f64) -> Result<Self> {
        let w = Self::DiscPolynomial { alpha };
        w.validate()?;
        Ok(w)
    }

    pub fn fock(m: f64) -> Result<Self> {
        let w = Self::FockExponential { m };
        w.validate()?;
        Ok(w)
    }

    pub fn custom<F>(label: impl Into<String>, support_radius: f64, density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let w = Self::CustomRadial {
            label: label.into(),
            density: Arc::new(density),
            support_radius,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::DiscPolynomial { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => {
                domain_err(format!("disc weight requires alpha >= 0, got {alpha}"))
            }
            Self::FockExponential { m } if !(m > 0.0 && m.is_finite()) => {
                domain_err(format!("Fock weight requires m > 0, got {m}"))
            }
            Self::CustomRadial { support_radius, .. } if !(support_radius > 0.0) => domain_err(
                format!("custom weight requires a positive support radius, got {support_radius}"),
            ),
            _ => Ok(()),
        }
    }

    /// Density at radius `r` (zero outside the support).
    pub fn density(&self, r: f64) -> f64 {
        match self {
            Self::DiscPolynomial { alpha } => {
                if r >= 1.0 {
                    0.0
                } else if *alpha == 0.0 {
                    1.0
                } else {
                    ((1.0 - r) * (1.0 + r)).powf(*alpha)
                }
            }
            Self::FockExponential { m } => (-r.powf(*m)).exp(),
            Self::CustomRadial {
                density,
                support_radius,
                ..
            } => {
                if r < *support_radius {
                    density(r)
                } else {
                    0.0
                }
            }
        }
    }

    /// Natural log of the density, `-inf` where it vanishes.
    pub fn log_density(&self, r: f64) -> f64 {
        match self {
            Self::DiscPolynomial { alpha } => {
                if r >= 1.0 {
                    f64::NEG_INFINITY
                } else if *alpha == 0.0 {
                    0.0
                } else {
                    alpha * ((1.0 - r) * (1.0 + r)).ln()
                }
            }
            Self::FockExponential { m } => -r.powf(*m),
            Self::CustomRadial { .. } => self.density(r).ln(),
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            Self::DiscPolynomial { .. } => 1.0,
            Self::FockExponential { .. } => f64::INFINITY,
            Self::CustomRadial { support_radius, .. } => *support_radius,
        }
    }
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DiscPolynomial { alpha } => f
                .debug_struct("DiscPolynomial")
                .field("alpha", alpha)
                .finish(),
            Self::FockExponential { m } => f.debug_struct("FockExponential").field("m", m).finish(),
            Self::CustomRadial {
                label,
                support_radius,
                ..
            } => f
                .debug_struct("CustomRadial")
                .field("label", label)
                .field("support_radius", support_radius)
                .finish_non_exhaustive(),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DiscPolynomial { alpha } => write!(f, "disc:alpha={alpha}"),
            Self::FockExponential { m } => write!(f, "fock:m={m}"),
            Self::CustomRadial { label, .. } => write!(f, "custom:{label}"),
        }
    }
}

/// `ln c_n²` for any weight: closed form where available, quadrature otherwise.
pub fn moment_log(weight: &WeightSpec, n: usize) -> Result<f64> {
    weight.validate()?;
    match *weight {
        WeightSpec::DiscPolynomial { alpha } => disc_moment_closed(alpha, n),
        WeightSpec::FockExponential { m } => fock_moment_closed(m, n),
        WeightSpec::CustomRadial { .. } => moment_quadrature(weight, n, DEFAULT_REL_TOL),
    }
}

/// `ln(π n! / ((α+n+1)(α+n)⋯(α+1)))`, accumulated as
/// `ln π - Σ_{j≤n} ln(1 + α/j) - ln(α+n+1)`.
pub fn disc_moment_closed(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain_err(format!("disc weight requires alpha >= 0, got {alpha}"));
    }
    let mut sum = 0.0;
    for j in 1..=n {
        sum += (alpha / j as f64).ln_1p();
    }
    Ok(PI.ln() - sum - (alpha + n as f64 + 1.0).ln())
}

/// `ln((2π/m) Γ((2n+2)/m))`.
pub fn fock_moment_closed(m: f64, n: usize) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return domain_err(format!("Fock weight requires m > 0, got {m}"));
    }
    Ok((TAU / m).ln() + log_gamma((2.0 * n as f64 + 2.0) / m)?)
}

/// `ln c_n²` by adaptive quadrature of `2π ∫ r^{2n+1} density(r) dr`.
///
/// The integrand is evaluated in log space and rescaled by its sampled
/// maximum, so orders whose moments overflow an `f64` are still reachable.
pub fn moment_quadrature(weight: &WeightSpec, n: usize, rel_tol: f64) -> Result<f64> {
    weight.validate()?;
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return domain_err(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
    }
    let power = 2.0 * n as f64 + 1.0;
    let support = weight.support_radius();
    let log_integrand = |r: f64| -> f64 {
        if r <= 0.0 {
            return f64::NEG_INFINITY;
        }
        power * r.ln() + weight.log_density(r)
    };

    // Sample the integrand to find its scale and screen the density.
    let samples: Vec<f64> = (1..400)
        .map(|i| {
            let t = i as f64 / 400.0;
            if support.is_finite() {
                t * support
            } else {
                t / (1.0 - t)
            }
        })
        .collect();
    for &r in &samples {
        let d = weight.density(r);
        if d < 0.0 || d.is_nan() {
            return domain_err(format!("density is negative or undefined at r = {r}"));
        }
    }
    if support.is_infinite() {
        let tail = |r: f64| (power + 1.0) * r.ln() + weight.log_density(r);
        let (t6, t8) = (tail(1e6), tail(1e8));
        if t8.is_finite() && t8 >= t6 {
            return Err(Error::Divergence { order: n });
        }
    }
    let shift = samples
        .iter()
        .map(|&r| log_integrand(r))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return domain_err("density vanishes on every sampled radius");
    }

    let scaled = |r: f64| -> f64 {
        let v = log_integrand(r);
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            (v - shift).exp()
        }
    };
    let opts = QuadratureOptions {
        abs_tol: 0.0,
        rel_tol,
        max_intervals: DEFAULT_MAX_INTERVALS,
    };
    let result = if support.is_finite() {
        integrate(scaled, 0.0, support, opts)
    } else {
        integrate_half_line(scaled, 0.0, opts)
    };
    let integral = match result {
        Ok(v) => v,
        Err(Error::QuadratureFailure { achieved_error, .. }) if achieved_error.is_infinite() => {
            return Err(Error::Divergence { order: n })
        }
        Err(e) => return Err(e),
    };
    if !integral.value.is_finite() {
        return Err(Error::Divergence { order: n });
    }
    if integral.value <= 0.0 {
        return domain_err(format!("moment of order {n} is not positive"));
    }
    Ok(TAU.ln() + shift + integral.value.ln())
}

/// Lazily extended cache of `ln c_n²` for one weight.
///
/// Entries are appended strictly in order and each depends only on the
/// weight and its index, so the cache is invisible to callers. Ratios of
/// consecutive moments, and the steps between those ratios, are produced
/// from the weight's closed form where one exists instead of subtracting
/// cached logarithms.
pub struct MomentSequence {
    weight: WeightSpec,
    quad_tol: f64,
    cache: RwLock<Cache>,
}

#[derive(Clone, Default)]
struct Cache {
    log_moments: Vec<f64>,
    // Disc weights: running Σ ln(1 + α/j).
    disc_sum: f64,
}

impl Clone for MomentSequence {
    fn clone(&self) -> Self {
        Self {
            weight: self.weight.clone(),
            quad_tol: self.quad_tol,
            cache: RwLock::new(self.cache.read().expect("moment cache poisoned").clone()),
        }
    }
}

impl fmt::Debug for MomentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentSequence")
            .field("weight", &self.weight)
            .field("computed_upto", &self.computed_upto())
            .finish()
    }
}

impl MomentSequence {
    pub fn new(weight: WeightSpec) -> Result<Self> {
        weight.validate()?;
        Ok(Self {
            weight,
            quad_tol: DEFAULT_REL_TOL,
            cache: RwLock::new(Cache::default()),
        })
    }

    /// Builds the sequence and fills it through order `n`.
    pub fn with_upto(weight: WeightSpec, n: usize) -> Result<Self> {
        let seq = Self::new(weight)?;
        seq.ensure(n)?;
        Ok(seq)
    }

    /// Sets the relative tolerance used for quadrature-backed weights.
    pub fn with_quadrature_tolerance(mut self, rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
            return domain_err(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
        }
        self.quad_tol = rel_tol;
        self.cache = RwLock::new(Cache::default());
        Ok(self)
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    /// Number of cached moments; orders `0..computed_upto()` are available
    /// without further work.
    pub fn computed_upto(&self) -> usize {
        self.cache
            .read()
            .expect("moment cache poisoned")
            .log_moments
            .len()
    }

    /// Largest order this sequence will extend to.
    pub fn max_order(&self) -> usize {
        match self.weight {
            WeightSpec::CustomRadial { .. } => MAX_QUADRATURE_ORDER,
            _ => MAX_CLOSED_FORM_ORDER,
        }
    }

    /// Makes sure `ln c_k²` is cached for every `k <= n`.
    pub fn ensure(&self, n: usize) -> Result<()> {
        if n < self.computed_upto() {
            return Ok(());
        }
        if n > self.max_order() {
            return Err(Error::Resource(format!(
                "moment order {n} exceeds the limit {} for {}",
                self.max_order(),
                self.weight
            )));
        }
        let mut cache = self.cache.write().expect("moment cache poisoned");
        while cache.log_moments.len() <= n {
            let k = cache.log_moments.len();
            let value = match self.weight {
                WeightSpec::DiscPolynomial { alpha } => {
                    if k > 0 {
                        cache.disc_sum += (alpha / k as f64).ln_1p();
                    }
                    PI.ln() - cache.disc_sum - (alpha + k as f64 + 1.0).ln()
                }
                WeightSpec::FockExponential { m } => fock_moment_closed(m, k)?,
                WeightSpec::CustomRadial { .. } => {
                    moment_quadrature(&self.weight, k, self.quad_tol)?
                }
            };
            cache.log_moments.push(value);
        }
        Ok(())
    }

    /// `ln c_n²`.
    pub fn log_moment(&self, n: usize) -> Result<f64> {
        self.ensure(n)?;
        Ok(self
            .cache
            .read()
            .expect("moment cache poisoned")
            .log_moments[n])
    }

    /// `c_n²` (may be `inf` for very large orders).
    pub fn moment(&self, n: usize) -> Result<f64> {
        Ok(self.log_moment(n)?.exp())
    }

    /// Copy of the cached `ln c_k²` for `k <= n`.
    pub fn log_moments(&self, n: usize) -> Result<Vec<f64>> {
        self.ensure(n)?;
        Ok(self
            .cache
            .read()
            .expect("moment cache poisoned")
            .log_moments[..=n]
            .to_vec())
    }

    /// `ln(c_{n+1}² / c_n²)`.
    pub fn log_ratio(&self, n: usize) -> Result<f64> {
        match self.weight {
            WeightSpec::DiscPolynomial { alpha } => {
                Ok((-(alpha + 1.0) / (alpha + n as f64 + 2.0)).ln_1p())
            }
            WeightSpec::FockExponential { m } => {
                ln_gamma_ratio((2.0 * n as f64 + 2.0) / m, 2.0 / m)
            }
            WeightSpec::CustomRadial { .. } => Ok(self.log_moment(n + 1)? - self.log_moment(n)?),
        }
    }

    /// `r_n = c_{n+1}² / c_n²`.
    pub fn ratio(&self, n: usize) -> Result<f64> {
        match self.weight {
            WeightSpec::DiscPolynomial { alpha } => Ok((n as f64 + 1.0) / (alpha + n as f64 + 2.0)),
            WeightSpec::FockExponential { m } => gamma_ratio((2.0 * n as f64 + 2.0) / m, 2.0 / m),
            WeightSpec::CustomRadial { .. } => Ok(self.log_ratio(n)?.exp()),
        }
    }

    /// `ln r_n - ln r_{n-1}` for `n >= 1`; nonnegative by log-convexity.
    pub fn log_ratio_step(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return domain_err("log_ratio_step needs n >= 1");
        }
        let nf = n as f64;
        match self.weight {
            WeightSpec::DiscPolynomial { alpha } => {
                Ok(((alpha + 1.0) / (nf * (alpha + nf + 2.0))).ln_1p())
            }
            WeightSpec::FockExponential { m } => {
                ln_gamma_second_difference((2.0 * nf + 2.0) / m, 2.0 / m)
            }
            WeightSpec::CustomRadial { .. } => Ok((self.log_moment(n + 1)?
                - self.log_moment(n)?)
                - (self.log_moment(n)? - self.log_moment(n - 1)?)),
        }
    }

    /// Largest `ln c_n² - (ln c_{n-1}² + ln c_{n+1}²)/2` over the cache.
    /// Log-convexity says this is never positive.
    pub fn log_convexity_defect(&self) -> f64 {
        let cache = self.cache.read().expect("moment cache poisoned");
        cache
            .log_moments
            .windows(3)
            .map(|w| w[1] - 0.5 * (w[0] + w[2]))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_examples() {
        let pi = PI;
        assert!(close(
            moment_log(&WeightSpec::disc(0.0).unwrap(), 0).unwrap(),
            pi.ln(),
            1e-15
        ));
        assert!(close(
            moment_log(&WeightSpec::disc(0.0).unwrap(), 1).unwrap(),
            (pi / 2.0).ln(),
            1e-15
        ));
        assert!(close(
            moment_log(&WeightSpec::fock(2.0).unwrap(), 3).unwrap(),
            (6.0 * pi).ln(),
            1e-14
        ));
        assert!(close(
            disc_moment_closed(0.0, 2).unwrap(),
            (pi / 3.0).ln(),
            1e-15
        ));
        assert!(close(
            disc_moment_closed(1.0, 0).unwrap(),
            (pi / 2.0).ln(),
            1e-15
        ));
        assert!(close(fock_moment_closed(2.0, 0).unwrap(), pi.ln(), 1e-15));
        assert!(close(fock_moment_closed(2.0, 1).unwrap(), pi.ln(), 1e-15));
        assert!(close(
            fock_moment_closed(4.0, 0).unwrap(),
            (pi.powf(1.5) / 2.0).ln(),
            1e-15
        ));
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(matches!(
            WeightSpec::disc(-1.0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            WeightSpec::fock(0.0),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            disc_moment_closed(-0.5, 3),
            Err(Error::ParameterDomain(_))
        ));
        assert!(matches!(
            fock_moment_closed(-2.0, 3),
            Err(Error::ParameterDomain(_))
        ));
        let raw = WeightSpec::DiscPolynomial { alpha: -2.0 };
        assert!(matches!(
            moment_log(&raw, 0),
            Err(Error::ParameterDomain(_))
        ));
        let w = WeightSpec::disc(0.0).unwrap();
        assert!(moment_quadrature(&w, 0, 1e-15).is_err());
        assert!(moment_quadrature(&w, 0, 0.1).is_err());
    }

    #[test]
    fn quadrature_examples() {
        let disc = WeightSpec::disc(0.0).unwrap();
        assert!(close(
            moment_quadrature(&disc, 1, 1e-10).unwrap(),
            (PI / 2.0).ln(),
            1e-10
        ));
        let fock = WeightSpec::fock(2.0).unwrap();
        assert!(close(
            moment_quadrature(&fock, 5, 1e-10).unwrap(),
            (PI * 120.0).ln(),
            1e-10
        ));
        let unit = WeightSpec::custom("indicator", 1.0, |_| 1.0).unwrap();
        assert!(close(moment_log(&unit, 0).unwrap(), PI.ln(), 1e-10));
    }

    #[test]
    fn custom_divergence_names_the_order() {
        // r^{-3} density on the plane: r^{2n+1} r^{-3} is not integrable at
        // infinity once n >= 1 (and not at zero for n = 0).
        let w =
            WeightSpec::custom("heavy", f64::INFINITY, |r: f64| 1.0 / (1.0 + r * r * r)).unwrap();
        assert!(moment_log(&w, 0).is_ok());
        assert_eq!(moment_log(&w, 1), Err(Error::Divergence { order: 1 }));
        let seq = MomentSequence::new(w).unwrap();
        assert_eq!(seq.ensure(3), Err(Error::Divergence { order: 1 }));
        assert_eq!(seq.computed_upto(), 1);
    }

    #[test]
    fn negative_custom_density_rejected() {
        let w = WeightSpec::custom("neg", 1.0, |r: f64| r - 0.5).unwrap();
        assert!(matches!(moment_log(&w, 0), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn sequence_matches_pointwise_closed_forms() {
        for w in [
            WeightSpec::disc(0.5).unwrap(),
            WeightSpec::fock(3.0).unwrap(),
        ] {
            let seq = MomentSequence::with_upto(w.clone(), 60).unwrap();
            for n in 0..=60 {
                // Same accumulation order, so bit-identical.
                assert_eq!(
                    seq.log_moment(n).unwrap(),
                    moment_log(&w, n).unwrap(),
                    "{w} n={n}"
                );
            }
        }
    }

    #[test]
    fn ratio_routes_agree() {
        for w in [
            WeightSpec::disc(2.5).unwrap(),
            WeightSpec::fock(4.0).unwrap(),
            WeightSpec::fock(2.0).unwrap(),
        ] {
            let seq = MomentSequence::with_upto(w, 200).unwrap();
            for n in 0..199 {
                let via_logs = seq.log_moment(n + 1).unwrap() - seq.log_moment(n).unwrap();
                let direct = seq.log_ratio(n).unwrap();
                assert!((via_logs - direct).abs() < 1e-12, "n={n}");
                assert!(
                    (seq.ratio(n).unwrap() - direct.exp()).abs() < 1e-12 * direct.exp().max(1.0)
                );
            }
        }
    }

    #[test]
    fn disc_ratio_formula() {
        let seq = MomentSequence::new(WeightSpec::disc(1.0).unwrap()).unwrap();
        let r: Vec<f64> = (0..100).map(|n| seq.ratio(n).unwrap()).collect();
        for (n, v) in r.iter().enumerate() {
            assert_eq!(*v, (n as f64 + 1.0) / (n as f64 + 3.0));
            assert!(*v < 1.0);
        }
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn cache_is_observationally_pure() {
        let w = WeightSpec::fock(3.0).unwrap();
        let a = MomentSequence::new(w.clone()).unwrap();
        let b = MomentSequence::new(w).unwrap();
        a.ensure(7).unwrap();
        a.ensure(50).unwrap();
        b.ensure(50).unwrap();
        assert_eq!(a.log_moments(50).unwrap(), b.log_moments(50).unwrap());
    }

    #[test]
    fn resource_limit() {
        let seq = MomentSequence::new(WeightSpec::disc(0.0).unwrap()).unwrap();
        assert!(matches!(
            seq.ensure(MAX_CLOSED_FORM_ORDER + 1),
            Err(Error::Resource(_))
        ));
    }
}
