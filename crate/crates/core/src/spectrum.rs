//! Spectrum of `S*S` for a radial weight.
//!
//! In the orthonormal basis `u_n = z^n / c_n` the operator `S*S` is
//! diagonal with entries
//!
//! ```text
//! λ_0 = r_0,   λ_n = r_n - r_{n-1}   (n >= 1),   r_n = c_{n+1}² / c_n²,
//! ```
//!
//! so the Hilbert-Schmidt partial sums telescope to `r_N`. `S` is compact
//! iff `λ_n → 0` and Hilbert-Schmidt iff `r_n` stays bounded.

use std::fmt;

use crate::error::{domain_err, Error, Result};
use crate::gamma::{gamma_ratio, ln_gamma_second_difference};
use crate::weights::{MomentSequence, WeightSpec};

/// Tail decay exponent of `λ_n` above which the partial sums are treated as
/// convergent.
pub const HS_MIN_DECAY_EXPONENT: f64 = 1.1;

/// Tail decay exponent of `λ_n` above which `λ_n → 0` is accepted.
pub const COMPACT_MIN_DECAY_EXPONENT: f64 = 0.05;

/// `λ_n`, the `n`-th diagonal entry of `S*S`.
///
/// For `n >= 1` this is evaluated as `r_n (1 - exp(-δ_n))` with
/// `δ_n = ln r_n - ln r_{n-1}`, which never subtracts two large ratios.
pub fn eigenvalue(moments: &MomentSequence, n: usize) -> Result<f64> {
    if n == 0 {
        return moments.ratio(0);
    }
    let r = moments.ratio(n)?;
    let step = moments.log_ratio_step(n)?;
    Ok(-r * (-step).exp_m1())
}

/// `Σ_{n=0}^{N} λ_n`, summed in ascending order.
pub fn hs_partial_sum(moments: &MomentSequence, n_max: usize) -> Result<f64> {
    let mut sum = 0.0;
    for n in 0..=n_max {
        sum += eigenvalue(moments, n)?;
    }
    Ok(sum)
}

/// `((2k+2)/m)^{2/m} - (2k/m)^{2/m}`, the Stirling surrogate for the Fock
/// eigenvalues.
pub fn stirling_surrogate(m: f64, k: usize) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return domain_err(format!("stirling_surrogate requires m > 0, got {m}"));
    }
    if k == 0 {
        return domain_err("stirling_surrogate requires k >= 1");
    }
    let p = 2.0 / m;
    let base = 2.0 * k as f64 / m;
    Ok(base.powf(p) * (p * (1.0 / k as f64).ln_1p()).exp_m1())
}

/// `Γ((2k+4)/m)/Γ((2k+2)/m) - Γ((2k+2)/m)/Γ(2k/m)`, the Fock eigenvalue
/// `λ_k`, evaluated without cancellation.
pub fn gamma_ratio_difference(m: f64, k: usize) -> Result<f64> {
    if !(m > 0.0 && m.is_finite()) {
        return domain_err(format!("gamma_ratio_difference requires m > 0, got {m}"));
    }
    if k == 0 {
        return domain_err("gamma_ratio_difference requires k >= 1");
    }
    let y = (2.0 * k as f64 + 2.0) / m;
    let h = 2.0 / m;
    let r = gamma_ratio(y, h)?;
    let step = ln_gamma_second_difference(y, h)?;
    Ok(-r * (-step).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    HilbertSchmidt,
    CompactNotHilbertSchmidt,
    NonCompact,
}

impl Verdict {
    pub fn is_compact(self) -> bool {
        !matches!(self, Verdict::NonCompact)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::HilbertSchmidt => "HilbertSchmidt",
            Verdict::CompactNotHilbertSchmidt => "CompactNotHilbertSchmidt",
            Verdict::NonCompact => "NonCompact",
        };
        f.write_str(s)
    }
}

/// What the tail window looked like when the verdict was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    /// Inclusive index range `[start, end]` of the inspected eigenvalues.
    pub tail_window: (usize, usize),
    pub lambda_tail_max: f64,
    pub lambda_tail_min: f64,
    /// `r_end`, equal to the partial sum through the end of the window.
    pub ratio_tail: f64,
    pub ratio_start: f64,
    /// Log-log slope `-d ln λ / d ln n` between the first and last tenth of
    /// the window; `+inf` when the tail has numerically vanished.
    pub decay_exponent: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyParams {
    pub tail_start: usize,
    pub tail_len: usize,
    pub eps_zero: f64,
    pub big: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            tail_start: 1000,
            tail_len: 1000,
            eps_zero: 1e-3,
            big: 1e6,
        }
    }
}

/// Classifies `S` from the behaviour of `λ_n` and `r_n` on a tail window.
///
/// - `HilbertSchmidt`: `r_n < big` on the window and either `r_n` has
///   stopped moving (relative drift below `eps_zero`) or `λ_n` decays
///   faster than `n^{-HS_MIN_DECAY_EXPONENT}`.
/// - `CompactNotHilbertSchmidt`: otherwise, when `λ_n` decays at least
///   like `n^{-COMPACT_MIN_DECAY_EXPONENT}` or stays below `eps_zero`.
/// - `NonCompact`: everything else.
pub fn classify(moments: &MomentSequence, params: ClassifyParams) -> Result<Classification> {
    let ClassifyParams {
        tail_start,
        tail_len,
        eps_zero,
        big,
    } = params;
    if tail_len < 10 {
        return domain_err(format!("tail_len must be at least 10, got {tail_len}"));
    }
    if tail_start == 0 {
        return domain_err("tail_start must be at least 1");
    }
    if !(eps_zero > 0.0) || !(big > 0.0) {
        return domain_err("eps_zero and big must be positive");
    }
    let end = tail_start + tail_len;
    if end + 1 > moments.max_order() {
        return Err(Error::Resource(format!(
            "tail window ending at {end} exceeds the feasible moment order {}",
            moments.max_order()
        )));
    }

    let lambdas = (tail_start..=end)
        .map(|n| eigenvalue(moments, n))
        .collect::<Result<Vec<_>>>()?;
    let ratios = (tail_start..=end)
        .map(|n| moments.ratio(n))
        .collect::<Result<Vec<_>>>()?;

    let lambda_tail_max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_tail_min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ratio_start = ratios[0];
    let ratio_tail = *ratios.last().expect("window is non-empty");

    let block = (lambdas.len() / 10).max(1);
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let head = mean(&lambdas[..block]);
    let foot = mean(&lambdas[lambdas.len() - block..]);
    let n_head = tail_start as f64 + 0.5 * (block - 1) as f64;
    let n_foot = end as f64 - 0.5 * (block - 1) as f64;
    let decay_exponent = if head > 0.0 && foot > 0.0 {
        (head / foot).ln() / (n_foot / n_head).ln()
    } else if foot <= 0.0 && head.abs() <= eps_zero {
        f64::INFINITY
    } else {
        0.0
    };

    let bounded = ratio_max.is_finite() && ratio_max < big;
    let drift = (ratio_tail - ratio_start).abs() / ratio_tail.abs().max(1.0);
    let summable = if decay_exponent.is_infinite() {
        true
    } else if decay_exponent > HS_MIN_DECAY_EXPONENT {
        // Power-law tail remainder must not push the limit past `big`.
        let remainder = foot * n_foot / (decay_exponent - 1.0);
        ratio_tail + remainder < big
    } else {
        false
    };

    let verdict = if bounded && (drift < eps_zero || summable) {
        Verdict::HilbertSchmidt
    } else if decay_exponent > COMPACT_MIN_DECAY_EXPONENT
        || (lambda_tail_max < eps_zero && decay_exponent >= 0.0)
    {
        Verdict::CompactNotHilbertSchmidt
    } else {
        Verdict::NonCompact
    };

    let note = match moments.weight() {
        WeightSpec::FockExponential { m } if *m < 2.0 => Some(format!(
            "m = {m} < 2: the diagonal of S*S is unbounded; only the computed diagonal is reported"
        )),
        _ if decay_exponent < 0.0 => Some(
            "diagonal of S*S increases across the window; S is unbounded on this space".to_string(),
        ),
        _ => None,
    };

    Ok(Classification {
        verdict,
        evidence: Evidence {
            tail_window: (tail_start, end),
            lambda_tail_max,
            lambda_tail_min,
            ratio_tail,
            ratio_start,
            decay_exponent,
            note,
        },
    })
}

/// Eigenvalues, ratios and partial sums for `n = 0..=n_max`, together with
/// the classification.
#[derive(Debug, Clone)]
pub struct SpectralDiagnostics {
    pub weight: WeightSpec,
    pub lambdas: Vec<f64>,
    pub ratios: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub classification: Classification,
}

impl SpectralDiagnostics {
    pub fn compute(moments: &MomentSequence, n_max: usize, params: ClassifyParams) -> Result<Self> {
        let mut lambdas = Vec::with_capacity(n_max + 1);
        let mut ratios = Vec::with_capacity(n_max + 1);
        let mut partial_sums = Vec::with_capacity(n_max + 1);
        let mut sum = 0.0;
        for n in 0..=n_max {
            let lambda = eigenvalue(moments, n)?;
            sum += lambda;
            lambdas.push(lambda);
            ratios.push(moments.ratio(n)?);
            partial_sums.push(sum);
        }
        let classification = classify(moments, params)?;
        Ok(Self {
            weight: moments.weight().clone(),
            lambdas,
            ratios,
            partial_sums,
            classification,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(w: WeightSpec) -> MomentSequence {
        MomentSequence::new(w).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let fock2 = seq(WeightSpec::fock(2.0).unwrap());
        for n in [1, 2, 10, 500] {
            assert!((eigenvalue(&fock2, n).unwrap() - 1.0).abs() < 1e-13);
        }
        let disc0 = seq(WeightSpec::disc(0.0).unwrap());
        assert!((eigenvalue(&disc0, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((eigenvalue(&disc0, 0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partial_sum_examples() {
        let disc0 = seq(WeightSpec::disc(0.0).unwrap());
        assert!((hs_partial_sum(&disc0, 2).unwrap() - 0.75).abs() < 1e-15);
        let fock2 = seq(WeightSpec::fock(2.0).unwrap());
        assert!((hs_partial_sum(&fock2, 9).unwrap() - 10.0).abs() < 1e-12);
        let fock3 = seq(WeightSpec::fock(3.0).unwrap());
        assert_eq!(hs_partial_sum(&fock3, 0).unwrap(), fock3.ratio(0).unwrap());
    }

    #[test]
    fn surrogate_examples() {
        assert!((stirling_surrogate(2.0, 5).unwrap() - 1.0).abs() < 1e-14);
        assert!((stirling_surrogate(1.0, 100).unwrap() - 804.0).abs() < 1e-10);
        let want = 5000.5f64.sqrt() - 5000f64.sqrt();
        assert!((stirling_surrogate(4.0, 10_000).unwrap() - want).abs() < 1e-12 * want);
        assert!(stirling_surrogate(0.0, 3).is_err());
        assert!(stirling_surrogate(2.0, 0).is_err());
    }

    #[test]
    fn gamma_ratio_difference_examples() {
        assert!((gamma_ratio_difference(2.0, 7).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_ratio_difference(1.0, 1).unwrap() - 14.0).abs() < 1e-12);
        // Γ(2)/Γ(3/2) - Γ(3/2)/Γ(1), 30-digit reference.
        let want = 0.242_152_241_642_754_560_247_075;
        assert!((gamma_ratio_difference(4.0, 2).unwrap() - want).abs() < 1e-14);
        assert!(gamma_ratio_difference(-1.0, 2).is_err());
    }

    #[test]
    fn gamma_ratio_difference_equals_fock_eigenvalue() {
        for m in [1.0, 2.5, 3.0, 4.0, 7.0] {
            let s = seq(WeightSpec::fock(m).unwrap());
            for k in [1, 2, 5, 50, 3000] {
                let a = gamma_ratio_difference(m, k).unwrap();
                let b = eigenvalue(&s, k).unwrap();
                assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn classify_built_in_families() {
        let p = ClassifyParams::default();
        let c = classify(&seq(WeightSpec::disc(1.0).unwrap()), p).unwrap();
        assert_eq!(c.verdict, Verdict::HilbertSchmidt);
        let c = classify(&seq(WeightSpec::fock(4.0).unwrap()), p).unwrap();
        assert_eq!(c.verdict, Verdict::CompactNotHilbertSchmidt);
        let c = classify(&seq(WeightSpec::fock(2.0).unwrap()), p).unwrap();
        assert_eq!(c.verdict, Verdict::NonCompact);
        assert!(c.evidence.note.is_none());
        let c = classify(&seq(WeightSpec::fock(1.0).unwrap()), p).unwrap();
        assert_eq!(c.verdict, Verdict::NonCompact);
        assert!(c.evidence.note.is_some());
    }

    #[test]
    fn classify_validates_window() {
        let s = seq(WeightSpec::disc(0.0).unwrap());
        let p = ClassifyParams {
            tail_len: 5,
            ..ClassifyParams::default()
        };
        assert!(matches!(classify(&s, p), Err(Error::ParameterDomain(_))));
        let p = ClassifyParams {
            tail_start: usize::MAX / 4,
            ..ClassifyParams::default()
        };
        assert!(matches!(classify(&s, p), Err(Error::Resource(_))));
    }

    #[test]
    fn diagnostics_telescope() {
        let s = seq(WeightSpec::fock(3.0).unwrap());
        let d = SpectralDiagnostics::compute(&s, 200, ClassifyParams::default()).unwrap();
        for n in 0..=200 {
            assert!((d.partial_sums[n] - d.ratios[n]).abs() < 1e-12 * d.ratios[n].max(1.0));
        }
        assert_eq!(d.classification.verdict, Verdict::CompactNotHilbertSchmidt);
    }
}
