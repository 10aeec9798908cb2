//! The acceptance criteria. Each one builds its own table and decides
//! PASS or FAIL at the stated tolerance; `reproduce` and the acceptance
//! test target both run them from here.

use std::time::{Duration, Instant};

use bergman_dbar::ball2d::{
    ball_hs_partial_sum, ball_moment_log, ball_moment_quadrature, form_energy,
    form_energy_from_moments, Direction,
};
use bergman_dbar::random;
use bergman_dbar::solver::{
    apply_solution_operator, dbar_residual, defect_norm_sq, defect_norm_sq_quadrature,
    normalized_inner_product, reproduce_check, HolomorphicCoeffs,
};
use bergman_dbar::spectrum::{
    classify, eigenvalue, gamma_ratio_difference, hs_partial_sum, stirling_surrogate,
    ClassifyParams, Verdict,
};
use bergman_dbar::weights::{moment_log, moment_quadrature};
use bergman_dbar::weights_nd::{
    check_growth_hypotheses, conjugate_transform, default_search_radius, PshWeight,
};
use bergman_dbar::{MomentSequence, WeightSpec};
use num_complex::Complex64;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::Report;

pub struct Criterion {
    pub number: usize,
    pub id: &'static str,
    pub title: &'static str,
    pub time_limit: Option<Duration>,
    run: fn(u64) -> CliResult<Outcome>,
}

/// What a criterion body returns before timing is applied.
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
    pub detail: String,
}

pub struct CriterionResult {
    pub number: usize,
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub report: Report,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {} ({:.2} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.number,
            self.id,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

impl Criterion {
    pub fn matches(&self, key: &str) -> bool {
        key == self.id || key.parse::<usize>() == Ok(self.number)
    }

    pub fn run(&self, seed: u64) -> CliResult<CriterionResult> {
        let start = Instant::now();
        let outcome = (self.run)(seed)?;
        let elapsed = start.elapsed();
        let mut pass = outcome.pass;
        let mut detail = outcome.detail;
        if let Some(limit) = self.time_limit {
            if elapsed > limit {
                pass = false;
                detail = format!(
                    "{detail}; runtime {:.1} s over the {} s limit",
                    elapsed.as_secs_f64(),
                    limit.as_secs()
                );
            }
        }
        let mut report = outcome.report;
        report.pass = Some(pass);
        Ok(CriterionResult {
            number: self.number,
            id: self.id,
            title: self.title,
            pass,
            detail,
            elapsed,
            report,
        })
    }
}

pub fn all() -> Vec<Criterion> {
    let secs = |s| Some(Duration::from_secs(s));
    vec![
        Criterion {
            number: 1,
            id: "telescoping-identity",
            title: "Partial sums of eigenvalues telescope to the moment ratio",
            time_limit: secs(10),
            run: telescoping,
        },
        Criterion {
            number: 2,
            id: "disc-hilbert-schmidt",
            title: "Disc weights give a Hilbert-Schmidt operator",
            time_limit: None,
            run: disc_hs,
        },
        Criterion {
            number: 3,
            id: "fock-flat-spectrum",
            title: "Gaussian Fock space: flat spectrum and isometry",
            time_limit: None,
            run: fock_flat,
        },
        Criterion {
            number: 4,
            id: "fock-trichotomy",
            title: "Fock eigenvalue trichotomy in m",
            time_limit: None,
            run: fock_trichotomy,
        },
        Criterion {
            number: 5,
            id: "ball-divergence",
            title: "Ball energies match the closed form and their sum diverges",
            time_limit: secs(30),
            run: ball_divergence,
        },
        Criterion {
            number: 6,
            id: "solver-exactness",
            title: "S(f) solves dbar and is orthogonal to holomorphic functions",
            time_limit: None,
            run: solver_exactness,
        },
        Criterion {
            number: 7,
            id: "norm-identity-quadrature",
            title: "Dilated defect norm matches 2-D quadrature",
            time_limit: secs(60),
            run: norm_identity,
        },
        Criterion {
            number: 8,
            id: "oracle-equivalence",
            title: "Closed-form moments match quadrature; log-convexity",
            time_limit: None,
            run: oracle_equivalence,
        },
        Criterion {
            number: 9,
            id: "reproducing-property",
            title: "Kernel integral reproduces holomorphic polynomials",
            time_limit: None,
            run: reproducing,
        },
        Criterion {
            number: 10,
            id: "psh-hypotheses",
            title: "Growth hypotheses for plurisubharmonic weights",
            time_limit: None,
            run: psh_hypotheses,
        },
    ]
}

pub fn select(only: Option<&str>) -> CliResult<Vec<Criterion>> {
    let all = all();
    match only {
        None => Ok(all),
        Some(key) => {
            let chosen: Vec<Criterion> = all.into_iter().filter(|c| c.matches(key)).collect();
            if chosen.is_empty() {
                Err(CliError::Parameter(format!("unknown criterion '{key}'")))
            } else {
                Ok(chosen)
            }
        }
    }
}

fn builtin_weights() -> CliResult<Vec<WeightSpec>> {
    let mut out = Vec::new();
    for alpha in [0.0, 1.0, 2.5] {
        out.push(WeightSpec::disc(alpha)?);
    }
    for m in [2.0, 3.0, 4.0] {
        out.push(WeightSpec::fock(m)?);
    }
    Ok(out)
}

fn config(id: &str, seed: u64) -> serde_json::Value {
    json!({ "criterion": id, "seed": seed })
}

fn telescoping(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("telescoping-identity", seed),
        &["weight", "n", "partial_sum", "ratio", "abs_err", "bound"],
    );
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for w in builtin_weights()? {
        let ms = MomentSequence::new(w.clone())?;
        for n in [10, 100, 1000, 10_000] {
            let s = hs_partial_sum(&ms, n)?;
            let r = ms.ratio(n)?;
            let err = (s - r).abs();
            let bound = 1e-10 * r.max(1.0);
            pass &= err <= bound;
            worst = worst.max(err / bound);
            report.push(vec![
                w.to_string().into(),
                n.into(),
                s.into(),
                r.into(),
                err.into(),
                bound.into(),
            ]);
        }
    }
    Ok(Outcome {
        report,
        pass,
        detail: format!("worst error / bound = {worst:.3e}"),
    })
}

fn disc_hs(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("disc-hilbert-schmidt", seed),
        &["alpha", "verdict", "partial_sum_10000", "distance_to_limit"],
    );
    let mut pass = true;
    for alpha in [0.0, 1.0, 2.5] {
        let ms = MomentSequence::new(WeightSpec::disc(alpha)?)?;
        let verdict = classify(&ms, ClassifyParams::default())?.verdict;
        let s = hs_partial_sum(&ms, 10_000)?;
        let dist = (s - 1.0).abs();
        pass &= verdict == Verdict::HilbertSchmidt && dist <= 2e-3;
        report.push(vec![
            alpha.into(),
            verdict.to_string().into(),
            s.into(),
            dist.into(),
        ]);
    }
    Ok(Outcome {
        report,
        pass,
        detail: "HilbertSchmidt for alpha in {0, 1, 2.5}, partial sums within 2e-3 of 1".into(),
    })
}

fn fock_flat(seed: u64) -> CliResult<Outcome> {
    let ms = MomentSequence::new(WeightSpec::fock(2.0)?)?;
    let mut report = Report::new(
        "reproduce",
        config("fock-flat-spectrum", seed),
        &["sample", "degree", "defect_norm_sq", "norm_sq", "ratio"],
    );
    let mut worst_lambda: f64 = 0.0;
    for n in 1..=10_000 {
        worst_lambda = worst_lambda.max((eigenvalue(&ms, n)? - 1.0).abs());
    }
    let mut rng = random::rng(seed);
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20 {
        let f = random::polynomial_up_to(&mut rng, 30);
        let d = defect_norm_sq(&f, 1.0, &ms)?;
        let n = f.norm_sq(&ms)?;
        worst_ratio = worst_ratio.max((d / n - 1.0).abs());
        report.push(vec![
            i.into(),
            f.degree().into(),
            d.into(),
            n.into(),
            (d / n).into(),
        ]);
    }
    let verdict = classify(&ms, ClassifyParams::default())?.verdict;
    report.note("max_abs_lambda_minus_one", worst_lambda);
    report.note("max_abs_ratio_minus_one", worst_ratio);
    report.verdict = Some(verdict.to_string());
    let pass = worst_lambda <= 1e-12 && worst_ratio <= 1e-10 && verdict == Verdict::NonCompact;
    Ok(Outcome {
        report,
        pass,
        detail: format!("max|lambda-1| = {worst_lambda:.2e}, max|ratio-1| = {worst_ratio:.2e}, verdict {verdict}"),
    })
}

fn fock_trichotomy(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("fock-trichotomy", seed),
        &["k", "difference_m4", "surrogate_m4", "rel_diff"],
    );
    let d1 = gamma_ratio_difference(1.0, 10_000)?;
    let d4 = gamma_ratio_difference(4.0, 10_000)?;
    let mut worst_rel: f64 = 0.0;
    for k in 1000..=10_000usize {
        let d = gamma_ratio_difference(4.0, k)?;
        let s = stirling_surrogate(4.0, k)?;
        let rel = (d - s).abs() / s;
        worst_rel = worst_rel.max(rel);
        if k % 500 == 0 {
            report.push(vec![k.into(), d.into(), s.into(), rel.into()]);
        }
    }
    let ms = MomentSequence::new(WeightSpec::fock(4.0)?)?;
    let verdict = classify(&ms, ClassifyParams::default())?.verdict;
    let partial = hs_partial_sum(&ms, 10_000)?;
    report.note("difference_m1_k10000", d1);
    report.note("difference_m4_k10000", d4);
    report.note("max_rel_diff_m4", worst_rel);
    report.note("partial_sum_m4_n10000", partial);
    report.verdict = Some(verdict.to_string());
    let pass = d1 > 1e3
        && d4 < 1e-2
        && worst_rel <= 1e-2
        && verdict == Verdict::CompactNotHilbertSchmidt
        && partial > 50.0;
    Ok(Outcome {
        report,
        pass,
        detail: format!("m=1: {d1:.3e}, m=4: {d4:.3e}, surrogate rel {worst_rel:.2e}, m=4 verdict {verdict}, S_10000 = {partial:.3}"),
    })
}

fn ball_divergence(seed: u64) -> CliResult<Outcome> {
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 1.0, 2.0] {
        for total in 0..=50usize {
            for n1 in 0..=total {
                let n2 = total - n1;
                for dir in [Direction::Z1, Direction::Z2] {
                    let closed = form_energy(alpha, n1, n2, dir)?;
                    let moments = form_energy_from_moments(alpha, n1, n2, dir)?;
                    worst = worst.max((closed - moments).abs() / closed);
                }
            }
        }
    }
    let mut report = Report::new(
        "reproduce",
        config("ball-divergence", seed),
        &["n", "partial_sum"],
    );
    let mut increasing = true;
    let mut prev = f64::NEG_INFINITY;
    let mut sums = Vec::with_capacity(201);
    for n in 0..=200usize {
        let s = ball_hs_partial_sum(0.0, n)?;
        increasing &= s > prev;
        prev = s;
        sums.push(s);
        report.push(vec![n.into(), s.into()]);
    }
    let growth = sums[200] - sums[100];
    report.note("max_rel_energy_error", worst);
    report.note("growth_100_to_200", growth);
    let pass = worst <= 1e-12 && increasing && growth >= 0.5;
    Ok(Outcome {
        report,
        pass,
        detail: format!("energy rel error {worst:.2e}, strictly increasing: {increasing}, S(200)-S(100) = {growth:.3}"),
    })
}

fn solver_exactness(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("solver-exactness", seed),
        &[
            "weight",
            "samples",
            "conj_factor_exact",
            "max_orthogonality_over_norm",
            "max_dbar_residual_over_scale",
        ],
    );
    let mut rng = random::rng(seed);
    let mut pass = true;
    for w in builtin_weights()? {
        let ms = MomentSequence::new(w.clone())?;
        let mut exact = true;
        let mut worst_ip: f64 = 0.0;
        let mut worst_res: f64 = 0.0;
        for _ in 0..50 {
            let f = random::polynomial_up_to(&mut rng, 30);
            let s = apply_solution_operator(&f, &ms)?;
            exact &= s.conj_factor == f;
            let norm = f.norm_sq(&ms)?.sqrt();
            for j in 0..=f.degree().map_or(0, |d| d + 2) {
                worst_ip = worst_ip.max(normalized_inner_product(&s, j, &ms)?.norm() / norm);
            }
            let pts: Vec<Complex64> = (0..100)
                .map(|_| random::point_in_disc(&mut rng, 2.0))
                .collect();
            let max_f = pts.iter().map(|&z| f.eval(z).norm()).fold(0.0, f64::max);
            let res = dbar_residual(&s, &f, &pts, 1e-5)?;
            worst_res = worst_res.max(res / max_f.max(1.0) / 1e-6);
        }
        let ok = exact && worst_ip <= 1e-12 && worst_res <= 1.0;
        pass &= ok;
        report.push(vec![
            w.to_string().into(),
            50usize.into(),
            exact.into(),
            worst_ip.into(),
            (worst_res * 1e-6).into(),
        ]);
    }
    Ok(Outcome {
        report,
        pass,
        detail: "300 seeded polynomials of degree <= 30 on the six built-in weights".into(),
    })
}

fn norm_identity(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("norm-identity-quadrature", seed),
        &[
            "m",
            "rho",
            "degree",
            "defect_norm_sq",
            "quadrature",
            "rel_diff",
        ],
    );
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    for m in [2.0, 4.0] {
        let ms = MomentSequence::new(WeightSpec::fock(m)?)?;
        for rho in [0.5, 0.9] {
            for degree in 0..=5 {
                let f = random::polynomial(&mut rng, degree);
                let exact = defect_norm_sq(&f, rho, &ms)?;
                let quad = defect_norm_sq_quadrature(&f, rho, &ms, 1e-11)?;
                let rel = (exact - quad).abs() / exact;
                worst = worst.max(rel);
                report.push(vec![
                    m.into(),
                    rho.into(),
                    degree.into(),
                    exact.into(),
                    quad.into(),
                    rel.into(),
                ]);
            }
        }
    }
    Ok(Outcome {
        report,
        pass: worst <= 1e-8,
        detail: format!("max relative difference {worst:.2e}"),
    })
}

fn oracle_equivalence(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("oracle-equivalence", seed),
        &[
            "family",
            "parameter",
            "max_abs_log_diff",
            "log_convexity_defect",
        ],
    );
    let mut weights = Vec::new();
    for alpha in [0.0, 0.5, 1.0, 2.5, 3.0] {
        weights.push(WeightSpec::disc(alpha)?);
    }
    for m in [2.0, 3.0, 4.0] {
        weights.push(WeightSpec::fock(m)?);
    }
    let mut worst_1d: f64 = 0.0;
    let mut worst_convexity = f64::NEG_INFINITY;
    for w in &weights {
        let mut worst: f64 = 0.0;
        for n in 0..=50 {
            worst = worst.max((moment_log(w, n)? - moment_quadrature(w, n, 1e-12)?).abs());
        }
        let ms = MomentSequence::with_upto(w.clone(), 10_000)?;
        let defect = ms.log_convexity_defect();
        worst_1d = worst_1d.max(worst);
        worst_convexity = worst_convexity.max(defect);
        let (family, param) = match w {
            WeightSpec::DiscPolynomial { alpha } => ("disc", *alpha),
            WeightSpec::FockExponential { m } => ("fock", *m),
            WeightSpec::CustomRadial { .. } => ("custom", f64::NAN),
        };
        report.push(vec![
            family.into(),
            param.into(),
            worst.into(),
            defect.into(),
        ]);
    }
    let mut worst_ball: f64 = 0.0;
    for alpha in [0.0, 1.0, 2.0] {
        let mut worst: f64 = 0.0;
        for total in 0..=10usize {
            for n1 in 0..=total {
                let closed = ball_moment_log(alpha, n1, total - n1)?;
                let quad = ball_moment_quadrature(alpha, n1, total - n1, 1e-11)?;
                worst = worst.max((closed - quad).abs());
            }
        }
        worst_ball = worst_ball.max(worst);
        report.push(vec![
            "ball".into(),
            alpha.into(),
            worst.into(),
            None::<f64>.into(),
        ]);
    }
    let pass = worst_1d <= 1e-9 && worst_ball <= 1e-9 && worst_convexity <= 0.0;
    Ok(Outcome {
        report,
        pass,
        detail: format!(
            "1-D {worst_1d:.2e}, ball {worst_ball:.2e}, log-convexity defect {worst_convexity:.2e}"
        ),
    })
}

fn reproducing(seed: u64) -> CliResult<Outcome> {
    let mut report = Report::new(
        "reproduce",
        config("reproducing-property", seed),
        &[
            "weight", "coeffs", "z_re", "z_im", "value_re", "value_im", "rel_err",
        ],
    );
    let cases: [(WeightSpec, &[f64], Complex64); 5] = [
        (WeightSpec::disc(0.0)?, &[1.0], Complex64::new(0.3, 0.1)),
        (
            WeightSpec::disc(1.0)?,
            &[0.0, 1.0],
            Complex64::new(0.5, 0.0),
        ),
        (
            WeightSpec::fock(2.0)?,
            &[0.0, 0.0, 1.0],
            Complex64::new(1.0, 0.5),
        ),
        (
            WeightSpec::disc(2.5)?,
            &[0.5, 0.0, -1.0, 0.25],
            Complex64::new(-0.4, 0.3),
        ),
        (
            WeightSpec::fock(4.0)?,
            &[1.0, 2.0, 0.0, -1.0],
            Complex64::new(0.7, -0.2),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (w, coeffs, z) in cases {
        let ms = MomentSequence::new(w.clone())?;
        let f = HolomorphicCoeffs::from_real(coeffs);
        let got = reproduce_check(&ms, &f, z, 1e-9)?;
        let want = f.eval(z);
        let rel = (got - want).norm() / want.norm();
        worst = worst.max(rel);
        let label: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
        report.push(vec![
            w.to_string().into(),
            label.join(";").into(),
            z.re.into(),
            z.im.into(),
            got.re.into(),
            got.im.into(),
            rel.into(),
        ]);
    }
    Ok(Outcome {
        report,
        pass: worst <= 1e-6,
        detail: format!("max relative error {worst:.2e}"),
    })
}

fn psh_hypotheses(seed: u64) -> CliResult<Outcome> {
    let radii = vec![1.0, 10.0, 100.0, 1000.0];
    let square = PshWeight::radial(1, |r| r * r, radii.clone())?;
    let linear = PshWeight::radial(1, |r| r, radii)?;
    let mut report = Report::new(
        "reproduce",
        config("psh-hypotheses", seed),
        &["weight", "item", "passed", "value"],
    );

    let sq = check_growth_hypotheses(&square, 1.0, 2.0)?;
    for (name, check) in sq.checks() {
        report.push(vec![
            "|z|^2".into(),
            name.into(),
            check.passed.into(),
            check.values.last().copied().into(),
        ]);
    }
    let mut conj_ok = true;
    for w in [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 1.0),
    ] {
        let got = conjugate_transform(&square, &[w], default_search_radius(&[w]), 64)?;
        let ok = (got - w.norm_sqr() / 4.0).abs() <= 1e-3;
        conj_ok &= ok;
        report.push(vec![
            "|z|^2".into(),
            format!("p_star({},{})", w.re, w.im).into(),
            ok.into(),
            got.into(),
        ]);
    }
    let lin = check_growth_hypotheses(&linear, 1.0, 2.0)?;
    report.push(vec![
        "|z|".into(),
        "superlinear_growth".into(),
        lin.superlinear_growth.passed.into(),
        lin.superlinear_growth.values.last().copied().into(),
    ]);
    let pass = sq.all_passed() && conj_ok && !lin.superlinear_growth.passed;
    Ok(Outcome {
        report,
        pass,
        detail: format!(
            "|z|^2 all checks: {}, p* = |w|^2/4: {conj_ok}, |z| growth check rejected: {}",
            sq.all_passed(),
            !lin.superlinear_growth.passed
        ),
    })
}
