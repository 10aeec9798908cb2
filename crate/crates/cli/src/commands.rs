//! One function per subcommand, each producing a [`Report`].

use std::path::Path;

use bergman_dbar::ball2d::{
    ball_hs_partial_sum, ball_kernel_closed, ball_kernel_prefactor, ball_kernel_series,
    ball_moment_log, ball_moment_quadrature, fit_kernel_prefactor, form_energy,
    form_energy_from_moments, BallMomentGrid, Direction,
};
use bergman_dbar::gamma::{gamma_ratio, ln_gamma_ratio, ln_gamma_second_difference, log_gamma};
use bergman_dbar::random;
use bergman_dbar::solver::{
    apply_solution_operator, bound_constant, dbar_residual, defect_norm_sq, kernel_eval,
    normalized_inner_product, project_dilated, reproduce_check, HolomorphicCoeffs, DEFAULT_FD_STEP,
};
use bergman_dbar::spectrum::{
    classify, eigenvalue, gamma_ratio_difference, stirling_surrogate, ClassifyParams,
};
use bergman_dbar::weights::{moment_quadrature, MAX_QUADRATURE_ORDER};
use bergman_dbar::weights_nd::{
    check_growth_hypotheses, conjugate_transform, default_search_radius, double_conjugate,
    sup_shift, PshWeight,
};
use bergman_dbar::{MomentSequence, WeightSpec};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::args::{BallMode, Common, PshMode};
use crate::config::{parse_coefficients, Selector};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Report};

/// Settings echoed into every report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub weight: Option<String>,
    pub n_max: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub extra: Map<String, Value>,
}

impl RunConfig {
    pub fn new(common: &Common) -> Self {
        Self {
            weight: None,
            n_max: None,
            tol: common.tol,
            seed: common.seed,
            extra: Map::new(),
        }
    }

    pub fn weight(mut self, w: impl ToString) -> Self {
        self.weight = Some(w.to_string());
        self
    }

    pub fn n_max(mut self, n: usize) -> Self {
        self.n_max = Some(n);
        self
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        if let Some(w) = &self.weight {
            m.insert("weight".into(), json!(w));
        }
        if let Some(n) = self.n_max {
            m.insert("n_max".into(), json!(n));
        }
        m.insert("tol".into(), json!(self.tol));
        m.insert("seed".into(), json!(self.seed));
        m.extend(self.extra.clone());
        Value::Object(m)
    }
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 1e-14 && tol < 1e-2 {
        Ok(())
    } else {
        Err(CliError::Parameter(format!(
            "--tol must lie in (1e-14, 1e-2), got {tol}"
        )))
    }
}

fn representable(log_value: f64) -> Option<f64> {
    (log_value.abs() <= 700.0).then(|| log_value.exp())
}

pub fn moments(weight: &str, n_max: usize, oracle: bool, common: &Common) -> CliResult<Report> {
    let w = Selector::parse(weight)?.radial_weight()?;
    if oracle {
        check_tol(common.tol)?;
        if n_max > MAX_QUADRATURE_ORDER {
            return Err(CliError::Parameter(format!(
                "--oracle supports n <= {MAX_QUADRATURE_ORDER}"
            )));
        }
    }
    let ms = MomentSequence::with_upto(w.clone(), n_max + 1)?;
    let config = RunConfig::new(common)
        .weight(&w)
        .n_max(n_max)
        .with("oracle", json!(oracle));
    let mut cols = vec!["n", "log_c2", "c2", "ratio"];
    if oracle {
        cols.push("log_c2_quadrature");
    }
    let mut report = Report::new("moments", config.to_json(), &cols);
    for n in 0..=n_max {
        let log_c2 = ms.log_moment(n)?;
        let mut row: Vec<Cell> = vec![
            n.into(),
            log_c2.into(),
            representable(log_c2).into(),
            ms.ratio(n)?.into(),
        ];
        if oracle {
            row.push(moment_quadrature(&w, n, common.tol)?.into());
        }
        report.push(row);
    }
    report.note("log_convexity_defect", ms.log_convexity_defect());
    Ok(report)
}

fn fock_m(w: &WeightSpec) -> Option<f64> {
    match w {
        WeightSpec::FockExponential { m } => Some(*m),
        _ => None,
    }
}

pub fn spectrum(weight: &str, n_max: usize, common: &Common) -> CliResult<Report> {
    let w = Selector::parse(weight)?.radial_weight()?;
    let ms = MomentSequence::new(w.clone())?;
    let m = fock_m(&w);
    let config = RunConfig::new(common).weight(&w).n_max(n_max);
    let mut report = Report::new(
        "spectrum",
        config.to_json(),
        &[
            "n",
            "lambda_n",
            "partial_sum",
            "ratio",
            "stirling_surrogate",
            "gamma_ratio_difference",
        ],
    );
    let mut sum = 0.0;
    for n in 0..=n_max {
        let lambda = eigenvalue(&ms, n)?;
        sum += lambda;
        let (surrogate, difference) = match m {
            Some(m) if n >= 1 => (
                Some(stirling_surrogate(m, n)?),
                Some(gamma_ratio_difference(m, n)?),
            ),
            _ => (None, None),
        };
        report.push(vec![
            n.into(),
            lambda.into(),
            sum.into(),
            ms.ratio(n)?.into(),
            surrogate.into(),
            difference.into(),
        ]);
    }
    let c = classify(&ms, ClassifyParams::default())?;
    let e = &c.evidence;
    report.note("tail_window_start", e.tail_window.0);
    report.note("tail_window_end", e.tail_window.1);
    report.note("lambda_tail_max", e.lambda_tail_max);
    report.note("lambda_tail_min", e.lambda_tail_min);
    report.note("ratio_tail", e.ratio_tail);
    report.note("decay_exponent", e.decay_exponent);
    if let Some(note) = &e.note {
        report.note("note", note.as_str());
    }
    if n_max >= 1 {
        report.note("bound_constant", bound_constant(&ms, n_max)?);
    }
    report.verdict = Some(c.verdict.to_string());
    Ok(report)
}

pub fn read_coefficients(path: &Path) -> CliResult<HolomorphicCoeffs> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(HolomorphicCoeffs::new(parse_coefficients(&text)?))
}

pub fn solve(
    weight: &str,
    f: &HolomorphicCoeffs,
    rho: f64,
    points: usize,
    reproduce_at: Option<Complex64>,
    common: &Common,
) -> CliResult<Report> {
    let w = Selector::parse(weight)?.radial_weight()?;
    let ms = MomentSequence::new(w.clone())?;
    let config = RunConfig::new(common)
        .weight(&w)
        .with("rho", json!(rho))
        .with("points", json!(points))
        .with("degree", json!(f.degree()));
    let mut report = Report::new("solve", config.to_json(), &["part", "index", "re", "im"]);
    let s = apply_solution_operator(f, &ms)?;
    let push_coeffs = |report: &mut Report, part: &str, c: &HolomorphicCoeffs| {
        for (k, a) in c.coeffs().iter().enumerate() {
            report.push(vec![part.into(), k.into(), a.re.into(), a.im.into()]);
        }
    };
    push_coeffs(&mut report, "g", &s.conj_factor);
    push_coeffs(&mut report, "h", &s.holo_part);
    let top = f.degree().map_or(0, |d| d + 2);
    let mut worst: f64 = 0.0;
    for j in 0..=top {
        let ip = normalized_inner_product(&s, j, &ms)?;
        worst = worst.max(ip.norm());
        report.push(vec![
            "orthogonality".into(),
            j.into(),
            ip.re.into(),
            ip.im.into(),
        ]);
    }
    if rho < 1.0 {
        push_coeffs(&mut report, "projection", &project_dilated(f, rho, &ms)?);
    }

    let mut rng = random::rng(common.seed);
    let radius = w.support_radius().min(2.0);
    let pts: Vec<Complex64> = (0..points)
        .map(|_| random::point_in_disc(&mut rng, radius))
        .collect();
    let max_f = pts.iter().map(|&z| f.eval(z).norm()).fold(0.0, f64::max);
    report.note("f_norm_sq", f.norm_sq(&ms)?);
    report.note("defect_norm_sq", defect_norm_sq(f, rho, &ms)?);
    report.note(
        "bound_constant",
        bound_constant(&ms, f.degree().unwrap_or(0).max(1))?,
    );
    report.note("max_orthogonality", worst);
    report.note(
        "dbar_residual",
        dbar_residual(&s, f, &pts, DEFAULT_FD_STEP)?,
    );
    report.note("max_abs_f", max_f);
    if let Some(z) = reproduce_at {
        check_tol(common.tol)?;
        let got = reproduce_check(&ms, f, z, common.tol)?;
        let want = f.eval(z);
        report.note("reproduced_re", got.re);
        report.note("reproduced_im", got.im);
        report.note("f_at_point_re", want.re);
        report.note("f_at_point_im", want.im);
    }
    Ok(report)
}

pub fn kernel(weight: &str, z: Complex64, w: Complex64, common: &Common) -> CliResult<Report> {
    check_tol(common.tol)?;
    let spec = Selector::parse(weight)?.radial_weight()?;
    let ms = MomentSequence::new(spec.clone())?;
    let config = RunConfig::new(common)
        .weight(&spec)
        .with("z", json!([z.re, z.im]))
        .with("w", json!([w.re, w.im]));
    let mut report = Report::new(
        "kernel",
        config.to_json(),
        &["z_re", "z_im", "w_re", "w_im", "k_re", "k_im"],
    );
    let k = kernel_eval(&ms, z, w, common.tol)?;
    report.push(vec![
        z.re.into(),
        z.im.into(),
        w.re.into(),
        w.im.into(),
        k.re.into(),
        k.im.into(),
    ]);
    Ok(report)
}

fn pair(v: &[Complex64], name: &str) -> CliResult<[Complex64; 2]> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(CliError::Parameter(format!(
            "--{name} needs two complex coordinates"
        ))),
    }
}

pub fn ball(
    weight: &str,
    mode: BallMode,
    n_max: usize,
    z: &[Complex64],
    w: &[Complex64],
    common: &Common,
) -> CliResult<Report> {
    let alpha = Selector::parse(weight)?.ball_alpha()?;
    let mode_name = format!("{mode:?}").to_ascii_lowercase();
    let config = RunConfig::new(common)
        .weight(format!("ball:alpha={alpha}"))
        .n_max(n_max)
        .with("mode", json!(mode_name));
    let report = match mode {
        BallMode::Grid => {
            let grid = BallMomentGrid::new(alpha, n_max)?;
            let mut r = Report::new(
                "ball",
                config.to_json(),
                &[
                    "n1",
                    "n2",
                    "log_c2",
                    "energy_z1",
                    "energy_z2",
                    "energy_z1_from_moments",
                    "energy_z2_from_moments",
                ],
            );
            for n1 in 0..=n_max {
                for n2 in 0..=n_max {
                    r.push(vec![
                        n1.into(),
                        n2.into(),
                        grid.get(n1, n2).into(),
                        form_energy(alpha, n1, n2, Direction::Z1)?.into(),
                        form_energy(alpha, n1, n2, Direction::Z2)?.into(),
                        form_energy_from_moments(alpha, n1, n2, Direction::Z1)?.into(),
                        form_energy_from_moments(alpha, n1, n2, Direction::Z2)?.into(),
                    ]);
                }
            }
            r.note("hs_partial_sum", ball_hs_partial_sum(alpha, n_max)?);
            r
        }
        BallMode::PartialSums => {
            let mut r = Report::new("ball", config.to_json(), &["n", "partial_sum"]);
            for n in 0..=n_max {
                r.push(vec![n.into(), ball_hs_partial_sum(alpha, n)?.into()]);
            }
            r
        }
        BallMode::Kernel => {
            check_tol(common.tol)?;
            let (z, w) = (pair(z, "z")?, pair(w, "w")?);
            let mut r = Report::new(
                "ball",
                config
                    .with("z", json!([[z[0].re, z[0].im], [z[1].re, z[1].im]]))
                    .with("w", json!([[w[0].re, w[0].im], [w[1].re, w[1].im]]))
                    .to_json(),
                &[
                    "series_re",
                    "series_im",
                    "closed_re",
                    "closed_im",
                    "fitted_prefactor",
                    "prefactor",
                ],
            );
            let series = ball_kernel_series(alpha, z, w, common.tol)?;
            let prefactor = ball_kernel_prefactor(alpha)?;
            let closed = ball_kernel_closed(alpha, z, w, prefactor)?;
            let fitted = fit_kernel_prefactor(alpha, z, w, common.tol)?;
            r.push(vec![
                series.re.into(),
                series.im.into(),
                closed.re.into(),
                closed.im.into(),
                fitted.re.into(),
                prefactor.into(),
            ]);
            r
        }
        BallMode::Oracle => {
            check_tol(common.tol)?;
            let mut r = Report::new(
                "ball",
                config.to_json(),
                &["n1", "n2", "log_c2", "log_c2_quadrature", "abs_diff"],
            );
            for total in 0..=n_max {
                for n1 in 0..=total {
                    let n2 = total - n1;
                    let closed = ball_moment_log(alpha, n1, n2)?;
                    let quad = ball_moment_quadrature(alpha, n1, n2, common.tol)?;
                    r.push(vec![
                        n1.into(),
                        n2.into(),
                        closed.into(),
                        quad.into(),
                        (closed - quad).abs().into(),
                    ]);
                }
            }
            r
        }
    };
    Ok(report)
}

pub struct PshRequest<'a> {
    pub weight: &'a str,
    pub mode: PshMode,
    pub point: &'a [Complex64],
    pub radius: Option<f64>,
    pub grid: usize,
    pub tau: f64,
    pub sigma: f64,
    pub sample_radii: &'a [f64],
}

pub fn psh_weight(selector: &str, sample_radii: &[f64]) -> CliResult<(PshWeight, f64)> {
    let (k, c, dim) = Selector::parse(selector)?.power()?;
    let w = PshWeight::radial(dim, move |r| c * r.powf(k), sample_radii.to_vec())?;
    Ok((w, k))
}

pub fn psh(req: &PshRequest<'_>, common: &Common) -> CliResult<Report> {
    let (weight, k) = psh_weight(req.weight, req.sample_radii)?;
    let mode_name = format!("{:?}", req.mode).to_ascii_lowercase();
    let config = RunConfig::new(common)
        .weight(req.weight)
        .with("mode", json!(mode_name))
        .with("grid", json!(req.grid))
        .with(
            "point",
            json!(req.point.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>()),
        );
    let point = || -> CliResult<Vec<Complex64>> {
        if req.point.len() == weight.dimension() {
            Ok(req.point.to_vec())
        } else {
            Err(CliError::Parameter(format!(
                "--point needs {} coordinates",
                weight.dimension()
            )))
        }
    };
    let report = match req.mode {
        PshMode::Conjugate => {
            let w = point()?;
            let radius = req.radius.unwrap_or_else(|| default_search_radius(&w));
            let mut r = Report::new(
                "psh",
                config.with("radius", json!(radius)).to_json(),
                &["p_star"],
            );
            r.push(vec![
                conjugate_transform(&weight, &w, radius, req.grid)?.into()
            ]);
            r
        }
        PshMode::Double => {
            let z = point()?;
            let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            // the maximizing w sits near the gradient, of size k |z|^{k-1}
            let radius = req
                .radius
                .unwrap_or(8.0 * (1.0 + norm).powf((k - 1.0).max(1.0)));
            let mut r = Report::new(
                "psh",
                config.with("radius", json!(radius)).to_json(),
                &["p", "p_star_star"],
            );
            r.push(vec![
                weight.eval(&z)?.into(),
                double_conjugate(&weight, &z, radius, req.grid)?.into(),
            ]);
            r
        }
        PshMode::Shift => {
            let z = point()?;
            let mut r = Report::new("psh", config.to_json(), &["p", "p_tilde", "ratio"]);
            let p = weight.eval(&z)?;
            let pt = sup_shift(&weight, &z, req.grid)?;
            r.push(vec![p.into(), pt.into(), (pt / p).into()]);
            r
        }
        PshMode::Hypotheses => {
            let report = check_growth_hypotheses(&weight, req.tau, req.sigma)?;
            let mut r = Report::new(
                "psh",
                config
                    .with("tau", json!(req.tau))
                    .with("sigma", json!(req.sigma))
                    .to_json(),
                &["check", "passed", "detail", "values"],
            );
            for (name, check) in report.checks() {
                let values: Vec<String> = check
                    .values
                    .iter()
                    .map(|v| crate::output::format_real(*v))
                    .collect();
                r.push(vec![
                    name.into(),
                    check.passed.into(),
                    check.detail.clone().into(),
                    values.join(";").into(),
                ]);
            }
            r.pass = Some(report.all_passed());
            r
        }
    };
    Ok(report)
}

pub fn gamma(x: f64, h: Option<f64>, common: &Common) -> CliResult<Report> {
    let config = RunConfig::new(common)
        .with("x", json!(x))
        .with("h", json!(h));
    let mut r = Report::new("gamma", config.to_json(), &["quantity", "value"]);
    r.push(vec!["log_gamma".into(), log_gamma(x)?.into()]);
    if let Some(h) = h {
        r.push(vec!["ln_gamma_ratio".into(), ln_gamma_ratio(x, h)?.into()]);
        r.push(vec!["gamma_ratio".into(), gamma_ratio(x, h)?.into()]);
        if h >= 0.0 && x - h > 0.0 {
            r.push(vec![
                "ln_gamma_second_difference".into(),
                ln_gamma_second_difference(x, h)?.into(),
            ]);
        }
    }
    Ok(r)
}
