//! Command-line front end: subcommand dispatch, CSV / JSON output and the
//! `reproduce` acceptance suite.

pub mod args;
pub mod commands;
pub mod config;
pub mod criteria;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use args::{Cli, Command};
use commands::PshRequest;
use error::{CliError, CliResult};
use output::{Format, Report};

/// Default artifact directory for `reproduce`.
pub const REPRODUCE_DIR: &str = "reproduce-output";

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(
    report: &Report,
    format: Format,
    out: Option<&PathBuf>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let text = report.render(format);
    match out {
        Some(path) => write_text(path, &text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write output: {e}"))),
    }
}

/// Runs one parsed invocation, writing tables to `stdout` unless `--out`
/// is given.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let common = cli.command.common();
    let report = match &cli.command {
        Command::Moments {
            weight,
            n_max,
            oracle,
            ..
        } => commands::moments(weight, *n_max, *oracle, common)?,
        Command::Spectrum { weight, n_max, .. } => commands::spectrum(weight, *n_max, common)?,
        Command::Solve {
            weight,
            coeffs,
            rho,
            points,
            reproduce_at,
            ..
        } => {
            let f = commands::read_coefficients(coeffs)?;
            commands::solve(weight, &f, *rho, *points, *reproduce_at, common)?
        }
        Command::Kernel { weight, z, w, .. } => commands::kernel(weight, *z, *w, common)?,
        Command::Ball {
            weight,
            mode,
            n_max,
            z,
            w,
            ..
        } => commands::ball(weight, *mode, *n_max, z, w, common)?,
        Command::Psh {
            weight,
            mode,
            point,
            radius,
            grid,
            tau,
            sigma,
            sample_radii,
            ..
        } => {
            let req = PshRequest {
                weight,
                mode: *mode,
                point,
                radius: *radius,
                grid: *grid,
                tau: *tau,
                sigma: *sigma,
                sample_radii,
            };
            commands::psh(&req, common)?
        }
        Command::Gamma { x, h, .. } => commands::gamma(*x, *h, common)?,
        Command::Reproduce { only, .. } => return reproduce(only.as_deref(), common, stdout),
    };
    emit(&report, common.format, common.out.as_ref(), stdout)
}

/// Runs the selected criteria, writes `<dir>/<id>.<ext>` for each and one
/// PASS/FAIL line per criterion to `stdout`.
pub fn reproduce(
    only: Option<&str>,
    common: &args::Common,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(REPRODUCE_DIR));
    let mut failed = Vec::new();
    for criterion in criteria::select(only)? {
        let result = criterion.run(common.seed)?;
        let path = dir.join(format!("{}.{}", result.id, common.format.extension()));
        write_text(&path, &result.report.render(common.format))?;
        writeln!(stdout, "{}", result.line())
            .map_err(|e| CliError::Input(format!("cannot write output: {e}")))?;
        if !result.pass {
            failed.push(result.id);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(format!(
            "failed: {}",
            failed.join(", ")
        )))
    }
}
