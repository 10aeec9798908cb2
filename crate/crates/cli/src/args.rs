use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::config::parse_complex;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "dbar",
    version,
    about = "Canonical dbar solution operator on radial weighted Bergman and Fock spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (a directory for `reproduce`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative tolerance for quadrature and series truncation.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed for sampled points and random polynomials.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BallMode {
    Grid,
    PartialSums,
    Kernel,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PshMode {
    Conjugate,
    Double,
    Shift,
    Hypotheses,
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moment table `n, ln c_n², c_n², r_n`.
    Moments {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Add the quadrature oracle column.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues of `S*S`, partial sums and the compactness verdict.
    Spectrum {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Apply `S` to a polynomial read from a coefficient file.
    Solve {
        #[arg(long)]
        weight: String,
        /// JSON array of `[re, im]` pairs, index = degree.
        #[arg(long)]
        coeffs: PathBuf,
        /// Dilation used for the defect norm and projection.
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Number of sampled points for the dbar residual.
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Also integrate the reproducing kernel against f at this point.
        #[arg(long, value_parser = complex_arg)]
        reproduce_at: Option<Complex64>,
        #[command(flatten)]
        common: Common,
    },
    /// Bergman kernel `K(z, w)` from its series.
    Kernel {
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        w: Complex64,
        #[command(flatten)]
        common: Common,
    },
    /// The unit ball of C² (`--weight ball:alpha=…`).
    Ball {
        #[arg(long, default_value = "ball:alpha=0")]
        weight: String,
        #[arg(long, value_enum, default_value_t = BallMode::Grid)]
        mode: BallMode,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Two coordinates of z for `--mode kernel`.
        #[arg(long, value_parser = complex_arg, num_args = 2, allow_hyphen_values = true)]
        z: Vec<Complex64>,
        /// Two coordinates of w for `--mode kernel`.
        #[arg(long, value_parser = complex_arg, num_args = 2, allow_hyphen_values = true)]
        w: Vec<Complex64>,
        #[command(flatten)]
        common: Common,
    },
    /// Conjugate and shifted-supremum transforms of `c |z|^k` on C^dim.
    Psh {
        #[arg(long, default_value = "power:k=2")]
        weight: String,
        #[arg(long, value_enum, default_value_t = PshMode::Hypotheses)]
        mode: PshMode,
        /// Point coordinates, one per complex dimension.
        #[arg(long, value_parser = complex_arg, num_args = 1.., allow_hyphen_values = true)]
        point: Vec<Complex64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 2.0)]
        sigma: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        sample_radii: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// `ln Γ(x)` and differences `ln Γ(x+h) - ln Γ(x)`.
    Gamma {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance criteria, one artifact each.
    Reproduce {
        /// Run a single criterion by id or number.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Moments { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Solve { common, .. }
            | Command::Kernel { common, .. }
            | Command::Ball { common, .. }
            | Command::Psh { common, .. }
            | Command::Gamma { common, .. }
            | Command::Reproduce { common, .. } => common,
        }
    }
}
