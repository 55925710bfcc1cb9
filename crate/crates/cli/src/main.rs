use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hft::DEFAULT_FD_STEP;
use hft_cli::{
    fermi_plots, run_check, run_classify, run_crossings, run_fermi, run_models, run_scan,
    CheckConfig, CliError, FermiConfig, ModelSpec, ScanConfig,
};

/// Spectra of parameter-dependent matrices, Hellmann-Feynman slopes at
/// level crossings, and fermion ground-state cusps.
#[derive(Parser)]
#[command(name = "hft", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tracked eigenvalue branches on a lambda grid, as CSV.
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Append HFT slope columns.
        #[arg(long)]
        slopes: bool,
        /// Sort each row instead of following branches.
        #[arg(long)]
        sorted: bool,
        #[arg(long = "tol-deg")]
        tol_deg: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ground-state energy and slope at fixed particle number, as CSV.
    Fermi {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        np: usize,
        #[command(flatten)]
        out: OutArgs,
        /// Write STEM_e0.svg and STEM_de0.svg.
        #[arg(long, value_name = "STEM")]
        svg: Option<PathBuf>,
    },
    /// Diagonal HFT residuals at one lambda; exits 1 if any exceeds 1e-6.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "tol-deg")]
        tol_deg: Option<f64>,
        #[arg(long = "fd-step", default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
    },
    /// Irrep label of every state at one lambda.
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "tol-deg")]
        tol_deg: Option<f64>,
    },
    /// Level crossings at the occupation frontier.
    Crossings {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2)]
        np: usize,
    },
    /// List available models.
    Models,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "six-site")]
    model: String,
    /// Oscillator frequency.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Oscillator basis truncation m + n <= nmax.
    #[arg(long, default_value_t = 12)]
    nmax: usize,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        ModelSpec::new(&self.model, self.omega, self.nmax)
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    lmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lmax: Option<f64>,
    #[arg(long, default_value_t = 181)]
    steps: usize,
}

impl GridArgs {
    fn range(&self, spec: &ModelSpec) -> (f64, f64) {
        let (lo, hi) = spec.default_range();
        (self.lmin.unwrap_or(lo), self.lmax.unwrap_or(hi))
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn svg_path(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    stem.with_file_name(name)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Scan {
            model,
            grid,
            slopes,
            sorted,
            tol_deg,
            out,
        } => {
            let spec = model.spec();
            let (lo, hi) = grid.range(&spec);
            let table = run_scan(&ScanConfig {
                model: spec,
                lo,
                hi,
                steps: grid.steps,
                slopes,
                sorted,
                degeneracy_tol: tol_deg,
            })?;
            out.emit(&table.to_csv()?)?;
        }
        Command::Fermi {
            model,
            grid,
            np,
            out,
            svg,
        } => {
            let spec = model.spec();
            let (lo, hi) = grid.range(&spec);
            let result = run_fermi(&FermiConfig {
                model: spec,
                lo,
                hi,
                steps: grid.steps,
                n_particles: np,
            })?;
            out.emit(&result.table.to_csv()?)?;
            if let Some(stem) = svg {
                let (energy, slope) = fermi_plots(&result.curve, np);
                write_file(&svg_path(&stem, "_e0.svg"), &energy.render())?;
                write_file(&svg_path(&stem, "_de0.svg"), &slope.render())?;
            }
        }
        Command::Check {
            model,
            lambda,
            tol_deg,
            fd_step,
        } => {
            let result = run_check(&CheckConfig {
                model: model.spec(),
                lambda,
                degeneracy_tol: tol_deg,
                fd_step,
            })?;
            print!("{}", result.text);
            return Ok(result.passed);
        }
        Command::Classify {
            model,
            lambda,
            tol_deg,
        } => {
            print!("{}", run_classify(&model.spec(), lambda, tol_deg)?.text);
        }
        Command::Crossings { model, grid, np } => {
            let spec = model.spec();
            let (lo, hi) = grid.range(&spec);
            let crossings = run_crossings(&FermiConfig {
                model: spec,
                lo,
                hi,
                steps: grid.steps,
                n_particles: np,
            })?;
            for c in crossings {
                println!("{c:.12}");
            }
        }
        Command::Models => print!("{}", run_models()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
