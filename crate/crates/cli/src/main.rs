mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigFile, ModelKind, Overrides, RunConfig};
use crate::error::{CliError, CliResult};

/// Casimir pressure between metallic plates: pressure, η(d) sweeps,
/// model comparison and roughness fits. Output is CSV on stdout.
#[derive(Debug, Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// drude | plasma | perfect | two-layer | two-layer:H_NM:F
    #[arg(long, global = true)]
    model: Option<String>,
    /// Temperature in K.
    #[arg(long = "temp", global = true)]
    temperature: Option<f64>,
    /// Evaluate at zero temperature.
    #[arg(long, global = true)]
    t0: bool,
    /// Surface-layer thickness h in nm.
    #[arg(long = "h-nm", global = true)]
    h_nm: Option<f64>,
    /// Fill factor f of the surface layer.
    #[arg(long = "f", global = true)]
    fill_factor: Option<f64>,
    /// Smallest average separation in um.
    #[arg(long, global = true)]
    dmin: Option<f64>,
    /// Largest average separation in um.
    #[arg(long, global = true)]
    dmax: Option<f64>,
    /// Number of grid points.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Logarithmic grid spacing.
    #[arg(long, global = true)]
    log: bool,
    /// Write the CSV table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pressure and η at one average separation.
    Pressure {
        /// Average separation d in um.
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        common: Common,
    },
    /// η over the separation grid.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// η of several models on a shared grid.
    Compare {
        /// Comma-separated models, e.g. drude,plasma,two-layer:11:0.9
        #[arg(long, value_delimiter = ',', required = true)]
        models: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit (h, f) to measured reduction factors.
    Fit {
        /// Measurements CSV with columns d_um|d_nm, eta[, sigma].
        #[arg(long)]
        data: PathBuf,
        /// Initial h in nm.
        #[arg(long = "h0-nm", default_value_t = 5.0)]
        h0_nm: f64,
        /// Initial f.
        #[arg(long = "f0", default_value_t = 0.7)]
        f0: f64,
        /// Upper bound on h in nm.
        #[arg(long = "h-max-nm", default_value_t = 100.0)]
        h_max_nm: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn resolve(common: &Common) -> CliResult<RunConfig> {
    let file = match &common.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let overrides = Overrides {
        model: common.model.clone(),
        temperature: common.temperature,
        zero_temperature: common.t0,
        h_nm: common.h_nm,
        fill_factor: common.fill_factor,
        d_min_um: common.dmin,
        d_max_um: common.dmax,
        points: common.points,
        log: common.log,
    };
    RunConfig::resolve(&file, &overrides)
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(e.to_string())),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Pressure { d, common } => {
            let config = resolve(&common)?;
            emit(&common.out, &commands::cmd_pressure(&config, d)?)
        }
        Command::Sweep { common } => {
            let config = resolve(&common)?;
            emit(&common.out, &commands::cmd_sweep(&config)?)
        }
        Command::Compare { models, common } => {
            let config = resolve(&common)?;
            let models = models
                .iter()
                .map(|m| ModelKind::parse(m))
                .collect::<CliResult<Vec<_>>>()?;
            emit(&common.out, &commands::cmd_compare(&config, &models)?)
        }
        Command::Fit {
            data,
            h0_nm,
            f0,
            h_max_nm,
            common,
        } => {
            let config = resolve(&common)?;
            let fit = commands::cmd_fit(&config, &data, (h0_nm / 1e9, f0), h_max_nm / 1e9)?;
            let mut stdout = std::io::stdout();
            writeln!(stdout, "{}", fit.report).map_err(|e| CliError::Internal(e.to_string()))?;
            if let Some(path) = &common.out {
                emit(&Some(path.clone()), &fit.residual_csv)?;
            }
            if fit.converged {
                Ok(())
            } else {
                Err(CliError::NonConvergence(
                    "fit did not converge within the evaluation budget; best point reported".into(),
                ))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
