use std::path::Path;

use casimir_core::engine::{eta_sweep, EvaluationSettings};
use casimir_core::fit::{fit_roughness, load_measurements, model_etas, FitBounds, FitOptions, FitResult, MaterialParameters};
use casimir_core::SweepTable;
use serde::Serialize;

use crate::config::{ModelKind, RunConfig};
use crate::error::{CliError, CliResult};

/// Every number is written with 9 significant digits in scientific form.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

const SWEEP_HEADER: &str = "d_um,a_um,P_Pa,P_id_Pa,eta";

fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            num(r.d * 1e6),
            num(r.gap * 1e6),
            num(r.pressure),
            num(r.ideal_pressure),
            num(r.eta)
        ));
    }
    out
}

pub fn cmd_pressure(config: &RunConfig, d_um: f64) -> CliResult<String> {
    if !(d_um > 0.0) || !d_um.is_finite() {
        return Err(CliError::Input(format!("separation must be positive, got {d_um} um")));
    }
    let plate = config.plate_for(config.model)?;
    let table = eta_sweep(&plate, &[d_um / 1e6], &config.settings)?;
    Ok(sweep_csv(&table))
}

pub fn cmd_sweep(config: &RunConfig) -> CliResult<String> {
    let plate = config.plate_for(config.model)?;
    let table = eta_sweep(&plate, &config.grid.separations(), &config.settings)?;
    Ok(sweep_csv(&table))
}

pub fn cmd_compare(config: &RunConfig, models: &[ModelKind]) -> CliResult<String> {
    if models.len() < 2 {
        return Err(CliError::Input("compare needs at least 2 models".into()));
    }
    let ds = config.grid.separations();
    let columns = models
        .iter()
        .map(|&m| {
            let plate = config.plate_for(m)?;
            Ok(eta_sweep(&plate, &ds, &config.settings)?.etas())
        })
        .collect::<CliResult<Vec<Vec<f64>>>>()?;

    let mut out = String::from("d_um");
    for m in models {
        out.push_str(&format!(",eta_{m}"));
    }
    out.push_str(",max_pairwise_dev\n");
    for (i, d) in ds.iter().enumerate() {
        out.push_str(&num(d * 1e6));
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for col in &columns {
            out.push(',');
            out.push_str(&num(col[i]));
            lo = lo.min(col[i]);
            hi = hi.max(col[i]);
        }
        out.push(',');
        out.push_str(&num(hi - lo));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct Residual {
    d_um: f64,
    eta_obs: f64,
    eta_fit: f64,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    fit: &'a FitResult,
    h_nm: f64,
    data: String,
    material: &'a MaterialParameters,
    settings: &'a EvaluationSettings,
    initial: (f64, f64),
    h_max_nm: f64,
    residuals: Vec<Residual>,
}

pub struct FitOutput {
    pub report: String,
    pub residual_csv: String,
    pub converged: bool,
}

pub fn cmd_fit(
    config: &RunConfig,
    data_path: &Path,
    init: (f64, f64),
    h_max: f64,
) -> CliResult<FitOutput> {
    let text = std::fs::read_to_string(data_path)
        .map_err(|e| CliError::Input(format!("cannot read data {}: {e}", data_path.display())))?;
    let data = load_measurements(&text)?;
    let bounds = FitBounds { h_max };
    let result = fit_roughness(
        &data,
        bounds,
        init,
        &config.material,
        &config.settings,
        FitOptions::default(),
    )?;

    let fitted = model_etas(result.h, result.f, &data, &config.material, &config.settings)?;
    let residuals: Vec<Residual> = data
        .points()
        .iter()
        .zip(&fitted)
        .map(|(m, &eta_fit)| Residual {
            d_um: m.d * 1e6,
            eta_obs: m.eta,
            eta_fit,
            residual: m.eta - eta_fit,
        })
        .collect();

    let mut residual_csv = String::from("d_um,eta_obs,eta_fit,residual\n");
    for r in &residuals {
        residual_csv.push_str(&format!(
            "{},{},{},{}\n",
            num(r.d_um),
            num(r.eta_obs),
            num(r.eta_fit),
            num(r.residual)
        ));
    }

    let report = FitReport {
        fit: &result,
        h_nm: result.h * 1e9,
        data: data_path.display().to_string(),
        material: &config.material,
        settings: &config.settings,
        initial: init,
        h_max_nm: h_max * 1e9,
        residuals,
    };
    let report = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Internal(format!("cannot serialise report: {e}")))?;
    Ok(FitOutput {
        report,
        residual_csv,
        converged: result.converged,
    })
}
