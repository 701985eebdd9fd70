//! Least-squares estimation of the roughness parameters (h, f) from
//! measured reduction factors.

use serde::{Deserialize, Serialize};

use crate::engine::{eta_sweep, EvaluationSettings, Plate};
use crate::error::{require, Error, Result};
use crate::materials::{Oscillator, RoughPlateSpec};
use crate::simplex::{minimize, SimplexOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Average separation in m.
    pub d: f64,
    pub eta: f64,
    /// Absolute uncertainty of `eta`; `None` means unit weight.
    pub sigma: Option<f64>,
}

impl Measurement {
    pub fn new(d: f64, eta: f64, sigma: Option<f64>) -> Result<Self> {
        require(d > 0.0 && d.is_finite(), "d", d, "d > 0")?;
        require(eta > 0.0 && eta.is_finite(), "eta", eta, "eta > 0")?;
        if let Some(s) = sigma {
            require(s > 0.0 && s.is_finite(), "sigma", s, "sigma > 0")?;
        }
        Ok(Self { d, eta, sigma })
    }

    fn weight(&self) -> f64 {
        self.sigma.unwrap_or(1.0)
    }
}

/// Measurements sorted by strictly increasing `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet(Vec<Measurement>);

impl MeasurementSet {
    pub fn new(mut points: Vec<Measurement>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Data("no measurements".into()));
        }
        points.sort_by(|a, b| a.d.total_cmp(&b.d));
        if let Some(w) = points.windows(2).find(|w| w[0].d == w[1].d) {
            return Err(Error::Data(format!("duplicate separation d = {:e} m", w[0].d)));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[Measurement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn separations(&self) -> Vec<f64> {
        self.0.iter().map(|m| m.d).collect()
    }

    /// CSV with a `d_nm,eta[,sigma]` header, readable by [`load_measurements`].
    pub fn to_csv(&self) -> String {
        let weighted = self.0.iter().any(|m| m.sigma.is_some());
        let mut out = String::from(if weighted { "d_nm,eta,sigma\n" } else { "d_nm,eta\n" });
        for m in &self.0 {
            out.push_str(&format!("{:e},{:e}", m.d * 1e9, m.eta));
            if weighted {
                out.push_str(&format!(",{:e}", m.weight()));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses measurement CSV. The header names the separation column `d_um`
/// or `d_nm`, then `eta` and an optional `sigma`. Lines starting with `#`
/// are comments.
pub fn load_measurements(text: &str) -> Result<MeasurementSet> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| Error::Data(format!("unreadable header: {e}")))?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::Data("no measurements".into()));
    }

    let mut d_column = None;
    let mut eta_column = None;
    let mut sigma_column = None;
    for (i, name) in header.iter().enumerate() {
        match name {
            "d_um" => d_column = Some((i, 1e6)),
            "d_nm" => d_column = Some((i, 1e9)),
            "eta" => eta_column = Some(i),
            "sigma" => sigma_column = Some(i),
            other if other.starts_with("d_") => {
                return Err(Error::Data(format!("unknown unit suffix in column '{other}'")))
            }
            other if other == "d" => {
                return Err(Error::Data("separation column needs a unit: d_um or d_nm".into()))
            }
            _ => {}
        }
    }
    let (d_index, per_metre) =
        d_column.ok_or_else(|| Error::Data("missing separation column d_um or d_nm".into()))?;
    let eta_index = eta_column.ok_or_else(|| Error::Data("missing column eta".into()))?;

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |index: usize, name: &str| -> Result<f64> {
            let raw = record.get(index).ok_or_else(|| Error::DataLine {
                line,
                message: format!("missing field {name}"),
            })?;
            raw.parse::<f64>().map_err(|_| Error::DataLine {
                line,
                message: format!("cannot parse {name} value '{raw}'"),
            })
        };
        let d = field(d_index, "d")? / per_metre;
        let eta = field(eta_index, "eta")?;
        let sigma = match sigma_column {
            Some(i) if record.get(i).is_some_and(|s| !s.is_empty()) => Some(field(i, "sigma")?),
            _ => None,
        };
        let m = Measurement::new(d, eta, sigma).map_err(|e| Error::DataLine {
            line,
            message: e.to_string(),
        })?;
        points.push(m);
    }
    MeasurementSet::new(points)
}

/// Bulk material of the rough plate; the surface layer is derived from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParameters {
    /// Ω_P in rad/s.
    pub plasma_frequency: f64,
    /// γ in rad/s.
    pub relaxation_frequency: f64,
    #[serde(default)]
    pub interband: Vec<Oscillator>,
}

impl MaterialParameters {
    pub fn rough_plate(&self, thickness: f64, fill_factor: f64) -> Result<RoughPlateSpec> {
        RoughPlateSpec::build(
            self.plasma_frequency,
            self.relaxation_frequency,
            thickness,
            fill_factor,
            Some(&self.interband),
        )
    }
}

/// Model η at every measured separation, in the set's order.
pub fn model_etas(
    thickness: f64,
    fill_factor: f64,
    data: &MeasurementSet,
    material: &MaterialParameters,
    settings: &EvaluationSettings,
) -> Result<Vec<f64>> {
    let plate = Plate::rough(&material.rough_plate(thickness, fill_factor)?)?;
    Ok(eta_sweep(&plate, &data.separations(), settings)?.etas())
}

/// χ² = Σᵢ ((η_model(dᵢ) − η_obs,ᵢ)/σᵢ)².
pub fn objective(
    thickness: f64,
    fill_factor: f64,
    data: &MeasurementSet,
    material: &MaterialParameters,
    settings: &EvaluationSettings,
) -> Result<f64> {
    let etas = model_etas(thickness, fill_factor, data, material, settings)?;
    Ok(data
        .points()
        .iter()
        .zip(etas)
        .map(|(m, model)| ((model - m.eta) / m.weight()).powi(2))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitBounds {
    /// Upper bound on h in m.
    pub h_max: f64,
}

impl Default for FitBounds {
    fn default() -> Self {
        Self { h_max: 100e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_evaluations: usize,
    /// Length scale of the softplus map for h, in m.
    pub h_scale: f64,
    /// Simplex size criterion in transformed coordinates.
    pub x_tol: f64,
    /// Relative χ² spread criterion.
    pub f_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 2000,
            h_scale: 1e-9,
            x_tol: 1e-3,
            f_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted layer thickness in m.
    pub h: f64,
    pub f: f64,
    pub chi2: f64,
    pub n_evaluations: usize,
    pub converged: bool,
    /// Finite-difference Hessian of χ² in (h [m], f) at the optimum.
    pub h_f_covariance_proxy: [[f64; 2]; 2],
    pub warnings: Vec<String>,
}

/// Maps unconstrained simplex coordinates to (h, f) and back.
#[derive(Debug, Clone, Copy)]
struct Transform {
    h_scale: f64,
    h_max: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z
    } else {
        z.exp().ln_1p()
    }
}

fn inverse_softplus(y: f64) -> f64 {
    if y > 30.0 {
        y
    } else {
        y.exp_m1().ln()
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Transform {
    fn forward(&self, x: &[f64]) -> (f64, f64) {
        let h = (self.h_scale * softplus(x[0])).min(self.h_max);
        (h, logistic(x[1]))
    }

    fn inverse(&self, h: f64, f: f64) -> [f64; 2] {
        // Interior floors keep the logit and log finite for h = 0 or f = 1.
        let h = h.max(1e-6 * self.h_scale);
        let f = f.min(1.0 - 1e-9);
        [inverse_softplus(h / self.h_scale), (f / (1.0 - f)).ln()]
    }
}

/// Fits (h, f) by simplex descent in bound-respecting coordinates.
pub fn fit_roughness(
    data: &MeasurementSet,
    bounds: FitBounds,
    init: (f64, f64),
    material: &MaterialParameters,
    settings: &EvaluationSettings,
    options: FitOptions,
) -> Result<FitResult> {
    let (h0, f0) = init;
    require(bounds.h_max > 0.0, "h_max", bounds.h_max, "h_max > 0")?;
    require(h0 >= 0.0 && h0 <= bounds.h_max, "initial h", h0, "0 <= h0 <= h_max")?;
    require(f0 > 0.0 && f0 <= 1.0, "initial f", f0, "0 < f0 <= 1")?;
    settings.validate()?;
    // Surface the first evaluation's error instead of hiding it as +∞.
    objective(h0, f0, data, material, settings)?;

    let transform = Transform {
        h_scale: options.h_scale,
        h_max: bounds.h_max,
    };
    let start = transform.inverse(h0, f0);
    let chi2 = |x: &[f64]| {
        let (h, f) = transform.forward(x);
        objective(h, f, data, material, settings).unwrap_or(f64::INFINITY)
    };
    let result = minimize(
        chi2,
        &start,
        &[1.0, 1.0],
        SimplexOptions {
            max_evaluations: options.max_evaluations,
            x_tol: options.x_tol,
            f_tol: options.f_tol,
            ..SimplexOptions::default()
        },
    );
    let (h, f) = transform.forward(&result.x);

    let mut warnings = Vec::new();
    if data.len() < 2 {
        warnings.push(
            "fewer observations than parameters: (h, f) is not uniquely determined".to_string(),
        );
    }
    if !result.converged {
        warnings.push(format!(
            "evaluation budget of {} exhausted; reporting best point found",
            options.max_evaluations
        ));
    }
    let curvature = hessian(h, f, bounds, data, material, settings)?;

    Ok(FitResult {
        h,
        f,
        chi2: result.value,
        n_evaluations: result.evaluations,
        converged: result.converged,
        h_f_covariance_proxy: curvature,
        warnings,
    })
}

/// Central-difference Hessian of χ², shifted inward at the bounds.
fn hessian(
    h: f64,
    f: f64,
    bounds: FitBounds,
    data: &MeasurementSet,
    material: &MaterialParameters,
    settings: &EvaluationSettings,
) -> Result<[[f64; 2]; 2]> {
    let dh = 0.1e-9;
    let df = 1e-3;
    let hc = h.clamp(dh, bounds.h_max - dh);
    let fc = f.clamp(df + 1e-12, 1.0 - df);
    let chi = |x: f64, y: f64| objective(x, y, data, material, settings);

    let c = chi(hc, fc)?;
    let hp = chi(hc + dh, fc)?;
    let hm = chi(hc - dh, fc)?;
    let fp = chi(hc, fc + df)?;
    let fm = chi(hc, fc - df)?;
    let pp = chi(hc + dh, fc + df)?;
    let pm = chi(hc + dh, fc - df)?;
    let mp = chi(hc - dh, fc + df)?;
    let mm = chi(hc - dh, fc - df)?;

    let hh = (hp - 2.0 * c + hm) / (dh * dh);
    let ff = (fp - 2.0 * c + fm) / (df * df);
    let hf = (pp - pm - mp + mm) / (4.0 * dh * df);
    Ok([[hh, hf], [hf, ff]])
}
