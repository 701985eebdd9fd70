//! Lifshitz pressure between two identical plates.
//!
//! With the azimuthal integral done analytically,
//!
//! P = (k_B T/π) Σ′ₗ ∫₀^∞ dk⊥ k⊥ qₗ Σ_α [e^(2a qₗ)/r_α² − 1]⁻¹,
//!
//! where the l = 0 term carries weight ½ and qₗ = √(k⊥² + ξₗ²/c²). The
//! result is returned as a positive number for attraction.
//!
//! The k⊥ integral is done in u = 2a q, where the integrand is
//! u² r²/(eᵘ − r²)/(2a)³ on [2a ξ/c, ∞); an independent k⊥-variable path is
//! selectable through [`IntegrationVariable`] for cross-checking.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{BOLTZMANN, HBAR, SPEED_OF_LIGHT};
use crate::error::{require, Error, Result};
use crate::materials::RoughPlateSpec;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::stack::{FrequencyResponse, LayerStack, Polarization};

/// Relative level below which the exponential tail of the integrand is
/// dropped.
const TAIL_CUTOFF: f64 = 1e-16;

/// Matsubara terms evaluated per parallel batch.
const BATCH: usize = 32;

/// ξₗ = 2π k_B T l/ħ in rad/s.
pub fn matsubara_frequency(l: usize, temperature: f64) -> f64 {
    2.0 * PI * BOLTZMANN * temperature * l as f64 / HBAR
}

/// P_id = π²ħc/(240 d⁴): ideal mirrors at zero temperature.
pub fn ideal_pressure(d: f64) -> Result<f64> {
    require(d > 0.0 && d.is_finite(), "separation", d, "d > 0")?;
    Ok(PI * PI * HBAR * SPEED_OF_LIGHT / (240.0 * d.powi(4)))
}

/// η = P/P_id(d).
pub fn reduction_factor(pressure: f64, d: f64) -> Result<f64> {
    Ok(pressure / ideal_pressure(d)?)
}

/// d = a + 2h(1 − f).
pub fn average_separation(gap: f64, thickness: f64, fill_factor: f64) -> Result<f64> {
    require(gap > 0.0, "gap", gap, "a > 0")?;
    Ok(gap + 2.0 * thickness * (1.0 - fill_factor))
}

/// a = d − 2h(1 − f).
pub fn gap_from_average(d: f64, thickness: f64, fill_factor: f64) -> Result<f64> {
    let offset = 2.0 * thickness * (1.0 - fill_factor);
    require(d > offset, "average separation", d, "d > 2h(1 - f)")?;
    Ok(d - offset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationVariable {
    /// u = 2a q.
    #[default]
    Axial,
    /// k⊥ directly.
    Transverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSettings {
    /// Temperature in K.
    pub temperature: f64,
    pub quad_rel_tol: f64,
    pub sum_rel_tol: f64,
    pub consecutive_small_terms: usize,
    pub l_max: usize,
    pub zero_temperature: bool,
    /// When false, exactly `l_max + 1` Matsubara terms are summed.
    pub adaptive_truncation: bool,
    pub integration_variable: IntegrationVariable,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        Self {
            temperature: 300.0,
            quad_rel_tol: 1e-9,
            sum_rel_tol: 1e-10,
            consecutive_small_terms: 3,
            l_max: 5000,
            zero_temperature: false,
            adaptive_truncation: true,
            integration_variable: IntegrationVariable::Axial,
        }
    }
}

impl EvaluationSettings {
    pub fn at_temperature(temperature: f64) -> Self {
        Self {
            temperature,
            ..Self::default()
        }
    }

    pub fn zero_temperature() -> Self {
        Self {
            zero_temperature: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.quad_rel_tol > 0.0 && self.quad_rel_tol <= 1e-3,
            "quad_rel_tol",
            self.quad_rel_tol,
            "0 < tol <= 1e-3",
        )?;
        require(
            self.sum_rel_tol > 0.0 && self.sum_rel_tol <= 1e-3,
            "sum_rel_tol",
            self.sum_rel_tol,
            "0 < tol <= 1e-3",
        )?;
        require(self.l_max >= 1, "l_max", self.l_max as f64, "l_max >= 1")?;
        require(
            self.consecutive_small_terms >= 1,
            "consecutive_small_terms",
            self.consecutive_small_terms as f64,
            ">= 1",
        )?;
        if !self.zero_temperature {
            require(
                self.temperature > 0.0 && self.temperature.is_finite(),
                "temperature",
                self.temperature,
                "T > 0",
            )?;
        }
        Ok(())
    }
}

/// A plate together with the offset between its average surface and the
/// top of its outermost layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plate {
    pub stack: LayerStack,
    pub thickness: f64,
    pub fill_factor: f64,
}

impl Plate {
    /// A plate whose average surface coincides with its top surface.
    pub fn flat(stack: LayerStack) -> Self {
        Self {
            stack,
            thickness: 0.0,
            fill_factor: 1.0,
        }
    }

    pub fn rough(spec: &RoughPlateSpec) -> Result<Self> {
        Ok(Self {
            stack: LayerStack::from_rough_plate(spec)?,
            thickness: spec.thickness,
            fill_factor: spec.fill_factor,
        })
    }

    pub fn gap_from_average(&self, d: f64) -> Result<f64> {
        gap_from_average(d, self.thickness, self.fill_factor)
    }
}

/// Contributions to one evaluated pressure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureBreakdown {
    /// Total pressure in Pa (positive = attraction).
    pub pressure: f64,
    /// Weighted l = 0 contributions in Pa, `[TE, TM]`. Zero at T = 0.
    pub static_term: [f64; 2],
    /// Number of Matsubara terms summed (0 in zero-temperature mode).
    pub terms: usize,
}

/// Lifshitz pressure at gap `gap`, dispatching on `settings.zero_temperature`.
pub fn pressure(stack: &LayerStack, gap: f64, settings: &EvaluationSettings) -> Result<f64> {
    Ok(pressure_breakdown(stack, gap, settings)?.pressure)
}

pub fn pressure_breakdown(
    stack: &LayerStack,
    gap: f64,
    settings: &EvaluationSettings,
) -> Result<PressureBreakdown> {
    if settings.zero_temperature {
        pressure_zero_temperature(stack, gap, settings).map(|pressure| PressureBreakdown {
            pressure,
            static_term: [0.0, 0.0],
            terms: 0,
        })
    } else {
        pressure_finite_temperature(stack, gap, settings)
    }
}

/// Upper end of the u range: the u² e^(−u) envelope has dropped by
/// [`TAIL_CUTOFF`] relative to its value at the peak.
fn upper_limit(u0: f64) -> f64 {
    let peak = u0.max(2.0);
    let decades = -TAIL_CUTOFF.ln();
    let mut u = peak + decades;
    for _ in 0..6 {
        u = peak + decades + 2.0 * (u / peak).ln();
    }
    u
}

/// r²/(eᵘ − r²), written to keep precision when r² → 1 and u → 0.
fn occupation(r: f64, u: f64) -> f64 {
    let r2 = r * r;
    if r2 == 0.0 {
        0.0
    } else {
        r2 / (u.exp_m1() + (1.0 - r2))
    }
}

/// ∫₀^∞ dk⊥ k⊥ q Σ_α occupation for the selected polarizations.
fn transverse_integral(
    response: &FrequencyResponse,
    xi: f64,
    gap: f64,
    polarizations: &[Polarization],
    settings: &EvaluationSettings,
    rel_tol: f64,
) -> Result<f64> {
    let two_a = 2.0 * gap;
    let q0 = xi / SPEED_OF_LIGHT;
    let u0 = two_a * q0;
    let u_max = upper_limit(u0);
    let options = QuadratureOptions::relative(rel_tol);

    let sum_over = |k: f64, u: f64| -> f64 {
        polarizations
            .iter()
            .map(|&p| occupation(response.reflection(p, k), u))
            .sum()
    };

    let value = match settings.integration_variable {
        IntegrationVariable::Axial => {
            let integrand = |u: f64| {
                let k = ((u - u0) * (u + u0)).max(0.0).sqrt() / two_a;
                u * u * sum_over(k, u)
            };
            integrate(integrand, u0, u_max, options)?.value / two_a.powi(3)
        }
        IntegrationVariable::Transverse => {
            let q_max = u_max / two_a;
            let k_max = ((q_max - q0) * (q_max + q0)).sqrt();
            let integrand = |k: f64| {
                let q = (k * k + q0 * q0).sqrt();
                k * q * sum_over(k, two_a * q)
            };
            integrate(integrand, 0.0, k_max, options)?.value
        }
    };
    Ok(value)
}

/// Unweighted Matsubara term for l ≥ 1, summed over polarizations.
fn matsubara_term(
    stack: &LayerStack,
    gap: f64,
    l: usize,
    settings: &EvaluationSettings,
) -> Result<f64> {
    let xi = matsubara_frequency(l, settings.temperature);
    let response = stack.at_frequency(xi)?;
    transverse_integral(
        &response,
        xi,
        gap,
        &Polarization::BOTH,
        settings,
        settings.quad_rel_tol,
    )
}

/// Unweighted l = 0 term, `[TE, TM]`. A TE part that vanishes for every
/// k⊥ is returned as an exact zero without integrating.
fn static_term(stack: &LayerStack, gap: f64, settings: &EvaluationSettings) -> Result<[f64; 2]> {
    let response = stack.at_zero_frequency();
    let te = if stack.static_te_vanishes() {
        0.0
    } else {
        transverse_integral(&response, 0.0, gap, &[Polarization::TE], settings, settings.quad_rel_tol)?
    };
    let tm = transverse_integral(&response, 0.0, gap, &[Polarization::TM], settings, settings.quad_rel_tol)?;
    Ok([te, tm])
}

pub fn pressure_finite_temperature(
    stack: &LayerStack,
    gap: f64,
    settings: &EvaluationSettings,
) -> Result<PressureBreakdown> {
    settings.validate()?;
    require(gap > 0.0 && gap.is_finite(), "gap", gap, "a > 0")?;
    let prefactor = BOLTZMANN * settings.temperature / PI;

    let [te0, tm0] = static_term(stack, gap, settings)?;
    let mut total = 0.5 * (te0 + tm0);
    let mut small_run = 0usize;
    let mut next = 1usize;

    while next <= settings.l_max {
        let end = (next + BATCH).min(settings.l_max + 1);
        let batch: Vec<f64> = (next..end)
            .into_par_iter()
            .map(|l| matsubara_term(stack, gap, l, settings))
            .collect::<Result<_>>()?;
        for (offset, term) in batch.into_iter().enumerate() {
            total += term;
            if settings.adaptive_truncation {
                if term.abs() <= settings.sum_rel_tol * total.abs() {
                    small_run += 1;
                } else {
                    small_run = 0;
                }
                if small_run >= settings.consecutive_small_terms {
                    return Ok(PressureBreakdown {
                        pressure: prefactor * total,
                        static_term: [0.5 * prefactor * te0, 0.5 * prefactor * tm0],
                        terms: next + offset + 1,
                    });
                }
            }
        }
        next = end;
    }

    if settings.adaptive_truncation {
        Err(Error::MatsubaraNotConverged {
            partial_sum: prefactor * total,
            l_reached: settings.l_max,
        })
    } else {
        Ok(PressureBreakdown {
            pressure: prefactor * total,
            static_term: [0.5 * prefactor * te0, 0.5 * prefactor * tm0],
            terms: settings.l_max + 1,
        })
    }
}

/// T = 0 limit: k_B T Σ′ₗ → (ħ/2π) ∫₀^∞ dξ, done by nested adaptive
/// quadrature in ζ = 2aξ/c.
pub fn pressure_zero_temperature(
    stack: &LayerStack,
    gap: f64,
    settings: &EvaluationSettings,
) -> Result<f64> {
    settings.validate()?;
    require(gap > 0.0 && gap.is_finite(), "gap", gap, "a > 0")?;
    let two_a = 2.0 * gap;
    let inner_tol = 0.1 * settings.quad_rel_tol;
    let zero = stack.at_zero_frequency();

    let mut failure: Option<Error> = None;
    let outer = |zeta: f64| -> f64 {
        if failure.is_some() {
            return 0.0;
        }
        let xi = zeta * SPEED_OF_LIGHT / two_a;
        let result = if xi == 0.0 {
            transverse_integral(&zero, 0.0, gap, &Polarization::BOTH, settings, inner_tol)
        } else {
            stack.at_frequency(xi).and_then(|response| {
                transverse_integral(&response, xi, gap, &Polarization::BOTH, settings, inner_tol)
            })
        };
        result.unwrap_or_else(|e| {
            failure = Some(e);
            0.0
        })
    };
    let integral = integrate(
        outer,
        0.0,
        upper_limit(0.0),
        QuadratureOptions::relative(settings.quad_rel_tol),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let integral = integral?.value;
    Ok(HBAR * SPEED_OF_LIGHT / (4.0 * PI * PI * gap) * integral)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Average separation d in m.
    pub d: f64,
    /// Gap a in m.
    pub gap: f64,
    pub pressure: f64,
    pub ideal_pressure: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn etas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.eta).collect()
    }
}

fn at_separation(d: f64) -> impl Fn(Error) -> Error {
    move |e| Error::AtSeparation {
        d,
        message: e.to_string(),
    }
}

/// η(d) over the given average separations, in ascending d.
pub fn eta_sweep(
    plate: &Plate,
    d_values: &[f64],
    settings: &EvaluationSettings,
) -> Result<SweepTable> {
    settings.validate()?;
    let mut ds = d_values.to_vec();
    ds.sort_by(f64::total_cmp);
    if let Some(w) = ds.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::AtSeparation {
            d: w[0],
            message: "duplicate separation".into(),
        });
    }
    let rows = ds
        .par_iter()
        .map(|&d| {
            let gap = plate.gap_from_average(d).map_err(at_separation(d))?;
            let p = pressure(&plate.stack, gap, settings).map_err(at_separation(d))?;
            let ideal = ideal_pressure(d).map_err(at_separation(d))?;
            Ok(SweepRow {
                d,
                gap,
                pressure: p,
                ideal_pressure: ideal,
                eta: p / ideal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}
