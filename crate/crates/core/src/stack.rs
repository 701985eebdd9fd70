//! Reflection coefficients of a stratified plate seen from vacuum, at
//! imaginary frequency iξ and transverse wavenumber k⊥.
//!
//! Layers are combined by backward recursion from the substrate:
//! r ← (r⁽ʲ⁻¹·ʲ⁾ + r e^(−2 hⱼ sⱼ)) / (1 + r⁽ʲ⁻¹·ʲ⁾ r e^(−2 hⱼ sⱼ)),
//! with sⱼ = √(εⱼ(iξ) ξ²/c² + k⊥²).
//!
//! Sign convention: r_TE = (sᵢ − sⱼ)/(sᵢ + sⱼ),
//! r_TM = (εⱼ sᵢ − εᵢ sⱼ)/(εⱼ sᵢ + εᵢ sⱼ). Only r² enters the pressure.

use serde::{Deserialize, Serialize};

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{require, Error, Result};
use crate::materials::{DielectricModel, RoughPlateSpec, StaticLimit};

/// exp(−x) is taken as exactly zero beyond this exponent.
pub const EXPONENT_CUTOFF: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::TE, Polarization::TM];
}

/// A Matsubara frequency ξ (rad/s) together with a transverse wavenumber
/// k⊥ (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicPoint {
    xi: f64,
    k_perp: f64,
}

impl KinematicPoint {
    pub fn new(xi: f64, k_perp: f64) -> Result<Self> {
        require(xi >= 0.0 && xi.is_finite(), "xi", xi, "xi >= 0")?;
        require(k_perp > 0.0 && k_perp.is_finite(), "k_perp", k_perp, "k_perp > 0")?;
        Ok(Self { xi, k_perp })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn k_perp(&self) -> f64 {
        self.k_perp
    }
}

/// s = √(ε ξ²/c² + k⊥²).
pub fn axial_wavenumber(permittivity: f64, xi: f64, k_perp: f64) -> f64 {
    let x = xi / SPEED_OF_LIGHT;
    (permittivity * x * x + k_perp * k_perp).sqrt()
}

/// Single-interface Fresnel coefficient from medium i into medium j.
pub fn fresnel(polarization: Polarization, eps_i: f64, eps_j: f64, s_i: f64, s_j: f64) -> f64 {
    match polarization {
        Polarization::TE => (s_i - s_j) / (s_i + s_j),
        Polarization::TM => {
            let a = eps_j * s_i;
            let b = eps_i * s_j;
            (a - b) / (a + b)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub material: DielectricModel,
    /// Thickness in m.
    pub thickness: f64,
}

/// Vacuum | layers… | substrate half-space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerStack {
    layers: Vec<Layer>,
    substrate: DielectricModel,
}

impl LayerStack {
    /// Zero-thickness layers are dropped. The substrate may be a perfect
    /// reflector but not vacuum; layers may not be perfect reflectors.
    pub fn new(layers: Vec<Layer>, substrate: DielectricModel) -> Result<Self> {
        substrate.validate()?;
        if substrate.is_vacuum() {
            return Err(Error::InvalidStack("substrate cannot be vacuum".into()));
        }
        let mut kept = Vec::with_capacity(layers.len());
        for layer in layers {
            require(
                layer.thickness >= 0.0 && layer.thickness.is_finite(),
                "layer thickness",
                layer.thickness,
                "thickness >= 0",
            )?;
            if layer.material.is_perfect_reflector() {
                return Err(Error::InvalidStack(
                    "a perfect reflector can only be the substrate".into(),
                ));
            }
            layer.material.validate()?;
            if layer.thickness > 0.0 {
                kept.push(layer);
            }
        }
        Ok(Self {
            layers: kept,
            substrate,
        })
    }

    pub fn half_space(substrate: DielectricModel) -> Result<Self> {
        Self::new(Vec::new(), substrate)
    }

    pub fn perfect_reflector() -> Self {
        Self {
            layers: Vec::new(),
            substrate: DielectricModel::PerfectReflector,
        }
    }

    pub fn from_rough_plate(plate: &RoughPlateSpec) -> Result<Self> {
        Self::new(
            vec![Layer {
                material: plate.surface.clone(),
                thickness: plate.thickness,
            }],
            plate.bulk.clone(),
        )
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn substrate(&self) -> &DielectricModel {
        &self.substrate
    }

    /// Evaluates every medium at ξ > 0; the result answers reflection
    /// queries for any k⊥ without re-evaluating permittivities.
    pub fn at_frequency(&self, xi: f64) -> Result<FrequencyResponse> {
        require(xi > 0.0 && xi.is_finite(), "xi", xi, "xi > 0")?;
        let x2 = (xi / SPEED_OF_LIGHT).powi(2);
        let mut media = Vec::with_capacity(self.layers.len() + 1);
        for layer in &self.layers {
            let eps = layer.material.permittivity_imag_axis(xi)?;
            media.push(Medium {
                order: 0,
                coefficient: eps,
                shift: eps * x2,
                thickness: layer.thickness,
            });
        }
        let substrate = if self.substrate.is_perfect_reflector() {
            None
        } else {
            let eps = self.substrate.permittivity_imag_axis(xi)?;
            Some(Medium {
                order: 0,
                coefficient: eps,
                shift: eps * x2,
                thickness: f64::INFINITY,
            })
        };
        Ok(FrequencyResponse {
            vacuum_shift: x2,
            media,
            substrate,
        })
    }

    /// The analytic ξ → 0 limit: permittivities enter only through their
    /// leading singular behaviour, so Drude media give s = k⊥ and plasma
    /// media give s = √(k⊥² + Ω²/c²).
    pub fn at_zero_frequency(&self) -> FrequencyResponse {
        let to_medium = |lim: StaticLimit, thickness: f64| Medium {
            order: lim.order,
            coefficient: lim.coefficient,
            shift: lim.plasma_weight() / (SPEED_OF_LIGHT * SPEED_OF_LIGHT),
            thickness,
        };
        let media = self
            .layers
            .iter()
            .map(|l| {
                to_medium(
                    l.material
                        .static_limit()
                        .expect("layers are never perfect reflectors"),
                    l.thickness,
                )
            })
            .collect();
        let substrate = self
            .substrate
            .static_limit()
            .map(|lim| to_medium(lim, f64::INFINITY));
        FrequencyResponse {
            vacuum_shift: 0.0,
            media,
            substrate,
        }
    }

    /// r_α(iξ, k⊥) for ξ > 0.
    pub fn reflection(&self, polarization: Polarization, point: KinematicPoint) -> Result<f64> {
        if point.xi == 0.0 {
            return Err(Error::Domain {
                name: "xi",
                value: 0.0,
                constraint: "xi > 0; use reflection_zero_frequency",
            });
        }
        Ok(self
            .at_frequency(point.xi)?
            .reflection(polarization, point.k_perp))
    }

    /// lim ξ→0 r_α(iξ, k⊥).
    pub fn reflection_zero_frequency(&self, polarization: Polarization, k_perp: f64) -> Result<f64> {
        require(k_perp > 0.0 && k_perp.is_finite(), "k_perp", k_perp, "k_perp > 0")?;
        Ok(self.at_zero_frequency().reflection(polarization, k_perp))
    }

    /// True when the zero-frequency TE reflection vanishes for every k⊥:
    /// no medium carries a plasma-like (order 2) static response, so every
    /// axial wavenumber collapses to k⊥.
    pub fn static_te_vanishes(&self) -> bool {
        self.at_zero_frequency().te_vanishes_identically()
    }
}

/// One medium at a fixed frequency.
///
/// For ξ > 0, `order` is 0 and `coefficient` is ε itself. At ξ = 0 the pair
/// describes the leading singular behaviour so ratios εⱼ/εᵢ stay defined.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Medium {
    order: u8,
    coefficient: f64,
    /// ε ξ²/c², or its ξ → 0 limit.
    shift: f64,
    thickness: f64,
}

impl Medium {
    const VACUUM_ORDER: u8 = 0;

    fn s(&self, k2: f64) -> f64 {
        (self.shift + k2).sqrt()
    }
}

/// A [`LayerStack`] with all permittivities evaluated at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    vacuum_shift: f64,
    media: Vec<Medium>,
    /// `None` for a perfect reflector.
    substrate: Option<Medium>,
}

fn interface(
    polarization: Polarization,
    (order_i, coef_i, s_i): (u8, f64, f64),
    (order_j, coef_j, s_j): (u8, f64, f64),
) -> f64 {
    match polarization {
        Polarization::TE => fresnel(Polarization::TE, 1.0, 1.0, s_i, s_j),
        Polarization::TM => match order_j.cmp(&order_i) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => -1.0,
            std::cmp::Ordering::Equal => fresnel(Polarization::TM, coef_i, coef_j, s_i, s_j),
        },
    }
}

impl FrequencyResponse {
    /// Vacuum axial wavenumber q = √(ξ²/c² + k⊥²).
    pub fn vacuum_wavenumber(&self, k_perp: f64) -> f64 {
        (self.vacuum_shift + k_perp * k_perp).sqrt()
    }

    pub fn reflection(&self, polarization: Polarization, k_perp: f64) -> f64 {
        let k2 = k_perp * k_perp;

        let mut r = match &self.substrate {
            None => match polarization {
                Polarization::TE => -1.0,
                Polarization::TM => 1.0,
            },
            Some(sub) => {
                let (order, coef, s) = match self.media.last() {
                    Some(m) => (m.order, m.coefficient, m.s(k2)),
                    None => (Medium::VACUUM_ORDER, 1.0, self.vacuum_wavenumber(k_perp)),
                };
                interface(polarization, (order, coef, s), (sub.order, sub.coefficient, sub.s(k2)))
            }
        };

        for j in (0..self.media.len()).rev() {
            let layer = &self.media[j];
            let s_layer = layer.s(k2);
            let front = if j == 0 {
                (Medium::VACUUM_ORDER, 1.0, self.vacuum_wavenumber(k_perp))
            } else {
                let m = &self.media[j - 1];
                (m.order, m.coefficient, m.s(k2))
            };
            let r_front = interface(polarization, front, (layer.order, layer.coefficient, s_layer));
            let exponent = 2.0 * layer.thickness * s_layer;
            let decay = if exponent > EXPONENT_CUTOFF {
                0.0
            } else {
                (-exponent).exp()
            };
            let back = r * decay;
            r = (r_front + back) / (1.0 + r_front * back);
        }
        r
    }

    /// Both polarizations at once, `[TE, TM]`.
    pub fn reflections(&self, k_perp: f64) -> [f64; 2] {
        [
            self.reflection(Polarization::TE, k_perp),
            self.reflection(Polarization::TM, k_perp),
        ]
    }

    fn te_vanishes_identically(&self) -> bool {
        self.vacuum_shift == 0.0
            && self.substrate.is_some_and(|s| s.shift == 0.0)
            && self.media.iter().all(|m| m.shift == 0.0)
    }
}
