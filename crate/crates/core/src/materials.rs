//! Dielectric response on the positive imaginary frequency axis.
//!
//! Every model is written directly as ε(iξ), which is real and ≥ 1 for
//! ξ > 0. The ξ → 0 behaviour is summarised by [`StaticLimit`] so the
//! reflection code never has to evaluate a divergent permittivity.

use serde::{Deserialize, Serialize};

use crate::error::{require, Error, Result};

/// One Lorentz oscillator term `g / (ω₀² + ξ² + γ ξ)` of an interband sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    /// Oscillator strength in rad²/s².
    pub strength: f64,
    /// Resonance angular frequency in rad/s.
    pub resonance: f64,
    /// Damping angular frequency in rad/s.
    pub damping: f64,
}

impl Oscillator {
    pub fn new(strength: f64, resonance: f64, damping: f64) -> Result<Self> {
        let osc = Self {
            strength,
            resonance,
            damping,
        };
        osc.validate()?;
        Ok(osc)
    }

    fn validate(&self) -> Result<()> {
        require(
            self.strength >= 0.0 && self.strength.is_finite(),
            "oscillator strength",
            self.strength,
            "g >= 0",
        )?;
        require(
            self.resonance > 0.0 && self.resonance.is_finite(),
            "oscillator resonance",
            self.resonance,
            "omega > 0",
        )?;
        require(
            self.damping >= 0.0 && self.damping.is_finite(),
            "oscillator damping",
            self.damping,
            "gamma >= 0",
        )
    }

    fn susceptibility(&self, xi: f64) -> f64 {
        self.strength / (self.resonance * self.resonance + xi * xi + self.damping * xi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DielectricModel {
    Vacuum,
    /// Ideal mirror. Has no permittivity; reflection is forced to |r| = 1.
    PerfectReflector,
    Drude {
        plasma_frequency: f64,
        relaxation_frequency: f64,
    },
    Plasma {
        plasma_frequency: f64,
    },
    OscillatorSum {
        oscillators: Vec<Oscillator>,
    },
    /// The (ε − 1) contributions of the terms add.
    Composite {
        terms: Vec<DielectricModel>,
    },
}

/// Leading behaviour ε(iξ) ≈ `coefficient` · ξ^(−`order`) as ξ → 0⁺.
///
/// Order 0 is a dielectric with finite static ε, order 1 an ohmic (Drude)
/// conductor, order 2 a dissipationless (plasma) conductor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticLimit {
    pub order: u8,
    pub coefficient: f64,
}

impl StaticLimit {
    /// lim ξ→0 of ε(iξ) ξ², in rad²/s². Nonzero only for order 2.
    pub fn plasma_weight(&self) -> f64 {
        if self.order == 2 {
            self.coefficient
        } else {
            0.0
        }
    }
}

impl DielectricModel {
    pub fn drude(plasma_frequency: f64, relaxation_frequency: f64) -> Result<Self> {
        let m = DielectricModel::Drude {
            plasma_frequency,
            relaxation_frequency,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn plasma(plasma_frequency: f64) -> Result<Self> {
        let m = DielectricModel::Plasma { plasma_frequency };
        m.validate()?;
        Ok(m)
    }

    pub fn oscillator_sum(oscillators: Vec<Oscillator>) -> Result<Self> {
        let m = DielectricModel::OscillatorSum { oscillators };
        m.validate()?;
        Ok(m)
    }

    pub fn composite(terms: Vec<DielectricModel>) -> Result<Self> {
        let m = DielectricModel::Composite { terms };
        m.validate()?;
        Ok(m)
    }

    /// Checks parameter domains recursively. Perfect reflectors may not
    /// appear inside a composite.
    pub fn validate(&self) -> Result<()> {
        match self {
            DielectricModel::Vacuum | DielectricModel::PerfectReflector => Ok(()),
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_frequency,
            } => {
                require(
                    *plasma_frequency > 0.0 && plasma_frequency.is_finite(),
                    "plasma frequency",
                    *plasma_frequency,
                    "Omega_P > 0",
                )?;
                require(
                    *relaxation_frequency >= 0.0 && relaxation_frequency.is_finite(),
                    "relaxation frequency",
                    *relaxation_frequency,
                    "gamma >= 0",
                )
            }
            DielectricModel::Plasma { plasma_frequency } => require(
                *plasma_frequency > 0.0 && plasma_frequency.is_finite(),
                "plasma frequency",
                *plasma_frequency,
                "Omega > 0",
            ),
            DielectricModel::OscillatorSum { oscillators } => {
                oscillators.iter().try_for_each(Oscillator::validate)
            }
            DielectricModel::Composite { terms } => terms.iter().try_for_each(|t| {
                if t.is_perfect_reflector() {
                    Err(Error::InvalidStack(
                        "a perfect reflector cannot be part of a composite".into(),
                    ))
                } else {
                    t.validate()
                }
            }),
        }
    }

    pub fn is_perfect_reflector(&self) -> bool {
        matches!(self, DielectricModel::PerfectReflector)
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self, DielectricModel::Vacuum)
    }

    /// ε(iξ) for ξ > 0.
    pub fn permittivity_imag_axis(&self, xi: f64) -> Result<f64> {
        if self.is_perfect_reflector() {
            return Err(Error::PerfectReflectorPermittivity);
        }
        require(xi > 0.0 && xi.is_finite(), "xi", xi, "xi > 0")?;
        Ok(1.0 + self.susceptibility(xi)?)
    }

    fn susceptibility(&self, xi: f64) -> Result<f64> {
        Ok(match self {
            DielectricModel::Vacuum => 0.0,
            DielectricModel::PerfectReflector => return Err(Error::PerfectReflectorPermittivity),
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_frequency,
            } => plasma_frequency * plasma_frequency / (xi * (xi + relaxation_frequency)),
            DielectricModel::Plasma { plasma_frequency } => {
                let ratio = plasma_frequency / xi;
                ratio * ratio
            }
            DielectricModel::OscillatorSum { oscillators } => {
                oscillators.iter().map(|o| o.susceptibility(xi)).sum()
            }
            DielectricModel::Composite { terms } => {
                let mut sum = 0.0;
                for t in terms {
                    sum += t.susceptibility(xi)?;
                }
                sum
            }
        })
    }

    /// Leading ξ → 0 behaviour. `None` for a perfect reflector.
    pub fn static_limit(&self) -> Option<StaticLimit> {
        let limit = match self {
            DielectricModel::PerfectReflector => return None,
            DielectricModel::Vacuum => StaticLimit {
                order: 0,
                coefficient: 1.0,
            },
            DielectricModel::Drude {
                plasma_frequency,
                relaxation_frequency,
            } => {
                let w2 = plasma_frequency * plasma_frequency;
                if *relaxation_frequency > 0.0 {
                    StaticLimit {
                        order: 1,
                        coefficient: w2 / relaxation_frequency,
                    }
                } else {
                    StaticLimit {
                        order: 2,
                        coefficient: w2,
                    }
                }
            }
            DielectricModel::Plasma { plasma_frequency } => StaticLimit {
                order: 2,
                coefficient: plasma_frequency * plasma_frequency,
            },
            DielectricModel::OscillatorSum { .. } => StaticLimit {
                order: 0,
                coefficient: 1.0 + self.static_susceptibility(),
            },
            DielectricModel::Composite { terms } => {
                // Only the most singular members survive; finite parts
                // (including the vacuum 1) matter only when nothing diverges.
                let mut order = 0u8;
                let mut divergent = 0.0;
                for t in terms {
                    let sub = t.static_limit()?;
                    if sub.order > order {
                        order = sub.order;
                        divergent = sub.coefficient;
                    } else if sub.order == order && order > 0 {
                        divergent += sub.coefficient;
                    }
                }
                if order == 0 {
                    StaticLimit {
                        order: 0,
                        coefficient: 1.0 + self.static_susceptibility(),
                    }
                } else {
                    StaticLimit {
                        order,
                        coefficient: divergent,
                    }
                }
            }
        };
        Some(limit)
    }

    /// ε(0) − 1 for models that stay finite at zero frequency.
    fn static_susceptibility(&self) -> f64 {
        match self {
            DielectricModel::OscillatorSum { oscillators } => oscillators
                .iter()
                .map(|o| o.strength / (o.resonance * o.resonance))
                .sum(),
            DielectricModel::Composite { terms } => {
                terms.iter().map(|t| t.static_susceptibility()).sum()
            }
            _ => 0.0,
        }
    }
}

/// Ω_surf = √f · Ω_P: the plasma frequency of a layer whose electron
/// density is reduced by the fill fraction `f`.
pub fn surface_plasma_frequency(plasma_frequency: f64, fill_factor: f64) -> Result<f64> {
    require(
        plasma_frequency > 0.0 && plasma_frequency.is_finite(),
        "plasma frequency",
        plasma_frequency,
        "Omega_P > 0",
    )?;
    check_fill_factor(fill_factor)?;
    Ok(fill_factor.sqrt() * plasma_frequency)
}

fn check_fill_factor(f: f64) -> Result<()> {
    require(f > 0.0 && f <= 1.0, "fill factor", f, "0 < f <= 1")
}

/// Rough conductor: a Drude bulk covered by a plasma-model layer of
/// thickness `h` whose electron density is a fraction `f` of the bulk one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughPlateSpec {
    pub bulk: DielectricModel,
    pub surface: DielectricModel,
    /// Surface-layer thickness in m.
    pub thickness: f64,
    pub fill_factor: f64,
    pub bulk_plasma_frequency: f64,
    pub surface_plasma_frequency: f64,
}

impl RoughPlateSpec {
    /// The same interband term, if any, is added to both bulk and surface.
    /// An empty oscillator list is treated as no interband term.
    pub fn build(
        plasma_frequency: f64,
        relaxation_frequency: f64,
        thickness: f64,
        fill_factor: f64,
        interband: Option<&[Oscillator]>,
    ) -> Result<Self> {
        require(
            thickness >= 0.0 && thickness.is_finite(),
            "layer thickness",
            thickness,
            "h >= 0",
        )?;
        let surface_frequency = surface_plasma_frequency(plasma_frequency, fill_factor)?;
        let drude = DielectricModel::drude(plasma_frequency, relaxation_frequency)?;
        let plasma = DielectricModel::plasma(surface_frequency)?;
        let (bulk, surface) = match interband {
            Some(osc) if !osc.is_empty() => {
                let ib = DielectricModel::oscillator_sum(osc.to_vec())?;
                (
                    DielectricModel::composite(vec![drude, ib.clone()])?,
                    DielectricModel::composite(vec![plasma, ib])?,
                )
            }
            _ => (drude, plasma),
        };
        Ok(Self {
            bulk,
            surface,
            thickness,
            fill_factor,
            bulk_plasma_frequency: plasma_frequency,
            surface_plasma_frequency: surface_frequency,
        })
    }

    /// Extra separation 2h(1 − f) between the average surface and the
    /// top of the surface layer.
    pub fn separation_offset(&self) -> f64 {
        2.0 * self.thickness * (1.0 - self.fill_factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ev_to_angular;

    fn gold() -> (f64, f64) {
        (ev_to_angular(8.9), ev_to_angular(0.0357))
    }

    #[test]
    fn drude_at_plasma_frequency() {
        let (wp, g) = gold();
        let eps = DielectricModel::drude(wp, g)
            .unwrap()
            .permittivity_imag_axis(wp)
            .unwrap();
        // 1 + 1/(1 + γ/Ω_P) with γ/Ω_P = 0.0357/8.9
        let expected = 1.0 + 1.0 / (1.0 + 0.0357 / 8.9);
        assert!((eps - expected).abs() < 1e-13);
        assert!((eps - 1.996_005).abs() < 5e-7);
    }

    #[test]
    fn drude_at_relaxation_frequency() {
        let (wp, g) = gold();
        let eps = DielectricModel::drude(wp, g)
            .unwrap()
            .permittivity_imag_axis(g)
            .unwrap();
        let ratio: f64 = 8.9 / 0.0357;
        let expected = 1.0 + ratio * ratio / 2.0;
        assert!((eps - expected).abs() / expected < 1e-13);
        assert!((eps - 3.1077e4).abs() < 1.0);
    }

    #[test]
    fn plasma_and_vacuum() {
        let p = DielectricModel::plasma(3.0e15).unwrap();
        assert!((p.permittivity_imag_axis(3.0e15).unwrap() - 2.0).abs() < 1e-15);
        for xi in [1e10, 1e14, 1e18] {
            assert_eq!(DielectricModel::Vacuum.permittivity_imag_axis(xi).unwrap(), 1.0);
        }
    }

    #[test]
    fn perfect_reflector_has_no_permittivity() {
        assert_eq!(
            DielectricModel::PerfectReflector.permittivity_imag_axis(1e14),
            Err(Error::PerfectReflectorPermittivity)
        );
    }

    #[test]
    fn nonpositive_frequency_is_a_domain_error() {
        let p = DielectricModel::plasma(1e16).unwrap();
        assert!(matches!(p.permittivity_imag_axis(0.0), Err(Error::Domain { .. })));
        assert!(matches!(p.permittivity_imag_axis(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn constructor_domains() {
        assert!(DielectricModel::drude(0.0, 1.0).is_err());
        assert!(DielectricModel::drude(1.0, -1.0).is_err());
        assert!(DielectricModel::plasma(-1.0).is_err());
        assert!(Oscillator::new(-1.0, 1.0, 0.0).is_err());
        assert!(Oscillator::new(1.0, 0.0, 0.0).is_err());
        assert!(DielectricModel::composite(vec![DielectricModel::PerfectReflector]).is_err());
    }

    #[test]
    fn surface_frequency_from_fill_factor() {
        let (wp, _) = gold();
        let ws = surface_plasma_frequency(wp, 0.9).unwrap();
        assert!((crate::constants::angular_to_ev(ws) - 8.443_28).abs() < 5e-6);
        assert_eq!(surface_plasma_frequency(wp, 1.0).unwrap(), wp);
        assert_eq!(surface_plasma_frequency(wp, 0.25).unwrap(), wp / 2.0);
        assert!(surface_plasma_frequency(wp, 0.0).is_err());
        assert!(surface_plasma_frequency(wp, 1.1).is_err());
    }

    #[test]
    fn rough_plate_construction() {
        let (wp, g) = gold();
        let plate = RoughPlateSpec::build(wp, g, 11e-9, 0.9, None).unwrap();
        let ratio = plate.surface_plasma_frequency / plate.bulk_plasma_frequency;
        assert!((ratio * ratio - 0.9).abs() < 1e-15);
        assert_eq!(plate.bulk, DielectricModel::drude(wp, g).unwrap());
        assert!((plate.separation_offset() - 2.2e-9).abs() < 1e-22);

        let empty = RoughPlateSpec::build(wp, g, 11e-9, 0.9, Some(&[])).unwrap();
        assert_eq!(empty, plate);

        assert!(RoughPlateSpec::build(wp, g, -1e-9, 0.9, None).is_err());
        assert!(RoughPlateSpec::build(wp, g, 1e-9, 0.0, None).is_err());
    }

    #[test]
    fn interband_goes_into_both_layers() {
        let (wp, g) = gold();
        let osc = [Oscillator::new(ev_to_angular(3.0).powi(2), ev_to_angular(4.0), ev_to_angular(1.0)).unwrap()];
        let plate = RoughPlateSpec::build(wp, g, 5e-9, 0.5, Some(&osc)).unwrap();
        let xi = 1e15;
        let ib = DielectricModel::oscillator_sum(osc.to_vec()).unwrap();
        let ib_part = ib.permittivity_imag_axis(xi).unwrap() - 1.0;
        let bulk = plate.bulk.permittivity_imag_axis(xi).unwrap();
        let surf = plate.surface.permittivity_imag_axis(xi).unwrap();
        let bare_bulk = DielectricModel::drude(wp, g).unwrap().permittivity_imag_axis(xi).unwrap();
        let bare_surf = DielectricModel::plasma(plate.surface_plasma_frequency)
            .unwrap()
            .permittivity_imag_axis(xi)
            .unwrap();
        assert!((bulk - bare_bulk - ib_part).abs() < 1e-12 * bulk);
        assert!((surf - bare_surf - ib_part).abs() < 1e-12 * surf);
    }

    #[test]
    fn static_limits() {
        let (wp, g) = gold();
        let drude = DielectricModel::drude(wp, g).unwrap();
        assert_eq!(drude.static_limit().unwrap().order, 1);
        assert_eq!(drude.static_limit().unwrap().plasma_weight(), 0.0);
        let plasma = DielectricModel::plasma(wp).unwrap();
        assert_eq!(plasma.static_limit().unwrap().plasma_weight(), wp * wp);
        let lossless = DielectricModel::drude(wp, 0.0).unwrap();
        assert_eq!(lossless.static_limit(), plasma.static_limit());

        let osc = DielectricModel::oscillator_sum(vec![Oscillator::new(4.0, 2.0, 1.0).unwrap()]).unwrap();
        assert_eq!(osc.static_limit().unwrap(), StaticLimit { order: 0, coefficient: 2.0 });

        // Plasma term dominates an ohmic one at zero frequency.
        let mix = DielectricModel::composite(vec![drude.clone(), plasma.clone(), osc]).unwrap();
        assert_eq!(mix.static_limit().unwrap(), StaticLimit { order: 2, coefficient: wp * wp });
        assert_eq!(DielectricModel::PerfectReflector.static_limit(), None);
    }

    #[test]
    fn static_limit_matches_small_frequency_asymptotics() {
        let (wp, g) = gold();
        let osc = DielectricModel::oscillator_sum(vec![Oscillator::new(1e31, 5e15, 1e15).unwrap()]).unwrap();
        for m in [
            DielectricModel::drude(wp, g).unwrap(),
            DielectricModel::plasma(wp).unwrap(),
            osc.clone(),
            DielectricModel::composite(vec![DielectricModel::drude(wp, g).unwrap(), osc]).unwrap(),
        ] {
            let lim = m.static_limit().unwrap();
            let xi = 1e-3 * g;
            let eps = m.permittivity_imag_axis(xi).unwrap();
            let approx = lim.coefficient * xi.powi(-(lim.order as i32));
            assert!((eps - approx).abs() / eps < 2e-3, "{m:?}: {eps} vs {approx}");
        }
    }
}
