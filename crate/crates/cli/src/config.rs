//! Run configuration: TOML file plus command-line overrides.
//!
//! File grammar (every key optional):
//!
//! ```toml
//! model = "two-layer"          # drude | plasma | two-layer | perfect
//! temperature_K = 300.0
//! zero_temperature = false
//!
//! [material]
//! plasma_frequency_eV = 8.9
//! relaxation_eV = 0.0357
//! oscillators = [ { strength_eV2 = 7.0, resonance_eV = 3.0, damping_eV = 0.7 } ]
//!
//! [roughness]
//! layer_thickness_nm = 11.0
//! fill_factor = 0.9
//!
//! [grid]                       # average separation d
//! start_um = 0.162
//! stop_um = 0.746
//! count = 30
//! spacing = "linear"           # linear | log
//!
//! [engine]
//! quad_rel_tol = 1e-9
//! sum_rel_tol = 1e-10
//! consecutive_small_terms = 3
//! l_max = 5000
//! ```

use std::fmt;
use std::path::Path;

use casimir_core::constants::ev_to_angular;
use casimir_core::engine::{EvaluationSettings, Plate};
use casimir_core::fit::MaterialParameters;
use casimir_core::{DielectricModel, LayerStack, Oscillator};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const GOLD_PLASMA_EV: f64 = 8.9;
pub const GOLD_RELAXATION_EV: f64 = 0.0357;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    #[serde(rename = "temperature_K")]
    pub temperature_k: Option<f64>,
    pub zero_temperature: Option<bool>,
    #[serde(default)]
    pub material: MaterialBlock,
    #[serde(default)]
    pub roughness: RoughnessBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub engine: EngineBlock,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    #[serde(rename = "plasma_frequency_eV")]
    pub plasma_frequency_ev: Option<f64>,
    #[serde(rename = "relaxation_eV")]
    pub relaxation_ev: Option<f64>,
    #[serde(default)]
    pub oscillators: Vec<OscillatorEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorEntry {
    #[serde(rename = "strength_eV2")]
    pub strength_ev2: f64,
    #[serde(rename = "resonance_eV")]
    pub resonance_ev: f64,
    #[serde(rename = "damping_eV")]
    pub damping_ev: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughnessBlock {
    pub layer_thickness_nm: Option<f64>,
    pub fill_factor: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub start_um: Option<f64>,
    pub stop_um: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineBlock {
    pub quad_rel_tol: Option<f64>,
    pub sum_rel_tol: Option<f64>,
    pub consecutive_small_terms: Option<usize>,
    pub l_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Input(format!("invalid config: {e}")))
    }
}

/// Which plate model to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Drude,
    Plasma,
    /// Roughness taken from the run configuration when `None`.
    TwoLayer(Option<(f64, f64)>),
    Perfect,
}

impl ModelKind {
    /// Accepts `drude`, `plasma`, `perfect`, `two-layer` and
    /// `two-layer:<h_nm>:<f>`.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut parts = text.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let kind = match (head, rest.as_slice()) {
            ("drude", []) => ModelKind::Drude,
            ("plasma", []) => ModelKind::Plasma,
            ("perfect", []) => ModelKind::Perfect,
            ("two-layer", []) => ModelKind::TwoLayer(None),
            ("two-layer", [h, f]) => {
                let h: f64 = h
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad layer thickness in model '{text}'")))?;
                let f: f64 = f
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad fill factor in model '{text}'")))?;
                ModelKind::TwoLayer(Some((h, f)))
            }
            _ => {
                return Err(CliError::Input(format!(
                    "unknown model '{text}' (expected drude, plasma, perfect, two-layer or two-layer:H_NM:F)"
                )))
            }
        };
        Ok(kind)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Drude => write!(f, "drude"),
            ModelKind::Plasma => write!(f, "plasma"),
            ModelKind::Perfect => write!(f, "perfect"),
            ModelKind::TwoLayer(None) => write!(f, "two-layer"),
            ModelKind::TwoLayer(Some((h, fill))) => write!(f, "two-layer:{h}:{fill}"),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub temperature: Option<f64>,
    pub zero_temperature: bool,
    pub h_nm: Option<f64>,
    pub fill_factor: Option<f64>,
    pub d_min_um: Option<f64>,
    pub d_max_um: Option<f64>,
    pub points: Option<usize>,
    pub log: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start_um: f64,
    pub stop_um: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn validate(&self) -> CliResult<()> {
        if self.count < 1 {
            return Err(CliError::Input("grid count must be at least 1".into()));
        }
        if !(self.start_um > 0.0) || !self.start_um.is_finite() || !self.stop_um.is_finite() {
            return Err(CliError::Input("grid bounds must be positive and finite".into()));
        }
        if self.count > 1 && self.start_um >= self.stop_um {
            return Err(CliError::Input(format!(
                "grid start {} um must be below stop {} um",
                self.start_um, self.stop_um
            )));
        }
        Ok(())
    }

    /// Average separations in m, ascending.
    pub fn separations(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start_um / 1e6];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                let um = match self.spacing {
                    Spacing::Linear => self.start_um + (self.stop_um - self.start_um) * t,
                    Spacing::Log => self.start_um * (self.stop_um / self.start_um).powf(t),
                };
                um / 1e6
            })
            .collect()
    }
}

/// Fully resolved configuration, in SI units from here on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub material: MaterialParameters,
    /// (h in m, f) when given.
    pub roughness: Option<(f64, f64)>,
    partial_roughness: (Option<f64>, Option<f64>),
    pub grid: Grid,
    pub settings: EvaluationSettings,
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile, overrides: &Overrides) -> CliResult<Self> {
        let model_text = overrides
            .model
            .clone()
            .or_else(|| file.model.clone())
            .unwrap_or_else(|| "drude".to_string());
        let model = ModelKind::parse(&model_text)?;

        let wp_ev = file.material.plasma_frequency_ev.unwrap_or(GOLD_PLASMA_EV);
        let gamma_ev = file.material.relaxation_ev.unwrap_or(GOLD_RELAXATION_EV);
        let interband = file
            .material
            .oscillators
            .iter()
            .map(|o| {
                Oscillator::new(
                    o.strength_ev2 * ev_to_angular(1.0).powi(2),
                    ev_to_angular(o.resonance_ev),
                    ev_to_angular(o.damping_ev),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let material = MaterialParameters {
            plasma_frequency: ev_to_angular(wp_ev),
            relaxation_frequency: ev_to_angular(gamma_ev),
            interband,
        };
        DielectricModel::drude(material.plasma_frequency, material.relaxation_frequency)?;

        let h_nm = overrides.h_nm.or(file.roughness.layer_thickness_nm);
        let fill = overrides.fill_factor.or(file.roughness.fill_factor);
        let roughness = match (h_nm, fill) {
            (Some(h), Some(f)) => Some((h / 1e9, f)),
            _ => None,
        };

        let grid = Grid {
            start_um: overrides.d_min_um.or(file.grid.start_um).unwrap_or(0.1),
            stop_um: overrides.d_max_um.or(file.grid.stop_um).unwrap_or(5.0),
            count: overrides.points.or(file.grid.count).unwrap_or(30),
            spacing: if overrides.log {
                Spacing::Log
            } else {
                file.grid.spacing.unwrap_or(Spacing::Linear)
            },
        };
        grid.validate()?;

        let defaults = EvaluationSettings::default();
        let settings = EvaluationSettings {
            temperature: overrides
                .temperature
                .or(file.temperature_k)
                .unwrap_or(defaults.temperature),
            zero_temperature: overrides.zero_temperature || file.zero_temperature.unwrap_or(false),
            quad_rel_tol: file.engine.quad_rel_tol.unwrap_or(defaults.quad_rel_tol),
            sum_rel_tol: file.engine.sum_rel_tol.unwrap_or(defaults.sum_rel_tol),
            consecutive_small_terms: file
                .engine
                .consecutive_small_terms
                .unwrap_or(defaults.consecutive_small_terms),
            l_max: file.engine.l_max.unwrap_or(defaults.l_max),
            ..defaults
        };
        settings.validate()?;

        let config = Self {
            model,
            material,
            roughness,
            partial_roughness: (h_nm.map(|h| h / 1e9), fill),
            grid,
            settings,
        };
        config.plate_for(model)?;
        Ok(config)
    }

    /// Roughness for a two-layer model, naming whichever key is missing.
    fn roughness_for(&self, explicit: Option<(f64, f64)>) -> CliResult<(f64, f64)> {
        if let Some((h_nm, f)) = explicit {
            return Ok((h_nm / 1e9, f));
        }
        match self.partial_roughness {
            (Some(h), Some(f)) => Ok((h, f)),
            (None, Some(_)) => Err(CliError::Input(
                "two-layer model requires layer_thickness_nm ([roughness] or --h-nm)".into(),
            )),
            (Some(_), None) => Err(CliError::Input(
                "two-layer model requires fill_factor ([roughness] or --f)".into(),
            )),
            (None, None) => Err(CliError::Input(
                "two-layer model requires layer_thickness_nm and fill_factor ([roughness] or --h-nm/--f)"
                    .into(),
            )),
        }
    }

    pub fn plate_for(&self, model: ModelKind) -> CliResult<Plate> {
        let m = &self.material;
        let with_interband = |base: DielectricModel| -> CliResult<DielectricModel> {
            if m.interband.is_empty() {
                Ok(base)
            } else {
                Ok(DielectricModel::composite(vec![
                    base,
                    DielectricModel::oscillator_sum(m.interband.clone())?,
                ])?)
            }
        };
        let plate = match model {
            ModelKind::Perfect => Plate::flat(LayerStack::perfect_reflector()),
            ModelKind::Drude => Plate::flat(LayerStack::half_space(with_interband(
                DielectricModel::drude(m.plasma_frequency, m.relaxation_frequency)?,
            )?)?),
            ModelKind::Plasma => Plate::flat(LayerStack::half_space(with_interband(
                DielectricModel::plasma(m.plasma_frequency)?,
            )?)?),
            ModelKind::TwoLayer(explicit) => {
                let (h, f) = self.roughness_for(explicit)?;
                Plate::rough(&m.rough_plate(h, f)?)?
            }
        };
        Ok(plate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_gold() {
        let c = RunConfig::resolve(&ConfigFile::default(), &Overrides::default()).unwrap();
        assert_eq!(c.model, ModelKind::Drude);
        assert!((c.material.plasma_frequency - ev_to_angular(8.9)).abs() < 1.0);
        assert_eq!(c.settings.temperature, 300.0);
        assert!(c.material.interband.is_empty());
    }

    #[test]
    fn full_file_parses() {
        let text = r#"
model = "two-layer"
temperature_K = 290.0

[material]
plasma_frequency_eV = 9.0
relaxation_eV = 0.035
oscillators = [ { strength_eV2 = 7.0, resonance_eV = 3.0, damping_eV = 0.7 } ]

[roughness]
layer_thickness_nm = 11.0
fill_factor = 0.9

[grid]
start_um = 0.2
stop_um = 1.0
count = 5
spacing = "log"

[engine]
l_max = 8000
"#;
        let file = ConfigFile::parse(text).unwrap();
        let c = RunConfig::resolve(&file, &Overrides::default()).unwrap();
        assert_eq!(c.model, ModelKind::TwoLayer(None));
        assert_eq!(c.roughness, Some((11e-9, 0.9)));
        assert_eq!(c.settings.l_max, 8000);
        assert_eq!(c.material.interband.len(), 1);
        let d = c.grid.separations();
        assert_eq!(d.len(), 5);
        assert!((d[4] - 1e-6).abs() < 1e-18);
        assert!((d[2] / d[1] - d[1] / d[0]).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(ConfigFile::parse("modle = \"drude\"").is_err());
    }

    #[test]
    fn overrides_win() {
        let file = ConfigFile::parse("model = \"plasma\"\ntemperature_K = 10.0").unwrap();
        let o = Overrides {
            model: Some("drude".into()),
            temperature: Some(77.0),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(&file, &o).unwrap();
        assert_eq!(c.model, ModelKind::Drude);
        assert_eq!(c.settings.temperature, 77.0);
    }

    #[test]
    fn missing_fill_factor_is_named() {
        let o = Overrides {
            model: Some("two-layer".into()),
            h_nm: Some(11.0),
            ..Overrides::default()
        };
        let err = RunConfig::resolve(&ConfigFile::default(), &o).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("fill_factor"), "{err}");
    }

    #[test]
    fn model_syntax() {
        assert_eq!(ModelKind::parse("two-layer:11:0.9").unwrap(), ModelKind::TwoLayer(Some((11.0, 0.9))));
        assert!(ModelKind::parse("two-layer:11").is_err());
        assert!(ModelKind::parse("silver").is_err());
        assert_eq!(ModelKind::parse("two-layer:2:0.5").unwrap().to_string(), "two-layer:2:0.5");
    }

    #[test]
    fn grid_validation() {
        let g = Grid { start_um: 1.0, stop_um: 0.5, count: 3, spacing: Spacing::Linear };
        assert!(g.validate().is_err());
        let g = Grid { start_um: 1.0, stop_um: 0.5, count: 1, spacing: Spacing::Linear };
        assert!(g.validate().is_ok());
        assert_eq!(g.separations(), vec![1e-6]);
        let g = Grid { start_um: 1.0, stop_um: 2.0, count: 0, spacing: Spacing::Linear };
        assert!(g.validate().is_err());
    }
}
