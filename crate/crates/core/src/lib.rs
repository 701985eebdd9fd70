//! Casimir pressure between stratified metallic plates from the Lifshitz
//! formula, a two-layer model of rough conductors, and least-squares
//! fitting of its roughness parameters.

pub mod constants;
pub mod engine;
pub mod error;
pub mod fit;
pub mod materials;
pub mod quadrature;
pub mod simplex;
pub mod stack;

pub use engine::{
    eta_sweep, ideal_pressure, pressure, pressure_zero_temperature, reduction_factor,
    EvaluationSettings, Plate, SweepRow, SweepTable,
};
pub use error::{Error, Result};
pub use materials::{DielectricModel, Oscillator, RoughPlateSpec};
pub use stack::{KinematicPoint, Layer, LayerStack, Polarization};
