#![allow(dead_code)]

use casimir_core::constants::ev_to_angular;
use casimir_core::engine::Plate;
use casimir_core::{DielectricModel, LayerStack, RoughPlateSpec};

pub fn gold() -> (f64, f64) {
    (ev_to_angular(8.9), ev_to_angular(0.0357))
}

pub fn drude() -> LayerStack {
    let (wp, g) = gold();
    LayerStack::half_space(DielectricModel::drude(wp, g).unwrap()).unwrap()
}

pub fn plasma() -> LayerStack {
    LayerStack::half_space(DielectricModel::plasma(gold().0).unwrap()).unwrap()
}

pub fn rough_spec(h: f64, f: f64) -> RoughPlateSpec {
    let (wp, g) = gold();
    RoughPlateSpec::build(wp, g, h, f, None).unwrap()
}

pub fn rough(h: f64, f: f64) -> Plate {
    Plate::rough(&rough_spec(h, f)).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;
