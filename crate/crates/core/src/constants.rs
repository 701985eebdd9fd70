//! Physical constants (CODATA 2018 exact/recommended values, SI units).

/// Reduced Planck constant ħ in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge in C, i.e. the joule value of one electronvolt.
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

/// The constants as one value, for callers that want to pass them around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        c: SPEED_OF_LIGHT,
        k_b: BOLTZMANN,
    };
}

/// Converts an energy `ħω` given in eV to an angular frequency in rad/s.
pub fn ev_to_angular(energy_ev: f64) -> f64 {
    energy_ev * ELECTRON_VOLT / HBAR
}

/// Inverse of [`ev_to_angular`].
pub fn angular_to_ev(omega: f64) -> f64 {
    omega * HBAR / ELECTRON_VOLT
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ev_round_trip() {
        let w = ev_to_angular(8.9);
        assert!((w - 1.352_148e16).abs() / w < 1e-6);
        assert!((angular_to_ev(w) - 8.9).abs() < 1e-14);
    }
}
