use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("no permittivity defined for a perfect reflector; handled at reflection level")]
    PerfectReflectorPermittivity,

    #[error("invalid layer stack: {0}")]
    InvalidStack(String),

    #[error("quadrature did not reach tolerance after {subintervals} subintervals (estimate {estimate:e}, error {error:e})")]
    Quadrature {
        estimate: f64,
        error: f64,
        subintervals: usize,
    },

    #[error("Matsubara sum not converged at l = {l_reached} (partial sum {partial_sum:e} Pa)")]
    MatsubaraNotConverged { partial_sum: f64, l_reached: usize },

    #[error("separation d = {d:e} m: {message}")]
    AtSeparation { d: f64, message: String },

    #[error("measurement data: {0}")]
    Data(String),

    #[error("line {line}: {message}")]
    DataLine { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            constraint,
        })
    }
}
