use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bivector is not unit (norm {norm})")]
    NonUnitBivector { norm: f64 },

    #[error("rotor is not unit (norm {norm})")]
    NonUnitRotor { norm: f64 },

    #[error("rotation axis undefined at half-angle {half_angle}")]
    AxisUndefined { half_angle: f64 },

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("matrix is singular (determinant {det})")]
    SingularMatrix { det: f64 },

    #[error("chart point ({chi}, {theta}, {phi}) is inside the coordinate-degeneracy collar")]
    ChartDegeneracy { chi: f64, theta: f64, phi: f64 },

    #[error("finite-difference step {h} outside [{min}, {max}]")]
    StepOutOfRange { h: f64, min: f64, max: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("at least {needed} trials required, got {got}")]
    TooFewTrials { needed: usize, got: usize },

    #[error("angle sequence does not approach a multiple of 2\u{03c0} (last angle {last_psi}, distance {distance})")]
    NonConvergentSequence {
        last_psi: f64,
        distance: f64,
        /// Measurement value at the last element of the sequence.
        last_value: crate::ga::Multivector,
    },

    #[error("dispersion is zero")]
    ZeroDispersion,

    #[error("optimizer needs {needed} evaluations, budget is {budget}")]
    OptimizerBudgetExceeded { needed: u64, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
