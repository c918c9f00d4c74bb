//! Geometric algebra on the three-sphere and its SO(3) quotient, together
//! with Monte Carlo spin-correlation experiments and CHSH bound analysis.

pub mod chsh;
pub mod error;
pub mod ga;
pub mod oracle;
pub mod parallel;
pub mod sim;
pub mod sphere;
pub mod stats;
pub mod tolerances;

pub use error::{Error, Result};
pub use ga::{Bivector, Multivector, Orientation, Rotor, Vec3};

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
