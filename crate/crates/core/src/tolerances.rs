//! Numerical tolerances shared across modules.

/// Unit-norm check for bivectors, rotors and direction vectors.
pub const UNIT_NORM: f64 = 1e-9;

/// Below this a cross product or bivector part counts as zero.
pub const PARALLEL: f64 = 1e-12;

/// Below this |det| a basis matrix counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Trials whose hidden vector is this close to orthogonal with a detector are redrawn.
pub const ORTHOGONAL_RESAMPLE: f64 = 1e-12;

/// Chart points closer than this (radians) to chi or theta in {0, pi} are rejected.
pub const CHART_COLLAR: f64 = 0.1;

/// Admissible finite-difference step range.
pub const FD_STEP_MIN: f64 = 1e-6;
pub const FD_STEP_MAX: f64 = 1e-3;

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-4;

/// Angle sequences must end this close to a multiple of 2 pi.
pub const LIMIT_TAIL: f64 = 1e-3;

/// Bivector parts smaller than this fall back to the detector axis in square roots.
pub const SQRT_AXIS: f64 = 1e-14;
