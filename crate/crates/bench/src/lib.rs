//! Fixtures shared by the benchmarks.

use spinorial::sim::{AlignmentMode, DirectionSpec, ExperimentConfig, LambdaMode};

/// Coplanar 0..180 degree grid at 5 degree spacing with `n` balanced trials.
pub fn grid_config(n: usize) -> ExperimentConfig {
    ExperimentConfig {
        n_trials: n,
        seed: 7,
        lambda_mode: LambdaMode::BalancedExact,
        alignment_mode: AlignmentMode::Unit,
        directions: DirectionSpec::Grid {
            start_deg: 0.0,
            stop_deg: 180.0,
            step_deg: 5.0,
        },
    }
}
