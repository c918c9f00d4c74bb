use std::f64::consts::PI;

use proptest::prelude::*;
use spinorial::chsh::{
    chsh_string, maximize_chsh, MonteCarlo, OptimizerConfig, Quadruple, So3Saw, Su2Cosine,
};
use spinorial::ga::{rotate_bivector, rotor_exp, Bivector, Rotor, Vec3};
use spinorial::oracle::sign_model_correlation;
use spinorial::parallel::{frame_transport, tangent_frame, torsion_tensor, ChartPoint};
use spinorial::sim::{
    correlation_curve, raw_correlation, simulate_ensemble, AlignmentMode, DirectionSpec,
    ExperimentConfig, LambdaMode,
};
use spinorial::sphere::{so3_distance, su2_distance};

fn config(n: usize, seed: u64, mode: LambdaMode) -> ExperimentConfig {
    ExperimentConfig {
        n_trials: n,
        seed,
        lambda_mode: mode,
        alignment_mode: AlignmentMode::Unit,
        directions: DirectionSpec::Grid {
            start_deg: 0.0,
            stop_deg: 180.0,
            step_deg: 15.0,
        },
    }
}

#[test]
fn curve_columns_track_their_references() {
    let cfg = config(200_000, 5, LambdaMode::FairCoin);
    let trials = simulate_ensemble(&cfg).unwrap();
    let rows = correlation_curve(&cfg, &trials).unwrap();
    assert_eq!(rows.len(), 13);
    for r in rows {
        let eta = r.eta_deg.to_radians();
        let oracle = sign_model_correlation(eta).unwrap();
        assert!(
            (r.raw_mc - oracle).abs() <= 4.0 * r.raw_stderr + 1e-9,
            "{}: {} vs {oracle}",
            r.eta_deg,
            r.raw_mc
        );
        assert!((r.su2_ref - su2_distance(eta).unwrap()).abs() < 1e-15);
        assert!((r.so3_ref - so3_distance(eta).unwrap()).abs() < 1e-15);
        assert!((r.scalar_form + 1.0).abs() < 1e-15);
    }
}

#[test]
fn sign_model_follows_the_saw_on_the_grid() {
    for deg in [0.0, 30.0, 60.0, 90.0, 120.0, 150.0, 180.0] {
        let eta = f64::to_radians(deg);
        assert!((sign_model_correlation(eta).unwrap() - so3_distance(eta).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn seeds_are_reproducible_and_distinct() {
    let a = simulate_ensemble(&config(1_000, 9, LambdaMode::FairCoin)).unwrap();
    let b = simulate_ensemble(&config(1_000, 9, LambdaMode::FairCoin)).unwrap();
    let c = simulate_ensemble(&config(1_000, 10, LambdaMode::FairCoin)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn monte_carlo_chsh_stays_classical() {
    let trials = simulate_ensemble(&config(100_000, 3, LambdaMode::BalancedExact)).unwrap();
    let mc = MonteCarlo::new(&trials).unwrap();
    let cfg = OptimizerConfig {
        grid_step_deg: 5.0,
        refine_tol: None,
        restarts: 0,
        ..OptimizerConfig::default()
    };
    let r = maximize_chsh(&mc, &cfg).unwrap();
    assert!(r.max_abs_chsh <= 2.0 + 0.02, "{}", r.max_abs_chsh);
    let x = Vec3::new(1.0, 0.0, 0.0);
    assert_eq!(raw_correlation(&trials, &x, &x).unwrap().mean, -1.0);
}

#[test]
fn analytic_maxima() {
    let cos = maximize_chsh(
        &Su2Cosine,
        &OptimizerConfig {
            restarts: 5,
            ..OptimizerConfig::default()
        },
    )
    .unwrap();
    let saw = maximize_chsh(
        &So3Saw,
        &OptimizerConfig {
            restarts: 5,
            ..OptimizerConfig::default()
        },
    )
    .unwrap();
    assert!((cos.max_abs_chsh - 8f64.sqrt()).abs() < 1e-9);
    assert!((saw.max_abs_chsh - 2.0).abs() < 1e-9);
}

#[test]
fn transported_frame_keeps_constant_torsion() {
    let x = ChartPoint::new(0.7, 1.9, 2.5);
    let t = torsion_tensor(&x, 1e-4).unwrap();
    assert!(t.max_abs() > 1e-3);
    let q = x.rotor();
    let p = ChartPoint::new(2.1, 0.4, 5.0).rotor();
    let moved = frame_transport(&tangent_frame(&q).unwrap(), &p).unwrap();
    let direct = tangent_frame(&p).unwrap();
    for (m, d) in moved.rows.iter().zip(direct.rows.iter()) {
        for (u, v) in m.iter().zip(d) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}

fn unit_vec() -> impl Strategy<Value = Vec3> {
    (0.0..PI, 0.0..2.0 * PI)
        .prop_map(|(t, p)| Vec3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos()))
}

proptest! {
    #[test]
    fn chsh_is_rotation_invariant(a in unit_vec(), ap in unit_vec(), b in unit_vec(), bp in unit_vec(),
                                  axis in unit_vec(), angle in 0.0..2.0 * PI) {
        let q = Quadruple { a, a_prime: ap, b, b_prime: bp };
        let r: Rotor = rotor_exp(&Bivector::from_axis(&axis), angle / 2.0).unwrap();
        let s0 = chsh_string(&q, &Su2Cosine);
        let s1 = chsh_string(&q.rotated(&r), &Su2Cosine);
        prop_assert!((s0 - s1).abs() < 1e-12);
        prop_assert!(s0.abs() <= 8f64.sqrt() + 1e-12);
    }

    #[test]
    fn rotation_preserves_bivector_norm(axis in unit_vec(), v in unit_vec(), angle in 0.0..4.0 * PI) {
        let r = rotor_exp(&Bivector::from_axis(&axis), angle / 2.0).unwrap();
        prop_assert!((rotate_bivector(&r, &Bivector::from_axis(&v)).norm() - 1.0).abs() < 1e-12);
    }
}
