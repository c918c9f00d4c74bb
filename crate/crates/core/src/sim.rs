//! Spin-correlation experiments.
//!
//! A trial carries a hidden unit vector `s`, a handedness `lambda` and a
//! spin magnitude `r`. Three estimators are computed from one ensemble:
//! the raw sign-model score, the bivector standard-score covariance, and
//! the scalar-product form of the measurement functions.
//!
//! Every trial owns its random stream (ChaCha8 keyed by the seed, stream
//! number = trial index), so ensembles are identical regardless of how many
//! threads generate them. Reductions run over fixed-size chunks merged in
//! index order.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{even_sqrt, oriented_product, Bivector, Multivector, Orientation, Rotor, Vec3};
use crate::sphere::{angle_between, so3_distance, su2_distance};
use crate::stats::{linear_grid, CompensatedSum};
use crate::tolerances;

const CHUNK: usize = 1 << 14;
const SHUFFLE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// Independent fair coin per trial.
    FairCoin,
    /// Exactly half of each handedness, randomly permuted.
    BalancedExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentMode {
    #[default]
    Unit,
    /// Spin magnitude drawn uniformly from `[0, 1]`.
    UniformR,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSpec {
    /// Explicit `(a, b)` pairs of unit vectors.
    Pairs(Vec<[[f64; 3]; 2]>),
    /// `a = x`, `b` in the xy-plane at each grid angle (degrees).
    Grid {
        start_deg: f64,
        stop_deg: f64,
        step_deg: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_trials: usize,
    pub seed: u64,
    pub lambda_mode: LambdaMode,
    #[serde(default)]
    pub alignment_mode: AlignmentMode,
    pub directions: DirectionSpec,
}

/// Detector pair with its separation angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionPair {
    pub eta_deg: f64,
    pub a: Vec3,
    pub b: Vec3,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::InvalidConfig("n_trials must be positive".into()));
        }
        if self.lambda_mode == LambdaMode::BalancedExact && !self.n_trials.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "balanced_exact needs an even trial count, got {}",
                self.n_trials
            )));
        }
        self.direction_pairs().map(|_| ())
    }

    pub fn direction_pairs(&self) -> Result<Vec<DirectionPair>> {
        match &self.directions {
            DirectionSpec::Grid {
                start_deg,
                stop_deg,
                step_deg,
            } => {
                let grid = linear_grid(*start_deg, *stop_deg, *step_deg)?;
                if grid.iter().any(|d| !(0.0..=180.0).contains(d)) {
                    return Err(Error::InvalidConfig(
                        "grid angles must lie in [0, 180]".into(),
                    ));
                }
                Ok(grid
                    .into_iter()
                    .map(|deg| {
                        let t = deg.to_radians();
                        DirectionPair {
                            eta_deg: deg,
                            a: Vec3::x(),
                            b: Vec3::new(t.cos(), t.sin(), 0.0),
                        }
                    })
                    .collect())
            }
            DirectionSpec::Pairs(pairs) => {
                if pairs.is_empty() {
                    return Err(Error::InvalidConfig("no direction pairs".into()));
                }
                pairs
                    .iter()
                    .map(|[a, b]| {
                        let a = Vec3::from(*a);
                        let b = Vec3::from(*b);
                        for v in [&a, &b] {
                            if (v.norm() - 1.0).abs() > tolerances::UNIT_NORM {
                                return Err(Error::InvalidConfig(format!(
                                    "direction {v:?} is not unit"
                                )));
                            }
                        }
                        Ok(DirectionPair {
                            eta_deg: angle_between(&a, &b).to_degrees(),
                            a,
                            b,
                        })
                    })
                    .collect()
            }
        }
    }
}

/// One simulated emission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub s: Vec3,
    pub lambda: Orientation,
    pub r: f64,
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_direction(rng: &mut ChaCha8Rng, avoid: &[Vec3]) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n == 0.0 {
            continue;
        }
        let s = v / n;
        if avoid
            .iter()
            .all(|d| s.dot(d).abs() >= tolerances::ORTHOGONAL_RESAMPLE)
        {
            return s;
        }
    }
}

/// Generates the trial ensemble for a configuration.
pub fn simulate_ensemble(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let pairs = config.direction_pairs()?;
    let avoid: Vec<Vec3> = pairs.iter().flat_map(|p| [p.a, p.b]).collect();
    let n = config.n_trials;

    let balanced: Option<Vec<Orientation>> = match config.lambda_mode {
        LambdaMode::BalancedExact => {
            let mut v: Vec<Orientation> = (0..n)
                .map(|i| {
                    if i < n / 2 {
                        Orientation::Right
                    } else {
                        Orientation::Left
                    }
                })
                .collect();
            v.shuffle(&mut trial_rng(config.seed, SHUFFLE_STREAM));
            Some(v)
        }
        LambdaMode::FairCoin => None,
    };

    let trials = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i as u64);
            let s = sample_direction(&mut rng, &avoid);
            let lambda = match &balanced {
                Some(v) => v[i],
                None => {
                    if rng.random_bool(0.5) {
                        Orientation::Right
                    } else {
                        Orientation::Left
                    }
                }
            };
            let r = match config.alignment_mode {
                AlignmentMode::Unit => 1.0,
                AlignmentMode::UniformR => rng.random::<f64>(),
            };
            TrialRecord { s, lambda, r }
        })
        .collect();
    Ok(trials)
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Raw scores `(sign(s.a), sign(-s.b))`.
pub fn raw_score_pair(t: &TrialRecord, a: &Vec3, b: &Vec3) -> (i8, i8) {
    (sign(t.s.dot(a)), sign(-t.s.dot(b)))
}

/// Sample mean of a +-1 product and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawCorrelation {
    pub mean: f64,
    pub stderr: f64,
}

pub fn raw_correlation(trials: &[TrialRecord], a: &Vec3, b: &Vec3) -> Result<RawCorrelation> {
    let n = trials.len();
    if n < 2 {
        return Err(Error::TooFewTrials { needed: 2, got: n });
    }
    let sum: i64 = trials
        .par_iter()
        .map(|t| {
            let (x, y) = raw_score_pair(t, a, b);
            (x * y) as i64
        })
        .sum();
    let nf = n as f64;
    let mean = sum as f64 / nf;
    let var = ((nf - sum as f64 * mean) / (nf - 1.0)).max(0.0);
    Ok(RawCorrelation {
        mean,
        stderr: (var / nf).sqrt(),
    })
}

/// `L(a, lambda) = lambda beta(a)`.
pub fn spin_bivector(a: &Vec3, lambda: Orientation) -> Bivector {
    Bivector::from_axis(a).scale(lambda.sign())
}

/// Detector bivector `D(a) = beta(a)`.
pub fn detector(a: &Vec3) -> Bivector {
    Bivector::from_axis(a)
}

/// Standard score of the spin bivector; its mean is zero and dispersion one.
pub fn standard_score(a: &Vec3, lambda: Orientation) -> Bivector {
    spin_bivector(a, lambda)
}

/// `{1, L(e1), L(e2), L(e3)}` for the given handedness.
pub fn spin_basis(lambda: Orientation) -> [Multivector; 4] {
    [
        Multivector::scalar(1.0),
        spin_bivector(&Vec3::x(), lambda).to_multivector(),
        spin_bivector(&Vec3::y(), lambda).to_multivector(),
        spin_bivector(&Vec3::z(), lambda).to_multivector(),
    ]
}

/// `A(a, lambda) = -D(a) L(a, lambda)`; equals the scalar `lambda`.
#[allow(non_snake_case)]
pub fn measurement_A(a: &Vec3, lambda: Orientation) -> Multivector {
    -(detector(a).to_multivector() * spin_bivector(a, lambda).to_multivector())
}

/// `B(b, lambda) = +D(b) L(b, lambda)`; equals the scalar `-lambda`.
#[allow(non_snake_case)]
pub fn measurement_B(b: &Vec3, lambda: Orientation) -> Multivector {
    detector(b).to_multivector() * spin_bivector(b, lambda).to_multivector()
}

pub(crate) fn chunked_mean<F>(trials: &[TrialRecord], f: F) -> Multivector
where
    F: Fn(&TrialRecord) -> Multivector + Sync,
{
    let partials: Vec<[CompensatedSum; 8]> = trials
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = [CompensatedSum::default(); 8];
            for t in chunk {
                let m = f(t);
                for (s, x) in acc.iter_mut().zip(m.0) {
                    s.add(x);
                }
            }
            acc
        })
        .collect();
    let mut total = [CompensatedSum::default(); 8];
    for p in &partials {
        for (t, s) in total.iter_mut().zip(p.iter()) {
            t.merge(s);
        }
    }
    let n = trials.len() as f64;
    Multivector(std::array::from_fn(|i| total[i].value() / n))
}

/// Mean of the score product in the trial's own orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreCovariance {
    /// Scalar part of the mean product.
    pub scalar: f64,
    /// Norm of the bivector part.
    pub residual: f64,
    pub mean: Multivector,
}

pub fn standard_score_correlation(
    trials: &[TrialRecord],
    a: &Vec3,
    b: &Vec3,
) -> Result<ScoreCovariance> {
    if trials.is_empty() {
        return Err(Error::TooFewTrials { needed: 1, got: 0 });
    }
    let mean = chunked_mean(trials, |t| {
        oriented_product(
            &standard_score(a, t.lambda).to_multivector(),
            &standard_score(b, t.lambda).to_multivector(),
            t.lambda,
        )
    });
    Ok(ScoreCovariance {
        scalar: mean.scalar_part(),
        residual: mean.bivector_part().norm(),
        mean,
    })
}

/// Mean of the scalar parts of `A(a) B(b)`.
pub fn scalar_product_correlation(trials: &[TrialRecord], a: &Vec3, b: &Vec3) -> Result<f64> {
    if trials.is_empty() {
        return Err(Error::TooFewTrials { needed: 1, got: 0 });
    }
    let mean = chunked_mean(trials, |t| {
        Multivector::scalar(
            measurement_A(a, t.lambda).scalar_part() * measurement_B(b, t.lambda).scalar_part(),
        )
    });
    Ok(mean.scalar_part())
}

/// One row of a correlation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub eta_deg: f64,
    pub raw_mc: f64,
    pub raw_stderr: f64,
    pub std_score: f64,
    pub residual: f64,
    pub scalar_form: f64,
    pub su2_ref: f64,
    pub so3_ref: f64,
}

pub const CURVE_HEADER: &str =
    "eta_deg,raw_mc,raw_stderr,std_score,residual,scalar_form,su2_ref,so3_ref";

impl CorrelationRow {
    pub fn csv(&self) -> String {
        [
            self.eta_deg,
            self.raw_mc,
            self.raw_stderr,
            self.std_score,
            self.residual,
            self.scalar_form,
            self.su2_ref,
            self.so3_ref,
        ]
        .iter()
        .map(|x| crate::fmt17(*x))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// All three estimators plus both references for every configured pair.
pub fn correlation_curve(
    config: &ExperimentConfig,
    trials: &[TrialRecord],
) -> Result<Vec<CorrelationRow>> {
    config
        .direction_pairs()?
        .iter()
        .map(|p| {
            let raw = raw_correlation(trials, &p.a, &p.b)?;
            let cov = standard_score_correlation(trials, &p.a, &p.b)?;
            let eta = angle_between(&p.a, &p.b);
            Ok(CorrelationRow {
                eta_deg: p.eta_deg,
                raw_mc: raw.mean,
                raw_stderr: raw.stderr,
                std_score: cov.scalar,
                residual: cov.residual,
                scalar_form: scalar_product_correlation(trials, &p.a, &p.b)?,
                su2_ref: su2_distance(eta)?,
                so3_ref: so3_distance(eta)?,
            })
        })
        .collect()
}

/// `p(psi, a) = sin(psi/2) - D(a) cos(psi/2)`.
pub fn detector_rotor(psi: f64, a: &Vec3) -> Rotor {
    let (s, c) = (psi / 2.0).sin_cos();
    Rotor::from_parts(s, &detector(a).scale(-c))
}

/// `q(psi, a, lambda) = p(psi, a) L(a, lambda) = lambda cos(psi/2) + lambda D(a) sin(psi/2)`.
pub fn spin_quaternion(psi: f64, a: &Vec3, lambda: Orientation) -> Rotor {
    detector_rotor(psi, a) * Rotor::from_parts(0.0, &spin_bivector(a, lambda))
}

/// Standard score recovered from the quaternion: `q p~`.
pub fn standard_score_from_quaternion(psi: f64, a: &Vec3, lambda: Orientation) -> Multivector {
    (spin_quaternion(psi, a, lambda) * detector_rotor(psi, a).reverse()).to_multivector()
}

fn check_psi(psi: f64) -> Result<()> {
    if (0.0..=4.0 * PI).contains(&psi) {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "psi",
            value: psi,
        })
    }
}

/// Principal quaternionic standard deviation and its sign relative to `p(psi, a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuaternionStdDev {
    pub sigma: Rotor,
    /// `+1` when `sigma` is closer to `p`, `-1` when closer to `-p`.
    pub sign: f64,
}

/// `sqrt(mean[(q(psi) - m)(q(2 pi - psi) - m)~])` over the trials' handedness.
pub fn quaternion_std_dev(psi: f64, a: &Vec3, trials: &[TrialRecord]) -> Result<QuaternionStdDev> {
    check_psi(psi)?;
    if trials.is_empty() {
        return Err(Error::TooFewTrials { needed: 1, got: 0 });
    }
    let m = chunked_mean(trials, |t| {
        spin_quaternion(psi, a, t.lambda).to_multivector()
    })
    .even_part();
    let v = chunked_mean(trials, |t| {
        let x = spin_quaternion(psi, a, t.lambda) - m;
        let y = spin_quaternion(2.0 * PI - psi, a, t.lambda) - m;
        (x * y.reverse()).to_multivector()
    })
    .even_part();
    let sigma = even_sqrt(&v, &detector(a));
    let p = detector_rotor(psi, a);
    let sign = if sigma.dot(&p) >= 0.0 { 1.0 } else { -1.0 };
    Ok(QuaternionStdDev { sigma, sign })
}

/// Limit of the measurement function along an angle sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementLimit {
    /// `lambda cos(kappa pi)`.
    pub limit: f64,
    pub kappa: u8,
    /// `q(psi, a, lambda)` at the last element.
    pub last_value: Multivector,
}

/// Evaluates `q(psi, a, lambda)` along `psi_seq` and reports its limit at `2 kappa pi`.
pub fn measurement_limit(
    psi_seq: &[f64],
    a: &Vec3,
    lambda: Orientation,
) -> Result<MeasurementLimit> {
    let last = *psi_seq
        .last()
        .ok_or_else(|| Error::InvalidConfig("empty angle sequence".into()))?;
    check_psi(last)?;
    let last_value = spin_quaternion(last, a, lambda).to_multivector();
    let kappa = (last / (2.0 * PI)).round();
    let distance = (last - 2.0 * PI * kappa).abs();
    if distance > tolerances::LIMIT_TAIL {
        return Err(Error::NonConvergentSequence {
            last_psi: last,
            distance,
            last_value,
        });
    }
    Ok(MeasurementLimit {
        limit: lambda.sign() * (kappa * PI).cos(),
        kappa: kappa as u8,
        last_value,
    })
}

/// Gaussian density on S3: `exp(-|q - m|^2 / (2 |sigma|^2)) / sqrt(2 pi |sigma|^2)`.
pub fn gaussian_density_s3(q: &Rotor, mean: &Rotor, sigma: &Rotor) -> Result<f64> {
    let s2 = sigma.norm_squared();
    if s2 == 0.0 {
        return Err(Error::ZeroDispersion);
    }
    let d2 = (*q - *mean).norm_squared();
    Ok((-d2 / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt())
}

/// Mean and dispersion carried from the spin bivector to a scalar outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagatedError {
    /// Scalar part of `D m(S)`.
    pub mean: f64,
    /// `sigma(S) D`.
    pub sigma: Bivector,
}

pub fn propagate_error(
    mean_s: &Bivector,
    sigma_s: f64,
    detector_bivector: &Bivector,
) -> Result<PropagatedError> {
    let n = detector_bivector.norm();
    if (n - 1.0).abs() > tolerances::UNIT_NORM {
        return Err(Error::NonUnitBivector { norm: n });
    }
    let mean = (detector_bivector.to_multivector() * mean_s.to_multivector()).scalar_part();
    Ok(PropagatedError {
        mean,
        sigma: detector_bivector.scale(sigma_s),
    })
}

/// Mean and scalar dispersion of `S = r L(a, lambda)` over the trials.
pub fn spin_dispersion(trials: &[TrialRecord], a: &Vec3) -> Result<(Bivector, f64)> {
    if trials.is_empty() {
        return Err(Error::TooFewTrials { needed: 1, got: 0 });
    }
    let s = |t: &TrialRecord| spin_bivector(a, t.lambda).scale(t.r);
    let m = chunked_mean(trials, |t| s(t).to_multivector()).bivector_part();
    let var =
        chunked_mean(trials, |t| Multivector::scalar((s(t) - m).norm().powi(2))).scalar_part();
    Ok((m, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: usize, mode: LambdaMode) -> ExperimentConfig {
        ExperimentConfig {
            n_trials: n,
            seed: 11,
            lambda_mode: mode,
            alignment_mode: AlignmentMode::Unit,
            directions: DirectionSpec::Grid {
                start_deg: 0.0,
                stop_deg: 180.0,
                step_deg: 45.0,
            },
        }
    }

    #[test]
    fn balanced_requires_even_count() {
        let r = simulate_ensemble(&cfg(3, LambdaMode::BalancedExact));
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
        assert!(simulate_ensemble(&cfg(3, LambdaMode::FairCoin)).is_ok());
    }

    #[test]
    fn balanced_ensemble_is_exactly_balanced() {
        let t = simulate_ensemble(&cfg(1000, LambdaMode::BalancedExact)).unwrap();
        let right = t.iter().filter(|x| x.lambda == Orientation::Right).count();
        assert_eq!(right, 500);
        assert!(t
            .iter()
            .all(|x| (x.s.norm() - 1.0).abs() < 1e-15 && x.r == 1.0));
    }

    #[test]
    fn ensemble_is_reproducible() {
        let c = cfg(500, LambdaMode::FairCoin);
        assert_eq!(
            simulate_ensemble(&c).unwrap(),
            simulate_ensemble(&c).unwrap()
        );
    }

    #[test]
    fn ensemble_prefix_is_stable_in_n() {
        let a = simulate_ensemble(&cfg(100, LambdaMode::FairCoin)).unwrap();
        let b = simulate_ensemble(&cfg(200, LambdaMode::FairCoin)).unwrap();
        assert_eq!(a[..], b[..100]);
    }

    #[test]
    fn raw_correlation_needs_two_trials() {
        let t = simulate_ensemble(&cfg(1, LambdaMode::FairCoin)).unwrap();
        assert_eq!(
            raw_correlation(&t, &Vec3::x(), &Vec3::y()),
            Err(Error::TooFewTrials { needed: 2, got: 1 })
        );
    }

    #[test]
    fn raw_correlation_is_minus_one_for_aligned_detectors() {
        let t = simulate_ensemble(&cfg(2000, LambdaMode::BalancedExact)).unwrap();
        let r = raw_correlation(&t, &Vec3::x(), &Vec3::x()).unwrap();
        assert_eq!(r.mean, -1.0);
        assert_eq!(r.stderr, 0.0);
    }

    #[test]
    fn measurement_functions_are_plus_minus_lambda() {
        for l in [Orientation::Right, Orientation::Left] {
            let a = Vec3::new(0.6, 0.0, 0.8);
            let ma = measurement_A(&a, l);
            let mb = measurement_B(&a, l);
            assert!(ma.max_abs_diff(&Multivector::scalar(l.sign())) < 1e-15);
            assert!(mb.max_abs_diff(&Multivector::scalar(-l.sign())) < 1e-15);
        }
    }

    #[test]
    fn scalar_form_is_minus_one() {
        let t = simulate_ensemble(&cfg(100, LambdaMode::FairCoin)).unwrap();
        let b = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(
            scalar_product_correlation(&t, &Vec3::x(), &b).unwrap(),
            -1.0
        );
    }

    #[test]
    fn spin_basis_closes_for_both_orientations() {
        for l in [Orientation::Right, Orientation::Left] {
            let b = spin_basis(l);
            let eps = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];
            for (i, j, k) in eps {
                let p = oriented_product(&b[i], &b[j], l);
                assert!(p.max_abs_diff(&-b[k]).abs() < 1e-15, "{l:?} {i}{j}");
                let q = oriented_product(&b[j], &b[i], l);
                assert!(q.max_abs_diff(&b[k]) < 1e-15);
            }
            for x in &b[1..] {
                let p = oriented_product(x, x, l);
                assert!(p.max_abs_diff(&Multivector::scalar(-1.0)) < 1e-15);
            }
        }
    }

    #[test]
    fn std_dev_special_angles() {
        let t = simulate_ensemble(&cfg(100, LambdaMode::BalancedExact)).unwrap();
        let a = Vec3::new(0.0, 0.6, 0.8);
        let s = quaternion_std_dev(PI, &a, &t).unwrap();
        assert!(s.sigma.max_abs_diff(&Rotor::IDENTITY) < 1e-12);
        let s0 = quaternion_std_dev(0.0, &a, &t).unwrap();
        assert!(
            s0.sigma
                .max_abs_diff(&Rotor::from_parts(0.0, &detector(&a)))
                < 1e-12
        );
        assert_eq!(s0.sign, -1.0);
        assert!(quaternion_std_dev(-0.1, &a, &t).is_err());
    }

    #[test]
    fn measurement_limits() {
        let a = Vec3::z();
        let seq: Vec<f64> = (0..=100)
            .map(|k| 2.0 * PI * (1.0 - 1e-6 * (100 - k) as f64))
            .collect();
        let r = measurement_limit(&seq, &a, Orientation::Right).unwrap();
        assert_eq!(r.kappa, 1);
        assert!((r.limit + 1.0).abs() < 1e-15);
        let r = measurement_limit(&[0.3, 0.1, 0.0], &a, Orientation::Left).unwrap();
        assert!((r.limit + 1.0).abs() < 1e-15);
        let e = measurement_limit(&[PI], &a, Orientation::Right).unwrap_err();
        match e {
            Error::NonConvergentSequence { last_value, .. } => {
                assert!(last_value.max_abs_diff(&detector(&a).to_multivector()) < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn density_requires_dispersion() {
        let q = Rotor::IDENTITY;
        assert_eq!(
            gaussian_density_s3(&q, &q, &Rotor([0.0; 4])),
            Err(Error::ZeroDispersion)
        );
        let d = gaussian_density_s3(&q, &q, &Rotor::IDENTITY).unwrap();
        assert!((d - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn propagation_through_detector() {
        let a = Vec3::new(0.0, 0.0, 1.0);
        let t = simulate_ensemble(&ExperimentConfig {
            alignment_mode: AlignmentMode::UniformR,
            ..cfg(2000, LambdaMode::BalancedExact)
        })
        .unwrap();
        assert!(t.iter().all(|x| (0.0..1.0).contains(&x.r)));
        let (m, sigma) = spin_dispersion(&t, &a).unwrap();
        let p = propagate_error(&m, sigma, &detector(&a)).unwrap();
        assert!((p.mean + m.axis().z).abs() < 1e-15);
        assert!((p.sigma.norm() - sigma).abs() < 1e-15);
        assert!(propagate_error(&m, sigma, &Bivector::new(0.0, 0.0, 2.0)).is_err());
    }

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(z, p)| {
            let r = (1.0 - z * z).sqrt();
            Vec3::new(r * p.cos(), r * p.sin(), z)
        })
    }

    proptest! {
        #[test]
        fn score_from_quaternion_is_spin_bivector(psi in 0.0f64..(4.0 * PI), a in unit(), l in prop::bool::ANY) {
            let l = if l { Orientation::Right } else { Orientation::Left };
            let q = standard_score_from_quaternion(psi, &a, l);
            prop_assert!(q.max_abs_diff(&spin_bivector(&a, l).to_multivector()) < 1e-14);
        }

        #[test]
        fn quaternion_is_unit(psi in 0.0f64..(4.0 * PI), a in unit()) {
            prop_assert!((spin_quaternion(psi, &a, Orientation::Left).norm() - 1.0).abs() < 1e-14);
        }

        #[test]
        fn balanced_covariance_is_minus_cosine(a in unit(), b in unit()) {
            let mut t = Vec::new();
            for (i, l) in [Orientation::Right, Orientation::Left].into_iter().cycle().take(64).enumerate() {
                t.push(TrialRecord { s: Vec3::new(i as f64, 1.0, 0.0).normalize(), lambda: l, r: 1.0 });
            }
            let c = standard_score_correlation(&t, &a, &b).unwrap();
            prop_assert!((c.scalar + a.dot(&b)).abs() <= 1e-15);
            prop_assert!(c.residual <= 1e-15);
        }
    }
}
