//! CHSH strings, the torsion-based variance bound, and a deterministic
//! maximizer over detector quadruples.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{commutator, oriented_product, Bivector, Multivector, Orientation, Rotor, Vec3};
use crate::sim::{chunked_mean, raw_correlation, spin_bivector, TrialRecord};
use crate::sphere::angle_between;

/// `2 sqrt(2)`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Su2Cosine,
    So3Saw,
    MonteCarlo,
}

/// Expectation value `E(a, b)` for unit detector directions.
pub trait Correlator: Sync {
    fn correlate(&self, a: &Vec3, b: &Vec3) -> f64;
    fn kind(&self) -> CorrelationKind;
}

/// `E = -a.b`.
pub struct Su2Cosine;

impl Correlator for Su2Cosine {
    fn correlate(&self, a: &Vec3, b: &Vec3) -> f64 {
        -a.dot(b)
    }
    fn kind(&self) -> CorrelationKind {
        CorrelationKind::Su2Cosine
    }
}

/// `E = -1 + 2 eta / pi`.
pub struct So3Saw;

impl Correlator for So3Saw {
    fn correlate(&self, a: &Vec3, b: &Vec3) -> f64 {
        -1.0 + 2.0 * angle_between(a, b) / PI
    }
    fn kind(&self) -> CorrelationKind {
        CorrelationKind::So3Saw
    }
}

/// Raw sign-model estimate over a fixed ensemble.
pub struct MonteCarlo<'a> {
    trials: &'a [TrialRecord],
}

impl<'a> MonteCarlo<'a> {
    pub fn new(trials: &'a [TrialRecord]) -> Result<Self> {
        if trials.len() < 2 {
            return Err(Error::TooFewTrials {
                needed: 2,
                got: trials.len(),
            });
        }
        Ok(MonteCarlo { trials })
    }

    pub fn stderr(&self, a: &Vec3, b: &Vec3) -> f64 {
        raw_correlation(self.trials, a, b)
            .map(|r| r.stderr)
            .unwrap_or(f64::NAN)
    }
}

impl Correlator for MonteCarlo<'_> {
    fn correlate(&self, a: &Vec3, b: &Vec3) -> f64 {
        raw_correlation(self.trials, a, b)
            .map(|r| r.mean)
            .unwrap_or(f64::NAN)
    }
    fn kind(&self) -> CorrelationKind {
        CorrelationKind::MonteCarlo
    }
}

/// Detector directions `a, a', b, b'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadruple {
    pub a: Vec3,
    pub a_prime: Vec3,
    pub b: Vec3,
    pub b_prime: Vec3,
}

fn in_plane(deg: f64) -> Vec3 {
    let t = deg.to_radians();
    Vec3::new(t.cos(), t.sin(), 0.0)
}

impl Quadruple {
    /// Coplanar directions at the given angles (degrees) in the xy-plane.
    pub fn coplanar(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        Quadruple {
            a: in_plane(a),
            a_prime: in_plane(a_prime),
            b: in_plane(b),
            b_prime: in_plane(b_prime),
        }
    }

    pub fn rotated(&self, q: &Rotor) -> Self {
        let r = |v: &Vec3| {
            (q.to_multivector() * Multivector::vector(v) * q.reverse().to_multivector())
                .vector_part()
        };
        Quadruple {
            a: r(&self.a),
            a_prime: r(&self.a_prime),
            b: r(&self.b),
            b_prime: r(&self.b_prime),
        }
    }

    /// `(a x a') . (b' x b)`.
    pub fn torsion_overlap(&self) -> f64 {
        self.a
            .cross(&self.a_prime)
            .dot(&self.b_prime.cross(&self.b))
    }
}

/// `E(a,b) + E(a,b') + E(a',b) - E(a',b')`.
pub fn chsh_string(q: &Quadruple, e: &dyn Correlator) -> f64 {
    e.correlate(&q.a, &q.b) + e.correlate(&q.a, &q.b_prime) + e.correlate(&q.a_prime, &q.b)
        - e.correlate(&q.a_prime, &q.b_prime)
}

/// `T = 1/2 [L(a), L(a')]` in the `lambda`-oriented algebra; equals `-L(a x a', lambda)`.
pub fn commutator_torsion(a: &Vec3, a_prime: &Vec3, lambda: Orientation) -> Bivector {
    let x = spin_bivector(a, lambda).to_multivector();
    let y = spin_bivector(a_prime, lambda).to_multivector();
    let c = match lambda {
        Orientation::Right => commutator(&x, &y),
        Orientation::Left => commutator(&y, &x),
    };
    c.scale(0.5).bivector_part()
}

/// Right-hand side of the torsion bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceRhs {
    /// `2 sqrt(1 - (a x a') . (b' x b))`.
    pub idealized: f64,
    /// Square root of the magnitude of the trial-averaged quaternion below.
    pub finite_n: f64,
    /// `mean[4 + 4 T_aa'(lambda) T_b'b(lambda)]` including the handedness-weighted bivector.
    pub mean_square: Rotor,
}

pub fn idealized_rhs(q: &Quadruple) -> f64 {
    2.0 * (1.0 - q.torsion_overlap()).max(0.0).sqrt()
}

pub fn variance_rhs(q: &Quadruple, trials: &[TrialRecord]) -> Result<VarianceRhs> {
    if trials.is_empty() {
        return Err(Error::TooFewTrials { needed: 1, got: 0 });
    }
    let mean = chunked_mean(trials, |t| {
        let ta = commutator_torsion(&q.a, &q.a_prime, t.lambda).to_multivector();
        let tb = commutator_torsion(&q.b_prime, &q.b, t.lambda).to_multivector();
        Multivector::scalar(4.0) + oriented_product(&ta, &tb, t.lambda).scale(4.0)
    })
    .even_part();
    Ok(VarianceRhs {
        idealized: idealized_rhs(q),
        finite_n: mean.norm().sqrt(),
        mean_square: mean,
    })
}

/// Search settings for [`maximize_chsh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Coplanar grid spacing in degrees; must divide 360.
    pub grid_step_deg: f64,
    /// Coordinate-descent resolution in radians; `None` skips refinement.
    pub refine_tol: Option<f64>,
    /// Random full-sphere restarts.
    pub restarts: usize,
    pub seed: u64,
    /// Total correlator evaluations allowed.
    pub max_evals: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_step_deg: 1.0,
            refine_tol: Some(1e-4),
            restarts: 100,
            seed: 42,
            max_evals: 200_000_000,
        }
    }
}

/// Result of a CHSH maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: CorrelationKind,
    pub max_abs_chsh: f64,
    /// Signed CHSH value at the argmax.
    pub chsh_value: f64,
    /// In-plane angles of `a, a', b, b'` at the best coplanar quadruple, degrees.
    pub argmax_degrees: [f64; 4],
    /// Best quadruple overall (coplanar or restart).
    pub directions: Quadruple,
    /// Best value among the full-sphere restarts, if any ran.
    pub restart_max_abs: Option<f64>,
    /// Always `2 sqrt(2)`.
    pub bound: f64,
    /// Idealized torsion bound evaluated at `directions`.
    pub variance_rhs_at_argmax: f64,
    pub evaluations: u64,
}

struct Budget {
    used: u64,
    max: u64,
}

impl Budget {
    fn spend(&mut self, n: u64) -> Result<()> {
        self.used += n;
        if self.used > self.max {
            return Err(Error::OptimizerBudgetExceeded {
                needed: self.used,
                budget: self.max,
            });
        }
        Ok(())
    }
}

fn grid_search(e: &dyn Correlator, step: f64) -> Result<(f64, [usize; 3], usize)> {
    let n_f = 360.0 / step;
    let n = n_f.round() as usize;
    if n == 0 || (n_f - n as f64).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "grid step {step} does not divide 360"
        )));
    }
    // Correlation depends only on the in-plane angle difference.
    let table: Vec<f64> = (0..n)
        .map(|k| e.correlate(&Vec3::x(), &in_plane(k as f64 * step)))
        .collect();
    let at = |d: isize| table[d.rem_euclid(n as isize) as usize];
    let best = (0..n)
        .into_par_iter()
        .map(|ap| {
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for b in 0..n {
                let e_ab = at(b as isize);
                let e_apb = at(b as isize - ap as isize);
                for bp in 0..n {
                    let s = e_ab + at(bp as isize) + e_apb - at(bp as isize - ap as isize);
                    let v = s.abs();
                    if v > best.0 {
                        best = (v, (ap * n + b) * n + bp);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                    y
                } else {
                    x
                }
            },
        );
    let idx = best.1;
    Ok((best.0, [idx / (n * n), (idx / n) % n, idx % n], n * n * n))
}

fn descend<F: Fn(&[f64]) -> f64>(
    f: F,
    x: &mut [f64],
    start: f64,
    tol: f64,
    budget: &mut u64,
) -> f64 {
    let mut fx = f(x);
    *budget += 1;
    let mut step = start;
    while step >= tol {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let v = f(x);
                *budget += 1;
                if v > fx {
                    fx = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    fx
}

fn from_spherical(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

fn spherical_quadruple(x: &[f64]) -> Quadruple {
    Quadruple {
        a: from_spherical(x[0], x[1]),
        a_prime: from_spherical(x[2], x[3]),
        b: from_spherical(x[4], x[5]),
        b_prime: from_spherical(x[6], x[7]),
    }
}

/// Maximizes `|CHSH|`: coplanar grid, coordinate-descent refinement, then random full-sphere restarts.
pub fn maximize_chsh(e: &dyn Correlator, cfg: &OptimizerConfig) -> Result<BoundReport> {
    let mut budget = Budget {
        used: 0,
        max: cfg.max_evals,
    };
    let n = (360.0 / cfg.grid_step_deg).round() as u64;
    budget.spend(n.saturating_pow(3))?;
    let (_, idx, _) = grid_search(e, cfg.grid_step_deg)?;

    let mut angles = [
        0.0,
        idx[0] as f64 * cfg.grid_step_deg,
        idx[1] as f64 * cfg.grid_step_deg,
        idx[2] as f64 * cfg.grid_step_deg,
    ];
    let coplanar = |x: &[f64]| Quadruple::coplanar(0.0, x[0], x[1], x[2]);
    let mut best_q = coplanar(&angles[1..]);
    let mut best = chsh_string(&best_q, e).abs();
    budget.spend(4)?;

    if let Some(tol) = cfg.refine_tol {
        let mut x = [angles[1], angles[2], angles[3]];
        let mut used = 0u64;
        let start = cfg.grid_step_deg;
        // Work in degrees; convert the radian tolerance.
        let v = descend(
            |x| chsh_string(&coplanar(x), e).abs(),
            &mut x,
            start,
            tol.to_degrees(),
            &mut used,
        );
        budget.spend(used * 4)?;
        if v > best {
            best = v;
            angles = [0.0, x[0], x[1], x[2]];
            best_q = coplanar(&x);
        }
    }

    let mut restart_max_abs = None;
    if cfg.restarts > 0 {
        let tol = cfg.refine_tol.unwrap_or(1e-4);
        let runs: Vec<(f64, [f64; 8], u64)> = (0..cfg.restarts)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                let mut x = [0.0; 8];
                for pair in x.chunks_mut(2) {
                    pair[0] = (1.0 - 2.0 * rng.random::<f64>()).acos();
                    pair[1] = 2.0 * PI * rng.random::<f64>();
                }
                let mut used = 0u64;
                let v = descend(
                    |x| chsh_string(&spherical_quadruple(x), e).abs(),
                    &mut x,
                    0.2,
                    tol,
                    &mut used,
                );
                (v, x, used)
            })
            .collect();
        budget.spend(runs.iter().map(|r| r.2 * 4).sum())?;
        let mut top = (f64::NEG_INFINITY, [0.0; 8]);
        for (v, x, _) in &runs {
            if *v > top.0 {
                top = (*v, *x);
            }
        }
        restart_max_abs = Some(top.0);
        if top.0 > best {
            best = top.0;
            best_q = spherical_quadruple(&top.1);
        }
    }

    let wrap = |d: f64| d.rem_euclid(360.0);
    Ok(BoundReport {
        kind: e.kind(),
        max_abs_chsh: best,
        chsh_value: chsh_string(&best_q, e),
        argmax_degrees: [
            wrap(angles[0]),
            wrap(angles[1]),
            wrap(angles[2]),
            wrap(angles[3]),
        ],
        directions: best_q,
        restart_max_abs,
        bound: TSIRELSON,
        variance_rhs_at_argmax: idealized_rhs(&best_q),
        evaluations: budget.used,
    })
}
