//! Parallelization of S3 by the left-invariant frame `beta_a q`.
//!
//! The frame is expressed in chart components as a tetrad
//! `h^a_mu = <beta_a q, d_mu q>`. Its Weitzenbock connection
//! `Omega^rho_{nu mu} = h_a^rho d_nu h^a_mu` keeps the frame covariantly
//! constant, has vanishing curvature and non-vanishing torsion. A
//! Levi-Civita computation for the same metric serves as a control that
//! does pick up curvature. All chart derivatives use the five-point central
//! stencil; the three-point one loses accuracy near the chart collar.
//!
//! Index layout: connection arrays are `[rho][nu][mu]` with `nu` the
//! differentiation index; curvature arrays are `[rho][sigma][mu][nu]`.

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::{Bivector, Rotor, Vec3};
use crate::sphere::{angle_between, embed_round, embed_round_jacobian, frw_line_element};
use crate::tolerances;

type T3 = [[[f64; 3]; 3]; 3];
type T4 = [[[[f64; 3]; 3]; 3]; 3];

/// Hyperspherical chart coordinates in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartPoint {
    pub chi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ChartPoint {
    pub fn new(chi: f64, theta: f64, phi: f64) -> Self {
        ChartPoint { chi, theta, phi }
    }

    fn coords(&self) -> [f64; 3] {
        [self.chi, self.theta, self.phi]
    }

    fn shifted(&self, mu: usize, d: f64) -> Self {
        let mut c = self.coords();
        c[mu] += d;
        ChartPoint::new(c[0], c[1], c[2])
    }

    pub fn rotor(&self) -> Rotor {
        Rotor(embed_round(self.chi, self.theta, self.phi).y)
    }

    /// Rejects points inside the collar around `chi, theta in {0, pi}`.
    pub fn check_regular(&self) -> Result<()> {
        let near = |x: f64| !(tolerances::CHART_COLLAR..=PI - tolerances::CHART_COLLAR).contains(&x);
        if near(self.chi) || near(self.theta) || !self.phi.is_finite() {
            return Err(Error::ChartDegeneracy {
                chi: self.chi,
                theta: self.theta,
                phi: self.phi,
            });
        }
        Ok(())
    }
}

fn check_step(h: f64) -> Result<()> {
    if (tolerances::FD_STEP_MIN..=tolerances::FD_STEP_MAX).contains(&h) {
        Ok(())
    } else {
        Err(Error::StepOutOfRange {
            h,
            min: tolerances::FD_STEP_MIN,
            max: tolerances::FD_STEP_MAX,
        })
    }
}

/// The three frame rotors `beta_a q` at a base point, as 4-component rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentFrame {
    pub base: Rotor,
    pub rows: [[f64; 4]; 3],
}

fn beta_basis(a: usize) -> Rotor {
    let mut c = [0.0; 4];
    c[a + 1] = 1.0;
    Rotor(c)
}

pub fn tangent_frame(q: &Rotor) -> Result<TangentFrame> {
    q.check_unit()?;
    let mut rows = [[0.0; 4]; 3];
    for (a, row) in rows.iter_mut().enumerate() {
        *row = (beta_basis(a) * *q).0;
    }
    Ok(TangentFrame { base: *q, rows })
}

/// Moves a frame from its base point to `p` by right multiplication with `q~ p`.
pub fn frame_transport(frame: &TangentFrame, p: &Rotor) -> Result<TangentFrame> {
    p.check_unit()?;
    let step = frame.base.reverse() * *p;
    let mut rows = frame.rows;
    for row in rows.iter_mut() {
        *row = (Rotor(*row) * step).0;
    }
    Ok(TangentFrame { base: *p, rows })
}

/// Gram matrix of the frame rows.
pub fn flat_metric(frame: &TangentFrame) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| Rotor(frame.rows[i]).dot(&Rotor(frame.rows[j])))
}

/// Chart components `h^a_mu` of the frame; row `a`, column `mu`.
pub fn tetrad(x: &ChartPoint) -> Matrix3<f64> {
    let q = x.rotor();
    let jac = embed_round_jacobian(x.chi, x.theta, x.phi);
    let rows: [[f64; 4]; 3] = std::array::from_fn(|a| (beta_basis(a) * q).0);
    Matrix3::from_fn(|a, mu| (0..4).map(|i| rows[a][i] * jac[mu][i]).sum())
}

/// Fourth-order central difference of `f` along chart coordinate `mu`.
fn central<T, F>(f: F, x: &ChartPoint, mu: usize, h: f64) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    F: Fn(&ChartPoint) -> T,
{
    let p1 = f(&x.shifted(mu, h));
    let m1 = f(&x.shifted(mu, -h));
    let p2 = f(&x.shifted(mu, 2.0 * h));
    let m2 = f(&x.shifted(mu, -2.0 * h));
    ((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (12.0 * h))
}

fn inverse(m: &Matrix3<f64>, x: &ChartPoint) -> Result<Matrix3<f64>> {
    m.try_inverse().ok_or(Error::ChartDegeneracy {
        chi: x.chi,
        theta: x.theta,
        phi: x.phi,
    })
}

/// `Omega^rho_{nu mu}` stored as `omega[rho][nu][mu]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionCoefficients {
    pub omega: T3,
}

fn weitzenbock_raw(x: &ChartPoint, h: f64) -> Result<T3> {
    let inv = inverse(&tetrad(x), x)?;
    let mut omega = [[[0.0; 3]; 3]; 3];
    for nu in 0..3 {
        let p = inv * central(tetrad, x, nu, h);
        for rho in 0..3 {
            for mu in 0..3 {
                omega[rho][nu][mu] = p[(rho, mu)];
            }
        }
    }
    Ok(omega)
}

pub fn weitzenbock_connection(x: &ChartPoint, h: f64) -> Result<ConnectionCoefficients> {
    check_step(h)?;
    x.check_regular()?;
    Ok(ConnectionCoefficients {
        omega: weitzenbock_raw(x, h)?,
    })
}

/// Largest `|d_nu h^a_mu - Omega^rho_{nu mu} h^a_rho|`.
pub fn frame_constancy_residual(x: &ChartPoint, h: f64) -> Result<f64> {
    let omega = weitzenbock_connection(x, h)?.omega;
    let e = tetrad(x);
    let mut worst = 0.0f64;
    for nu in 0..3 {
        let d = central(tetrad, x, nu, h);
        for a in 0..3 {
            for mu in 0..3 {
                let corr: f64 = (0..3).map(|rho| omega[rho][nu][mu] * e[(a, rho)]).sum();
                worst = worst.max((d[(a, mu)] - corr).abs());
            }
        }
    }
    Ok(worst)
}

fn riemann<F>(x: &ChartPoint, h: f64, conn: F) -> Result<T4>
where
    F: Fn(&ChartPoint) -> Result<T3>,
{
    let g = conn(x)?;
    let mut dg = [[[[0.0; 3]; 3]; 3]; 3];
    for (mu, slot) in dg.iter_mut().enumerate() {
        let p1 = conn(&x.shifted(mu, h))?;
        let m1 = conn(&x.shifted(mu, -h))?;
        let p2 = conn(&x.shifted(mu, 2.0 * h))?;
        let m2 = conn(&x.shifted(mu, -2.0 * h))?;
        for r in 0..3 {
            for n in 0..3 {
                for s in 0..3 {
                    slot[r][n][s] = (8.0 * (p1[r][n][s] - m1[r][n][s])
                        - (p2[r][n][s] - m2[r][n][s]))
                        / (12.0 * h);
                }
            }
        }
    }
    let mut out = [[[[0.0; 3]; 3]; 3]; 3];
    for r in 0..3 {
        for s in 0..3 {
            for mu in 0..3 {
                for nu in 0..3 {
                    let mut v = dg[mu][r][nu][s] - dg[nu][r][mu][s];
                    for l in 0..3 {
                        v += g[r][mu][l] * g[l][nu][s] - g[r][nu][l] * g[l][mu][s];
                    }
                    out[r][s][mu][nu] = v;
                }
            }
        }
    }
    Ok(out)
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `R^rho_{sigma mu nu}` stored as `r[rho][sigma][mu][nu]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureTensor {
    pub r: T4,
}

impl CurvatureTensor {
    pub fn max_abs(&self) -> f64 {
        max_abs(self.r.iter().flatten().flatten().flatten().copied())
    }
}

/// Curvature of the Weitzenbock connection by nested central differences.
pub fn curvature_tensor(x: &ChartPoint, h: f64) -> Result<CurvatureTensor> {
    check_step(h)?;
    x.check_regular()?;
    Ok(CurvatureTensor {
        r: riemann(x, h, |p| weitzenbock_raw(p, h))?,
    })
}

/// `T^rho_{mu nu} = Omega^rho_{mu nu} - Omega^rho_{nu mu}` stored as `t[rho][mu][nu]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorsionTensor {
    pub t: T3,
}

impl TorsionTensor {
    pub fn max_abs(&self) -> f64 {
        max_abs(self.t.iter().flatten().flatten().copied())
    }
}

pub fn torsion_tensor(x: &ChartPoint, h: f64) -> Result<TorsionTensor> {
    let o = weitzenbock_connection(x, h)?.omega;
    let mut t = [[[0.0; 3]; 3]; 3];
    for r in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                t[r][m][n] = o[r][m][n] - o[r][n][m];
            }
        }
    }
    Ok(TorsionTensor { t })
}

/// Torsion in frame components, `T^c_{ab}` stored as `[c][a][b]`.
///
/// Analytically `T^c_{ab} = -2 eps_{abc}` at every regular point.
pub fn frame_torsion(x: &ChartPoint, h: f64) -> Result<T3> {
    let t = torsion_tensor(x, h)?.t;
    let e = tetrad(x);
    let inv = inverse(&e, x)?;
    let mut out = [[[0.0; 3]; 3]; 3];
    for c in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                let mut v = 0.0;
                for r in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            v += e[(c, r)] * t[r][m][n] * inv[(m, a)] * inv[(n, b)];
                        }
                    }
                }
                out[c][a][b] = v;
            }
        }
    }
    Ok(out)
}

/// Torsion bivector `beta(a x b)` of the S3 frame; magnitude `sin(eta)`.
pub fn torsion_bivector_su2(a: &Vec3, b: &Vec3) -> Bivector {
    Bivector::from_axis(&a.cross(b))
}

/// SO(3) counterpart: same plane, magnitude `2 eta / pi` up to `pi/2`, then `2 - 2 eta / pi`.
pub fn torsion_bivector_so3(a: &Vec3, b: &Vec3) -> Bivector {
    let c = a.cross(b);
    let n = c.norm();
    if n < tolerances::PARALLEL {
        return Bivector::ZERO;
    }
    let eta = angle_between(a, b);
    let mag = if eta <= PI / 2.0 {
        2.0 * eta / PI
    } else {
        2.0 - 2.0 * eta / PI
    };
    Bivector::from_axis(&(c * (mag / n)))
}

fn round_metric(x: &ChartPoint) -> Matrix3<f64> {
    let ds2 = |d: [f64; 3]| frw_line_element(x.chi, x.theta, d);
    Matrix3::from_fn(|i, j| {
        let mut p = [0.0; 3];
        let mut m = [0.0; 3];
        p[i] += 1.0;
        p[j] += 1.0;
        m[i] += 1.0;
        m[j] -= 1.0;
        (ds2(p) - ds2(m)) / 4.0
    })
}

fn levi_civita(x: &ChartPoint, h: f64) -> Result<T3> {
    let g = round_metric(x);
    let ginv = inverse(&g, x)?;
    let dg: [Matrix3<f64>; 3] = std::array::from_fn(|k| central(round_metric, x, k, h));
    let mut gam = [[[0.0; 3]; 3]; 3];
    for r in 0..3 {
        for n in 0..3 {
            for s in 0..3 {
                gam[r][n][s] = (0..3)
                    .map(|k| 0.5 * ginv[(r, k)] * (dg[n][(k, s)] + dg[s][(k, n)] - dg[k][(n, s)]))
                    .sum();
            }
        }
    }
    Ok(gam)
}

/// Levi-Civita curvature of the round metric, the non-flat control.
pub fn round_metric_curvature(x: &ChartPoint, h: f64) -> Result<CurvatureTensor> {
    check_step(h)?;
    x.check_regular()?;
    Ok(CurvatureTensor {
        r: riemann(x, h, |p| levi_civita(p, h))?,
    })
}

/// Sectional curvature of the round metric in the `(chi, theta)` plane; 1 on the unit sphere.
pub fn round_metric_sectional_curvature(x: &ChartPoint, h: f64) -> Result<f64> {
    let r = round_metric_curvature(x, h)?.r;
    Ok(r[0][1][0][1] / round_metric(x)[(1, 1)])
}
