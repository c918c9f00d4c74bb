//! The round three-sphere, its identification with unit rotors, and the
//! two distance functions on it: the SU(2) cosine and the SO(3) saw obtained
//! by identifying antipodal points.

use std::f64::consts::PI;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::{Bivector, Multivector, Orientation, Rotor, Vec3};
use crate::tolerances;

/// Point of S3 embedded in R4 with coordinates `(y0, y1, y2, y3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundPoint {
    pub y: [f64; 4],
}

impl RoundPoint {
    pub fn norm(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Hyperspherical chart `(chi, theta, phi)` into R4.
pub fn embed_round(chi: f64, theta: f64, phi: f64) -> RoundPoint {
    let (sc, cc) = chi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    RoundPoint {
        y: [cc, sc * st * cp, sc * st * sp, sc * ct],
    }
}

/// Partial derivatives of [`embed_round`] with respect to `chi`, `theta`, `phi`.
pub fn embed_round_jacobian(chi: f64, theta: f64, phi: f64) -> [[f64; 4]; 3] {
    let (sc, cc) = chi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        [-sc, cc * st * cp, cc * st * sp, cc * ct],
        [0.0, sc * ct * cp, sc * ct * sp, -sc * st],
        [0.0, -sc * st * sp, sc * st * cp, 0.0],
    ]
}

/// `ds^2 = dchi^2 + sin^2 chi (dtheta^2 + sin^2 theta dphi^2)`.
pub fn frw_line_element(chi: f64, theta: f64, d: [f64; 3]) -> f64 {
    let sc = chi.sin();
    let st = theta.sin();
    d[0] * d[0] + sc * sc * (d[1] * d[1] + st * st * d[2] * d[2])
}

/// Same metric in the radial coordinate `r = sin chi`:
/// `dr^2 / (1 - r^2) + r^2 (dtheta^2 + sin^2 theta dphi^2)`.
pub fn frw_line_element_radial(r: f64, theta: f64, d: [f64; 3]) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain {
            what: "r",
            value: r,
        });
    }
    let st = theta.sin();
    Ok(d[0] * d[0] / (1.0 - r * r) + r * r * (d[1] * d[1] + st * st * d[2] * d[2]))
}

/// `y0 + y1 beta1 + y2 beta2 + y3 beta3`.
pub fn round_to_flat(p: &RoundPoint) -> Rotor {
    Rotor(p.y)
}

pub fn flat_to_round(q: &Rotor) -> RoundPoint {
    RoundPoint { y: q.0 }
}

/// Rotation angle in `[0, pi]` separating two unit rotors; blind to the sign of either.
pub fn rotor_angle(qa: &Rotor, qb: &Rotor) -> f64 {
    2.0 * qa.dot(qb).abs().min(1.0).acos()
}

fn check_range(what: &'static str, x: f64, hi: f64) -> Result<()> {
    if (0.0..=hi).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// `-cos(eta)` for `eta` in `[0, 2 pi]`.
pub fn su2_distance(eta: f64) -> Result<f64> {
    check_range("eta", eta, 2.0 * PI)?;
    Ok(-eta.cos())
}

/// Saw-tooth distance on SO(3): `-1 + 2 eta / pi` on `[0, pi]`, `3 - 2 eta / pi` on `[pi, 2 pi]`.
pub fn so3_distance(eta: f64) -> Result<f64> {
    check_range("eta", eta, 2.0 * PI)?;
    Ok(if eta <= PI {
        -1.0 + 2.0 * eta / PI
    } else {
        3.0 - 2.0 * eta / PI
    })
}

/// Projection of the S3 separation to RP3; numerically identical to [`so3_distance`].
pub fn quotient_project(eta: f64) -> Result<f64> {
    so3_distance(eta)
}

/// Distance as a function of the rotor angle `psi` in `[0, 4 pi]`.
pub fn so3_exp_parameter(psi: f64) -> Result<f64> {
    check_range("psi", psi, 4.0 * PI)?;
    Ok(if psi <= 2.0 * PI {
        -1.0 + psi / PI
    } else {
        3.0 - psi / PI
    })
}

/// Saw distance between two unit rotors through their relative rotor `qa qb~`.
///
/// Sign-sensitive: `qa = qb` gives -1, `qa = -qb` gives +1.
pub fn so3_distance_rotors(qa: &Rotor, qb: &Rotor) -> Result<f64> {
    qa.check_unit()?;
    qb.check_unit()?;
    let r = *qa * qb.reverse();
    let psi = 2.0 * r.scalar().clamp(-1.0, 1.0).acos();
    so3_exp_parameter(psi)
}

/// Sign of the determinant of four basis vectors given as columns.
pub fn basis_orientation(m: &Matrix4<f64>) -> Result<Orientation> {
    let det = m.determinant();
    if det.abs() < tolerances::SINGULAR_DET {
        return Err(Error::SingularMatrix { det });
    }
    Ok(Orientation::from_sign(det))
}

/// Both distances at one angle, `eta` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceSample {
    pub eta: f64,
    pub su2: f64,
    pub so3: f64,
}

impl DistanceSample {
    pub fn at(eta: f64) -> Result<Self> {
        Ok(DistanceSample {
            eta,
            su2: su2_distance(eta)?,
            so3: so3_distance(eta)?,
        })
    }
}

/// Metric on the SO(3) frame algebra.
///
/// For unit directions separated by `eta` in `[0, pi]` the inner product is
/// `cos(alpha) = -so3_distance(eta)`, which agrees with the Euclidean one at
/// 0, pi/2 and pi.
#[derive(Debug, Clone, Copy, Default)]
pub struct So3Metric;

impl So3Metric {
    pub fn inner(&self, a: &Vec3, b: &Vec3) -> f64 {
        let eta = angle_between(a, b);
        -(if eta <= PI {
            -1.0 + 2.0 * eta / PI
        } else {
            3.0 - 2.0 * eta / PI
        })
    }

    /// `xi(a) xi(b) = -cos(alpha) - beta(a x b)`.
    pub fn product(&self, a: &Vec3, b: &Vec3) -> Multivector {
        Multivector::scalar(-self.inner(a, b)) - Bivector::from_axis(&a.cross(b)).to_multivector()
    }
}

/// Angle in `[0, pi]` between two non-zero vectors.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}
