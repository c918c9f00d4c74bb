//! Quadrature reference for the sign-model correlation.
//!
//! With `s` uniform on the unit sphere, `A = sign(s.a)` and `B = sign(-s.b)`,
//! the expectation `E(theta)` is reduced to a one-dimensional integral over
//! `u = s.a`: for fixed `u` the fraction of azimuths with `s.b > 0` is known
//! in closed form, and the remaining integral over `u` is done by adaptive
//! Simpson quadrature split at the kinks `u in {-sin theta, 0, sin theta}`.
//! Nothing here shares code with the Monte Carlo estimator it is compared to.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Absolute tolerance requested from the quadrature.
pub const QUAD_TOL: f64 = 1e-12;

fn azimuth_fraction_positive(theta: f64, u: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let w = (1.0 - u * u).max(0.0).sqrt();
    if st * w == 0.0 {
        return if u * ct > 0.0 { 1.0 } else { 0.0 };
    }
    let k = -u * ct / (st * w);
    k.clamp(-1.0, 1.0).acos() / PI
}

fn integrand(theta: f64, u: f64) -> f64 {
    let sign_a = if u > 0.0 {
        1.0
    } else if u < 0.0 {
        -1.0
    } else {
        0.0
    };
    sign_a * (1.0 - 2.0 * azimuth_fraction_positive(theta, u))
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adapt(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Sign-model correlation `E(a, b)` at separation `theta` in `[0, pi]`.
pub fn sign_model_correlation(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    let s = theta.sin();
    let mut cuts = vec![-1.0, -s, 0.0, s, 1.0];
    cuts.dedup();
    let f = |u: f64| integrand(theta, u);
    let total: f64 = cuts
        .windows(2)
        .map(|w| integrate(f, w[0], w[1], QUAD_TOL))
        .sum();
    Ok(0.5 * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent double-precision quadrature (QUADPACK).
    const FROZEN: [(f64, f64); 5] = [
        (0.0, -1.0),
        (30.0, -0.6666666666666671),
        (60.0, -0.33333333333336185),
        (120.0, 0.33333333333336124),
        (180.0, 1.0),
    ];

    #[test]
    fn matches_frozen_reference() {
        for (deg, want) in FROZEN {
            let got = sign_model_correlation(deg.to_radians()).unwrap();
            assert!((got - want).abs() < 1e-9, "{deg}: {got} vs {want}");
        }
    }

    #[test]
    fn integrates_polynomial_exactly() {
        let v = integrate(|x| x * x * x - 2.0 * x, -1.0, 2.0, 1e-12);
        assert!((v - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(sign_model_correlation(-0.1).is_err());
        assert!(sign_model_correlation(3.2).is_err());
    }

    #[test]
    fn right_angle_is_uncorrelated() {
        assert!(sign_model_correlation(PI / 2.0).unwrap().abs() < 1e-12);
    }
}
