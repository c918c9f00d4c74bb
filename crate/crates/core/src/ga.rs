//! Euclidean geometric algebra Cl(3,0).
//!
//! Multivectors are stored as eight coefficients in the blade order
//! `1, e1, e2, e3, e23, e31, e12, e123`. The even subalgebra is spanned by
//! `1, e23, e31, e12`; it is isomorphic to the quaternions and its unit
//! elements are the rotors.
//!
//! The bivector basis is `beta(a) = I a`, so `beta(e1) = e23`,
//! `beta(e2) = e31`, `beta(e3) = e12`, and
//! `beta_i beta_j = -delta_ij - eps_ijk beta_k`.

#![allow(clippy::needless_range_loop)]

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// Euclidean 3-vector.
pub type Vec3 = Vector3<f64>;

/// Blade labels in storage order.
pub const BLADES: [&str; 8] = ["1", "e1", "e2", "e3", "e23", "e31", "e12", "e123"];

const GRADE: [usize; 8] = [0, 1, 1, 1, 2, 2, 2, 3];

// Bitmask of each stored blade and the sign relating it to the ascending
// product of its basis vectors (e31 = -e1 e3).
const MASK: [u8; 8] = [0b000, 0b001, 0b010, 0b100, 0b110, 0b101, 0b011, 0b111];
const MASK_SIGN: [f64; 8] = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0];

type Table = [[(usize, f64); 8]; 8];

fn reorder_sign(a: u8, b: u8) -> f64 {
    let mut swaps = 0u32;
    let mut a = a >> 1;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn product_table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut slot = [0usize; 8];
        for (i, m) in MASK.iter().enumerate() {
            slot[*m as usize] = i;
        }
        let mut t = [[(0usize, 0.0f64); 8]; 8];
        for i in 0..8 {
            for j in 0..8 {
                let m = MASK[i] ^ MASK[j];
                let k = slot[m as usize];
                let sign =
                    MASK_SIGN[i] * MASK_SIGN[j] * MASK_SIGN[k] * reorder_sign(MASK[i], MASK[j]);
                t[i][j] = (k, sign);
            }
        }
        t
    })
}

/// Handedness of a spin frame. `Right` is `lambda = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Right,
    Left,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Right => 1.0,
            Orientation::Left => -1.0,
        }
    }

    pub fn from_sign(s: f64) -> Self {
        if s >= 0.0 {
            Orientation::Right
        } else {
            Orientation::Left
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Right => Orientation::Left,
            Orientation::Left => Orientation::Right,
        }
    }
}

/// General element of Cl(3,0).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Multivector(pub [f64; 8]);

impl Multivector {
    pub const ZERO: Multivector = Multivector([0.0; 8]);

    pub fn scalar(s: f64) -> Self {
        let mut c = [0.0; 8];
        c[0] = s;
        Multivector(c)
    }

    pub fn vector(v: &Vec3) -> Self {
        Multivector([0.0, v.x, v.y, v.z, 0.0, 0.0, 0.0, 0.0])
    }

    pub fn pseudoscalar() -> Self {
        Self::basis(7)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Multivector(c)
    }

    pub fn coeffs(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn scalar_part(&self) -> f64 {
        self.0[0]
    }

    pub fn vector_part(&self) -> Vec3 {
        Vec3::new(self.0[1], self.0[2], self.0[3])
    }

    pub fn bivector_part(&self) -> Bivector {
        Bivector::new(self.0[4], self.0[5], self.0[6])
    }

    pub fn trivector_part(&self) -> f64 {
        self.0[7]
    }

    /// Even part as a quaternion-like element.
    pub fn even_part(&self) -> Rotor {
        Rotor::new(self.0[0], self.0[4], self.0[5], self.0[6])
    }

    pub fn grade(&self, k: usize) -> Self {
        let mut c = [0.0; 8];
        for i in 0..8 {
            if GRADE[i] == k {
                c[i] = self.0[i];
            }
        }
        Multivector(c)
    }

    pub fn reverse(&self) -> Self {
        let mut c = self.0;
        for (i, x) in c.iter_mut().enumerate() {
            if GRADE[i] >= 2 {
                *x = -*x;
            }
        }
        Multivector(c)
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.0;
        c.iter_mut().for_each(|x| *x *= s);
        Multivector(c)
    }
}

/// Geometric product.
pub fn geometric_product(x: &Multivector, y: &Multivector) -> Multivector {
    let t = product_table();
    let mut out = [0.0; 8];
    for i in 0..8 {
        let xi = x.0[i];
        if xi == 0.0 {
            continue;
        }
        for j in 0..8 {
            let (k, s) = t[i][j];
            out[k] += s * xi * y.0[j];
        }
    }
    Multivector(out)
}

/// Product in the algebra whose volume element is `lambda I`.
///
/// For `Right` this is the ordinary geometric product; for `Left` it is the
/// opposite product `y x`, which on the even subalgebra flips the sign of
/// every bivector-bivector commutator.
pub fn oriented_product(x: &Multivector, y: &Multivector, lambda: Orientation) -> Multivector {
    match lambda {
        Orientation::Right => geometric_product(x, y),
        Orientation::Left => geometric_product(y, x),
    }
}

/// Commutator `x y - y x`.
pub fn commutator(x: &Multivector, y: &Multivector) -> Multivector {
    geometric_product(x, y) - geometric_product(y, x)
}

/// Same as [`Multivector::reverse`].
pub fn reverse(x: &Multivector) -> Multivector {
    x.reverse()
}

impl Mul for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        geometric_product(&self, &rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
        Multivector(c)
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Multivector) {
        *self = *self + rhs;
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        self + (-rhs)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Index<usize> for Multivector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Comma-separated coefficients in blade order, 17 significant digits.
impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", crate::fmt17(*x))?;
        }
        Ok(())
    }
}

impl FromStr for Multivector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 8 {
            return Err(Error::InvalidConfig(format!(
                "multivector needs 8 coefficients, got {}",
                parts.len()
            )));
        }
        let mut c = [0.0; 8];
        for (slot, p) in c.iter_mut().zip(parts) {
            *slot = p
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad coefficient {p:?}")))?;
        }
        Ok(Multivector(c))
    }
}

/// Grade-2 element, stored by its dual axis: `B = beta(axis)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bivector(pub [f64; 3]);

impl Bivector {
    pub const ZERO: Bivector = Bivector([0.0; 3]);

    pub fn new(e23: f64, e31: f64, e12: f64) -> Self {
        Bivector([e23, e31, e12])
    }

    /// `beta(a) = I a`.
    pub fn from_axis(a: &Vec3) -> Self {
        Bivector([a.x, a.y, a.z])
    }

    pub fn axis(&self) -> Vec3 {
        Vec3::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn norm(&self) -> f64 {
        self.axis().norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Bivector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector([0.0, 0.0, 0.0, 0.0, self.0[0], self.0[1], self.0[2], 0.0])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.axis() - other.axis()).amax()
    }

    fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tolerances::UNIT_NORM {
            return Err(Error::NonUnitBivector { norm: n });
        }
        Ok(())
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(self, rhs: Bivector) -> Bivector {
        Bivector::from_axis(&(self.axis() + rhs.axis()))
    }
}

impl Sub for Bivector {
    type Output = Bivector;
    fn sub(self, rhs: Bivector) -> Bivector {
        Bivector::from_axis(&(self.axis() - rhs.axis()))
    }
}

impl Neg for Bivector {
    type Output = Bivector;
    fn neg(self) -> Bivector {
        self.scale(-1.0)
    }
}

/// Even-grade element `q0 + q1 beta1 + q2 beta2 + q3 beta3`.
///
/// Unit elements act as rotations by conjugation. Several routines also use
/// this type for non-unit quaternions (means, dispersions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotor(pub [f64; 4]);

impl Default for Rotor {
    fn default() -> Self {
        Rotor::IDENTITY
    }
}

impl Rotor {
    pub const IDENTITY: Rotor = Rotor([1.0, 0.0, 0.0, 0.0]);

    pub fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Rotor([q0, q1, q2, q3])
    }

    pub fn from_parts(scalar: f64, b: &Bivector) -> Self {
        Rotor([scalar, b.0[0], b.0[1], b.0[2]])
    }

    /// `cos(psi/2) + beta(a) sin(psi/2)`.
    pub fn from_angle_axis(psi: f64, a: &Vec3) -> Result<Self> {
        rotor_exp(&Bivector::from_axis(a), psi / 2.0)
    }

    pub fn scalar(&self) -> f64 {
        self.0[0]
    }

    pub fn bivector(&self) -> Bivector {
        Bivector([self.0[1], self.0[2], self.0[3]])
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn to_multivector(&self) -> Multivector {
        Multivector([
            self.0[0], 0.0, 0.0, 0.0, self.0[1], self.0[2], self.0[3], 0.0,
        ])
    }

    pub fn reverse(&self) -> Self {
        Rotor([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Euclidean inner product of the four components.
    pub fn dot(&self, other: &Rotor) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Rotor([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= tolerances::UNIT_NORM
    }

    pub fn check_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NonUnitRotor { norm: self.norm() })
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for Rotor {
    type Output = Rotor;
    fn mul(self, rhs: Rotor) -> Rotor {
        geometric_product(&self.to_multivector(), &rhs.to_multivector()).even_part()
    }
}

impl Add for Rotor {
    type Output = Rotor;
    fn add(self, rhs: Rotor) -> Rotor {
        Rotor([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl Sub for Rotor {
    type Output = Rotor;
    fn sub(self, rhs: Rotor) -> Rotor {
        self + (-rhs)
    }
}

impl Neg for Rotor {
    type Output = Rotor;
    fn neg(self) -> Rotor {
        self.scale(-1.0)
    }
}

/// `exp(B half_angle) = cos(half_angle) + B sin(half_angle)` for a unit bivector `B`.
pub fn rotor_exp(b: &Bivector, half_angle: f64) -> Result<Rotor> {
    b.check_unit()?;
    let (s, c) = half_angle.sin_cos();
    Ok(Rotor::from_parts(c, &b.scale(s)))
}

/// Inverse of [`rotor_exp`]: unit axis bivector and half-angle in `[0, pi]`.
///
/// Returns `AxisUndefined` carrying the half-angle when the bivector part vanishes.
pub fn rotor_log(q: &Rotor) -> Result<(Bivector, f64)> {
    q.check_unit()?;
    let b = q.bivector();
    let bn = b.norm();
    let half = bn.atan2(q.scalar());
    if bn < tolerances::PARALLEL {
        return Err(Error::AxisUndefined { half_angle: half });
    }
    Ok((b.scale(1.0 / bn), half))
}

/// [`rotor_log`] with a fallback axis for `q = +-1`.
pub fn rotor_log_or(q: &Rotor, default_axis: &Bivector) -> Result<(Bivector, f64)> {
    match rotor_log(q) {
        Err(Error::AxisUndefined { half_angle }) => Ok((*default_axis, half_angle)),
        other => other,
    }
}

/// Bivector part of `q b q~`.
pub fn rotate_bivector(q: &Rotor, b: &Bivector) -> Bivector {
    let m = geometric_product(
        &geometric_product(&q.to_multivector(), &b.to_multivector()),
        &q.reverse().to_multivector(),
    );
    m.bivector_part()
}

/// Principal square root of an even element (non-negative scalar part).
///
/// When the bivector part vanishes the root is taken about `fallback_axis`,
/// so the root of `-1` is `fallback_axis` itself.
pub fn even_sqrt(q: &Rotor, fallback_axis: &Bivector) -> Rotor {
    let r = q.norm();
    if r == 0.0 {
        return Rotor([0.0; 4]);
    }
    let b = q.bivector();
    let bn = b.norm();
    let (unit, alpha) = if bn < tolerances::SQRT_AXIS * r {
        let fa = fallback_axis.norm();
        let axis = if fa > 0.0 {
            fallback_axis.scale(1.0 / fa)
        } else {
            Bivector::new(1.0, 0.0, 0.0)
        };
        (
            axis,
            if q.scalar() >= 0.0 {
                0.0
            } else {
                std::f64::consts::PI
            },
        )
    } else {
        (b.scale(1.0 / bn), bn.atan2(q.scalar()))
    };
    let (s, c) = (alpha / 2.0).sin_cos();
    Rotor::from_parts(c, &unit.scale(s)).scale(r.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn e(i: usize) -> Multivector {
        Multivector::basis(i)
    }

    #[test]
    fn vector_squares_are_one() {
        for i in 1..=3 {
            assert_eq!(e(i) * e(i), Multivector::scalar(1.0));
        }
    }

    #[test]
    fn bivector_squares_are_minus_one() {
        for i in 4..=6 {
            assert_eq!(e(i) * e(i), Multivector::scalar(-1.0));
        }
        assert_eq!(e(7) * e(7), Multivector::scalar(-1.0));
    }

    #[test]
    fn beta_is_dual_of_vector() {
        let i = Multivector::pseudoscalar();
        assert_eq!(i * e(1), e(4));
        assert_eq!(i * e(2), e(5));
        assert_eq!(i * e(3), e(6));
        assert_eq!(e(1) * e(2), e(6));
        assert_eq!(e(3) * e(1), e(5));
    }

    #[test]
    fn beta_products_follow_structure_constants() {
        // beta_i beta_j = -delta_ij - eps_ijk beta_k
        assert_eq!(e(4) * e(5), -e(6));
        assert_eq!(e(5) * e(6), -e(4));
        assert_eq!(e(6) * e(4), -e(5));
        assert_eq!(e(5) * e(4), e(6));
    }

    #[test]
    fn e1_e2_times_e2_e1_is_one() {
        let x = e(1) * e(2);
        let y = e(2) * e(1);
        assert_eq!(x * y, Multivector::scalar(1.0));
    }

    #[test]
    fn vector_product_splits_into_dot_and_wedge() {
        let a = Vec3::new(0.3, -1.2, 0.7);
        let b = Vec3::new(2.0, 0.5, -0.4);
        let p = Multivector::vector(&a) * Multivector::vector(&b);
        assert!((p.scalar_part() - a.dot(&b)).abs() < 1e-15);
        assert!(
            p.bivector_part()
                .max_abs_diff(&Bivector::from_axis(&a.cross(&b)))
                < 1e-15
        );
        assert_eq!(p.trivector_part(), 0.0);
    }

    #[test]
    fn left_orientation_reverses_bivector_commutators() {
        let x = e(4);
        let y = e(5);
        assert_eq!(oriented_product(&x, &y, Orientation::Right), -e(6));
        assert_eq!(oriented_product(&x, &y, Orientation::Left), e(6));
    }

    #[test]
    fn exp_quarter_turn() {
        let q = rotor_exp(&Bivector::new(0.0, 0.0, 1.0), PI / 4.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(q.max_abs_diff(&Rotor::new(h, 0.0, 0.0, h)) < 1e-15);
    }

    #[test]
    fn exp_rejects_non_unit_bivector() {
        let r = rotor_exp(&Bivector::new(0.0, 2.0, 0.0), 0.3);
        assert!(matches!(r, Err(Error::NonUnitBivector { .. })));
    }

    #[test]
    fn log_of_identity_is_axis_undefined() {
        assert_eq!(
            rotor_log(&Rotor::IDENTITY),
            Err(Error::AxisUndefined { half_angle: 0.0 })
        );
        let d = Bivector::new(1.0, 0.0, 0.0);
        let (axis, half) = rotor_log_or(&-Rotor::IDENTITY, &d).unwrap();
        assert_eq!(axis, d);
        assert!((half - PI).abs() < 1e-15);
    }

    #[test]
    fn rotating_beta1_about_beta3() {
        // Conjugation by exp(beta3 psi/2) maps beta1 to cos(psi) beta1 - sin(psi) beta2.
        let q = rotor_exp(&Bivector::new(0.0, 0.0, 1.0), PI / 4.0).unwrap();
        let r = rotate_bivector(&q, &Bivector::new(1.0, 0.0, 0.0));
        assert!(r.max_abs_diff(&Bivector::new(0.0, -1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn sqrt_of_minus_one_uses_fallback_axis() {
        let d = Bivector::new(0.0, 1.0, 0.0);
        let r = even_sqrt(&Rotor::new(-1.0, 0.0, 0.0, 0.0), &d);
        assert!(r.max_abs_diff(&Rotor::from_parts(0.0, &d)) < 1e-15);
    }

    #[test]
    fn multivector_text_roundtrip() {
        let m = Multivector([1.0, -0.5, 1e-20, 3.25, 0.1, -7.0, 2.0 / 3.0, 0.0]);
        let back: Multivector = m.to_string().parse().unwrap();
        assert_eq!(m, back);
        assert!("1,2,3".parse::<Multivector>().is_err());
    }

    fn mv() -> impl Strategy<Value = Multivector> {
        prop::array::uniform8(-10.0f64..10.0).prop_map(Multivector)
    }

    fn unit_vec() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(z, phi)| {
            let r = (1.0 - z * z).sqrt();
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
    }

    proptest! {
        #[test]
        fn product_is_associative(x in mv(), y in mv(), z in mv()) {
            let l = (x * y) * z;
            let r = x * (y * z);
            let scale = 1.0 + x.norm() * y.norm() * z.norm();
            prop_assert!(l.max_abs_diff(&r) <= 1e-12 * scale);
        }

        #[test]
        fn reverse_is_antimultiplicative(x in mv(), y in mv()) {
            let l = (x * y).reverse();
            let r = y.reverse() * x.reverse();
            prop_assert!(l.max_abs_diff(&r) <= 1e-12 * (1.0 + x.norm() * y.norm()));
        }

        #[test]
        fn beta_pair_identity(a in unit_vec(), b in unit_vec(), lam in prop::bool::ANY) {
            let lam = if lam { Orientation::Right } else { Orientation::Left };
            let l = lam.sign();
            let la = Bivector::from_axis(&a).scale(l).to_multivector();
            let lb = Bivector::from_axis(&b).scale(l).to_multivector();
            let p = oriented_product(&la, &lb, lam);
            let want = Multivector::scalar(-a.dot(&b)) - Bivector::from_axis(&a.cross(&b)).scale(l).to_multivector();
            prop_assert!(p.max_abs_diff(&want) < 1e-14);
        }

        #[test]
        fn exp_log_roundtrip(a in unit_vec(), half in 0.01f64..(PI - 0.01)) {
            let b = Bivector::from_axis(&a);
            let q = rotor_exp(&b, half).unwrap();
            prop_assert!((q.norm() - 1.0).abs() < 1e-14);
            let (axis, h) = rotor_log(&q).unwrap();
            prop_assert!((h - half).abs() < 1e-12);
            prop_assert!(axis.max_abs_diff(&b) < 1e-12);
        }

        #[test]
        fn rotation_preserves_bivector_norm(a in unit_vec(), c in unit_vec(), half in 0.0f64..PI) {
            let q = rotor_exp(&Bivector::from_axis(&a), half).unwrap();
            let r = rotate_bivector(&q, &Bivector::from_axis(&c));
            prop_assert!((r.norm() - 1.0).abs() < 1e-13);
        }

        #[test]
        fn sqrt_squares_back(q in prop::array::uniform4(-3.0f64..3.0)) {
            let q = Rotor(q);
            let r = even_sqrt(&q, &Bivector::new(1.0, 0.0, 0.0));
            prop_assert!(r.scalar() >= 0.0);
            prop_assert!((r * r).max_abs_diff(&q) < 1e-12 * (1.0 + q.norm()));
        }
    }
}
