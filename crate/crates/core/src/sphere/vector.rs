use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs shorter than this cannot be normalized.
pub const MIN_NORM: f64 = 1e-9;

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const X: Self = Self::raw(1.0, 0.0, 0.0);
    pub const Y: Self = Self::raw(0.0, 1.0, 0.0);
    pub const Z: Self = Self::raw(0.0, 0.0, 1.0);

    /// Normalizes `(x, y, z)`; fails when the norm is below [`MIN_NORM`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm >= MIN_NORM) || !norm.is_finite() {
            return Err(Error::DegenerateVector { norm });
        }
        Ok(Self::raw(x / norm, y / norm, z / norm))
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// Keeps the components unchanged when the norm is already within 1e-12
    /// of one, so serialized unit vectors reload bit-exactly.
    pub fn from_unit_array(v: [f64; 3]) -> Result<Self> {
        if (norm(v) - 1.0).abs() <= 1e-12 {
            Ok(Self::raw(v[0], v[1], v[2]))
        } else {
            Self::from_array(v)
        }
    }

    /// Caller guarantees unit norm.
    pub(crate) const fn raw(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Renormalizes a vector already known to be close to unit length.
    pub(crate) fn renormalized(v: [f64; 3]) -> Self {
        let n = norm(v);
        Self::raw(v[0] / n, v[1] / n, v[2] / n)
    }

    /// Point with polar angle `theta` from +z and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::raw(st * cp, st * sp, ct)
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }
    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }
    #[inline]
    pub fn z(&self) -> f64 {
        self.z
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(&self, other: &Self) -> [f64; 3] {
        cross(self.to_array(), other.to_array())
    }

    /// Great-circle distance in radians, stable near 0 and π.
    #[inline]
    pub fn angle_to(&self, other: &Self) -> f64 {
        norm(self.cross(other)).atan2(self.dot(other))
    }

    /// Euclidean (chord) distance.
    #[inline]
    pub fn chord_to(&self, other: &Self) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        norm(d)
    }

    /// A deterministic unit vector orthogonal to `self`.
    pub fn orthogonal(&self) -> Self {
        // Cross with the coordinate axis least aligned with self.
        let a = [self.x.abs(), self.y.abs(), self.z.abs()];
        let axis = if a[0] <= a[1] && a[0] <= a[2] {
            [1.0, 0.0, 0.0]
        } else if a[1] <= a[2] {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        Self::renormalized(cross(self.to_array(), axis))
    }
}

impl Neg for UnitVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::raw(-self.x, -self.y, -self.z)
    }
}

impl TryFrom<[f64; 3]> for UnitVector {
    type Error = Error;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::from_unit_array(v)
    }
}

impl From<UnitVector> for [f64; 3] {
    fn from(v: UnitVector) -> Self {
        v.to_array()
    }
}

#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn normalizes_input() {
        let v = UnitVector::new(3.0, 0.0, 4.0).unwrap();
        assert!((v.x() - 0.6).abs() < 1e-15);
        assert!((v.z() - 0.8).abs() < 1e-15);
        assert!((v.dot(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_vectors() {
        assert!(matches!(
            UnitVector::new(1e-10, 0.0, 0.0),
            Err(Error::DegenerateVector { .. })
        ));
        assert!(UnitVector::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn angles() {
        assert!((UnitVector::Z.angle_to(&UnitVector::X) - FRAC_PI_2).abs() < 1e-15);
        assert!((UnitVector::Z.angle_to(&-UnitVector::Z) - PI).abs() < 1e-15);
        assert_eq!(UnitVector::Z.angle_to(&UnitVector::Z), 0.0);
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        for v in [UnitVector::X, UnitVector::Z, UnitVector::new(1.0, 2.0, -3.0).unwrap()] {
            let o = v.orthogonal();
            assert!(v.dot(&o).abs() < 1e-15);
            assert!((o.dot(&o) - 1.0).abs() < 1e-12);
        }
    }
}
