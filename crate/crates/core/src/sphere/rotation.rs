use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::vector::{cross, norm, UnitVector};
use crate::error::{Error, Result};

/// An element of SO(3), stored as a row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Self = Self {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Accepts a row-major matrix whose columns are orthonormal and whose
    /// determinant is +1, both within `1e-9`.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Self { m };
        let err = r.orthonormality_error();
        let det = r.determinant();
        if !(err < 1e-9) || !((det - 1.0).abs() < 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not a rotation (orthonormality error {err:e}, det {det})"
            )));
        }
        Ok(r)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    /// Rotation by `angle` radians about `axis` (right-hand rule).
    pub fn from_axis_angle(axis: &UnitVector, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let [x, y, z] = axis.to_array();
        Self {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    /// Rotation of the quaternion `w + xi + yj + zk`; the input is normalized.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        Self {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }

    /// Some rotation taking `a` to `b`. Uses the minimal rotation about
    /// `a × b`; for antipodal inputs it is a half-turn about an axis
    /// orthogonal to `a`.
    pub fn aligning(a: &UnitVector, b: &UnitVector) -> Self {
        let axis = a.cross(b);
        let s = norm(axis);
        let c = a.dot(b);
        if s < 1e-12 {
            if c > 0.0 {
                return Self::IDENTITY;
            }
            return Self::from_axis_angle(&a.orthogonal(), PI);
        }
        let axis = UnitVector::raw(axis[0] / s, axis[1] / s, axis[2] / s);
        Self::from_axis_angle(&axis, s.atan2(c))
    }

    #[inline]
    pub fn apply_array(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    #[inline]
    pub fn apply(&self, v: &UnitVector) -> UnitVector {
        let [x, y, z] = self.apply_array(v.to_array());
        UnitVector::raw(x, y, z)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let a = &self.m;
        let b = &other.m;
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Rotation { m }
    }

    pub fn inverse(&self) -> Rotation {
        let m = &self.m;
        Rotation {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let m = &self.m;
        let trace = m[0][0] + m[1][1] + m[2][2];
        // atan2 form stays accurate near 0 and π.
        let skew = [m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]];
        norm(skew).atan2(trace - 1.0)
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        let c = cross(m[1], m[2]);
        m[0][0] * c[0] + m[0][1] * c[1] + m[0][2] * c[2]
    }

    /// Largest deviation of `MᵀM` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let p = self.inverse().compose(self);
        let mut worst: f64 = 0.0;
        for (i, row) in p.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl TryFrom<[[f64; 3]; 3]> for Rotation {
    type Error = Error;
    fn try_from(m: [[f64; 3]; 3]) -> Result<Self> {
        Self::from_matrix(m)
    }
}

impl From<Rotation> for [[f64; 3]; 3] {
    fn from(r: Rotation) -> Self {
        r.m
    }
}

/// A rotation `ρ` with `ρ(a) = b`.
pub fn rotation_aligning(a: &UnitVector, b: &UnitVector) -> Rotation {
    Rotation::aligning(a, b)
}
