use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::UnitVector;

/// Orthonormal basis `(e1, e2)` of the plane through the origin orthogonal
/// to a cover cap's center. `project` is the orthogonal projection onto it;
/// `lift` inverts it on the hemisphere around the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionFrame {
    pub index: usize,
    pub center: UnitVector,
    pub e1: UnitVector,
    pub e2: UnitVector,
}

impl ProjectionFrame {
    pub fn new(index: usize, center: UnitVector) -> Self {
        let e1 = center.orthogonal();
        let e2 = UnitVector::renormalized(center.cross(&e1));
        Self { index, center, e1, e2 }
    }

    #[inline]
    pub fn project(&self, p: &UnitVector) -> [f64; 2] {
        [p.dot(&self.e1), p.dot(&self.e2)]
    }

    /// Preimage of `q` on the center's side; `|q| ≤ 1` is required.
    pub fn lift(&self, q: [f64; 2]) -> Result<UnitVector> {
        let r2 = q[0] * q[0] + q[1] * q[1];
        if !(r2 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "planar point of norm {} has no preimage",
                r2.sqrt()
            )));
        }
        Ok(self.lift_unchecked(q))
    }

    /// `lift` without the norm check; callers keep `|q| < 1`.
    #[inline]
    pub(crate) fn lift_unchecked(&self, q: [f64; 2]) -> UnitVector {
        let h = (1.0 - q[0] * q[0] - q[1] * q[1]).max(0.0).sqrt();
        let (a, b, c) = (self.e1, self.e2, self.center);
        UnitVector::renormalized([
            q[0] * a.x() + q[1] * b.x() + h * c.x(),
            q[0] * a.y() + q[1] * b.y() + h * c.y(),
            q[0] * a.z() + q[1] * b.z() + h * c.z(),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::sample_sphere_point;
    use crate::stream::{purpose_rng, Purpose};
    use std::f64::consts::FRAC_PI_6;

    fn frame() -> ProjectionFrame {
        ProjectionFrame::new(0, UnitVector::new(0.3, -0.5, 0.8).unwrap())
    }

    #[test]
    fn basis_is_orthonormal() {
        let f = frame();
        assert!(f.e1.dot(&f.e2).abs() < 1e-12);
        assert!(f.e1.dot(&f.center).abs() < 1e-12);
        assert!(f.e2.dot(&f.center).abs() < 1e-12);
    }

    #[test]
    fn center_projects_to_origin() {
        let f = frame();
        let q = f.project(&f.center);
        assert!(q[0].abs() < 1e-15 && q[1].abs() < 1e-15);
    }

    #[test]
    fn polar_angle_sets_planar_norm() {
        let f = frame();
        let p = f.lift([FRAC_PI_6.sin(), 0.0]).unwrap();
        assert!((p.angle_to(&f.center) - FRAC_PI_6).abs() < 1e-12);
        let q = f.project(&p);
        assert!(((q[0] * q[0] + q[1] * q[1]).sqrt() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn round_trip_on_cap_points() {
        let f = frame();
        let mut rng = purpose_rng(3, Purpose::Validation, 0);
        let mut n = 0;
        while n < 10_000 {
            let p = sample_sphere_point(&mut rng);
            if p.dot(&f.center) <= 1e-3 {
                continue;
            }
            n += 1;
            let back = f.lift(f.project(&p)).unwrap();
            assert!(back.chord_to(&p) < 1e-10);
        }
    }

    #[test]
    fn rejects_points_outside_unit_disk() {
        assert!(frame().lift([0.8, 0.8]).is_err());
    }
}
