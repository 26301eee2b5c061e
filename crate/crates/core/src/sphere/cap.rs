use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Boundary, Rotation, UnitVector};
use crate::error::{Error, Result};

/// Below this gap between `center · p` and `cos(radius)` the membership test
/// falls back to the exact angle comparison.
const DOT_GUARD: f64 = 1e-12;

/// A geodesic ball on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CapRepr", into = "CapRepr")]
pub struct SphericalCap {
    center: UnitVector,
    angular_radius: f64,
    boundary: Boundary,
    cos_radius: f64,
}

impl SphericalCap {
    /// `angular_radius` must lie in `(0, π]`.
    pub fn new(center: UnitVector, angular_radius: f64, boundary: Boundary) -> Result<Self> {
        if !(angular_radius > 0.0 && angular_radius <= PI) {
            return Err(Error::InvalidParameter(format!(
                "cap angular radius {angular_radius} outside (0, π]"
            )));
        }
        Ok(Self {
            center,
            angular_radius,
            boundary,
            cos_radius: angular_radius.cos(),
        })
    }

    /// The intersection of the sphere with the Euclidean ball of radius
    /// `chord` around `center`; `chord` must lie in `(0, 2)`.
    pub fn from_chord(center: UnitVector, chord: f64, boundary: Boundary) -> Result<Self> {
        if !(chord > 0.0 && chord < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "ball radius {chord} outside (0, 2)"
            )));
        }
        Self::new(center, 2.0 * (chord / 2.0).asin(), boundary)
    }

    /// Cap whose area is `fraction` of the sphere.
    pub fn with_area(center: UnitVector, fraction: f64, boundary: Boundary) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cap area {fraction} outside (0, 1]"
            )));
        }
        Self::new(center, (1.0 - 2.0 * fraction).clamp(-1.0, 1.0).acos(), boundary)
    }

    pub fn center(&self) -> UnitVector {
        self.center
    }

    pub fn angular_radius(&self) -> f64 {
        self.angular_radius
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Euclidean radius of the ball cutting out this cap.
    pub fn chord_radius(&self) -> f64 {
        2.0 * (self.angular_radius / 2.0).sin()
    }

    /// Fraction of the sphere covered: `(1 − cos r) / 2`.
    pub fn area(&self) -> f64 {
        cap_area(self.angular_radius)
    }

    #[inline]
    pub fn contains(&self, p: &UnitVector) -> bool {
        let d = self.center.dot(p);
        if d > self.cos_radius + DOT_GUARD {
            return true;
        }
        if d < self.cos_radius - DOT_GUARD {
            return false;
        }
        let a = self.center.angle_to(p);
        match self.boundary {
            Boundary::Open => a < self.angular_radius,
            Boundary::Closed => a <= self.angular_radius,
        }
    }

    /// Strict separation: the angular distance between centers exceeds the
    /// sum of the radii, so even closed caps share no point.
    pub fn is_disjoint_from(&self, other: &SphericalCap) -> bool {
        self.center.angle_to(&other.center) > self.angular_radius + other.angular_radius
    }

    /// `other ⊆ self` by center/radius arithmetic.
    pub fn contains_cap(&self, other: &SphericalCap) -> bool {
        self.center.angle_to(&other.center) + other.angular_radius <= self.angular_radius
    }

    pub fn rotated(&self, r: &Rotation) -> Self {
        Self {
            center: r.apply(&self.center),
            ..*self
        }
    }
}

/// Area fraction of a cap with the given angular radius.
pub fn cap_area(angular_radius: f64) -> f64 {
    // 1 − cos r = 2 sin²(r/2), accurate for tiny radii.
    let s = (angular_radius / 2.0).sin();
    s * s
}

#[derive(Serialize, Deserialize)]
struct CapRepr {
    center: UnitVector,
    radius: f64,
    #[serde(default = "closed")]
    boundary: Boundary,
}

fn closed() -> Boundary {
    Boundary::Closed
}

impl TryFrom<CapRepr> for SphericalCap {
    type Error = Error;
    fn try_from(r: CapRepr) -> Result<Self> {
        Self::new(r.center, r.radius, r.boundary)
    }
}

impl From<SphericalCap> for CapRepr {
    fn from(c: SphericalCap) -> Self {
        CapRepr {
            center: c.center,
            radius: c.angular_radius,
            boundary: c.boundary,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn cap(r: f64, b: Boundary) -> SphericalCap {
        SphericalCap::new(UnitVector::Z, r, b).unwrap()
    }

    #[test]
    fn areas() {
        assert!((cap(PI, Boundary::Open).area() - 1.0).abs() < 1e-15);
        assert!((cap(FRAC_PI_2, Boundary::Open).area() - 0.5).abs() < 1e-15);
        assert!((cap(FRAC_PI_3, Boundary::Open).area() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(SphericalCap::new(UnitVector::Z, 0.0, Boundary::Open).is_err());
        assert!(SphericalCap::new(UnitVector::Z, PI + 1e-9, Boundary::Open).is_err());
        assert!(SphericalCap::from_chord(UnitVector::Z, 2.0, Boundary::Open).is_err());
    }

    #[test]
    fn boundary_points() {
        let equator = UnitVector::X;
        assert!(!cap(FRAC_PI_2, Boundary::Open).contains(&equator));
        assert!(cap(FRAC_PI_2, Boundary::Closed).contains(&equator));
        assert!(cap(FRAC_PI_2, Boundary::Open).contains(&UnitVector::Z));
        assert!(!cap(PI, Boundary::Open).contains(&-UnitVector::Z));
        assert!(cap(PI, Boundary::Closed).contains(&-UnitVector::Z));
    }

    #[test]
    fn with_area_inverts_area() {
        for a in [0.01, 0.2, 0.24, 0.5, 0.9, 1.0] {
            let c = SphericalCap::with_area(UnitVector::X, a, Boundary::Closed).unwrap();
            assert!((c.area() - a).abs() < 1e-14);
        }
    }

    #[test]
    fn chord_round_trip() {
        let c = SphericalCap::from_chord(UnitVector::Z, 0.3, Boundary::Closed).unwrap();
        assert!((c.chord_radius() - 0.3).abs() < 1e-15);
        let near_full = SphericalCap::from_chord(UnitVector::Z, 2.0 - 1e-9, Boundary::Closed).unwrap();
        assert!((near_full.angular_radius() - PI).abs() < 1e-4);
    }

    #[test]
    fn disjointness_is_strict() {
        let a = cap(0.5, Boundary::Closed);
        let b = SphericalCap::new(UnitVector::from_spherical(1.0, 0.0), 0.5, Boundary::Closed).unwrap();
        assert!(!a.is_disjoint_from(&b));
        let c = SphericalCap::new(UnitVector::from_spherical(1.01, 0.0), 0.5, Boundary::Closed).unwrap();
        assert!(a.is_disjoint_from(&c));
    }
}
