use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::frame::ProjectionFrame;
use super::lattice::LatticeSquare;
use crate::error::{Error, Result};
use crate::sphere::{rotation_aligning, Boundary, Rotation, SphericalCap};

/// Largest angular radius mismatch accepted by [`cap_rotation`].
pub const RADIUS_TOLERANCE: f64 = 1e-9;

/// Radius of the Euclidean ball cut out around a lifted square center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusRule {
    /// `ε/2`: the inscribed radius.
    HalfEps,
    /// `ε/√2`: the circumradius.
    EpsOverSqrt2,
    Custom(f64),
}

impl RadiusRule {
    pub fn radius(&self, epsilon: f64) -> f64 {
        match *self {
            RadiusRule::HalfEps => epsilon / 2.0,
            RadiusRule::EpsOverSqrt2 => epsilon / SQRT_2,
            RadiusRule::Custom(r) => r,
        }
    }
}

/// `S ∩ B(Q, r)` where `Q` is the lift of the square's center; its angular
/// radius is `2·asin(r/2)`.
pub fn lift_square_to_cap(square: &LatticeSquare, frame: &ProjectionFrame, rule: RadiusRule) -> Result<SphericalCap> {
    let r = rule.radius(square.epsilon);
    if !(r > 0.0 && r < 2.0) {
        return Err(Error::InvalidParameter(format!("ball radius {r} outside (0, 2)")));
    }
    let q = square.center();
    if q[0].hypot(q[1]) >= 1.0 {
        return Err(Error::InvalidParameter("square center lies outside the unit disk".into()));
    }
    SphericalCap::from_chord(frame.lift_unchecked(q), r, Boundary::Closed)
}

/// A rotation carrying `source` onto `target`; the radii must agree.
pub fn cap_rotation(source: &SphericalCap, target: &SphericalCap) -> Result<Rotation> {
    let gap = (source.angular_radius() - target.angular_radius()).abs();
    if gap > RADIUS_TOLERANCE {
        return Err(Error::InvalidParameter(format!("cap radii differ by {gap:e}")));
    }
    Ok(rotation_aligning(&source.center(), &target.center()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{cap_area, UnitVector};
    use crate::stream::{purpose_rng, Purpose};
    use crate::transport::cover::sample_in_cap;
    use std::f64::consts::PI;

    fn frame() -> ProjectionFrame {
        ProjectionFrame::new(0, UnitVector::new(1.0, 1.0, 1.0).unwrap())
    }

    #[test]
    fn near_maximal_ball() {
        let sq = LatticeSquare::new(0, 0, 1e-6);
        let cap = lift_square_to_cap(&sq, &frame(), RadiusRule::Custom(2.0 - 1e-9)).unwrap();
        assert!((cap.angular_radius() - PI).abs() < 1e-3);
        assert!(lift_square_to_cap(&sq, &frame(), RadiusRule::Custom(2.0)).is_err());
    }

    #[test]
    fn half_eps_area() {
        let sq = LatticeSquare::new(3, -2, 0.1);
        let cap = lift_square_to_cap(&sq, &frame(), RadiusRule::HalfEps).unwrap();
        let expected = (1.0 - (2.0 * 0.025f64.asin()).cos()) / 2.0;
        assert!((cap.area() - expected).abs() < 1e-15);
        assert!((cap_area(cap.angular_radius()) - expected).abs() < 1e-15);
    }

    #[test]
    fn circumradius_cap_covers_sample_grid() {
        let f = frame();
        let sq = LatticeSquare::new(0, 0, 0.1);
        let cap = lift_square_to_cap(&sq, &f, RadiusRule::EpsOverSqrt2).unwrap();
        for q in sq.sample_points().iter().take(25) {
            assert!(cap.contains(&f.lift(*q).unwrap()), "{q:?}");
        }
    }

    #[test]
    fn rotation_maps_cap_onto_cap() {
        let a = SphericalCap::new(UnitVector::new(0.2, -0.9, 0.1).unwrap(), 0.3, Boundary::Closed).unwrap();
        let b = SphericalCap::new(UnitVector::new(-0.5, 0.1, 0.7).unwrap(), 0.3, Boundary::Closed).unwrap();
        let rho = cap_rotation(&a, &b).unwrap();
        let fa = ProjectionFrame::new(0, a.center());
        let mut rng = purpose_rng(1, Purpose::Validation, 0);
        for _ in 0..10_000 {
            let p = sample_in_cap(&mut rng, &fa, 0.3 * (1.0 - 1e-9));
            assert!(b.contains(&rho.apply(&p)));
        }
    }

    #[test]
    fn identity_and_antipodal() {
        let a = SphericalCap::new(UnitVector::Z, 0.2, Boundary::Closed).unwrap();
        assert_eq!(cap_rotation(&a, &a).unwrap(), Rotation::IDENTITY);
        let b = SphericalCap::new(-UnitVector::Z, 0.2, Boundary::Closed).unwrap();
        let rho = cap_rotation(&a, &b).unwrap();
        assert!((rho.determinant() - 1.0).abs() < 1e-12);
        assert!(rho.apply(&UnitVector::Z).chord_to(&-UnitVector::Z) < 1e-12);
    }

    #[test]
    fn radius_mismatch_rejected() {
        let a = SphericalCap::new(UnitVector::Z, 0.2, Boundary::Closed).unwrap();
        let b = SphericalCap::new(UnitVector::X, 0.2 + 1e-8, Boundary::Closed).unwrap();
        assert!(cap_rotation(&a, &b).is_err());
    }
}
