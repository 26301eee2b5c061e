use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{Rotation, UnitVector};
use crate::error::{Error, Result};

/// Which of the two bounding half great circles belong to a lune.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LuneBoundary {
    Open,
    Closed,
    /// Lower edge included, upper edge excluded: `[start, start + width)`.
    HalfOpen,
}

/// The set of points whose longitude about `axis`, measured from
/// `reference`, lies in `[start, start + width]` (modulo the boundary flag).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lune {
    axis: UnitVector,
    reference: UnitVector,
    start_longitude: f64,
    width: f64,
    boundary: LuneBoundary,
}

impl Lune {
    /// Uses `axis.orthogonal()` as the zero-longitude direction.
    pub fn new(axis: UnitVector, start_longitude: f64, width: f64, boundary: LuneBoundary) -> Result<Self> {
        Self::with_reference(axis, axis.orthogonal(), start_longitude, width, boundary)
    }

    /// `reference` is projected onto the plane orthogonal to `axis`.
    pub fn with_reference(
        axis: UnitVector,
        reference: UnitVector,
        start_longitude: f64,
        width: f64,
        boundary: LuneBoundary,
    ) -> Result<Self> {
        if !(width > 0.0 && width <= TAU) {
            return Err(Error::InvalidParameter(format!("lune width {width} outside (0, 2π]")));
        }
        if !start_longitude.is_finite() {
            return Err(Error::InvalidParameter("lune start longitude is not finite".into()));
        }
        let d = axis.dot(&reference);
        let reference = UnitVector::new(
            reference.x() - d * axis.x(),
            reference.y() - d * axis.y(),
            reference.z() - d * axis.z(),
        )
        .map_err(|_| Error::InvalidParameter("lune reference is parallel to its axis".into()))?;
        Ok(Self {
            axis,
            reference,
            start_longitude: wrap(start_longitude),
            width,
            boundary,
        })
    }

    pub fn axis(&self) -> UnitVector {
        self.axis
    }
    pub fn reference(&self) -> UnitVector {
        self.reference
    }
    pub fn start_longitude(&self) -> f64 {
        self.start_longitude
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn boundary(&self) -> LuneBoundary {
        self.boundary
    }

    pub fn area(&self) -> f64 {
        lune_area(self.width)
    }

    /// Longitude of `p` in `[0, 2π)`; points on the axis get longitude 0.
    pub fn longitude(&self, p: &UnitVector) -> f64 {
        let e2 = self.axis.cross(&self.reference);
        let u = p.dot(&self.reference);
        let v = p.x() * e2[0] + p.y() * e2[1] + p.z() * e2[2];
        wrap(v.atan2(u))
    }

    #[inline]
    pub fn contains(&self, p: &UnitVector) -> bool {
        let e2 = self.axis.cross(&self.reference);
        let u = p.dot(&self.reference);
        let v = p.x() * e2[0] + p.y() * e2[1] + p.z() * e2[2];
        if u == 0.0 && v == 0.0 {
            // Poles lie on both edges.
            match self.boundary {
                LuneBoundary::Open => return false,
                LuneBoundary::Closed => return true,
                LuneBoundary::HalfOpen => {}
            }
        }
        // Compare against both endpoints directly so adjacent lunes that
        // share an endpoint value never both claim an edge point.
        let phi = wrap(v.atan2(u));
        let (start, end) = (self.start_longitude, self.start_longitude + self.width);
        match self.boundary {
            LuneBoundary::HalfOpen if end > TAU => phi >= start || phi < end - TAU,
            LuneBoundary::HalfOpen => start <= phi && phi < end,
            LuneBoundary::Closed if end >= TAU => phi >= start || phi <= end - TAU,
            LuneBoundary::Closed => start <= phi && phi <= end,
            LuneBoundary::Open if end >= TAU => phi > start || phi < end - TAU,
            LuneBoundary::Open => start < phi && phi < end,
        }
    }

    pub fn rotated(&self, r: &Rotation) -> Self {
        Self {
            axis: r.apply(&self.axis),
            reference: r.apply(&self.reference),
            ..*self
        }
    }

    /// Same axis and zero-longitude direction, so longitudes are comparable.
    pub(crate) fn shares_frame(&self, other: &Lune) -> bool {
        self.axis.chord_to(&other.axis) < 1e-12 && self.reference.chord_to(&other.reference) < 1e-12
    }
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Area fraction of a lune of dihedral width `width`.
pub fn lune_area(width: f64) -> f64 {
    width / TAU
}

/// `n` half-open lunes of width `2π/n` about `axis` tiling the sphere.
/// Lune `i` is lune 0 rotated by `2πi/n` about `axis`.
pub fn make_lune_partition(n: usize, axis: UnitVector) -> Result<Vec<Lune>> {
    if n == 0 {
        return Err(Error::InvalidParameter("lune partition needs n ≥ 1".into()));
    }
    let step = TAU / n as f64;
    let reference = axis.orthogonal();
    let start = |i: usize| if i == n { TAU } else { i as f64 * step };
    (0..n)
        .map(|i| {
            let (a, b) = (start(i), start(i + 1));
            // Nudge the width until a + width hits the next start exactly.
            let mut width = b - a;
            while a + width > b {
                width = width.next_down();
            }
            while a + width < b {
                width = width.next_up();
            }
            Lune::with_reference(axis, reference, a, width, LuneBoundary::HalfOpen)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn areas() {
        assert!((lune_area(TAU) - 1.0).abs() < 1e-15);
        assert!((lune_area(FRAC_PI_2) - 0.25).abs() < 1e-15);
        assert!((lune_area(PI) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partition_basics() {
        assert!(make_lune_partition(0, UnitVector::Z).is_err());
        let one = make_lune_partition(1, UnitVector::Z).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].area() - 1.0).abs() < 1e-15);
        let four = make_lune_partition(4, UnitVector::Z).unwrap();
        for l in &four {
            assert!((l.area() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn full_half_open_lune_contains_everything() {
        let l = make_lune_partition(1, UnitVector::Z).unwrap()[0];
        for p in [UnitVector::X, -UnitVector::X, UnitVector::Y, UnitVector::Z, -UnitVector::Z] {
            assert!(l.contains(&p));
        }
    }

    #[test]
    fn edges_follow_flags() {
        // reference for +z axis is computed; test on the start edge itself.
        let mk = |b| Lune::with_reference(UnitVector::Z, UnitVector::X, 0.0, FRAC_PI_2, b).unwrap();
        let start_edge = UnitVector::X;
        let end_edge = UnitVector::Y;
        assert!(!mk(LuneBoundary::Open).contains(&start_edge));
        assert!(mk(LuneBoundary::Closed).contains(&start_edge));
        assert!(mk(LuneBoundary::HalfOpen).contains(&start_edge));
        assert!(!mk(LuneBoundary::HalfOpen).contains(&end_edge));
        assert!(mk(LuneBoundary::Closed).contains(&end_edge));
        assert!(!mk(LuneBoundary::Open).contains(&UnitVector::Z));
        assert!(mk(LuneBoundary::Closed).contains(&UnitVector::Z));
    }

    #[test]
    fn rejects_bad_width() {
        assert!(Lune::new(UnitVector::Z, 0.0, 0.0, LuneBoundary::Open).is_err());
        assert!(Lune::new(UnitVector::Z, 0.0, TAU + 0.1, LuneBoundary::Open).is_err());
    }
}
