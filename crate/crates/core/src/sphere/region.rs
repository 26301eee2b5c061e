use rayon::prelude::*;

use super::sampling::{sample_sphere_point, Estimate};
use super::{Boundary, Lune, Rotation, SphericalCap, UnitVector};
use crate::error::{Error, Result};
use crate::stream::{purpose_rng, McConfig, Purpose};

/// Tolerance used when deciding that two lunes of a shared frame meet only
/// along an edge.
const LUNE_EDGE_TOL: f64 = 1e-12;

/// A hemisphere `{p : p · normal > 0}` (or `≥ 0` when closed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hemisphere {
    pub normal: UnitVector,
    pub boundary: Boundary,
}

impl Hemisphere {
    pub fn new(normal: UnitVector, boundary: Boundary) -> Self {
        Self { normal, boundary }
    }

    #[inline]
    pub fn contains(&self, p: &UnitVector) -> bool {
        let d = self.normal.dot(p);
        match self.boundary {
            Boundary::Open => d > 0.0,
            Boundary::Closed => d >= 0.0,
        }
    }

    fn as_cap(&self) -> SphericalCap {
        SphericalCap::new(self.normal, std::f64::consts::FRAC_PI_2, self.boundary)
            .expect("π/2 is a valid radius")
    }
}

/// A set on the sphere built from caps, lunes and hemispheres with boolean
/// operations. Membership is exact; area is closed-form for leaves and
/// provably disjoint unions of leaves, Monte Carlo otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Empty,
    Full,
    Cap(SphericalCap),
    Lune(Lune),
    Hemisphere(Hemisphere),
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Complement(Box<Region>),
    Difference(Box<Region>, Box<Region>),
}

/// How [`region_area`] should compute the area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AreaMode {
    Exact,
    MonteCarlo { samples: u64, mc: McConfig },
}

impl Region {
    pub fn complement(self) -> Region {
        Region::Complement(Box::new(self))
    }

    pub fn difference(self, other: Region) -> Region {
        Region::Difference(Box::new(self), Box::new(other))
    }

    pub fn union(children: impl IntoIterator<Item = Region>) -> Region {
        Region::Union(children.into_iter().collect())
    }

    pub fn intersection(children: impl IntoIterator<Item = Region>) -> Region {
        Region::Intersection(children.into_iter().collect())
    }

    /// Characteristic function of the region.
    pub fn contains(&self, p: &UnitVector) -> bool {
        match self {
            Region::Empty => false,
            Region::Full => true,
            Region::Cap(c) => c.contains(p),
            Region::Lune(l) => l.contains(p),
            Region::Hemisphere(h) => h.contains(p),
            Region::Union(rs) => rs.iter().any(|r| r.contains(p)),
            Region::Intersection(rs) => rs.iter().all(|r| r.contains(p)),
            Region::Complement(r) => !r.contains(p),
            Region::Difference(a, b) => a.contains(p) && !b.contains(p),
        }
    }

    /// The image `ρ(self)`.
    pub fn rotated(&self, rho: &Rotation) -> Region {
        match self {
            Region::Empty => Region::Empty,
            Region::Full => Region::Full,
            Region::Cap(c) => Region::Cap(c.rotated(rho)),
            Region::Lune(l) => Region::Lune(l.rotated(rho)),
            Region::Hemisphere(h) => Region::Hemisphere(Hemisphere::new(rho.apply(&h.normal), h.boundary)),
            Region::Union(rs) => Region::Union(rs.iter().map(|r| r.rotated(rho)).collect()),
            Region::Intersection(rs) => Region::Intersection(rs.iter().map(|r| r.rotated(rho)).collect()),
            Region::Complement(r) => Region::Complement(Box::new(r.rotated(rho))),
            Region::Difference(a, b) => Region::Difference(Box::new(a.rotated(rho)), Box::new(b.rotated(rho))),
        }
    }

    /// Closed-form area fraction. Supported: leaves, complements of supported
    /// regions, and unions of leaves that are pairwise disjoint by
    /// center/radius or shared-frame longitude arithmetic.
    pub fn exact_area(&self) -> Result<f64> {
        match self {
            Region::Empty => Ok(0.0),
            Region::Full => Ok(1.0),
            Region::Cap(c) => Ok(c.area()),
            Region::Lune(l) => Ok(l.area()),
            Region::Hemisphere(_) => Ok(0.5),
            Region::Complement(r) => Ok(1.0 - r.exact_area()?),
            Region::Union(rs) => {
                for (i, a) in rs.iter().enumerate() {
                    if !a.is_leaf() {
                        return Err(Error::UnsupportedExactArea(
                            "union member is not a leaf".into(),
                        ));
                    }
                    for b in &rs[i + 1..] {
                        if !leaves_disjoint(a, b) {
                            return Err(Error::UnsupportedExactArea(
                                "union members are not provably disjoint".into(),
                            ));
                        }
                    }
                }
                rs.iter().map(Region::exact_area).sum()
            }
            Region::Intersection(_) => Err(Error::UnsupportedExactArea("intersection".into())),
            Region::Difference(..) => Err(Error::UnsupportedExactArea("difference".into())),
        }
    }

    fn is_leaf(&self) -> bool {
        matches!(
            self,
            Region::Empty | Region::Full | Region::Cap(_) | Region::Lune(_) | Region::Hemisphere(_)
        )
    }
}

fn leaves_disjoint(a: &Region, b: &Region) -> bool {
    let cap_like = |r: &Region| match r {
        Region::Cap(c) => Some(*c),
        Region::Hemisphere(h) => Some(h.as_cap()),
        _ => None,
    };
    match (a, b) {
        (Region::Empty, _) | (_, Region::Empty) => true,
        (Region::Lune(x), Region::Lune(y)) => lunes_disjoint(x, y),
        _ => match (cap_like(a), cap_like(b)) {
            (Some(x), Some(y)) => {
                x.center().angle_to(&y.center()) >= x.angular_radius() + y.angular_radius()
            }
            _ => false,
        },
    }
}

fn lunes_disjoint(x: &Lune, y: &Lune) -> bool {
    use std::f64::consts::TAU;
    if !x.shares_frame(y) {
        return false;
    }
    let d = (y.start_longitude() - x.start_longitude()).rem_euclid(TAU);
    x.width() <= d + LUNE_EDGE_TOL && d + y.width() <= TAU + LUNE_EDGE_TOL
}

/// Area of `region` as a fraction of the sphere.
///
/// Monte Carlo mode draws `samples` uniform points split over
/// `mc.streams` worker streams and reports the hit fraction with its
/// binomial standard error. Exact mode has zero standard error.
pub fn region_area(region: &Region, mode: AreaMode) -> Result<Estimate> {
    match mode {
        AreaMode::Exact => Ok(Estimate::exact(region.exact_area()?)),
        AreaMode::MonteCarlo { samples, mc } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("Monte Carlo area needs samples ≥ 1".into()));
            }
            Ok(monte_carlo_fraction(samples, mc, Purpose::SpherePoints, |p| region.contains(p)))
        }
    }
}

/// Fraction of uniform sphere points satisfying `pred`.
pub fn monte_carlo_fraction<F>(samples: u64, mc: McConfig, purpose: Purpose, pred: F) -> Estimate
where
    F: Fn(&UnitVector) -> bool + Sync,
{
    let shares = mc.shares(samples);
    let hits: u64 = shares
        .par_iter()
        .enumerate()
        .map(|(w, &n)| {
            let mut rng = purpose_rng(mc.seed, purpose, w as u32);
            (0..n).filter(|_| pred(&sample_sphere_point(&mut rng))).count() as u64
        })
        .sum();
    Estimate::binomial(hits, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{make_lune_partition, LuneBoundary};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cap_at(theta: f64, phi: f64, area: f64) -> Region {
        Region::Cap(
            SphericalCap::with_area(UnitVector::from_spherical(theta, phi), area, Boundary::Closed).unwrap(),
        )
    }

    #[test]
    fn full_and_empty() {
        assert!(Region::Full.contains(&UnitVector::X));
        assert!(!Region::Empty.contains(&UnitVector::X));
        assert_eq!(Region::Full.exact_area().unwrap(), 1.0);
        assert_eq!(Region::Empty.exact_area().unwrap(), 0.0);
    }

    #[test]
    fn open_hemisphere_cap_excludes_equator() {
        let r = Region::Cap(SphericalCap::new(UnitVector::Z, FRAC_PI_2, Boundary::Open).unwrap());
        assert!(!r.contains(&UnitVector::X));
    }

    #[test]
    fn complement_excludes_center() {
        let r = Region::Cap(SphericalCap::new(UnitVector::Z, 0.3, Boundary::Closed).unwrap()).complement();
        assert!(!r.contains(&UnitVector::Z));
        assert!(r.contains(&-UnitVector::Z));
    }

    #[test]
    fn disjoint_cap_union_is_additive() {
        let u = Region::union([cap_at(0.0, 0.0, 0.1), cap_at(PI, 0.0, 0.1)]);
        assert!((u.exact_area().unwrap() - 0.2).abs() < 1e-14);
        let overlapping = Region::union([cap_at(0.0, 0.0, 0.1), cap_at(0.1, 0.0, 0.1)]);
        assert!(matches!(overlapping.exact_area(), Err(Error::UnsupportedExactArea(_))));
    }

    #[test]
    fn lune_partition_union_is_full() {
        let lunes = make_lune_partition(5, UnitVector::Y).unwrap();
        let u = Region::union(lunes.into_iter().map(Region::Lune));
        assert!((u.exact_area().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unsupported_trees_are_reported() {
        let r = Region::intersection([Region::Full, cap_at(0.0, 0.0, 0.3)]);
        assert!(matches!(
            region_area(&r, AreaMode::Exact),
            Err(Error::UnsupportedExactArea(_))
        ));
    }

    #[test]
    fn complement_of_lune_monte_carlo() {
        let l = Lune::new(UnitVector::Z, 0.3, FRAC_PI_2, LuneBoundary::Closed).unwrap();
        let r = Region::Lune(l).complement();
        let exact = r.exact_area().unwrap();
        assert!((exact - 0.75).abs() < 1e-15);
        let est = region_area(
            &r,
            AreaMode::MonteCarlo {
                samples: 1_000_000,
                mc: McConfig::new(11, 4),
            },
        )
        .unwrap();
        assert!((est.value - exact).abs() <= 4.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn idempotent_intersection_monte_carlo() {
        let h = Region::Hemisphere(Hemisphere::new(UnitVector::X, Boundary::Open));
        let r = Region::intersection([h.clone(), h]);
        let est = region_area(
            &r,
            AreaMode::MonteCarlo {
                samples: 200_000,
                mc: McConfig::new(5, 2),
            },
        )
        .unwrap();
        assert!((est.value - 0.5).abs() <= 4.0 * est.stderr);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let r = cap_at(1.0, 2.0, 0.3);
        let mode = AreaMode::MonteCarlo {
            samples: 50_000,
            mc: McConfig::new(3, 3),
        };
        assert_eq!(region_area(&r, mode).unwrap(), region_area(&r, mode).unwrap());
    }
}
