use super::cover::CapCover;
use super::index::CapIndex;
use crate::sphere::{Region, UnitVector};

/// Anything with a pointwise membership test on the sphere.
pub trait Membership: Sync {
    fn contains(&self, p: &UnitVector) -> bool;
}

impl Membership for Region {
    fn contains(&self, p: &UnitVector) -> bool {
        Region::contains(self, p)
    }
}

/// A region minus a growing list of closed caps.
#[derive(Debug, Clone)]
pub struct Remaining {
    base: Region,
    removed: CapIndex,
}

impl Remaining {
    pub fn new(base: Region) -> Self {
        Self {
            base,
            removed: CapIndex::new(),
        }
    }

    pub fn base(&self) -> &Region {
        &self.base
    }

    pub fn removed(&self) -> &CapIndex {
        &self.removed
    }

    pub(crate) fn removed_mut(&mut self) -> &mut CapIndex {
        &mut self.removed
    }
}

impl Membership for Remaining {
    #[inline]
    fn contains(&self, p: &UnitVector) -> bool {
        self.base.contains(p) && !self.removed.contains(p)
    }
}

/// `M_i = C_i ∩ (M ∖ (M_1 ∪ … ∪ M_{i−1}))`, which is the set of points of
/// `M` whose first covering cap is `C_i`. Pieces are evaluated lazily.
#[derive(Debug, Clone, Copy)]
pub struct PieceDecomposition<'a, R: Membership> {
    region: &'a R,
    cover: &'a CapCover,
}

pub fn disjointify<'a, R: Membership>(region: &'a R, cover: &'a CapCover) -> PieceDecomposition<'a, R> {
    PieceDecomposition { region, cover }
}

impl<'a, R: Membership> PieceDecomposition<'a, R> {
    pub fn len(&self) -> usize {
        self.cover.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover.is_empty()
    }

    pub fn cover(&self) -> &'a CapCover {
        self.cover
    }

    pub fn region(&self) -> &'a R {
        self.region
    }

    #[inline]
    pub fn contains(&self, i: usize, p: &UnitVector) -> bool {
        self.cover.owned_by(i, p) && self.region.contains(p)
    }

    /// The unique piece containing `p`, if `p ∈ M`.
    pub fn piece_of(&self, p: &UnitVector) -> Option<usize> {
        if self.region.contains(p) {
            self.cover.owner(p)
        } else {
            None
        }
    }

    /// Piece `i` as an explicit region.
    pub fn piece_region(&self, i: usize) -> Region
    where
        R: Clone + Into<Region>,
    {
        let earlier: Vec<Region> = (0..i).map(|j| Region::Cap(*self.cover.cap(j))).collect();
        Region::intersection([
            self.region.clone().into(),
            Region::Cap(*self.cover.cap(i)),
            Region::union(earlier).complement(),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{sample_sphere_point, Boundary, SphericalCap};
    use crate::stream::{purpose_rng, McConfig, Purpose};
    use crate::transport::build_cap_cover;

    fn cover() -> CapCover {
        build_cap_cover(0.6, McConfig::new(1, 4)).unwrap()
    }

    #[test]
    fn full_region_is_partitioned() {
        let cover = cover();
        let pieces = disjointify(&Region::Full, &cover);
        let mut rng = purpose_rng(2, Purpose::Validation, 0);
        for _ in 0..20_000 {
            let p = sample_sphere_point(&mut rng);
            let n = (0..pieces.len()).filter(|&i| pieces.contains(i, &p)).count();
            assert_eq!(n, 1);
        }
    }

    #[test]
    fn cap_inside_first_cover_cap_is_its_own_piece() {
        let cover = cover();
        let c0 = cover.cap(0);
        let inner = SphericalCap::new(c0.center(), 0.05, Boundary::Closed).unwrap();
        // Only meaningful when no earlier cap exists, which holds for cap 0.
        let m = Region::Cap(inner);
        let pieces = disjointify(&m, &cover);
        let mut rng = purpose_rng(4, Purpose::Validation, 0);
        for _ in 0..20_000 {
            let p = crate::transport::cover::sample_in_cap(&mut rng, cover.frame(0), 0.1);
            assert_eq!(pieces.contains(0, &p), m.contains(&p));
            for i in 1..pieces.len() {
                assert!(!pieces.contains(i, &p));
            }
        }
    }

    #[test]
    fn union_of_pieces_matches_region() {
        let cover = cover();
        let m = Region::union([
            Region::Cap(SphericalCap::with_area(UnitVector::X, 0.3, Boundary::Open).unwrap()),
            Region::Cap(SphericalCap::with_area(UnitVector::Z, 0.1, Boundary::Closed).unwrap()),
        ])
        .difference(Region::Cap(SphericalCap::with_area(UnitVector::Y, 0.2, Boundary::Closed).unwrap()));
        let pieces = disjointify(&m, &cover);
        let mut rng = purpose_rng(6, Purpose::Validation, 0);
        for _ in 0..100_000 {
            let p = sample_sphere_point(&mut rng);
            let n = (0..pieces.len()).filter(|&i| pieces.contains(i, &p)).count();
            assert_eq!(n, usize::from(m.contains(&p)));
            assert_eq!(pieces.piece_of(&p).is_some(), m.contains(&p));
        }
    }

    #[test]
    fn explicit_piece_regions_agree() {
        let cover = cover();
        let m = Region::Cap(SphericalCap::with_area(UnitVector::X, 0.4, Boundary::Open).unwrap());
        let pieces = disjointify(&m, &cover);
        let regions: Vec<Region> = (0..pieces.len()).map(|i| pieces.piece_region(i)).collect();
        let mut rng = purpose_rng(8, Purpose::Validation, 0);
        for _ in 0..5_000 {
            let p = sample_sphere_point(&mut rng);
            for (i, r) in regions.iter().enumerate() {
                assert_eq!(r.contains(&p), pieces.contains(i, &p));
            }
        }
    }

    #[test]
    fn remaining_excludes_removed_caps() {
        let mut rest = Remaining::new(Region::Full);
        let cap = SphericalCap::new(UnitVector::Z, 0.2, Boundary::Closed).unwrap();
        rest.removed_mut().insert(cap);
        assert!(!rest.contains(&UnitVector::Z));
        assert!(rest.contains(&UnitVector::X));
    }
}
