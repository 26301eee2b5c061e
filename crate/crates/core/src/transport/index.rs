//! Spatial hash over cap centers for membership and overlap queries.

use rustc_hash::FxHashMap;

use crate::sphere::{SphericalCap, UnitVector};

type Cell = [i64; 3];

#[derive(Debug, Clone, Default)]
struct Level {
    size: f64,
    cells: FxHashMap<Cell, Vec<u32>>,
}

/// Caps bucketed into 3D grid cells. Each cap is stored in every cell that
/// meets the bounding box of its Euclidean ball; caps of similar size share
/// one grid level whose cell side is a power of two at least the ball's
/// diameter.
#[derive(Debug, Clone, Default)]
pub struct CapIndex {
    caps: Vec<SphericalCap>,
    levels: Vec<Level>,
}

fn cell_of(p: [f64; 3], size: f64) -> Cell {
    [
        (p[0] / size).floor() as i64,
        (p[1] / size).floor() as i64,
        (p[2] / size).floor() as i64,
    ]
}

fn cell_range(c: [f64; 3], half: f64, size: f64) -> (Cell, Cell) {
    let lo = cell_of([c[0] - half, c[1] - half, c[2] - half], size);
    let hi = cell_of([c[0] + half, c[1] + half, c[2] + half], size);
    (lo, hi)
}

impl CapIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_caps(caps: impl IntoIterator<Item = SphericalCap>) -> Self {
        let mut index = Self::new();
        for c in caps {
            index.insert(c);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    pub fn caps(&self) -> &[SphericalCap] {
        &self.caps
    }

    pub fn get(&self, i: usize) -> &SphericalCap {
        &self.caps[i]
    }

    /// Adds a cap and returns its position.
    pub fn insert(&mut self, cap: SphericalCap) -> usize {
        let id = self.caps.len();
        let chord = cap.chord_radius();
        let size = (2.0 * chord).max(1e-12).log2().ceil().exp2();
        let level = match self.levels.iter().position(|l| l.size == size) {
            Some(k) => k,
            None => {
                self.levels.push(Level {
                    size,
                    cells: FxHashMap::default(),
                });
                self.levels.len() - 1
            }
        };
        let level = &mut self.levels[level];
        let (lo, hi) = cell_range(cap.center().to_array(), chord, size);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    level.cells.entry([x, y, z]).or_default().push(id as u32);
                }
            }
        }
        self.caps.push(cap);
        id
    }

    /// Position of the earliest inserted cap containing `p`.
    pub fn first_containing(&self, p: &UnitVector) -> Option<usize> {
        let a = p.to_array();
        let mut best: Option<u32> = None;
        for level in &self.levels {
            if let Some(ids) = level.cells.get(&cell_of(a, level.size)) {
                for &id in ids {
                    if best.is_some_and(|b| id >= b) {
                        break;
                    }
                    if self.caps[id as usize].contains(p) {
                        best = Some(id);
                        break;
                    }
                }
            }
        }
        best.map(|b| b as usize)
    }

    pub fn contains(&self, p: &UnitVector) -> bool {
        let a = p.to_array();
        self.levels.iter().any(|level| {
            level
                .cells
                .get(&cell_of(a, level.size))
                .is_some_and(|ids| ids.iter().any(|&id| self.caps[id as usize].contains(p)))
        })
    }

    /// Positions of stored caps that are not strictly separated from `cap`,
    /// in increasing order.
    pub fn overlapping(&self, cap: &SphericalCap) -> Vec<usize> {
        let mut out = Vec::new();
        let c = cap.center().to_array();
        let chord = cap.chord_radius();
        for level in &self.levels {
            let (lo, hi) = cell_range(c, chord, level.size);
            for x in lo[0]..=hi[0] {
                for y in lo[1]..=hi[1] {
                    for z in lo[2]..=hi[2] {
                        if let Some(ids) = level.cells.get(&[x, y, z]) {
                            out.extend(
                                ids.iter()
                                    .map(|&id| id as usize)
                                    .filter(|&id| !self.caps[id].is_disjoint_from(cap)),
                            );
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_disjoint_from_all(&self, cap: &SphericalCap) -> bool {
        self.overlapping(cap).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::Boundary;

    fn cap(theta: f64, phi: f64, r: f64) -> SphericalCap {
        SphericalCap::new(UnitVector::from_spherical(theta, phi), r, Boundary::Closed).unwrap()
    }

    #[test]
    fn membership_matches_brute_force() {
        let caps: Vec<_> = (0..200)
            .map(|k| cap(0.1 + 0.015 * k as f64, 0.7 * k as f64, 0.01 + 0.002 * (k % 7) as f64))
            .collect();
        let index = CapIndex::from_caps(caps.clone());
        for k in 0..5000 {
            let p = UnitVector::from_spherical(0.0007 * k as f64 * 3.1, 1.3 * k as f64);
            let brute = caps.iter().position(|c| c.contains(&p));
            assert_eq!(index.first_containing(&p), brute);
            assert_eq!(index.contains(&p), brute.is_some());
        }
    }

    #[test]
    fn overlap_queries() {
        let index = CapIndex::from_caps([cap(1.0, 0.0, 0.1), cap(1.0, 1.0, 0.1), cap(2.0, 2.0, 0.5)]);
        assert_eq!(index.overlapping(&cap(1.0, 0.15, 0.05)), vec![0]);
        assert!(index.is_disjoint_from_all(&cap(0.2, 0.0, 0.05)));
        let caps: Vec<_> = (0..300).map(|k| cap(0.01 * k as f64, 2.4 * k as f64, 0.003 * (k % 11) as f64 + 0.001)).collect();
        let index = CapIndex::from_caps(caps.clone());
        for k in 0..300 {
            let q = cap(0.0105 * k as f64, 1.1 * k as f64, 0.02 * (k % 5) as f64 + 0.002);
            let brute: Vec<usize> = (0..caps.len()).filter(|&i| !caps[i].is_disjoint_from(&q)).collect();
            assert_eq!(index.overlapping(&q), brute);
        }
    }
}
