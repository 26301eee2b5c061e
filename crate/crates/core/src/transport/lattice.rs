use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample points per square: a 5×5 grid of cell centers plus the corners.
pub const SAMPLES_PER_SQUARE: usize = 29;

/// A planar region known through its membership test.
pub trait PlanarRegion: Sync {
    fn contains(&self, q: [f64; 2]) -> bool;

    /// Points of the region that sampling alone could miss. Covering counts
    /// always include the squares containing them.
    fn anchors(&self) -> Vec<[f64; 2]> {
        Vec::new()
    }
}

impl<F: Fn([f64; 2]) -> bool + Sync> PlanarRegion for F {
    fn contains(&self, q: [f64; 2]) -> bool {
        self(q)
    }
}

/// A single planar point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint(pub [f64; 2]);

impl PlanarRegion for PlanarPoint {
    fn contains(&self, q: [f64; 2]) -> bool {
        q == self.0
    }

    fn anchors(&self) -> Vec<[f64; 2]> {
        vec![self.0]
    }
}

/// Square `[iε, (i+1)ε] × [jε, (j+1)ε]` of the lattice with side `ε` and a
/// lattice point at the plane origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSquare {
    pub i: i64,
    pub j: i64,
    pub epsilon: f64,
}

impl LatticeSquare {
    pub fn new(i: i64, j: i64, epsilon: f64) -> Self {
        Self { i, j, epsilon }
    }

    /// The square containing `q` (half-open on the upper sides).
    pub fn containing(q: [f64; 2], epsilon: f64) -> Self {
        Self::new((q[0] / epsilon).floor() as i64, (q[1] / epsilon).floor() as i64, epsilon)
    }

    pub fn center(&self) -> [f64; 2] {
        [
            (self.i as f64 + 0.5) * self.epsilon,
            (self.j as f64 + 0.5) * self.epsilon,
        ]
    }

    /// Largest distance from the origin of any point of the square.
    pub fn max_norm(&self) -> f64 {
        let x0 = self.i as f64 * self.epsilon;
        let y0 = self.j as f64 * self.epsilon;
        let fx = x0.abs().max((x0 + self.epsilon).abs());
        let fy = y0.abs().max((y0 + self.epsilon).abs());
        fx.hypot(fy)
    }

    /// Center first, then the rest of the 5×5 cell-center grid, then the
    /// four corners. The grid points sit `ε/10` inside the edges.
    pub fn sample_points(&self) -> [[f64; 2]; SAMPLES_PER_SQUARE] {
        let e = self.epsilon;
        let x0 = self.i as f64 * e;
        let y0 = self.j as f64 * e;
        let mut out = [[0.0; 2]; SAMPLES_PER_SQUARE];
        out[0] = self.center();
        let mut k = 1;
        for a in 0..5 {
            for b in 0..5 {
                if a == 2 && b == 2 {
                    continue;
                }
                out[k] = [x0 + (a as f64 + 0.5) * e / 5.0, y0 + (b as f64 + 0.5) * e / 5.0];
                k += 1;
            }
        }
        for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            out[k] = [x0 + a * e, y0 + b * e];
            k += 1;
        }
        out
    }

    /// Every sample point is a member.
    pub fn is_inner<R: PlanarRegion + ?Sized>(&self, region: &R) -> bool {
        self.sample_points().iter().all(|&q| region.contains(q))
    }

    /// Some sample point is a member.
    pub fn is_covering<R: PlanarRegion + ?Sized>(&self, region: &R) -> bool {
        self.sample_points().iter().any(|&q| region.contains(q))
    }
}

/// Lattice of side `epsilon` restricted to the box `[−R, R]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGrid {
    pub epsilon: f64,
    pub bound: f64,
}

impl LatticeGrid {
    pub fn new(epsilon: f64, bound: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("lattice side {epsilon} must be positive")));
        }
        if !(bound >= 0.0 && bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("bound radius {bound} must be non-negative")));
        }
        Ok(Self { epsilon, bound })
    }

    /// Range of square indices along one axis meeting `[−R, R]`.
    pub fn index_range(&self) -> std::ops::RangeInclusive<i64> {
        let lo = (-self.bound / self.epsilon).floor() as i64;
        let hi = ((self.bound / self.epsilon).ceil() as i64 - 1).max(lo);
        lo..=hi
    }

    pub fn square_count(&self) -> u64 {
        let n = self.index_range().count() as u64;
        n * n
    }

    /// Squares of the box satisfying `keep`, in `(i, j)` order.
    pub fn select<F>(&self, keep: F) -> Vec<LatticeSquare>
    where
        F: Fn(&LatticeSquare) -> bool + Sync,
    {
        let range = self.index_range();
        let rows: Vec<i64> = range.clone().collect();
        rows.par_iter()
            .flat_map_iter(|&i| {
                let keep = &keep;
                range
                    .clone()
                    .map(move |j| LatticeSquare::new(i, j, self.epsilon))
                    .filter(move |s| keep(s))
            })
            .collect()
    }
}

/// Squares selected by a lattice count.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareCount {
    pub count: usize,
    pub squares: Vec<LatticeSquare>,
}

impl SquareCount {
    fn from_squares(squares: Vec<LatticeSquare>) -> Self {
        Self {
            count: squares.len(),
            squares,
        }
    }
}

/// Squares of side `epsilon` whose sample points all lie in `region`. The
/// region must lie in the disk of radius `bound`.
pub fn count_inner_squares<R: PlanarRegion + ?Sized>(region: &R, epsilon: f64, bound: f64) -> Result<SquareCount> {
    let grid = LatticeGrid::new(epsilon, bound)?;
    Ok(SquareCount::from_squares(grid.select(|s| s.is_inner(region))))
}

/// Squares of side `epsilon` with at least one sample point in `region`,
/// plus the squares holding its anchors.
pub fn count_covering_squares<R: PlanarRegion + ?Sized>(region: &R, epsilon: f64, bound: f64) -> Result<SquareCount> {
    let grid = LatticeGrid::new(epsilon, bound)?;
    let mut squares = grid.select(|s| s.is_covering(region));
    for a in region.anchors() {
        let s = LatticeSquare::containing(a, epsilon);
        if !squares.iter().any(|t| t.i == s.i && t.j == s.j) {
            squares.push(s);
        }
    }
    squares.sort_by_key(|s| (s.i, s.j));
    Ok(SquareCount::from_squares(squares))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square(q: [f64; 2]) -> bool {
        (0.0..=1.0).contains(&q[0]) && (0.0..=1.0).contains(&q[1])
    }

    fn unit_disk(q: [f64; 2]) -> bool {
        q[0] * q[0] + q[1] * q[1] <= 1.0
    }

    #[test]
    fn aligned_square_counts_exactly() {
        let c = count_inner_squares(&unit_square, 0.25, 2f64.sqrt()).unwrap();
        assert_eq!(c.count, 16);
        assert_eq!(c.squares.len(), 16);
    }

    #[test]
    fn empty_region_has_no_squares() {
        let empty = |_: [f64; 2]| false;
        assert_eq!(count_inner_squares(&empty, 0.1, 1.0).unwrap().count, 0);
        assert_eq!(count_covering_squares(&empty, 0.1, 1.0).unwrap().count, 0);
    }

    #[test]
    fn single_point_is_covered_once() {
        let c = count_covering_squares(&PlanarPoint([0.123, -0.456]), 0.05, 1.0).unwrap();
        assert_eq!(c.count, 1);
        assert_eq!(c.squares[0], LatticeSquare::containing([0.123, -0.456], 0.05));
    }

    #[test]
    fn rejects_nonpositive_side() {
        assert!(count_inner_squares(&unit_disk, 0.0, 1.0).is_err());
        assert!(count_covering_squares(&unit_disk, -0.1, 1.0).is_err());
    }

    #[test]
    fn covering_contains_inner() {
        let inner = count_inner_squares(&unit_disk, 0.05, 1.0).unwrap();
        let cover = count_covering_squares(&unit_disk, 0.05, 1.0).unwrap();
        assert!(cover.count >= inner.count);
        for s in &inner.squares {
            assert!(cover.squares.contains(s));
        }
    }

    #[test]
    fn disk_counts_bracket_area() {
        for eps in [0.1, 0.05, 0.025] {
            let inner = count_inner_squares(&unit_disk, eps, 1.0).unwrap().count as f64 * eps * eps;
            let cover = count_covering_squares(&unit_disk, eps, 1.0).unwrap().count as f64 * eps * eps;
            assert!(inner <= PI && PI <= cover, "{eps}: {inner} {cover}");
        }
    }

    #[test]
    fn sample_points_layout() {
        let s = LatticeSquare::new(2, -3, 0.5);
        let pts = s.sample_points();
        assert_eq!(pts[0], s.center());
        for q in pts {
            assert!(q[0] >= 1.0 && q[0] <= 1.5 && q[1] >= -1.5 && q[1] <= -1.0);
        }
        assert_eq!(pts[25], [1.0, -1.5]);
        assert_eq!(pts[28], [1.5, -1.0]);
    }
}
