#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rotcover::sphere::{make_lune_partition, sample_sphere_point, Boundary, Hemisphere, Lune, LuneBoundary};
use rotcover::{PointSet, Region, SphericalCap, UnitVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn boundary(rng: &mut ChaCha8Rng) -> Boundary {
    if rng.random_bool(0.5) {
        Boundary::Open
    } else {
        Boundary::Closed
    }
}

pub fn random_cap(rng: &mut ChaCha8Rng) -> SphericalCap {
    let r = rng.random_range(0.05..PI - 0.05);
    SphericalCap::new(sample_sphere_point(rng), r, boundary(rng)).unwrap()
}

pub fn random_lune(rng: &mut ChaCha8Rng) -> Lune {
    let b = match rng.random_range(0..3) {
        0 => LuneBoundary::Open,
        1 => LuneBoundary::Closed,
        _ => LuneBoundary::HalfOpen,
    };
    Lune::new(sample_sphere_point(rng), rng.random_range(0.0..TAU), rng.random_range(0.05..TAU - 0.05), b).unwrap()
}

pub fn random_leaf(rng: &mut ChaCha8Rng) -> Region {
    match rng.random_range(0..3) {
        0 => Region::Cap(random_cap(rng)),
        1 => Region::Lune(random_lune(rng)),
        _ => Region::Hemisphere(Hemisphere::new(sample_sphere_point(rng), boundary(rng))),
    }
}

/// Random CSG tree of the given depth.
pub fn random_region(rng: &mut ChaCha8Rng, depth: usize) -> Region {
    if depth == 0 {
        return random_leaf(rng);
    }
    let mut child = || random_region(rng, depth - 1);
    let (a, b) = (child(), child());
    match rng.random_range(0..4) {
        0 => Region::union([a, b]),
        1 => Region::intersection([a, b]),
        2 => a.difference(b),
        _ => a.complement(),
    }
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
    PointSet::new((0..n).map(|_| sample_sphere_point(rng)).collect()).unwrap()
}

/// `S ∖ F_n` for the last lune of the `n`-lune partition around `axis`.
pub fn complement_of_last_lune(n: usize, axis: UnitVector) -> Region {
    let last = make_lune_partition(n, axis).unwrap().pop().unwrap();
    Region::Lune(last).complement()
}

pub fn hole(area: f64) -> Region {
    Region::Cap(SphericalCap::with_area(UnitVector::Z, area, Boundary::Closed).unwrap()).complement()
}
