//! Placing a finite point set inside a region by rotation.
//!
//! `f(x)` counts the points of `x(X)` inside `M`. Averaged over Haar
//! rotations it equals `n·A(M)`, and since `f` is an integer at most `n`, the
//! set `{f = n}` has measure at least `n·A(M) − (n − 1)`.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::{HaarStream, RotationSampler};
use crate::sphere::{
    monte_carlo_fraction, sample_sphere_point, Estimate, PointSet, Region, Rotation,
};
use crate::stream::{purpose_rng, McConfig, Purpose};

/// Smallest sample count accepted by the averaged estimators.
pub const MIN_SAMPLES: u64 = 1_000;
/// Refinement stops once the perturbation angle drops below this.
pub const MIN_PERTURBATION: f64 = 1e-4;
/// Random perturbations tried at each angle of the refinement schedule.
pub const PERTURBATIONS_PER_ANGLE: usize = 32;
/// Rotations evaluated per worker between checks for a hit.
const BATCH: usize = 64;

/// Region `M`, point set `X` and optionally the exact area of `M`.
#[derive(Debug, Clone)]
pub struct PlacementProblem {
    pub region: Region,
    pub points: PointSet,
    pub area_hint: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementResult {
    pub status: PlacementStatus,
    pub rotation: Option<Rotation>,
    pub samples_used: u64,
    /// Largest hit count seen.
    pub best_hits: usize,
    pub good_measure: Option<Estimate>,
    pub lower_bound: f64,
}

/// Good-rotation measure with its analytic lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodMeasure {
    pub estimate: Estimate,
    pub lower_bound: f64,
    /// Area used for the bound, and whether it was exact.
    pub area: f64,
    pub area_exact: bool,
}

/// Result of [`adversarial_min_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessResult {
    pub min_hits: usize,
    pub witness: Rotation,
    pub evaluated: u64,
}

impl PlacementProblem {
    pub fn new(region: Region, points: PointSet) -> Self {
        Self {
            region,
            points,
            area_hint: None,
        }
    }

    pub fn with_area_hint(mut self, area: f64) -> Self {
        self.area_hint = Some(area);
        self
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// `area_hint`, else the region's closed-form area if it has one.
    pub fn exact_area(&self) -> Option<f64> {
        self.area_hint.or_else(|| self.region.exact_area().ok())
    }

    /// Number of points of `x(X)` inside the region.
    #[inline]
    pub fn hit_count(&self, x: &Rotation) -> usize {
        self.points
            .points()
            .iter()
            .filter(|a| self.region.contains(&x.apply(a)))
            .count()
    }

    /// `max(0, n·A − (n − 1))` clamped to `[0, 1]`.
    pub fn lower_bound_for_area(&self, area: f64) -> f64 {
        let n = self.n() as f64;
        (n * area - (n - 1.0)).clamp(0.0, 1.0)
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "averaged estimators need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    Ok(())
}

/// Per-worker `(Σ f, Σ f², #{f = n})` over Haar rotations.
fn haar_moments(problem: &PlacementProblem, samples: u64, mc: McConfig) -> (f64, f64, u64) {
    let n = problem.n();
    mc.shares(samples)
        .par_iter()
        .enumerate()
        .map(|(w, &count)| {
            let mut s = HaarStream::worker(mc.seed, w as u32);
            let mut acc = (0.0, 0.0, 0u64);
            for _ in 0..count {
                let h = problem.hit_count(&s.sample());
                acc.0 += h as f64;
                acc.1 += (h * h) as f64;
                acc.2 += u64::from(h == n);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

/// Mean hit count over Haar rotations; converges to `n·A(M)`.
pub fn expected_count(problem: &PlacementProblem, samples: u64, mc: McConfig) -> Result<Estimate> {
    check_samples(samples)?;
    let (sum, sum_sq, _) = haar_moments(problem, samples, mc);
    Ok(Estimate::from_moments(sum, sum_sq, samples))
}

/// Haar measure of `{x : x(X) ⊂ M}` with the bound `n·A(M) − (n − 1)`.
///
/// The bound uses the exact area when known. Otherwise it uses a Monte Carlo
/// area from an independent stream, lowered by four standard errors.
pub fn good_rotation_measure(problem: &PlacementProblem, samples: u64, mc: McConfig) -> Result<GoodMeasure> {
    check_samples(samples)?;
    let (_, _, full) = haar_moments(problem, samples, mc);
    let estimate = Estimate::binomial(full, samples);
    let (area, area_exact) = match problem.exact_area() {
        Some(a) => (a, true),
        None => {
            let e = monte_carlo_fraction(samples, mc, Purpose::AreaBound, |p| problem.region.contains(p));
            ((e.value - 4.0 * e.stderr).max(0.0), false)
        }
    };
    Ok(GoodMeasure {
        estimate,
        lower_bound: problem.lower_bound_for_area(area),
        area,
        area_exact,
    })
}

/// Searches for `x` with `x(X) ⊂ M`.
///
/// Global sample `g` comes from worker `g mod W` (its `g div W`-th draw), so
/// the first success in global order does not depend on thread timing.
/// With `refine`, an unsuccessful run continues from the best rotation seen
/// (most hits, earliest wins) with random perturbations of angle π/4, π/8,
/// … down to [`MIN_PERTURBATION`], keeping strict improvements. Those
/// evaluations come on top of `budget` and are included in `samples_used`.
pub fn find_placement(problem: &PlacementProblem, budget: u64, mc: McConfig, refine: bool) -> Result<PlacementResult> {
    if budget == 0 {
        return Err(Error::InvalidParameter("placement budget must be ≥ 1".into()));
    }
    let n = problem.n();
    let workers = mc.streams as usize;
    let lower_bound = problem.exact_area().map_or(0.0, |a| problem.lower_bound_for_area(a));
    let mut streams: Vec<HaarStream> = (0..workers).map(|w| HaarStream::worker(mc.seed, w as u32)).collect();

    let mut best: Option<(usize, Rotation)> = None;
    let mut done: u64 = 0;
    while done < budget {
        let round: Vec<Vec<(Rotation, usize)>> = streams
            .par_iter_mut()
            .map(|s| {
                (0..BATCH)
                    .map(|_| {
                        let x = s.sample();
                        (x, problem.hit_count(&x))
                    })
                    .collect()
            })
            .collect();
        // Interleave back into global order.
        for k in 0..BATCH {
            for batch in &round {
                if done == budget {
                    break;
                }
                let (x, h) = batch[k];
                done += 1;
                if h == n {
                    return Ok(PlacementResult {
                        status: PlacementStatus::Found,
                        rotation: Some(x),
                        samples_used: done,
                        best_hits: n,
                        good_measure: None,
                        lower_bound,
                    });
                }
                if best.map_or(true, |(b, _)| h > b) {
                    best = Some((h, x));
                }
            }
        }
    }

    let (mut best_hits, mut current) = best.expect("budget ≥ 1 evaluates a sample");
    if refine {
        let mut rng = purpose_rng(mc.seed, Purpose::Refine, 0);
        let mut angle = FRAC_PI_4;
        while angle >= MIN_PERTURBATION {
            for _ in 0..PERTURBATIONS_PER_ANGLE {
                let axis = sample_sphere_point(&mut rng);
                let candidate = Rotation::from_axis_angle(&axis, angle).compose(&current);
                let h = problem.hit_count(&candidate);
                done += 1;
                if h > best_hits {
                    best_hits = h;
                    current = candidate;
                    if h == n {
                        return Ok(PlacementResult {
                            status: PlacementStatus::Found,
                            rotation: Some(current),
                            samples_used: done,
                            best_hits,
                            good_measure: None,
                            lower_bound,
                        });
                    }
                }
            }
            angle /= 2.0;
        }
    }
    Ok(PlacementResult {
        status: PlacementStatus::NotFound,
        rotation: None,
        samples_used: done,
        best_hits,
        good_measure: None,
        lower_bound,
    })
}

/// Estimates `min_x #{a ∈ X : x(a) ∈ obstruction}` over a random net of
/// `net_size` Haar rotations followed by perturbation descent from the best
/// net point (`refine_steps` perturbations per angle, π/4 down to
/// [`MIN_PERTURBATION`]). A minimum of at least one suggests that no rotation
/// moves `X` into the complement of the obstruction; it is not a proof.
pub fn adversarial_min_search(
    obstruction: &Region,
    points: &PointSet,
    net_size: u64,
    refine_steps: usize,
    mc: McConfig,
) -> Result<SharpnessResult> {
    if net_size == 0 {
        return Err(Error::InvalidParameter("net size must be ≥ 1".into()));
    }
    let problem = PlacementProblem::new(obstruction.clone(), points.clone());
    let best = mc
        .shares(net_size)
        .par_iter()
        .enumerate()
        .map(|(w, &count)| {
            let mut s = HaarStream::new(mc.seed, crate::stream::stream_index(Purpose::Net, w as u32));
            let mut best: Option<(usize, u64, Rotation)> = None;
            for i in 0..count {
                let x = s.sample();
                let h = problem.hit_count(&x);
                // Global order: worker w, draw i ↦ i·W + w.
                let g = i * mc.streams as u64 + w as u64;
                if best.map_or(true, |(b, _, _)| h < b) {
                    best = Some((h, g, x));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .min_by_key(|&(h, g, _)| (h, g))
        .expect("net is non-empty");

    let (mut min_hits, _, mut witness) = best;
    let mut evaluated = net_size;
    let mut rng = purpose_rng(mc.seed, Purpose::Refine, 1);
    let mut angle = FRAC_PI_4;
    while angle >= MIN_PERTURBATION && min_hits > 0 {
        for _ in 0..refine_steps {
            let axis = sample_sphere_point(&mut rng);
            let candidate = Rotation::from_axis_angle(&axis, angle).compose(&witness);
            let h = problem.hit_count(&candidate);
            evaluated += 1;
            if h < min_hits {
                min_hits = h;
                witness = candidate;
            }
        }
        angle /= 2.0;
    }
    Ok(SharpnessResult {
        min_hits,
        witness,
        evaluated,
    })
}
