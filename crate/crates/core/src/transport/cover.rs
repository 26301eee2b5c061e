use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::frame::ProjectionFrame;
use super::index::CapIndex;
use crate::error::{Error, Result};
use crate::sphere::{sample_sphere_point, Boundary, SphericalCap, UnitVector};
use crate::stream::{purpose_rng, stream_rng, stream_index, McConfig, Purpose};

/// Uniform sphere points every cover must contain.
pub const COVER_CHECK_SAMPLES: u64 = 100_000;
const COVER_ATTEMPTS: usize = 12;
const SUBCAPS_PER_CAP: usize = 8;
const SUBCAP_SAMPLES: usize = 2_000;

/// Closed caps of a common angular radius `θ` whose union is the sphere,
/// together with their projection frames and the distortion constant `m`.
#[derive(Debug, Clone)]
pub struct CapCover {
    theta: f64,
    m: f64,
    frames: Vec<ProjectionFrame>,
    index: CapIndex,
    /// For cap `i`, the caps `j < i` that meet it.
    earlier: Vec<Vec<usize>>,
}

/// Fibonacci lattice of `n` points.
fn fibonacci(n: usize) -> Vec<UnitVector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * k as f64).sin_cos();
            UnitVector::renormalized([r * c, r * s, z])
        })
        .collect()
}

impl CapCover {
    /// Cover from explicit centers; coverage is not checked.
    pub fn from_centers(centers: &[UnitVector], theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI / 2.0) {
            return Err(Error::InvalidParameter(format!("cover radius {theta} outside (0, π/2)")));
        }
        let caps: Vec<SphericalCap> = centers
            .iter()
            .map(|&c| SphericalCap::new(c, theta, Boundary::Closed))
            .collect::<Result<_>>()?;
        let earlier = (0..caps.len())
            .into_par_iter()
            .map(|i| {
                (0..i)
                    .filter(|&j| caps[i].center().angle_to(&caps[j].center()) <= 2.0 * theta + 1e-12)
                    .collect()
            })
            .collect();
        Ok(Self {
            theta,
            m: theta.cos(),
            frames: caps.iter().enumerate().map(|(i, c)| ProjectionFrame::new(i, c.center())).collect(),
            index: CapIndex::from_caps(caps),
            earlier,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Distortion constant; `cos θ` unless overridden.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// The same cover with a different distortion constant in `(0, 1)`.
    pub fn with_distortion(mut self, m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidParameter(format!("distortion {m} outside (0, 1)")));
        }
        self.m = m;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn caps(&self) -> &[SphericalCap] {
        self.index.caps()
    }

    pub fn cap(&self, i: usize) -> &SphericalCap {
        self.index.get(i)
    }

    pub fn frames(&self) -> &[ProjectionFrame] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &ProjectionFrame {
        &self.frames[i]
    }

    /// Index of the first cap containing `p`.
    pub fn owner(&self, p: &UnitVector) -> Option<usize> {
        self.index.first_containing(p)
    }

    /// `p ∈ C_i ∖ (C_0 ∪ … ∪ C_{i−1})`.
    #[inline]
    pub fn owned_by(&self, i: usize, p: &UnitVector) -> bool {
        self.index.get(i).contains(p) && self.earlier[i].iter().all(|&j| !self.index.get(j).contains(p))
    }

    /// Whether every point of a sampled batch lies in some cap.
    pub fn covers_sample(&self, samples: u64, mc: McConfig) -> bool {
        mc.shares(samples).par_iter().enumerate().all(|(w, &n)| {
            let mut rng = purpose_rng(mc.seed, Purpose::Cover, w as u32);
            (0..n).all(|_| self.index.contains(&sample_sphere_point(&mut rng)))
        })
    }
}

/// Fibonacci cover by closed caps of angular radius `theta ∈ (0, π/2)`,
/// accepted once [`COVER_CHECK_SAMPLES`] uniform points are all covered.
/// Starts from `⌈6/θ²⌉` centers and grows by a quarter on each failure.
pub fn build_cap_cover(theta: f64, mc: McConfig) -> Result<CapCover> {
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(Error::InvalidParameter(format!("cover radius {theta} outside (0, π/2)")));
    }
    let mut n = (6.0 / (theta * theta)).ceil().max(2.0) as usize;
    for _ in 0..COVER_ATTEMPTS {
        let cover = CapCover::from_centers(&fibonacci(n), theta)?;
        if cover.covers_sample(COVER_CHECK_SAMPLES, mc) {
            return Ok(cover);
        }
        n = (n as f64 * 1.25).ceil() as usize;
    }
    Err(Error::CoverConstruction {
        theta,
        attempts: COVER_ATTEMPTS,
    })
}

/// First counterexample found by [`validate_distortion`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DistortionViolation {
    Chord {
        cap: usize,
        a: UnitVector,
        b: UnitVector,
        ratio: f64,
    },
    Area {
        cap: usize,
        subcap: SphericalCap,
        ratio: f64,
        stderr: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub passed: bool,
    pub m: f64,
    /// Smallest `|π(A)π(B)| / |AB|` seen over all pairs.
    pub min_chord_ratio: f64,
    pub pairs_checked: u64,
    pub violation: Option<DistortionViolation>,
}

/// Uniform point of the cap of angular radius `r` around `frame.center`.
pub(crate) fn sample_in_cap<R: Rng + ?Sized>(rng: &mut R, frame: &ProjectionFrame, r: f64) -> UnitVector {
    // 1 − z is uniform on [0, 1 − cos r].
    let s = (r / 2.0).sin();
    let w = rng.random::<f64>() * 2.0 * s * s;
    let rho = (w * (2.0 - w)).max(0.0).sqrt();
    let (sn, cs) = (TAU * rng.random::<f64>()).sin_cos();
    frame.lift_unchecked([rho * cs, rho * sn])
}

/// Samples `pair_samples` point pairs in every cap and checks
/// `|π(A)π(B)| > m·|AB|`; then checks `A(π(C)) ≥ m·A(C)` on a few random
/// sub-caps `C`, failing only on a shortfall larger than four standard
/// errors. The projected area is estimated as `A(C)·E[p·c]`, the Jacobian of
/// the projection being `p·c`.
///
/// Cap `i` draws from its own stream, so the outcome depends on `mc.seed`
/// only.
pub fn validate_distortion(cover: &CapCover, pair_samples: u64, mc: McConfig) -> DistortionReport {
    let m = cover.m();
    let theta = cover.theta();
    let per_cap: Vec<(f64, u64, Option<DistortionViolation>)> = (0..cover.len())
        .into_par_iter()
        .map(|i| {
            let frame = cover.frame(i);
            let mut rng = stream_rng(mc.seed, stream_index(Purpose::Distortion, i as u32));
            let mut min_ratio = f64::INFINITY;
            let mut checked = 0;
            let mut violation = None;
            for _ in 0..pair_samples {
                let a = sample_in_cap(&mut rng, frame, theta);
                let b = sample_in_cap(&mut rng, frame, theta);
                let ab = a.chord_to(&b);
                if ab == 0.0 {
                    continue;
                }
                let (qa, qb) = (frame.project(&a), frame.project(&b));
                let ratio = (qa[0] - qb[0]).hypot(qa[1] - qb[1]) / ab;
                checked += 1;
                min_ratio = min_ratio.min(ratio);
                if violation.is_none() && !(ratio > m) {
                    violation = Some(DistortionViolation::Chord { cap: i, a, b, ratio });
                }
            }
            if violation.is_none() {
                for _ in 0..SUBCAPS_PER_CAP {
                    let center = sample_in_cap(&mut rng, frame, theta);
                    let room = theta - center.angle_to(&frame.center);
                    let r = room * rng.random::<f64>();
                    if r <= 0.0 {
                        continue;
                    }
                    let sub_frame = ProjectionFrame::new(i, center);
                    let (mut sum, mut sum_sq) = (0.0, 0.0);
                    for _ in 0..SUBCAP_SAMPLES {
                        let h = sample_in_cap(&mut rng, &sub_frame, r).dot(&frame.center);
                        sum += h;
                        sum_sq += h * h;
                    }
                    let est = crate::sphere::Estimate::from_moments(sum, sum_sq, SUBCAP_SAMPLES as u64);
                    if est.value + 4.0 * est.stderr < m {
                        violation = Some(DistortionViolation::Area {
                            cap: i,
                            subcap: SphericalCap::new(center, r, crate::sphere::Boundary::Closed)
                                .expect("sub-cap radius is positive"),
                            ratio: est.value,
                            stderr: est.stderr,
                        });
                        break;
                    }
                }
            }
            (min_ratio, checked, violation)
        })
        .collect();
    let min_chord_ratio = per_cap.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let pairs_checked = per_cap.iter().map(|r| r.1).sum();
    let violation = per_cap.into_iter().find_map(|r| r.2);
    DistortionReport {
        passed: violation.is_none(),
        m,
        min_chord_ratio,
        pairs_checked,
        violation,
    }
}
