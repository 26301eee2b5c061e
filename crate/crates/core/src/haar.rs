//! Haar-uniform random rotations.
//!
//! Rotations come from uniformly distributed unit quaternions (Shoemake's
//! construction). Uniformity is checked empirically by [`invariance_test`],
//! which compares where fixed base points land against a probe region's
//! area.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::sphere::{Estimate, Region, Rotation, UnitVector};
use crate::stream::{purpose_rng, stream_rng, McConfig, Purpose};

/// Significance level used by [`invariance_test`].
pub const INVARIANCE_LEVEL: f64 = 0.001;

/// Anything that produces random rotations.
pub trait RotationSampler {
    fn sample(&mut self) -> Rotation;
}

/// A reproducible stream of Haar-distributed rotations keyed by
/// `(seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct HaarStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl HaarStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self {
            seed,
            stream_index,
            rng: stream_rng(seed, stream_index),
        }
    }

    /// The stream used by worker `worker` of a Monte Carlo run.
    pub fn worker(seed: u64, worker: u32) -> Self {
        let rng = purpose_rng(seed, Purpose::Haar, worker);
        Self {
            seed,
            stream_index: crate::stream::stream_index(Purpose::Haar, worker),
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RotationSampler for HaarStream {
    fn sample(&mut self) -> Rotation {
        sample_haar_with(&mut self.rng)
    }
}

/// Next Haar rotation of `stream`.
pub fn sample_haar(stream: &mut HaarStream) -> Rotation {
    stream.sample()
}

/// Haar rotation from an arbitrary generator.
pub fn sample_haar_with<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    let (s2, c2) = (TAU * u2).sin_cos();
    let (s3, c3) = (TAU * u3).sin_cos();
    Rotation::from_quaternion(b * c3, a * s2, a * c2, b * s3)
}

/// `x ↦ left ∘ x ∘ right` applied to another sampler.
#[derive(Debug, Clone)]
pub struct Composed<S> {
    pub inner: S,
    pub left: Rotation,
    pub right: Rotation,
}

impl<S: RotationSampler> RotationSampler for Composed<S> {
    fn sample(&mut self) -> Rotation {
        self.left.compose(&self.inner.sample()).compose(&self.right)
    }
}

/// Outcome of [`invariance_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub hits: Vec<u64>,
    pub trials: u64,
    /// Probe area used as the expected hit rate; `None` when the test fell
    /// back to comparing base points against each other.
    pub expected_rate: Option<f64>,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub passed: bool,
}

/// Chi-square test that `x(a) ∈ probe` has the same rate for every base
/// point `a`, and that the rate equals the probe's area when it is known
/// exactly. Every trial draws a fresh rotation.
///
/// With an exact area the statistic has `k` degrees of freedom (one per base
/// point); otherwise it is a `k × 2` homogeneity test with `k − 1`.
pub fn invariance_test<S: RotationSampler>(
    sampler: &mut S,
    probe: &Region,
    base_points: &[UnitVector],
    trials: u64,
) -> Result<InvarianceReport> {
    if base_points.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter(
            "invariance test needs base points and trials".into(),
        ));
    }
    let expected = probe.exact_area().ok();
    if let Some(p) = expected {
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::DegenerateProbe(p));
        }
    }
    let hits: Vec<u64> = base_points
        .iter()
        .map(|a| {
            (0..trials)
                .filter(|_| probe.contains(&sampler.sample().apply(a)))
                .count() as u64
        })
        .collect();

    let t = trials as f64;
    let k = base_points.len();
    let (rate, dof) = match expected {
        Some(p) => (p, k),
        None => {
            let pooled = hits.iter().sum::<u64>() as f64 / (t * k as f64);
            if pooled <= 0.0 || pooled >= 1.0 || k < 2 {
                return Err(Error::DegenerateProbe(pooled));
            }
            (pooled, k - 1)
        }
    };
    let var = t * rate * (1.0 - rate);
    let statistic: f64 = hits
        .iter()
        .map(|&h| {
            let d = h as f64 - t * rate;
            d * d / var
        })
        .sum();
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        chi.sf(statistic)
    };
    Ok(InvarianceReport {
        hits,
        trials,
        expected_rate: expected,
        statistic,
        degrees_of_freedom: dof,
        p_value,
        passed: p_value >= INVARIANCE_LEVEL,
    })
}

/// Monte Carlo estimate of `∫ Φ_A(x(a)) dμ(x)` over Haar rotations `x`.
pub fn base_point_integral(region: &Region, a: &UnitVector, samples: u64, mc: McConfig) -> Estimate {
    let shares = mc.shares(samples);
    let hits: u64 = shares
        .par_iter()
        .enumerate()
        .map(|(w, &n)| {
            let mut s = HaarStream::worker(mc.seed, w as u32);
            (0..n).filter(|_| region.contains(&s.sample().apply(a))).count() as u64
        })
        .sum();
    Estimate::binomial(hits, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{Boundary, Hemisphere};

    #[test]
    fn samples_are_rotations() {
        let mut s = HaarStream::new(3, 0);
        for _ in 0..1000 {
            let r = s.sample();
            assert!(r.orthonormality_error() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn streams_reproduce() {
        let mut a = HaarStream::new(9, 2);
        let mut b = HaarStream::new(9, 2);
        for _ in 0..10 {
            assert_eq!(a.sample(), b.sample());
        }
        assert_ne!(HaarStream::new(9, 3).sample(), HaarStream::new(9, 2).sample());
    }

    #[test]
    fn degenerate_probe_rejected() {
        let mut s = HaarStream::new(1, 0);
        assert!(matches!(
            invariance_test(&mut s, &Region::Full, &[UnitVector::Z], 10),
            Err(Error::DegenerateProbe(_))
        ));
        assert!(matches!(
            invariance_test(&mut s, &Region::Empty, &[UnitVector::Z], 10),
            Err(Error::DegenerateProbe(_))
        ));
    }

    #[test]
    fn hemisphere_probe_passes() {
        let mut s = HaarStream::new(17, 0);
        let probe = Region::Hemisphere(Hemisphere::new(UnitVector::Z, Boundary::Open));
        let pts = [UnitVector::Z, UnitVector::X, -UnitVector::Y];
        let rep = invariance_test(&mut s, &probe, &pts, 20_000).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.degrees_of_freedom, 3);
    }

    #[test]
    fn pushforward_hemisphere_rate() {
        let probe = Region::Hemisphere(Hemisphere::new(UnitVector::Z, Boundary::Open));
        let e = base_point_integral(&probe, &UnitVector::Z, 1_000_000, McConfig::new(5, 4));
        assert!((e.value - 0.5).abs() <= 4.0 * e.stderr, "{e:?}");
    }
}
