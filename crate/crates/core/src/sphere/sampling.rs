use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::UnitVector;

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }

    /// Hit fraction with binomial standard error `sqrt(p(1 − p)/n)`.
    pub fn binomial(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            value: p,
            stderr: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// Sample mean and standard error from a running sum and sum of squares.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            value: mean,
            stderr: (var / nf).sqrt(),
        }
    }

    /// `|self − other| ≤ k · sqrt(σ₁² + σ₂²)`.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * combined_stderr(self.stderr, other.stderr)
    }
}

pub fn combined_stderr(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Uniform point on the sphere: `z` uniform on `[−1, 1]`, azimuth uniform.
pub fn sample_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> UnitVector {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = TAU * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    UnitVector::raw(r * c, r * s, z)
}
