use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::UnitVector;
use crate::error::{Error, Result};

/// A finite set `{a_1, …, a_n}` of points on the sphere, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<UnitVector>", into = "Vec<UnitVector>")]
pub struct PointSet {
    points: Vec<UnitVector>,
}

impl PointSet {
    pub fn new(points: Vec<UnitVector>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("point set must contain at least one point".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Vertices of a regular tetrahedron; pairwise dot products are `−1/3`.
    pub fn tetrahedron() -> Self {
        let s = 1.0 / 3f64.sqrt();
        let pts = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
            .map(|[x, y, z]| UnitVector::raw(x * s, y * s, z * s));
        Self { points: pts.to_vec() }
    }

    /// `{+z, −z}`.
    pub fn antipodal_pair() -> Self {
        Self {
            points: vec![UnitVector::Z, -UnitVector::Z],
        }
    }

    /// `n` equally spaced points on the equator.
    pub fn ngon(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n-gon needs n ≥ 1".into()));
        }
        Ok(Self {
            points: (0..n)
                .map(|i| UnitVector::from_spherical(std::f64::consts::FRAC_PI_2, TAU * i as f64 / n as f64))
                .collect(),
        })
    }

    /// Named presets: `tetrahedron`, `antipodal-pair`, `n-gon` (uses `n`).
    pub fn preset(name: &str, n: Option<usize>) -> Result<Self> {
        match name {
            "tetrahedron" => Ok(Self::tetrahedron()),
            "antipodal-pair" => Ok(Self::antipodal_pair()),
            "n-gon" | "ngon" => Self::ngon(n.ok_or_else(|| Error::InvalidParameter("n-gon needs --n".into()))?),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

impl TryFrom<Vec<UnitVector>> for PointSet {
    type Error = Error;
    fn try_from(v: Vec<UnitVector>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PointSet> for Vec<UnitVector> {
    fn from(p: PointSet) -> Self {
        p.points
    }
}

/// See [`PointSet::preset`].
pub fn preset_pointset(name: &str, n: Option<usize>) -> Result<PointSet> {
    PointSet::preset(name, n)
}
