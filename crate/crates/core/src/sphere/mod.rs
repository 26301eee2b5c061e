//! Points, rotations, caps, lunes and region algebra on the unit sphere.
//! Areas are fractions of the whole sphere.

use serde::{Deserialize, Serialize};

mod cap;
mod lune;
mod pointset;
mod region;
mod region_json;
mod rotation;
mod sampling;
mod vector;

pub use cap::{cap_area, SphericalCap};
pub use lune::{lune_area, make_lune_partition, Lune, LuneBoundary};
pub use pointset::{preset_pointset, PointSet};
pub use region::{monte_carlo_fraction, region_area, AreaMode, Hemisphere, Region};
pub use rotation::{rotation_aligning, Rotation};
pub use sampling::{combined_stderr, sample_sphere_point, Estimate};
pub use vector::{UnitVector, MIN_NORM};

/// Whether a cap or hemisphere includes its bounding circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Closed,
}
