//! Rotation placement on the unit-area sphere.
//!
//! Any open set `M` of area greater than `(n − 1)/n` contains a rotated copy
//! of any `n`-point set. This crate makes that statement computable:
//!
//! * [`sphere`]: points, rotations, caps, lunes and a CSG region algebra with
//!   exact membership and exact or Monte Carlo areas.
//! * [`haar`]: Haar-uniform rotations with invariance diagnostics.
//! * [`placement`]: hit counts, averaged counts, good-rotation measure and
//!   randomized placement search.
//! * [`transport`]: the cap-transport construction moving one region's area
//!   into a larger one with disjoint caps and rotations.

pub mod error;
pub mod haar;
pub mod placement;
pub mod sphere;
pub mod stream;
pub mod transport;

pub use error::{Error, Result};
pub use haar::{HaarStream, RotationSampler};
pub use placement::{PlacementProblem, PlacementResult, PlacementStatus};
pub use sphere::{Boundary, Estimate, Lune, PointSet, Region, Rotation, SphericalCap, UnitVector};
pub use stream::McConfig;
pub use transport::{TransportPlan, TransportConfig};
