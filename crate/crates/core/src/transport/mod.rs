//! Moving area between regions with disjoint caps and rotations.
//!
//! Given `A(M) > A(M')`, the construction covers the sphere by small caps,
//! splits both regions into the pieces owned by each cap, projects the
//! pieces onto the caps' tangent planes and counts lattice squares there.
//! Squares of `M'` are matched injectively to squares of `M`; caps cut
//! around the lifted square centers are removed from both sides, and the
//! rotation between matched caps is recorded. Each halving round removes at
//! least half of what is left of `M'`. Once `Â(S_t) > 4·Â(S_t')` a final
//! round covers the rest of `M'` with slightly larger caps and keeps one
//! spare cap of `M` as a witness that `M` is not used up.

pub mod cover;
pub mod frame;
pub mod index;
pub mod lattice;
pub mod lift;
pub mod matching;
pub mod pieces;
pub mod plan;
pub mod round;

pub use cover::{build_cap_cover, validate_distortion, CapCover, DistortionReport, DistortionViolation};
pub use frame::ProjectionFrame;
pub use index::CapIndex;
pub use lattice::{count_covering_squares, count_inner_squares, LatticeGrid, LatticeSquare, PlanarPoint, PlanarRegion, SquareCount};
pub use lift::{cap_rotation, lift_square_to_cap, RadiusRule};
pub use matching::{match_squares, SquareMatching, SquareRef};
pub use pieces::{disjointify, Membership, PieceDecomposition, Remaining};
pub use plan::{build_transport_plan, validate_plan, PlanValidation, TransportPair, TransportPlan, COVERAGE_THRESHOLD};
pub use round::{final_round, transport_round, HalvingState, RoundDiagnostics, RoundKind, RoundOutcome, TransportConfig};
