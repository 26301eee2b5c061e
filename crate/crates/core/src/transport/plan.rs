use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::{build_cap_cover, sample_in_cap};
use super::frame::ProjectionFrame;
use super::index::CapIndex;
use super::round::{final_round, transport_round, HalvingState, RoundDiagnostics, TransportConfig};
use crate::error::{Error, Result};
use crate::sphere::{combined_stderr, sample_sphere_point, Boundary, Region, Rotation, SphericalCap, UnitVector};
use crate::stream::{purpose_rng, McConfig, Purpose};

/// Angular slack granted to image caps when checking coverage.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;
/// Coverage rate a plan must reach.
pub const COVERAGE_THRESHOLD: f64 = 0.999;
/// Sample points drawn inside the witness cap.
const WITNESS_SAMPLES: u64 = 1_000;

/// Cap as stored in plan files: center and angular radius, always closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct PlanCap {
    center: UnitVector,
    radius: f64,
}

impl From<SphericalCap> for PlanCap {
    fn from(c: SphericalCap) -> Self {
        Self {
            center: c.center(),
            radius: c.angular_radius(),
        }
    }
}

impl TryFrom<PlanCap> for SphericalCap {
    type Error = Error;
    fn try_from(c: PlanCap) -> Result<Self> {
        SphericalCap::new(c.center, c.radius, Boundary::Closed)
    }
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    #[serde(rename = "U")]
    u: PlanCap,
    rho: Rotation,
}

/// A cap `U ⊂ M` and the rotation carrying it into `M'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairRepr", into = "PairRepr")]
pub struct TransportPair {
    pub cap: SphericalCap,
    pub rotation: Rotation,
}

impl TryFrom<PairRepr> for TransportPair {
    type Error = Error;
    fn try_from(p: PairRepr) -> Result<Self> {
        Ok(Self {
            cap: p.u.try_into()?,
            rotation: p.rho,
        })
    }
}

impl From<TransportPair> for PairRepr {
    fn from(p: TransportPair) -> Self {
        Self {
            u: p.cap.into(),
            rho: p.rotation,
        }
    }
}

impl TransportPair {
    /// `ρ(U)`.
    pub fn image(&self) -> SphericalCap {
        self.cap.rotated(&self.rotation)
    }
}

#[derive(Serialize, Deserialize)]
struct PlanRepr {
    pairs: Vec<TransportPair>,
    witness: PlanCap,
    rounds: Vec<RoundDiagnostics>,
}

/// Disjoint caps `U_α ⊂ M` with rotations `ρ_α` whose images cover `M'`,
/// plus a cap of `M` left untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlanRepr", into = "PlanRepr")]
pub struct TransportPlan {
    pub pairs: Vec<TransportPair>,
    pub leftover_witness: SphericalCap,
    pub rounds: Vec<RoundDiagnostics>,
}

impl TryFrom<PlanRepr> for TransportPlan {
    type Error = Error;
    fn try_from(p: PlanRepr) -> Result<Self> {
        Ok(Self {
            pairs: p.pairs,
            leftover_witness: p.witness.try_into()?,
            rounds: p.rounds,
        })
    }
}

impl From<TransportPlan> for PlanRepr {
    fn from(p: TransportPlan) -> Self {
        Self {
            pairs: p.pairs,
            witness: p.leftover_witness.into(),
            rounds: p.rounds,
        }
    }
}

impl TransportPlan {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("plans serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn caps(&self) -> impl Iterator<Item = &SphericalCap> {
        self.pairs.iter().map(|p| &p.cap)
    }
}

/// Runs halving rounds until `Â(S_t) > 4·Â(S_t')`, then the final round.
/// Each halving round starts at half the side length the previous round
/// settled on.
pub fn build_transport_plan(m: &Region, m_prime: &Region, cfg: &TransportConfig) -> Result<TransportPlan> {
    cfg.validate()?;
    let mut state = HalvingState::new(m.clone(), m_prime.clone(), cfg);
    let (a, b) = (state.area(), state.area_prime());
    if !(a.value - b.value > 4.0 * combined_stderr(a.stderr, b.stderr)) {
        return Err(Error::TransportPrecondition(format!(
            "Â(M) = {:.6} does not exceed Â(M') = {:.6} by four standard errors",
            a.value, b.value
        )));
    }
    let mut cover = build_cap_cover(cfg.theta, cfg.mc)?;
    let mut epsilon = cfg.epsilon;
    let mut pairs = Vec::new();
    let mut rounds = Vec::new();
    while !state.stop_rule_holds() {
        if state.round() >= cfg.max_rounds {
            return Err(Error::RoundFailed {
                round: state.round() + 1,
                retries: 0,
                reason: format!("stop rule not reached within {} rounds", cfg.max_rounds),
            });
        }
        let outcome = transport_round(&mut state, &mut cover, epsilon, cfg).map_err(|e| with_history(e, &rounds))?;
        epsilon = outcome.diagnostics.epsilon / 2.0;
        pairs.extend(outcome.pairs);
        rounds.push(outcome.diagnostics);
    }
    let outcome = final_round(&mut state, &cover, epsilon, cfg).map_err(|e| with_history(e, &rounds))?;
    pairs.extend(outcome.pairs);
    rounds.push(outcome.diagnostics);
    Ok(TransportPlan {
        pairs,
        leftover_witness: outcome.witness.expect("final round reserves a witness"),
        rounds,
    })
}

/// Appends the `Â(S_t')` trajectory of the completed rounds to a round
/// failure.
fn with_history(e: Error, rounds: &[RoundDiagnostics]) -> Error {
    match e {
        Error::RoundFailed { round, retries, reason } if !rounds.is_empty() => {
            let trail: Vec<String> = rounds
                .iter()
                .map(|r| format!("{:.4} (ε = {}, {} pairs)", r.area_prime_after.value, r.epsilon, r.pairs))
                .collect();
            Error::RoundFailed {
                round,
                retries,
                reason: format!(
                    "{reason}; Â(S') after earlier rounds: {}, from {:.4}",
                    trail.join(", "),
                    rounds[0].area_prime_before.value
                ),
            }
        }
        e => e,
    }
}

/// Outcome of [`validate_plan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanValidation {
    /// Exact pairwise separation of the caps `U_α`.
    pub disjoint: bool,
    /// First overlapping pair in index order.
    pub offending_pair: Option<(usize, usize)>,
    /// Fraction of points sampled in the caps that lie in `M`.
    pub containment_rate: f64,
    pub containment_samples: u64,
    /// Fraction of uniform points of `M'` inside some `ρ_α(U_α)`.
    pub coverage_rate: f64,
    pub coverage_samples: u64,
    /// A few uncovered points of `M'`.
    pub uncovered: Vec<UnitVector>,
    /// The witness lies in `M` and is separated from every `U_α`.
    pub witness_ok: bool,
}

impl PlanValidation {
    pub fn passed(&self) -> bool {
        self.disjoint && self.containment_rate == 1.0 && self.coverage_rate >= COVERAGE_THRESHOLD && self.witness_ok
    }
}

fn first_overlap(index: &CapIndex) -> Option<(usize, usize)> {
    (0..index.len())
        .into_par_iter()
        .filter_map(|i| {
            index
                .overlapping(index.get(i))
                .into_iter()
                .find(|&j| j > i)
                .map(|j| (i, j))
        })
        .min()
}

fn uniform_in_cap<R: Rng + ?Sized>(rng: &mut R, cap: &SphericalCap) -> UnitVector {
    sample_in_cap(rng, &ProjectionFrame::new(0, cap.center()), cap.angular_radius())
}

/// Checks the three plan conditions.
///
/// Disjointness is exact. Containment draws `samples` points, each from a
/// cap chosen uniformly at random, and tests membership in `M`. Coverage
/// draws `samples` uniform points of `M'` by rejection (at most `100·samples`
/// attempts) and tests them against the images enlarged by
/// [`BOUNDARY_TOLERANCE`]. The witness must be separated from every cap and
/// have its center and [`WITNESS_SAMPLES`] sampled points in `M`.
pub fn validate_plan(plan: &TransportPlan, m: &Region, m_prime: &Region, samples: u64, mc: McConfig) -> PlanValidation {
    let caps = CapIndex::from_caps(plan.caps().copied());
    let offending_pair = first_overlap(&caps);

    let (containment_hits, containment_samples) = if plan.pairs.is_empty() {
        (0, 0)
    } else {
        mc.shares(samples)
            .par_iter()
            .enumerate()
            .map(|(w, &n)| {
                let mut rng = purpose_rng(mc.seed, Purpose::Validation, 2 * w as u32);
                let hits = (0..n)
                    .filter(|_| {
                        let cap = &plan.pairs[rng.random_range(0..plan.pairs.len())].cap;
                        m.contains(&uniform_in_cap(&mut rng, cap))
                    })
                    .count() as u64;
                (hits, n)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };

    let images = CapIndex::from_caps(plan.pairs.iter().map(|p| {
        let img = p.image();
        SphericalCap::new(img.center(), img.angular_radius() + BOUNDARY_TOLERANCE, Boundary::Closed)
            .expect("enlarged radius stays positive")
    }));
    let shares = mc.shares(samples);
    let coverage: Vec<(u64, u64, Vec<UnitVector>)> = shares
        .par_iter()
        .enumerate()
        .map(|(w, &n)| {
            let mut rng = purpose_rng(mc.seed, Purpose::Validation, 2 * w as u32 + 1);
            let (mut accepted, mut covered, mut misses) = (0, 0, Vec::new());
            let mut attempts = 0;
            while accepted < n && attempts < 100 * n {
                attempts += 1;
                let p = sample_sphere_point(&mut rng);
                if !m_prime.contains(&p) {
                    continue;
                }
                accepted += 1;
                if images.contains(&p) {
                    covered += 1;
                } else if misses.len() < 10 {
                    misses.push(p);
                }
            }
            (accepted, covered, misses)
        })
        .collect();
    let coverage_samples: u64 = coverage.iter().map(|c| c.0).sum();
    let covered: u64 = coverage.iter().map(|c| c.1).sum();
    let uncovered: Vec<UnitVector> = coverage.into_iter().flat_map(|c| c.2).take(10).collect();

    let witness = &plan.leftover_witness;
    let mut rng = purpose_rng(mc.seed, Purpose::Validation, u32::MAX);
    let witness_ok = caps.is_disjoint_from_all(witness)
        && m.contains(&witness.center())
        && (0..WITNESS_SAMPLES).all(|_| m.contains(&uniform_in_cap(&mut rng, witness)));

    PlanValidation {
        disjoint: offending_pair.is_none(),
        offending_pair,
        containment_rate: if containment_samples == 0 {
            1.0
        } else {
            containment_hits as f64 / containment_samples as f64
        },
        containment_samples,
        coverage_rate: if coverage_samples == 0 {
            1.0
        } else {
            covered as f64 / coverage_samples as f64
        },
        coverage_samples,
        uncovered,
        witness_ok,
    }
}
