//! Halving rounds and the final covering round.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::{build_cap_cover, CapCover};
use super::index::CapIndex;
use super::lattice::{count_covering_squares, count_inner_squares, LatticeGrid, LatticeSquare};
use super::lift::{cap_rotation, lift_square_to_cap, RadiusRule};
use super::matching::{match_squares, SquareRef};
use super::pieces::{Membership, Remaining};
use super::plan::TransportPair;
use crate::error::{Error, Result};
use crate::sphere::{monte_carlo_fraction, Estimate, Region, SphericalCap};
use crate::stream::{McConfig, Purpose};

/// Factor applied to the cover radius on each retry.
pub const THETA_SHRINK: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportConfig {
    /// Initial cover cap radius. Must satisfy `sin θ + √2·ε < 1/√2` so the
    /// final-round caps fit their squares.
    pub theta: f64,
    /// Initial lattice side.
    pub epsilon: f64,
    /// Halving rounds allowed before the stop rule must hold.
    pub max_rounds: usize,
    /// Retries per round, each halving `ε`.
    pub max_retries: usize,
    /// Monte Carlo samples for every area estimate.
    pub area_samples: u64,
    /// Lattice squares one attempt may enumerate.
    pub max_squares: u64,
    /// Largest fraction of `Â(M')` the final round may leave uncovered.
    pub residual_fraction: f64,
    pub mc: McConfig,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            epsilon: 0.02,
            max_rounds: 12,
            max_retries: 6,
            area_samples: 200_000,
            max_squares: 60_000_000,
            residual_fraction: 2e-4,
            mc: McConfig::default(),
        }
    }
}

impl TransportConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidParameter(what));
        if !(self.theta > 0.0 && self.epsilon > 0.0) {
            return bad(format!("θ = {} and ε = {} must be positive", self.theta, self.epsilon));
        }
        if self.theta.sin() + SQRT_2 * self.epsilon >= FRAC_1_SQRT_2 {
            return bad(format!(
                "sin θ + √2·ε must stay below 1/√2 (θ = {}, ε = {})",
                self.theta, self.epsilon
            ));
        }
        if self.area_samples == 0 {
            return bad("area estimates need samples".into());
        }
        if !(self.residual_fraction >= 0.0) {
            return bad("residual fraction must be non-negative".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Halving,
    Final,
}

/// What a round did, with areas before and after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundDiagnostics {
    pub round: usize,
    pub kind: RoundKind,
    pub epsilon: f64,
    pub theta: f64,
    pub cover_caps: usize,
    pub retries: usize,
    /// Source squares found on the `M'` side.
    pub sources: usize,
    /// Target squares accepted on the `M` side.
    pub targets: usize,
    pub pairs: usize,
    pub area_before: Estimate,
    pub area_prime_before: Estimate,
    pub area_after: Estimate,
    pub area_prime_after: Estimate,
}

/// The two shrinking regions `S_t ⊂ M` and `S_t' ⊂ M'`.
#[derive(Debug, Clone)]
pub struct HalvingState {
    round: usize,
    s: Remaining,
    s_prime: Remaining,
    area: Estimate,
    area_prime: Estimate,
    initial_area: Estimate,
    initial_area_prime: Estimate,
    area_samples: u64,
    mc: McConfig,
}

impl HalvingState {
    /// Areas are always estimated from the same sample points, so
    /// successive estimates differ only through the removed caps.
    pub fn new(m: Region, m_prime: Region, cfg: &TransportConfig) -> Self {
        let mut state = Self {
            round: 0,
            s: Remaining::new(m),
            s_prime: Remaining::new(m_prime),
            area: Estimate::exact(0.0),
            area_prime: Estimate::exact(0.0),
            initial_area: Estimate::exact(0.0),
            initial_area_prime: Estimate::exact(0.0),
            area_samples: cfg.area_samples,
            mc: cfg.mc,
        };
        state.area = state.measure(&state.s);
        state.area_prime = state.measure(&state.s_prime);
        state.initial_area = state.area;
        state.initial_area_prime = state.area_prime;
        state
    }

    fn measure(&self, side: &Remaining) -> Estimate {
        monte_carlo_fraction(self.area_samples, self.mc, Purpose::Transport, |p| side.contains(p))
    }

    /// Completed halving rounds.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn s(&self) -> &Remaining {
        &self.s
    }

    pub fn s_prime(&self) -> &Remaining {
        &self.s_prime
    }

    pub fn area(&self) -> Estimate {
        self.area
    }

    pub fn area_prime(&self) -> Estimate {
        self.area_prime
    }

    pub fn initial_area(&self) -> Estimate {
        self.initial_area
    }

    pub fn initial_area_prime(&self) -> Estimate {
        self.initial_area_prime
    }

    /// `Â(S_t) > 4·Â(S_t')`.
    pub fn stop_rule_holds(&self) -> bool {
        self.area.value > 4.0 * self.area_prime.value
    }
}

/// Result of one round.
#[derive(Debug, Clone)]
pub struct RoundOutcome {
    pub diagnostics: RoundDiagnostics,
    pub pairs: Vec<TransportPair>,
    /// Unmatched target cap, reserved by the final round.
    pub witness: Option<SphericalCap>,
}

/// Lattice squares of every frame whose lifted sample points lie in the
/// frame's piece of `side`, in `(frame, i, j)` order.
fn scan_side(side: &Remaining, cover: &CapCover, epsilon: f64, covering: bool) -> Result<Vec<(SquareRef, LatticeSquare)>> {
    let bound = cover.theta().sin();
    let per_frame: Vec<Vec<(SquareRef, LatticeSquare)>> = (0..cover.len())
        .into_par_iter()
        .map(|f| {
            let frame = cover.frame(f);
            let piece = |q: [f64; 2]| {
                q[0] * q[0] + q[1] * q[1] < 1.0 && {
                    let p = frame.lift_unchecked(q);
                    cover.owned_by(f, &p) && side.contains(&p)
                }
            };
            let found = if covering {
                count_covering_squares(&piece, epsilon, bound)?
            } else {
                count_inner_squares(&piece, epsilon, bound)?
            };
            Ok(found
                .squares
                .into_iter()
                .map(|s| (SquareRef { frame: f, i: s.i, j: s.j }, s))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_frame.concat())
}

fn lift_all(squares: &[(SquareRef, LatticeSquare)], cover: &CapCover, rule: RadiusRule) -> Result<Vec<SphericalCap>> {
    squares
        .par_iter()
        .map(|(r, s)| lift_square_to_cap(s, cover.frame(r.frame), rule))
        .collect()
}

/// Keeps the caps strictly separated from every removed cap and from every
/// cap kept before them.
fn separate(removed: &CapIndex, squares: Vec<(SquareRef, LatticeSquare)>, caps: Vec<SphericalCap>) -> (Vec<SquareRef>, Vec<SphericalCap>) {
    let clear: Vec<bool> = caps.par_iter().map(|c| removed.is_disjoint_from_all(c)).collect();
    let mut kept = CapIndex::new();
    let mut refs = Vec::new();
    for ((sq, cap), ok) in squares.into_iter().zip(caps).zip(clear) {
        if ok && kept.is_disjoint_from_all(&cap) {
            kept.insert(cap);
            refs.push(sq.0);
        }
    }
    let caps = kept.caps().to_vec();
    (refs, caps)
}

fn work(cover: &CapCover, epsilon: f64) -> Result<u64> {
    Ok(cover.len() as u64 * LatticeGrid::new(epsilon, cover.theta().sin())?.square_count())
}

fn budget_error(round: usize, retries: usize, squares: u64, cfg: &TransportConfig) -> Error {
    Error::RoundFailed {
        round,
        retries,
        reason: format!(
            "attempt needs {squares} lattice squares, above the budget of {}",
            cfg.max_squares
        ),
    }
}

struct Attempt {
    sources: usize,
    targets: usize,
    /// `(U, D)`: cap removed from `S_t` and cap removed from `S_t'`.
    caps: Vec<(SphericalCap, SphericalCap)>,
    witness: Option<SphericalCap>,
}

fn halving_attempt(state: &HalvingState, cover: &CapCover, epsilon: f64) -> Result<Attempt> {
    let src = scan_side(&state.s_prime, cover, epsilon, false)?;
    let tgt = scan_side(&state.s, cover, epsilon, false)?;
    let tgt_caps = lift_all(&tgt, cover, RadiusRule::HalfEps)?;
    let (tgt_refs, tgt_caps) = separate(state.s.removed(), tgt, tgt_caps);
    // Without capacity for every source, transport what fits and let the
    // removed-mass check decide.
    let src = &src[..src.len().min(tgt_refs.len())];
    let src_refs: Vec<SquareRef> = src.iter().map(|s| s.0).collect();
    let matching = match_squares(&src_refs, &tgt_refs)?;
    let src_caps = lift_all(src, cover, RadiusRule::HalfEps)?;
    Ok(Attempt {
        sources: src_refs.len(),
        targets: tgt_refs.len(),
        caps: matching.pairs.iter().map(|&(s, t)| (tgt_caps[t], src_caps[s])).collect(),
        witness: None,
    })
}

fn final_attempt(state: &HalvingState, cover: &CapCover, epsilon: f64) -> Result<Attempt> {
    let reach = cover.theta().sin() + SQRT_2 * epsilon;
    let m = (1.0 - reach * reach).sqrt();
    let rule = RadiusRule::Custom(epsilon / (SQRT_2 * m));
    let src = scan_side(&state.s_prime, cover, epsilon, true)?;
    let tgt = scan_side(&state.s, cover, 2.0 * epsilon, false)?;
    let tgt_caps = lift_all(&tgt, cover, rule)?;
    let (tgt_refs, tgt_caps) = separate(state.s.removed(), tgt, tgt_caps);
    if tgt_refs.len() < src.len() + 1 {
        return Err(Error::Capacity {
            sources: src.len() + 1,
            targets: tgt_refs.len(),
        });
    }
    let src_refs: Vec<SquareRef> = src.iter().map(|s| s.0).collect();
    let matching = match_squares(&src_refs, &tgt_refs)?;
    let src_caps = lift_all(&src, cover, rule)?;
    Ok(Attempt {
        sources: src_refs.len(),
        targets: tgt_refs.len(),
        caps: matching.pairs.iter().map(|&(s, t)| (tgt_caps[t], src_caps[s])).collect(),
        witness: Some(tgt_caps[matching.unused_targets[0]]),
    })
}

fn pairs_of(caps: &[(SphericalCap, SphericalCap)]) -> Result<Vec<TransportPair>> {
    caps.iter()
        .map(|(u, d)| {
            Ok(TransportPair {
                cap: *u,
                rotation: cap_rotation(u, d)?,
            })
        })
        .collect()
}

fn with_removed(side: &Remaining, caps: impl Iterator<Item = SphericalCap>) -> Remaining {
    let mut next = side.clone();
    for c in caps {
        next.removed_mut().insert(c);
    }
    next
}

/// One halving round: match inner `ε`-squares of the pieces of `S_t'` to
/// inner `ε`-squares of the pieces of `S_t`, cut caps of ball radius `ε/2`
/// around their lifted centers and remove them from both sides.
///
/// The round is accepted once it removes at least half of `Â(S_t')`. Each
/// failed attempt halves `ε` and shrinks the cover (replacing `cover`),
/// up to `cfg.max_retries` times. An empty `S_t'` gives a no-op round.
pub fn transport_round(
    state: &mut HalvingState,
    cover: &mut CapCover,
    epsilon: f64,
    cfg: &TransportConfig,
) -> Result<RoundOutcome> {
    let round = state.round + 1;
    let before = (state.area, state.area_prime);
    let mut diagnostics = RoundDiagnostics {
        round,
        kind: RoundKind::Halving,
        epsilon,
        theta: cover.theta(),
        cover_caps: cover.len(),
        retries: 0,
        sources: 0,
        targets: 0,
        pairs: 0,
        area_before: before.0,
        area_prime_before: before.1,
        area_after: before.0,
        area_prime_after: before.1,
    };
    if before.1.value == 0.0 {
        return Ok(RoundOutcome {
            diagnostics,
            pairs: Vec::new(),
            witness: None,
        });
    }
    let mut eps = epsilon;
    let mut last_reason = String::new();
    for retry in 0..=cfg.max_retries {
        if retry > 0 {
            eps /= 2.0;
            *cover = build_cap_cover(cover.theta() * THETA_SHRINK, cfg.mc)?;
        }
        let squares = 2 * work(cover, eps)?;
        if squares > cfg.max_squares {
            return Err(budget_error(round, retry, squares, cfg));
        }
        let attempt = halving_attempt(state, cover, eps)?;
        let s_prime = with_removed(&state.s_prime, attempt.caps.iter().map(|c| c.1));
        let after_prime = state.measure(&s_prime);
        let removed = before.1.value - after_prime.value;
        if removed >= before.1.value / 2.0 {
            let s = with_removed(&state.s, attempt.caps.iter().map(|c| c.0));
            state.area = state.measure(&s);
            state.area_prime = after_prime;
            state.s = s;
            state.s_prime = s_prime;
            state.round = round;
            diagnostics = RoundDiagnostics {
                epsilon: eps,
                theta: cover.theta(),
                cover_caps: cover.len(),
                retries: retry,
                sources: attempt.sources,
                targets: attempt.targets,
                pairs: attempt.caps.len(),
                area_after: state.area,
                area_prime_after: state.area_prime,
                ..diagnostics
            };
            return Ok(RoundOutcome {
                diagnostics,
                pairs: pairs_of(&attempt.caps)?,
                witness: None,
            });
        }
        last_reason = format!(
            "removed {removed:.6} of {:.6} with ε = {eps} ({} pairs)",
            before.1.value,
            attempt.caps.len()
        );
    }
    Err(Error::RoundFailed {
        round,
        retries: cfg.max_retries,
        reason: last_reason,
    })
}

/// The last round: every covering `ε`-square of the pieces of `S_t'` is
/// sent to its own inner `2ε`-square of the pieces of `S_t`, with caps of
/// ball radius `ε/(√2·m)` on both sides, where `m = cos θ'` and
/// `sin θ' = sin θ + √2·ε` bounds the polar angle of every point of a
/// square. Such a cap covers the lift of its `ε`-square and fits inside the
/// lift of its `2ε`-square. One extra target is kept back as the witness.
///
/// Retries with `ε/2` on a capacity shortfall or when more than
/// `cfg.residual_fraction` of `Â(M')` stays uncovered.
pub fn final_round(
    state: &mut HalvingState,
    cover: &CapCover,
    epsilon: f64,
    cfg: &TransportConfig,
) -> Result<RoundOutcome> {
    let round = state.round + 1;
    let before = (state.area, state.area_prime);
    let tolerance = cfg.residual_fraction * state.initial_area_prime.value;
    let mut eps = epsilon;
    let mut last_reason = String::new();
    for retry in 0..=cfg.max_retries {
        if retry > 0 {
            eps /= 2.0;
        }
        let squares = work(cover, eps)? + work(cover, 2.0 * eps)?;
        if squares > cfg.max_squares {
            return Err(budget_error(round, retry, squares, cfg));
        }
        let attempt = match final_attempt(state, cover, eps) {
            Ok(a) => a,
            Err(Error::Capacity { sources, targets }) => {
                last_reason = format!("{sources} caps needed but {targets} targets with ε = {eps}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let s_prime = with_removed(&state.s_prime, attempt.caps.iter().map(|c| c.1));
        let after_prime = state.measure(&s_prime);
        if after_prime.value > tolerance {
            last_reason = format!("residual area {:.3e} above {tolerance:.3e} with ε = {eps}", after_prime.value);
            continue;
        }
        let mut s = with_removed(&state.s, attempt.caps.iter().map(|c| c.0));
        let witness = attempt.witness.expect("final attempts reserve a witness");
        s.removed_mut().insert(witness);
        state.area = state.measure(&s);
        state.area_prime = after_prime;
        state.s = s;
        state.s_prime = s_prime;
        let diagnostics = RoundDiagnostics {
            round,
            kind: RoundKind::Final,
            epsilon: eps,
            theta: cover.theta(),
            cover_caps: cover.len(),
            retries: retry,
            sources: attempt.sources,
            targets: attempt.targets,
            pairs: attempt.caps.len(),
            area_before: before.0,
            area_prime_before: before.1,
            area_after: state.area,
            area_prime_after: state.area_prime,
        };
        return Ok(RoundOutcome {
            diagnostics,
            pairs: pairs_of(&attempt.caps)?,
            witness: Some(witness),
        });
    }
    Err(Error::RoundFailed {
        round,
        retries: cfg.max_retries,
        reason: last_reason,
    })
}
