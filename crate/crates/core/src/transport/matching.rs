use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice square tagged with the cover frame it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SquareRef {
    pub frame: usize,
    pub i: i64,
    pub j: i64,
}

/// Injective assignment of sources to targets, as index pairs into the
/// two input lists sorted by source index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SquareMatching {
    pub pairs: Vec<(usize, usize)>,
    /// Target indices left unassigned, in increasing order.
    pub unused_targets: Vec<usize>,
}

impl SquareMatching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Sources equal to some target are matched to it; the others take the
/// remaining targets in list order.
pub fn match_squares(sources: &[SquareRef], targets: &[SquareRef]) -> Result<SquareMatching> {
    if sources.len() > targets.len() {
        return Err(Error::Capacity {
            sources: sources.len(),
            targets: targets.len(),
        });
    }
    let position: FxHashMap<SquareRef, usize> = targets.iter().enumerate().map(|(k, &t)| (t, k)).collect();
    let mut used = vec![false; targets.len()];
    let mut assigned: Vec<Option<usize>> = vec![None; sources.len()];
    for (k, s) in sources.iter().enumerate() {
        if let Some(&t) = position.get(s) {
            if !used[t] {
                used[t] = true;
                assigned[k] = Some(t);
            }
        }
    }
    let mut free = (0..targets.len()).filter(|&t| !used[t]).collect::<Vec<_>>().into_iter();
    let pairs: Vec<(usize, usize)> = assigned
        .into_iter()
        .enumerate()
        .map(|(k, a)| (k, a.unwrap_or_else(|| free.next().expect("capacity checked above"))))
        .collect();
    let unused_targets = free.collect();
    Ok(SquareMatching { pairs, unused_targets })
}
