//! Minimal `(v, k, t)` trades assembled from defining sets, and a direct
//! subset-coverage verifier.
//!
//! A trade's two block collections arise from parity-selected unions: with
//! `m = t + 1` companion pairs and one (possibly empty) unpaired set, every
//! binary choice vector picks one set from each pair, and the vectors with an
//! even number of ones form one side while the odd ones form the other. Each
//! side has volume `2^t`, the smallest possible.

use crate::domain::{DefiningSets, Label};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TradeError {
    /// A defining-set property is violated (disjointness, cardinality,
    /// block-size sum, or ground-size floor).
    #[error("invalid trade spec: {0}")]
    InvalidSpec(String),
    /// A block fails the shape requirements of the verifier.
    #[error("malformed block: {0}")]
    MalformedBlock(String),
}

/// Defining sets for a general minimal-trade construction: `t_sub + 1`
/// companion pairs plus one unpaired set, all mutually disjoint, each pair
/// with equal nonempty cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeSpec {
    paired: Vec<(Vec<Label>, Vec<Label>)>,
    unpaired: Vec<Label>,
    v: u32,
    k: u32,
    t_sub: u32,
}

impl TradeSpec {
    pub fn new(
        paired: Vec<(Vec<Label>, Vec<Label>)>,
        unpaired: Vec<Label>,
    ) -> Result<Self, TradeError> {
        if paired.is_empty() {
            return Err(TradeError::InvalidSpec("need at least one pair".into()));
        }
        let mut paired: Vec<(Vec<Label>, Vec<Label>)> = paired
            .into_iter()
            .map(|(mut a, mut b)| {
                a.sort_unstable();
                b.sort_unstable();
                (a, b)
            })
            .collect();
        for (a, b) in paired.iter_mut() {
            if a.first() > b.first() {
                std::mem::swap(a, b);
            }
        }
        let mut unpaired = unpaired;
        unpaired.sort_unstable();
        let mut seen = std::collections::BTreeSet::new();
        let mut v = 0u32;
        for x in paired
            .iter()
            .flat_map(|(a, b)| a.iter().chain(b.iter()))
            .chain(unpaired.iter())
        {
            if *x < 1 {
                return Err(TradeError::InvalidSpec("labels are 1-based".into()));
            }
            if !seen.insert(*x) {
                return Err(TradeError::InvalidSpec(format!(
                    "element {x} appears in two defining sets"
                )));
            }
            v = v.max(*x);
        }
        for (idx, (a, b)) in paired.iter().enumerate() {
            if a.is_empty() || a.len() != b.len() {
                return Err(TradeError::InvalidSpec(format!(
                    "pair {idx} must have equal nonempty cardinalities ({} vs {})",
                    a.len(),
                    b.len()
                )));
            }
        }
        let k = paired.iter().map(|(a, _)| a.len()).sum::<usize>() + unpaired.len();
        let t_sub = paired.len() as u32 - 1;
        if v < k as u32 + t_sub + 1 {
            return Err(TradeError::InvalidSpec(format!(
                "ground size {v} below the minimal-trade floor k + t + 1 = {}",
                k as u32 + t_sub + 1
            )));
        }
        Ok(TradeSpec {
            paired,
            unpaired,
            v,
            k: k as u32,
            t_sub,
        })
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn t_sub(&self) -> u32 {
        self.t_sub
    }
}

/// A pair of disjoint block collections. Blocks are sorted ascending and each
/// side is sorted lexicographically, so equal trades compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub first: Vec<Vec<Label>>,
    pub second: Vec<Vec<Label>>,
}

impl Trade {
    /// Number of blocks per side.
    pub fn volume(&self) -> usize {
        self.first.len()
    }
}

/// All binary pair-choice vectors of length `m`, split into the even-weight
/// side and the odd-weight side (sizes `2^{m-1}` each), in lexicographic
/// order. A one in position `i` means "take `S_{2i}` instead of `S_{2i-1}`".
pub fn parity_selectors(m: usize) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    assert!(m >= 1);
    let mut even = Vec::with_capacity(1 << (m - 1));
    let mut odd = Vec::with_capacity(1 << (m - 1));
    for v in 0..(1u64 << m) {
        let vector: Vec<bool> = (0..m).map(|i| (v >> (m - 1 - i)) & 1 == 1).collect();
        if v.count_ones() % 2 == 0 {
            even.push(vector);
        } else {
            odd.push(vector);
        }
    }
    (even, odd)
}

/// Assembles the trade of a valid spec: each side is the set of unions
/// selected by one parity class, plus the unpaired set in every block.
pub fn build_trade(spec: &TradeSpec) -> Trade {
    let m = spec.paired.len();
    let (even, odd) = parity_selectors(m);
    let assemble = |vectors: &[Vec<bool>]| -> Vec<Vec<Label>> {
        let mut blocks: Vec<Vec<Label>> = vectors
            .iter()
            .map(|vector| {
                let mut block: Vec<Label> = Vec::with_capacity(spec.k as usize);
                for (choice, (left, right)) in vector.iter().zip(&spec.paired) {
                    block.extend_from_slice(if *choice { right } else { left });
                }
                block.extend_from_slice(&spec.unpaired);
                block.sort_unstable();
                block
            })
            .collect();
        blocks.sort_unstable();
        blocks
    };
    Trade {
        first: assemble(&even),
        second: assemble(&odd),
    }
}

/// The `(2tq, tq, t-1)` trade of a balanced partition, with empty unpaired
/// set: volume `2^{t-1}` per side and, thanks to balance, equal block sums.
pub fn trade_from_defining_sets(sets: &DefiningSets) -> Result<Trade, TradeError> {
    let spec = TradeSpec::new(sets.raw_pairs(), Vec::new())?;
    Ok(build_trade(&spec))
}

/// Outcome of [`verify_trade`]: either the trade property holds, or a
/// concrete violation is returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum TradeCheck {
    Valid,
    Invalid { violation: TradeViolation },
}

impl TradeCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, TradeCheck::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TradeViolation {
    /// The sides share a block.
    SharedBlock { block: Vec<Label> },
    /// The sides have different volumes.
    UnequalVolume { first: usize, second: usize },
    /// Some `t`-subset is covered unequally.
    UnequalCoverage {
        subset: Vec<Label>,
        first: usize,
        second: usize,
    },
}

/// Checks the trade property directly: disjoint sides of equal volume in
/// which every `t_sub`-subset of `[v]` is contained in the same number of
/// blocks on each side. Enumerates all `C(v, t_sub)` subsets.
pub fn verify_trade(trade: &Trade, v: u32, k: u32, t_sub: u32) -> Result<TradeCheck, TradeError> {
    if v > 64 {
        return Err(TradeError::MalformedBlock(format!(
            "ground size {v} exceeds the direct-enumeration envelope (64)"
        )));
    }
    let side_masks = |side: &[Vec<Label>]| -> Result<Vec<u64>, TradeError> {
        side.iter()
            .map(|block| {
                if block.len() != k as usize {
                    return Err(TradeError::MalformedBlock(format!(
                        "block {block:?} has {} elements, expected {k}",
                        block.len()
                    )));
                }
                let mut mask = 0u64;
                for &x in block {
                    if x < 1 || x > v {
                        return Err(TradeError::MalformedBlock(format!(
                            "block {block:?} contains {x}, outside 1..={v}"
                        )));
                    }
                    if mask & (1 << (x - 1)) != 0 {
                        return Err(TradeError::MalformedBlock(format!(
                            "block {block:?} repeats {x}"
                        )));
                    }
                    mask |= 1 << (x - 1);
                }
                Ok(mask)
            })
            .collect()
    };
    let first = side_masks(&trade.first)?;
    let second = side_masks(&trade.second)?;
    if first.len() != second.len() {
        return Ok(TradeCheck::Invalid {
            violation: TradeViolation::UnequalVolume {
                first: first.len(),
                second: second.len(),
            },
        });
    }
    for (mask, block) in first.iter().zip(&trade.first) {
        if second.contains(mask) {
            return Ok(TradeCheck::Invalid {
                violation: TradeViolation::SharedBlock {
                    block: block.clone(),
                },
            });
        }
    }
    let mut subset = Vec::with_capacity(t_sub as usize);
    let mut violation = None;
    check_subsets(v, t_sub, 1, 0, &mut subset, &first, &second, &mut violation);
    Ok(match violation {
        None => TradeCheck::Valid,
        Some(v) => TradeCheck::Invalid { violation: v },
    })
}

#[allow(clippy::too_many_arguments)]
fn check_subsets(
    v: u32,
    t_sub: u32,
    from: u32,
    mask: u64,
    subset: &mut Vec<Label>,
    first: &[u64],
    second: &[u64],
    violation: &mut Option<TradeViolation>,
) {
    if violation.is_some() {
        return;
    }
    if subset.len() == t_sub as usize {
        let c1 = first.iter().filter(|&&b| b & mask == mask).count();
        let c2 = second.iter().filter(|&&b| b & mask == mask).count();
        if c1 != c2 {
            *violation = Some(TradeViolation::UnequalCoverage {
                subset: subset.clone(),
                first: c1,
                second: c2,
            });
        }
        return;
    }
    let need = t_sub as usize - subset.len();
    for x in from..=v {
        if (v - x + 1) < need as u32 {
            break;
        }
        subset.push(x);
        check_subsets(
            v,
            t_sub,
            x + 1,
            mask | (1 << (x - 1)),
            subset,
            first,
            second,
            violation,
        );
        subset.pop();
    }
}

/// Per-side `max - min` block sum.
pub fn block_discrepancy(trade: &Trade) -> (u64, u64) {
    let side = |blocks: &[Vec<Label>]| -> u64 {
        let sums: Vec<u64> = blocks
            .iter()
            .map(|b| b.iter().map(|&x| x as u64).sum())
            .collect();
        match (sums.iter().max(), sums.iter().min()) {
            (Some(max), Some(min)) => max - min,
            _ => 0,
        }
    };
    (side(&trade.first), side(&trade.second))
}
