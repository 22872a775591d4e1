//! Core domain types: problem parameters, companion pairs, defining sets,
//! swap sets, and the canonical form shared by every other module.
//!
//! All types are immutable after construction. A [`DefiningSets`] value always
//! partitions `{1, …, 2tq}` into `t` balanced companion pairs in canonical
//! order; a [`PerturbedSets`] value keeps the partition property but drops the
//! balance requirement, so post-swap states can never masquerade as balanced
//! inputs.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A popularity label. Labels are 1-based everywhere: `1` is the most popular
/// rank and `2tq` the least popular.
pub type Label = u32;

/// Errors raised while validating domain objects.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    /// The sets do not partition `{1, …, ground_size}`.
    #[error("not a partition of 1..={expected}: {detail}")]
    NotAPartition { expected: u32, detail: String },
    /// A companion pair has unequal element sums.
    #[error("pair {pair_index} is not balanced: {left_sum} != {right_sum}")]
    NotBalanced {
        pair_index: usize,
        left_sum: u64,
        right_sum: u64,
    },
    /// A set does not have the expected cardinality.
    #[error("set has {got} elements, expected {expected}")]
    BadCardinality { expected: usize, got: usize },
    /// Two swaps share an endpoint, or a swap repeats an endpoint.
    #[error("label {0} appears in more than one swap endpoint")]
    SharedEndpoint(Label),
    /// A swap moves a label further than the magnitude budget allows.
    #[error("swap ({i},{j}) exceeds magnitude {p}")]
    MagnitudeExceeded { i: Label, j: Label, p: u32 },
    /// A swap with distance different from `p` in exact-distance mode.
    #[error("swap ({i},{j}) must have distance exactly {p}")]
    NotExactDistance { i: Label, j: Label, p: u32 },
    /// A swap endpoint lies outside the ground set.
    #[error("swap ({i},{j}) out of range 1..={ground}")]
    OutOfRange { i: Label, j: Label, ground: u32 },
    /// Invalid parameter combination.
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// Problem parameters: `t` companion pairs, swap magnitude `p`, companion-set
/// cardinality `q` (2 unless a set expansion was applied).
///
/// When `exact_distance` is set, only swaps with `|i - j| = p` are admitted
/// instead of `|i - j| <= p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub t: u32,
    pub p: u32,
    #[serde(default = "default_q")]
    pub q: u32,
    #[serde(default)]
    pub exact_distance: bool,
}

fn default_q() -> u32 {
    2
}

impl Params {
    /// Parameters with the default cardinality `q = 2`.
    pub fn new(t: u32, p: u32) -> Result<Self, DomainError> {
        Self::with_q(t, p, 2)
    }

    pub fn with_q(t: u32, p: u32, q: u32) -> Result<Self, DomainError> {
        if t < 1 || p < 1 || q < 2 {
            return Err(DomainError::BadParams(format!(
                "need t >= 1, p >= 1, q >= 2 (got t={t}, p={p}, q={q})"
            )));
        }
        Ok(Params {
            t,
            p,
            q,
            exact_distance: false,
        })
    }

    /// Restrict swaps to distance exactly `p` instead of at most `p`.
    pub fn exact_distance(mut self) -> Self {
        self.exact_distance = true;
        self
    }

    /// Size of the ground set, `2tq` (`4t` for the default `q = 2`).
    pub fn ground_size(&self) -> u32 {
        2 * self.t * self.q
    }
}

/// One balanced companion pair `(S_{2i-1}, S_{2i})`.
///
/// Both sets are sorted ascending, disjoint, of equal cardinality, and have
/// equal element sums. The set containing the smaller minimum is `left`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompanionPair {
    left: Vec<Label>,
    right: Vec<Label>,
}

impl CompanionPair {
    /// Builds a balanced pair, normalizing element order and side order.
    pub fn new(a: Vec<Label>, b: Vec<Label>) -> Result<Self, DomainError> {
        let mut a = a;
        let mut b = b;
        a.sort_unstable();
        b.sort_unstable();
        if a.len() != b.len() {
            return Err(DomainError::BadCardinality {
                expected: a.len(),
                got: b.len(),
            });
        }
        let (left, right) = if a.first() <= b.first() { (a, b) } else { (b, a) };
        let pair = CompanionPair { left, right };
        if pair.left_sum() != pair.right_sum() {
            return Err(DomainError::NotBalanced {
                pair_index: 0,
                left_sum: pair.left_sum(),
                right_sum: pair.right_sum(),
            });
        }
        Ok(pair)
    }

    pub fn left(&self) -> &[Label] {
        &self.left
    }

    pub fn right(&self) -> &[Label] {
        &self.right
    }

    pub fn left_sum(&self) -> u64 {
        self.left.iter().map(|&x| x as u64).sum()
    }

    pub fn right_sum(&self) -> u64 {
        self.right.iter().map(|&x| x as u64).sum()
    }

    /// Cardinality of each side.
    pub fn cardinality(&self) -> usize {
        self.left.len()
    }

    /// The smallest label in either side.
    pub fn min_label(&self) -> Label {
        // left always holds the overall minimum by construction
        self.left[0]
    }

    /// All `2q` labels of the pair, ascending.
    pub fn labels(&self) -> Vec<Label> {
        let mut all: Vec<Label> = self.left.iter().chain(self.right.iter()).copied().collect();
        all.sort_unstable();
        all
    }
}

/// An ordered list of `t` balanced companion pairs partitioning `{1, …, 2tq}`,
/// in canonical form: sets sorted ascending, the set with the smaller minimum
/// first within each pair, pairs ordered by their overall minimum.
///
/// Canonical form is the library-wide identity for partitions: two inputs
/// describing the same unordered partition canonicalize to equal values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefiningSets {
    pairs: Vec<CompanionPair>,
    ground_size: u32,
}

impl DefiningSets {
    /// Canonicalizes and validates a raw list of `(set, set)` pairs.
    ///
    /// Accepts any ordering of pairs, sides, and elements; rejects inputs that
    /// are not a partition of `{1, …, 2tq}`, have a set of the wrong
    /// cardinality, or contain an unbalanced pair.
    pub fn canonicalize(raw: Vec<(Vec<Label>, Vec<Label>)>) -> Result<Self, DomainError> {
        if raw.is_empty() {
            return Err(DomainError::BadParams("need at least one pair".into()));
        }
        let q = raw[0].0.len();
        if q == 0 {
            return Err(DomainError::BadCardinality { expected: 1, got: 0 });
        }
        for (a, b) in &raw {
            if a.len() != q {
                return Err(DomainError::BadCardinality { expected: q, got: a.len() });
            }
            if b.len() != q {
                return Err(DomainError::BadCardinality { expected: q, got: b.len() });
            }
        }
        let t = raw.len();
        let ground_size = (2 * t * q) as u32;
        // Partition check before balance so duplicate/missing elements are
        // reported even when sums coincidentally match.
        let mut seen = vec![false; ground_size as usize + 1];
        for (a, b) in &raw {
            for &x in a.iter().chain(b.iter()) {
                if x < 1 || x > ground_size {
                    return Err(DomainError::NotAPartition {
                        expected: ground_size,
                        detail: format!("element {x} out of range"),
                    });
                }
                if seen[x as usize] {
                    return Err(DomainError::NotAPartition {
                        expected: ground_size,
                        detail: format!("element {x} repeated"),
                    });
                }
                seen[x as usize] = true;
            }
        }
        let mut pairs = Vec::with_capacity(t);
        for (idx, (a, b)) in raw.into_iter().enumerate() {
            let pair = CompanionPair::new(a, b).map_err(|e| match e {
                DomainError::NotBalanced { left_sum, right_sum, .. } => DomainError::NotBalanced {
                    pair_index: idx,
                    left_sum,
                    right_sum,
                },
                other => other,
            })?;
            pairs.push(pair);
        }
        pairs.sort_unstable_by_key(|p| p.min_label());
        Ok(DefiningSets { pairs, ground_size })
    }

    pub fn pairs(&self) -> &[CompanionPair] {
        &self.pairs
    }

    pub fn t(&self) -> u32 {
        self.pairs.len() as u32
    }

    pub fn q(&self) -> u32 {
        self.pairs[0].cardinality() as u32
    }

    pub fn ground_size(&self) -> u32 {
        self.ground_size
    }

    /// Raw `(left, right)` views of every pair, in canonical order.
    pub fn raw_pairs(&self) -> Vec<(Vec<Label>, Vec<Label>)> {
        self.pairs
            .iter()
            .map(|p| (p.left.clone(), p.right.clone()))
            .collect()
    }

    /// Label-indexed lookup tables used by the solvers: for every label, the
    /// 0-based index of its pair and `+1`/`-1` for left/right membership.
    pub(crate) fn layout(&self) -> Layout {
        let n = self.ground_size as usize;
        let mut pair_of = vec![u16::MAX; n + 1];
        let mut sign_of = vec![0i8; n + 1];
        for (k, pair) in self.pairs.iter().enumerate() {
            for &x in pair.left() {
                pair_of[x as usize] = k as u16;
                sign_of[x as usize] = 1;
            }
            for &x in pair.right() {
                pair_of[x as usize] = k as u16;
                sign_of[x as usize] = -1;
            }
        }
        Layout {
            n: self.ground_size,
            t: self.pairs.len(),
            pair_of,
            sign_of,
        }
    }
}

impl fmt::Display for DefiningSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "({:?},{:?})", p.left, p.right)?;
        }
        Ok(())
    }
}

/// Label lookup tables for a (possibly partial) assignment of labels to
/// companion pairs. Unassigned labels have `pair_of == u16::MAX` and sign 0.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub n: u32,
    pub t: usize,
    pub pair_of: Vec<u16>,
    pub sign_of: Vec<i8>,
}

/// A set of popularity swaps: unordered label pairs with pairwise-distinct
/// endpoints, stored as `(i, j)` with `i < j`, sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwapSet {
    swaps: Vec<(Label, Label)>,
}

impl SwapSet {
    /// The empty swap set.
    pub fn empty() -> Self {
        SwapSet { swaps: Vec::new() }
    }

    /// Validates endpoint distinctness and range against a ground size, with
    /// no magnitude restriction. Used for arbitrary user-supplied swap lists.
    pub fn for_ground(raw: Vec<(Label, Label)>, ground: u32) -> Result<Self, DomainError> {
        let mut swaps = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i < 1 || j > ground || i == j {
                return Err(DomainError::OutOfRange { i: a, j: b, ground });
            }
            swaps.push((i, j));
        }
        swaps.sort_unstable();
        let mut seen = vec![false; ground as usize + 1];
        for &(i, j) in &swaps {
            for x in [i, j] {
                if seen[x as usize] {
                    return Err(DomainError::SharedEndpoint(x));
                }
                seen[x as usize] = true;
            }
        }
        Ok(SwapSet { swaps })
    }

    /// Validates a raw swap list against full parameters: distinct endpoints,
    /// range, and the magnitude constraint `j - i <= p` (or `= p` in
    /// exact-distance mode).
    pub fn validate(raw: Vec<(Label, Label)>, params: &Params) -> Result<Self, DomainError> {
        let set = Self::for_ground(raw, params.ground_size())?;
        for &(i, j) in &set.swaps {
            let dist = j - i;
            if dist > params.p {
                return Err(DomainError::MagnitudeExceeded { i, j, p: params.p });
            }
            if params.exact_distance && dist != params.p {
                return Err(DomainError::NotExactDistance { i, j, p: params.p });
            }
        }
        Ok(set)
    }

    pub fn swaps(&self) -> &[(Label, Label)] {
        &self.swaps
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// Sum of swap magnitudes `Σ |i - j|`.
    pub fn total_magnitude(&self) -> u64 {
        self.swaps.iter().map(|&(i, j)| (j - i) as u64).sum()
    }
}

/// Validates a raw swap list against parameters. Thin named wrapper over
/// [`SwapSet::validate`].
pub fn validate_swap_set(raw: Vec<(Label, Label)>, params: &Params) -> Result<SwapSet, DomainError> {
    SwapSet::validate(raw, params)
}

/// Canonicalizes a raw pair list into [`DefiningSets`]. Thin named wrapper
/// over [`DefiningSets::canonicalize`].
pub fn canonicalize(raw: Vec<(Vec<Label>, Vec<Label>)>) -> Result<DefiningSets, DomainError> {
    DefiningSets::canonicalize(raw)
}

/// Defining sets after popularity swaps: still a partition of the ground set,
/// but pairs need not be balanced. Pair order and side order are inherited
/// from the originating [`DefiningSets`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbedSets {
    pairs: Vec<(Vec<Label>, Vec<Label>)>,
    ground_size: u32,
}

impl PerturbedSets {
    pub(crate) fn from_parts(pairs: Vec<(Vec<Label>, Vec<Label>)>, ground_size: u32) -> Self {
        debug_assert_eq!(
            pairs.iter().map(|(a, b)| a.len() + b.len()).sum::<usize>(),
            ground_size as usize
        );
        PerturbedSets { pairs, ground_size }
    }

    pub fn pairs(&self) -> &[(Vec<Label>, Vec<Label>)] {
        &self.pairs
    }

    pub fn ground_size(&self) -> u32 {
        self.ground_size
    }

    /// `|Σ(S'_{2i-1}) - Σ(S'_{2i})|` for each pair.
    pub fn per_pair_discrepancy(&self) -> Vec<u64> {
        self.pairs
            .iter()
            .map(|(a, b)| {
                let sa: u64 = a.iter().map(|&x| x as u64).sum();
                let sb: u64 = b.iter().map(|&x| x as u64).sum();
                sa.abs_diff(sb)
            })
            .collect()
    }

    /// Total discrepancy `Σ_i |Σ(S'_{2i-1}) - Σ(S'_{2i})|`.
    pub fn total_discrepancy(&self) -> u64 {
        self.per_pair_discrepancy().iter().sum()
    }
}

/// Wire format for defining sets:
/// `{"t":…,"p":…,"q":…,"pairs":[[[…],[…]],…]}` with all arrays in canonical
/// sorted order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetsDocument {
    pub t: u32,
    pub p: u32,
    pub q: u32,
    pub pairs: Vec<(Vec<Label>, Vec<Label>)>,
}

impl SetsDocument {
    pub fn new(sets: &DefiningSets, p: u32) -> Self {
        SetsDocument {
            t: sets.t(),
            p,
            q: sets.q(),
            pairs: sets.raw_pairs(),
        }
    }

    /// Canonicalizes the carried pairs, checking consistency with the
    /// declared `t` and `q`.
    pub fn into_sets(self) -> Result<DefiningSets, DomainError> {
        let sets = DefiningSets::canonicalize(self.pairs)?;
        if sets.t() != self.t || sets.q() != self.q {
            return Err(DomainError::BadParams(format!(
                "declared t={}, q={} but pairs describe t={}, q={}",
                self.t,
                self.q,
                sets.t(),
                sets.q()
            )));
        }
        Ok(sets)
    }
}

/// Wire format for swap sets: `{"swaps":[[i,j],…]}` sorted ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwapsDocument {
    pub swaps: Vec<(Label, Label)>,
}

impl SwapsDocument {
    pub fn new(set: &SwapSet) -> Self {
        SwapsDocument {
            swaps: set.swaps().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_t2() -> Vec<(Vec<Label>, Vec<Label>)> {
        vec![(vec![1, 8], vec![3, 6]), (vec![2, 7], vec![4, 5])]
    }

    #[test]
    fn canonicalize_recovers_listing_order() {
        let shuffled = vec![(vec![6, 3], vec![8, 1]), (vec![4, 5], vec![2, 7])];
        let sets = DefiningSets::canonicalize(shuffled).unwrap();
        assert_eq!(sets.raw_pairs(), paper_t2());
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let sets = DefiningSets::canonicalize(paper_t2()).unwrap();
        let again = DefiningSets::canonicalize(sets.raw_pairs()).unwrap();
        assert_eq!(sets, again);
    }

    #[test]
    fn canonicalize_rejects_unbalanced() {
        let err = DefiningSets::canonicalize(vec![(vec![1, 2], vec![3, 4])]).unwrap_err();
        assert!(matches!(err, DomainError::NotBalanced { left_sum: 3, right_sum: 7, .. }));
    }

    #[test]
    fn canonicalize_rejects_non_partition() {
        // duplicate element
        let err =
            DefiningSets::canonicalize(vec![(vec![1, 4], vec![2, 3]), (vec![4, 8], vec![5, 7])])
                .unwrap_err();
        assert!(matches!(err, DomainError::NotAPartition { .. }));
        // missing element (out of range stands in for the hole)
        let err =
            DefiningSets::canonicalize(vec![(vec![1, 9], vec![4, 6]), (vec![2, 7], vec![3, 5])])
                .unwrap_err();
        assert!(matches!(err, DomainError::NotAPartition { .. }));
    }

    #[test]
    fn canonicalize_rejects_bad_cardinality() {
        let err = DefiningSets::canonicalize(vec![(vec![1, 4], vec![2, 3]), (vec![5], vec![6])])
            .unwrap_err();
        assert!(matches!(err, DomainError::BadCardinality { expected: 2, got: 1 }));
    }

    #[test]
    fn ground_set_size_is_2tq() {
        let sets = DefiningSets::canonicalize(paper_t2()).unwrap();
        assert_eq!(sets.ground_size(), 8);
        assert_eq!(sets.t(), 2);
        assert_eq!(sets.q(), 2);
        let params = Params::new(2, 1).unwrap();
        assert_eq!(params.ground_size(), 8);
    }

    #[test]
    fn swap_set_accepts_paper_example() {
        let params = Params::new(2, 1).unwrap();
        let ok = validate_swap_set(vec![(1, 2), (3, 4), (5, 6)], &params).unwrap();
        assert_eq!(ok.len(), 3);
        assert!(validate_swap_set(vec![], &params).unwrap().is_empty());
    }

    #[test]
    fn swap_set_rejects_shared_endpoint() {
        let params = Params::new(2, 1).unwrap();
        let err = validate_swap_set(vec![(1, 2), (2, 3), (5, 6), (7, 8)], &params).unwrap_err();
        assert_eq!(err, DomainError::SharedEndpoint(2));
    }

    #[test]
    fn swap_set_rejects_magnitude_and_range() {
        let params = Params::new(2, 1).unwrap();
        assert!(matches!(
            validate_swap_set(vec![(1, 3)], &params).unwrap_err(),
            DomainError::MagnitudeExceeded { .. }
        ));
        assert!(matches!(
            validate_swap_set(vec![(8, 9)], &params).unwrap_err(),
            DomainError::OutOfRange { .. }
        ));
        let exact = Params::new(2, 2).unwrap().exact_distance();
        assert!(matches!(
            validate_swap_set(vec![(1, 2)], &exact).unwrap_err(),
            DomainError::NotExactDistance { .. }
        ));
        assert!(validate_swap_set(vec![(1, 3)], &exact).is_ok());
    }

    #[test]
    fn sets_document_round_trip() {
        let sets = DefiningSets::canonicalize(paper_t2()).unwrap();
        let doc = SetsDocument::new(&sets, 1);
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            json,
            r#"{"t":2,"p":1,"q":2,"pairs":[[[1,8],[3,6]],[[2,7],[4,5]]]}"#
        );
        let back: SetsDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_sets().unwrap(), sets);
    }
}
