//! Balanced, swap-robust defining sets and minimal combinatorial trades.
//!
//! A `(v, k, t)` trade is a pair of disjoint, equal-size collections of
//! `k`-element blocks over `{1, …, v}` in which every `t`-subset is covered
//! by the same number of blocks on each side. Labels play the role of
//! popularity ranks; a trade built from *balanced* companion pairs (equal
//! element sums) has zero block-sum discrepancy, and the interesting question
//! is how much that balance can degrade when an adversary swaps up to
//! magnitude-`p` neighbouring ranks.
//!
//! The crate provides:
//!
//! * [`domain`] — canonical defining sets, swap sets, validation, JSON forms.
//! * [`trades`] — minimal trade construction from defining sets and a direct
//!   subset-coverage verifier.
//! * [`adversary`] — exact worst-case total discrepancy with a
//!   minimum-cardinality witness swap set.
//! * [`constructions`] — closed-form balanced families for `p = 1` and
//!   `p = 2`, cardinality expansion, and exact rational bound evaluators.
//! * [`search`] — exhaustive enumeration of balanced partitions, optimal
//!   defining-set search, and partition counting.
//! * [`graphs`] — the swap/potential graph pair behind the lower-bound
//!   degree argument, with machine checks of its per-node inequalities.
//! * [`cli`] — the `tradeforge` command-line front end and the reference
//!   reproduction pipeline.
//!
//! Start with the `examples/` directory: each file exercises one capability
//! end to end (`cargo run --release --example worked_example`, …).

pub mod adversary;
pub mod constructions;
pub mod domain;
pub mod graphs;
pub mod search;
pub mod trades;

pub mod cli;

pub use adversary::{apply_swaps, total_discrepancy, worst_case, DiscrepancyReport};
pub use domain::{
    canonicalize, validate_swap_set, CompanionPair, DefiningSets, DomainError, Label, Params,
    PerturbedSets, SwapSet,
};
