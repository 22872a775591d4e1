//! Property-based checks over randomly perturbed inputs.

use proptest::prelude::*;
use std::sync::OnceLock;
use tradeforge::adversary::{apply_swaps, total_discrepancy, worst_case};
use tradeforge::constructions::bound_for;
use tradeforge::domain::{canonicalize, DefiningSets, Label, Params, PerturbedSets, SwapSet};
use tradeforge::search::enumerate_balanced_partitions;

fn pool(t: u32) -> &'static [DefiningSets] {
    static POOLS: OnceLock<Vec<Vec<DefiningSets>>> = OnceLock::new();
    let pools = POOLS.get_or_init(|| {
        (1..=3u32)
            .map(|t| enumerate_balanced_partitions(t, 2).collect())
            .collect()
    });
    &pools[(t - 1) as usize]
}

/// Deterministically builds a valid swap set from arbitrary candidate pairs
/// by keeping each candidate whose endpoints are still unused.
fn greedy_swaps(candidates: &[(u32, u32)], n: u32, p: u32) -> Vec<(Label, Label)> {
    let mut used = vec![false; n as usize + 1];
    let mut out = Vec::new();
    for &(raw_i, raw_d) in candidates {
        let i = raw_i % n + 1;
        let j = i + (raw_d % p + 1);
        if j > n || used[i as usize] || used[j as usize] {
            continue;
        }
        used[i as usize] = true;
        used[j as usize] = true;
        out.push((i, j));
    }
    out
}

proptest! {
    /// Canonicalization is invariant under reordering pairs, swapping sides,
    /// and permuting elements inside the sets.
    #[test]
    fn canonicalize_is_permutation_invariant(
        t in 1u32..=3,
        which in any::<prop::sample::Index>(),
        rotate in 0usize..6,
        flips in prop::collection::vec(any::<bool>(), 3),
        reversals in prop::collection::vec(any::<bool>(), 3),
    ) {
        let sets = &pool(t)[which.index(pool(t).len())];
        let mut raw = sets.raw_pairs();
        let len = raw.len();
        raw.rotate_left(rotate % len);
        for (k, pair) in raw.iter_mut().enumerate() {
            if flips[k % flips.len()] {
                std::mem::swap(&mut pair.0, &mut pair.1);
            }
            if reversals[k % reversals.len()] {
                pair.0.reverse();
                pair.1.reverse();
            }
        }
        let again = canonicalize(raw).unwrap();
        prop_assert_eq!(&again, sets);
    }

    /// Applying the same swap set twice restores the original partition.
    #[test]
    fn apply_swaps_is_an_involution(
        t in 1u32..=3,
        which in any::<prop::sample::Index>(),
        candidates in prop::collection::vec((any::<u32>(), any::<u32>()), 0..10),
    ) {
        let sets = &pool(t)[which.index(pool(t).len())];
        let n = sets.ground_size();
        let swaps = SwapSet::for_ground(greedy_swaps(&candidates, n, 2), n).unwrap();
        let once: PerturbedSets = apply_swaps(sets, &swaps);
        // the perturbed pairs are still a partition of the ground set
        let mut all: Vec<Label> = once
            .pairs()
            .iter()
            .flat_map(|(a, b)| a.iter().chain(b.iter()).copied())
            .collect();
        all.sort_unstable();
        prop_assert_eq!(all, (1..=n).collect::<Vec<_>>());
        // round-trip through the canonical constructor after undoing
        let undone = {
            let redo = once
                .pairs()
                .iter()
                .map(|(a, b)| {
                    let mut perm: Vec<Label> = (0..=n).collect();
                    for &(i, j) in swaps.swaps() {
                        perm[i as usize] = j;
                        perm[j as usize] = i;
                    }
                    (
                        a.iter().map(|&x| perm[x as usize]).collect::<Vec<_>>(),
                        b.iter().map(|&x| perm[x as usize]).collect::<Vec<_>>(),
                    )
                })
                .collect::<Vec<_>>();
            canonicalize(redo).unwrap()
        };
        prop_assert_eq!(&undone, sets);
    }

    /// Extra magnitude never hurts the adversary, and the exact optimum never
    /// drops below the closed-form lower bound.
    #[test]
    fn worst_case_grows_with_p_and_dominates_the_bound(
        t in 1u32..=3,
        which in any::<prop::sample::Index>(),
    ) {
        let sets = &pool(t)[which.index(pool(t).len())];
        let mut previous = 0u64;
        for p in 1u32..=3 {
            let params = Params::new(t, p).unwrap();
            let d = worst_case(sets, &params).unwrap().worst_case;
            prop_assert!(d >= previous, "p={p}: {d} < {previous}");
            previous = d;
            let lower = bound_for(t, p).lower;
            prop_assert!(
                num_rational::Ratio::from_integer(d as i64) >= lower,
                "worst case {d} below bound {lower} at p={p}"
            );
        }
    }

    /// The reported worst case is an upper bound on the discrepancy of every
    /// valid swap set.
    #[test]
    fn no_sampled_swap_set_beats_the_reported_worst_case(
        t in 1u32..=3,
        which in any::<prop::sample::Index>(),
        candidates in prop::collection::vec((any::<u32>(), any::<u32>()), 0..12),
    ) {
        let sets = &pool(t)[which.index(pool(t).len())];
        let n = sets.ground_size();
        let params = Params::new(t, 2).unwrap();
        let cap = worst_case(sets, &params).unwrap().worst_case;
        let swaps = SwapSet::for_ground(greedy_swaps(&candidates, n, 2), n).unwrap();
        prop_assert!(total_discrepancy(sets, &swaps) <= cap);
    }
}
