//! The eight-element worked example: two balanced companion pairs, a pair of
//! magnitude-one swaps, and the exact worst case over all valid swap sets.
//!
//! ```bash
//! cargo run --release --example worked_example
//! ```

use tradeforge::adversary::{apply_swaps, total_discrepancy, worst_case};
use tradeforge::domain::{canonicalize, validate_swap_set, Params};

fn main() {
    // Any ordering of pairs, sides, and elements canonicalizes to the same
    // partition of {1, …, 8}.
    let sets = canonicalize(vec![(vec![6, 3], vec![8, 1]), (vec![4, 5], vec![2, 7])]).unwrap();
    println!("canonical sets:   {sets}");

    let params = Params::new(2, 1).unwrap();
    let swaps = validate_swap_set(vec![(1, 2), (5, 6)], &params).unwrap();
    let perturbed = apply_swaps(&sets, &swaps);
    println!("after {:?}:", swaps.swaps());
    for (left, right) in perturbed.pairs() {
        println!("  {left:?} vs {right:?}");
    }
    println!(
        "total discrepancy of those swaps: {}",
        total_discrepancy(&sets, &swaps)
    );

    // The exact worst case over every valid magnitude-one swap set, with a
    // smallest witness attaining it.
    let report = worst_case(&sets, &params).unwrap();
    println!(
        "worst case: {} via {:?} (explored {} nodes)",
        report.worst_case,
        report.witness.swaps(),
        report.explored
    );

    // A suboptimal balanced partition of the same ground set.
    let other = canonicalize(vec![(vec![1, 4], vec![2, 3]), (vec![5, 8], vec![6, 7])]).unwrap();
    let worse = worst_case(&other, &params).unwrap();
    println!("{other} is weaker: worst case {}", worse.worst_case);
}
