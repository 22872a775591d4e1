//! Exhaustive search for optimal defining sets: enumerate every canonical
//! balanced partition, evaluate its exact worst case, and keep the minimizers.
//!
//! ```bash
//! cargo run --release --example optimal_search
//! ```

use tradeforge::search::{
    constructive_lower_bound, count_balanced_partitions, find_optimal_with, SearchOptions,
};

fn main() {
    println!("balanced partitions of [4t]:");
    for t in 1..=5u32 {
        println!(
            "  t={t}: {:>6} (guaranteed floor {})",
            count_balanced_partitions(t),
            constructive_lower_bound(t)
        );
    }

    for (t, p) in [(3u32, 1u32), (4, 1), (3, 2)] {
        let r = find_optimal_with(
            t,
            p,
            &SearchOptions {
                max_witnesses: 3,
                ..SearchOptions::default()
            },
        );
        println!(
            "D*({t},{p}) = {} with {} optimal partitions ({} candidates evaluated)",
            r.optimal_discrepancy, r.optimal_count, r.candidates_examined
        );
        for w in &r.witnesses {
            println!("    {w}");
        }
        if r.optimal_count > r.witnesses.len() as u64 {
            println!("    … ({} more)", r.optimal_count - r.witnesses.len() as u64);
        }
    }
    // Larger t: t=6 at p=1 enumerates ~4.2M partitions (about a minute in
    // release mode); the result is (10, 22).
}
