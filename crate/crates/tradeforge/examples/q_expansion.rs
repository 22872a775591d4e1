//! Widening companion sets: expand each popularity label into a run of
//! consecutive labels and re-check swap robustness on the wider ground set.
//!
//! ```bash
//! cargo run --release --example q_expansion
//! ```

use tradeforge::adversary::worst_case;
use tradeforge::constructions::{base_t4, expand_q};
use tradeforge::domain::Params;

fn main() {
    let narrow = base_t4();
    println!("cardinality-2 family on [16]: {narrow}");
    let d_narrow = worst_case(&narrow, &Params::new(4, 1).unwrap())
        .unwrap()
        .worst_case;
    println!("  worst case at p=1: {d_narrow}");

    for factor in [2u32, 3] {
        let wide = expand_q(&narrow, factor);
        println!(
            "expanded by {factor}: q={} over [{}]",
            wide.q(),
            wide.ground_size()
        );
        for pair in wide.pairs().iter().take(2) {
            println!("  {:?} vs {:?} (sums {})", pair.left(), pair.right(), pair.left_sum());
        }
        let params = Params::with_q(wide.t(), 1, wide.q()).unwrap();
        let report = worst_case(&wide, &params).unwrap();
        println!(
            "  worst case at p=1: {} via {:?}",
            report.worst_case,
            report.witness.swaps()
        );
        // only swaps across the seams of expanded runs can move any sum, so
        // the worst case never exceeds the narrow family's budget
    }
}
