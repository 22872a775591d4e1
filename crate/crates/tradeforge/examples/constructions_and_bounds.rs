//! The two closed-form families of swap-robust balanced sets, their exact
//! worst cases, and the rational lower/upper bounds they sit between.
//!
//! ```bash
//! cargo run --release --example constructions_and_bounds
//! ```

use tradeforge::adversary::worst_case;
use tradeforge::constructions::{bound_for, construct_p2, recursive_p1};
use tradeforge::domain::Params;

fn main() {
    println!("magnitude-one family (t = 5*2^(z-2) - 1):");
    let mut previous: Option<u64> = None;
    for z in 2..=4u32 {
        let sets = recursive_p1(z);
        let t = sets.t();
        let params = Params::new(t, 1).unwrap();
        let report = worst_case(&sets, &params).unwrap();
        let b = bound_for(t, 1);
        print!(
            "  z={z} t={t:>2}: worst case {:>2}, bounds [{}, {}]",
            report.worst_case,
            b.lower,
            b.upper.map(|u| u.to_string()).unwrap_or_default()
        );
        if let Some(prev) = previous {
            // level-to-level growth stays within twice-plus-two
            print!("  (previous level {prev}: {} <= {})", report.worst_case, 2 * prev + 2);
        }
        println!();
        previous = Some(report.worst_case);
    }

    println!("magnitude-two family (t = 2z + 1):");
    for z in 1..=2u32 {
        let sets = construct_p2(z);
        let t = sets.t();
        let params = Params::new(t, 2).unwrap();
        let report = worst_case(&sets, &params).unwrap();
        let b = bound_for(t, 2);
        println!(
            "  z={z} t={t}: worst case {:>2}, bounds [{}, {}]",
            report.worst_case,
            b.lower,
            b.upper.map(|u| u.to_string()).unwrap_or_default()
        );
    }

    // How close do upper and lower bounds sit for the magnitude-one family?
    // The exact ratio decreases towards 16/15 as t grows.
    println!("upper/lower ratio at admissible t:");
    for t in [4u32, 9, 19, 39, 79, 159] {
        let b = bound_for(t, 1);
        let ratio = b.upper.unwrap() / b.lower;
        println!(
            "  t={t:>3}: {ratio} = {:.4}",
            *ratio.numer() as f64 / *ratio.denom() as f64
        );
    }
}
