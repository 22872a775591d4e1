//! The swap/potential graph pair on a worst-case witness, the per-node degree
//! accounts, and the machine check of the degree inequalities behind the
//! magnitude-one lower bound.
//!
//! ```bash
//! cargo run --release --example graph_lemmas
//! ```

use tradeforge::adversary::worst_case;
use tradeforge::domain::{canonicalize, Params, SwapSet};
use tradeforge::graphs::{
    build_potential_graph, build_swap_graph, check_lemmas, classify_companion_type, degree_report,
    lemma_sweep,
};

fn main() {
    // An optimal three-pair partition of {1, …, 12}; the three swaps
    // (2,3), (8,9), (11,12) attain its worst case of 6.
    let sets = canonicalize(vec![
        (vec![1, 12], vec![6, 7]),
        (vec![2, 5], vec![3, 4]),
        (vec![8, 11], vec![9, 10]),
    ])
    .unwrap();
    let swaps = SwapSet::for_ground(vec![(2, 3), (8, 9), (11, 12)], 12).unwrap();

    let g = build_swap_graph(&sets, &swaps).unwrap();
    println!("swap graph edges:");
    for e in &g.edges {
        println!("  v{} -- v{}  (swap {:?})", e.a, e.b, e.swap);
    }
    let pot = build_potential_graph(&sets, &swaps).unwrap();
    println!("potential arcs:");
    for a in &pot.arcs {
        println!("  v{} -> v{}  (swap {:?}, {:?})", a.from, a.to, a.swap, a.condition);
    }
    let degrees = degree_report(&sets, &g, &pot).unwrap();
    for (k, d) in degrees.nodes.iter().enumerate() {
        println!(
            "  v{}: d={} d_swp={} d_pot_in={} d_pot_out={}  {:?}",
            k + 1,
            d.d,
            d.d_swp,
            d.d_pot_in,
            d.d_pot_out,
            classify_companion_type(&sets.pairs()[k]).unwrap()
        );
    }

    // The checks run against the adversary's own minimal witness.
    let params = Params::new(3, 1).unwrap();
    let report = worst_case(&sets, &params).unwrap();
    let checks = check_lemmas(&sets, &report).unwrap();
    println!("witness {:?}:", report.witness.swaps());
    println!("  D = 2|I*|          : {}", checks.witness_identity.pass);
    println!("  d_pot_in <= d      : {}", checks.pot_in_bounded.pass);
    println!("  d_swp + d_out >= 3 : {}", checks.min_degree.pass);
    println!("  aggregate >= 3t-2  : {}", checks.aggregate.pass);

    // Sweep every balanced partition at t = 3.
    let sweep = lemma_sweep(3);
    println!(
        "sweep t=3: {} partitions, {} violations",
        sweep.partitions,
        sweep.failures.len()
    );
}
