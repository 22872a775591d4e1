//! Building minimal trades from defining sets and verifying the trade
//! property by direct subset enumeration.
//!
//! ```bash
//! cargo run --release --example minimal_trades
//! ```

use tradeforge::domain::canonicalize;
use tradeforge::trades::{
    block_discrepancy, build_trade, trade_from_defining_sets, verify_trade, TradeSpec,
};

fn main() {
    // The balanced two-pair partition of {1, …, 8} assembles into a
    // (8, 4, 1) trade of volume 2 with equal block sums on both sides.
    let sets = canonicalize(vec![(vec![1, 8], vec![3, 6]), (vec![2, 7], vec![4, 5])]).unwrap();
    let trade = trade_from_defining_sets(&sets).unwrap();
    println!("blocks from {sets}:");
    println!("  first:  {:?}", trade.first);
    println!("  second: {:?}", trade.second);
    println!("  volume {} per side", trade.volume());
    println!(
        "  trade property: {:?}",
        verify_trade(&trade, 8, 4, 1).unwrap()
    );
    println!("  block discrepancy: {:?}", block_discrepancy(&trade));

    // A general spec with an unpaired set shared by every block.
    let spec = TradeSpec::new(vec![(vec![1], vec![2]), (vec![3], vec![4])], vec![6]).unwrap();
    let small = build_trade(&spec);
    println!(
        "singleton pairs with a shared element: {:?} / {:?}",
        small.first, small.second
    );
    println!(
        "  verification: {:?}",
        verify_trade(&small, spec.v(), spec.k(), spec.t_sub()).unwrap()
    );

    // An unbalanced (but valid) trade: the property holds, the sums do not.
    let skewed = TradeSpec::new(vec![(vec![1, 2], vec![3, 4]), (vec![5], vec![6])], vec![]).unwrap();
    let skewed_trade = build_trade(&skewed);
    println!(
        "unbalanced defining sets still trade: {:?}, block discrepancy {:?}",
        verify_trade(&skewed_trade, skewed.v(), skewed.k(), skewed.t_sub()).unwrap(),
        block_discrepancy(&skewed_trade)
    );
}
