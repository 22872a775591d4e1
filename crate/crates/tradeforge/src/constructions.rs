//! Closed-form and recursive constructions of balanced defining sets, plus
//! exact rational evaluators for the worst-case discrepancy bounds.
//!
//! The magnitude-one family lives on `t = 5·2^{z-2} - 1` pairs: level `z = 2`
//! is the unique optimal partition of `[16]`, and each level embeds two
//! shifted copies of the previous one between a reserved outer pair
//! `({1, 4t}, {2t, 2t+1})`. The magnitude-two family lives on `t = 2z + 1`
//! pairs and tiles blocks of eight labels between two fixed end pairs.
//!
//! Bounds are exact rationals, never floats, so comparisons are decidable.

use crate::domain::{DefiningSets, Label};
use num_rational::Ratio;
use serde::Serialize;

/// Exact rational bound value.
pub type Bound = Ratio<i64>;

/// Which bound family a [`BoundValues`] was evaluated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    /// Magnitude one: lower `(3t-2)/2`, upper `2^{z+1}-2` at `t = 5·2^{z-2}-1`.
    P1,
    /// Arbitrary magnitude, exact-distance regime: lower `p(3t-2(p-1))/2`.
    GeneralP,
    /// Magnitude two: lower `(35t-40)/11`, upper `(9t-1)/2` at odd `t >= 3`.
    P2,
}

/// Lower and (where proved) upper bound on `D*(t, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundValues {
    pub lower: Bound,
    pub upper: Option<Bound>,
    pub source: BoundSource,
}

/// The unique optimal defining sets for `t = 4`, `p = 1`, on `[16]`.
pub fn base_t4() -> DefiningSets {
    DefiningSets::canonicalize(vec![
        (vec![1, 16], vec![8, 9]),
        (vec![2, 7], vec![4, 5]),
        (vec![10, 15], vec![12, 13]),
        (vec![3, 14], vec![6, 11]),
    ])
    .expect("base family is balanced")
}

/// Level-`z` sets of the magnitude-one recursion, `z >= 2`, with
/// `t = 5·2^{z-2} - 1` pairs over `[4t]`.
///
/// Level `z+1` shifts the level-`z` sets by `+1`, places a second copy
/// shifted by `5·2^z - 1`, and appends the reserved pairs
/// `{1, 5·2^{z+1}-4}` and `{5·2^z-2, 5·2^z-1}`.
pub fn recursive_p1(z: u32) -> DefiningSets {
    assert!(z >= 2, "recursion starts at z = 2");
    // flat list of sets in construction order; consecutive sets are companions
    let mut sets: Vec<Vec<Label>> = vec![
        vec![1, 16],
        vec![8, 9],
        vec![2, 7],
        vec![4, 5],
        vec![10, 15],
        vec![12, 13],
        vec![3, 14],
        vec![6, 11],
    ];
    for level in 2..z {
        let m = sets.len() as u32; // 5·2^{level-1} - 2
        debug_assert_eq!(m, 5 * (1 << (level - 1)) - 2);
        let shift = 5 * (1u32 << level) - 1;
        let mut next: Vec<Vec<Label>> = Vec::with_capacity(2 * m as usize + 2);
        next.extend(sets.iter().map(|s| shifted(s, 1)));
        next.extend(sets.iter().map(|s| shifted(s, shift)));
        next.push(vec![1, 5 * (1 << (level + 1)) - 4]);
        next.push(vec![5 * (1 << level) - 2, 5 * (1 << level) - 1]);
        sets = next;
    }
    let pairs = sets
        .chunks_exact(2)
        .map(|ch| (ch[0].clone(), ch[1].clone()))
        .collect();
    DefiningSets::canonicalize(pairs).expect("recursion preserves balance and the partition")
}

fn shifted(s: &[Label], by: u32) -> Vec<Label> {
    s.iter().map(|&x| x + by).collect()
}

/// The magnitude-two family on `t = 2z + 1` pairs over `[8z + 4]`, `z >= 1`.
pub fn construct_p2(z: u32) -> DefiningSets {
    assert!(z >= 1);
    let mut pairs: Vec<(Vec<Label>, Vec<Label>)> = Vec::with_capacity(2 * z as usize + 1);
    pairs.push((vec![1, 5], vec![2, 4]));
    for l in 1..=z {
        let o = 8 * (l - 1);
        pairs.push((vec![3 + o, 10 + o], vec![6 + o, 7 + o]));
    }
    for l in 1..z {
        let o = 8 * (l - 1);
        pairs.push((vec![8 + o, 13 + o], vec![9 + o, 12 + o]));
    }
    pairs.push((vec![8 * z, 8 * z + 4], vec![8 * z + 1, 8 * z + 3]));
    DefiningSets::canonicalize(pairs).expect("blocks of eight tile the ground set")
}

/// Expands every label `x` into the block
/// `{factor·(x-1)+1, …, factor·x}`, turning cardinality-2 companions over
/// `[4t]` into cardinality-`2·factor` companions over `[4t·factor]`.
/// Balance is preserved: each side's sum maps to
/// `factor²·Σ - q·factor·(factor-1)/2`.
pub fn expand_q(sets: &DefiningSets, factor: u32) -> DefiningSets {
    assert!(factor >= 2, "expansion factor must be at least 2");
    assert_eq!(sets.q(), 2, "expansion starts from cardinality-2 sets");
    let expand = |s: &[Label]| -> Vec<Label> {
        s.iter()
            .flat_map(|&x| (factor * (x - 1) + 1)..=(factor * x))
            .collect()
    };
    let pairs = sets
        .pairs()
        .iter()
        .map(|p| (expand(p.left()), expand(p.right())))
        .collect();
    DefiningSets::canonicalize(pairs).expect("expansion preserves balance and the partition")
}

/// Evaluates the requested bound family at `(t, p)`.
///
/// Upper bounds are only defined at the family's admissible `t` values
/// (`t = 5·2^{z-2}-1` for `P1`, odd `t >= 3` for `P2`); elsewhere `upper`
/// is `None` rather than an interpolation.
pub fn bound(t: u32, p: u32, which: BoundSource) -> BoundValues {
    assert!(t >= 1);
    let ti = t as i64;
    match which {
        BoundSource::P1 => BoundValues {
            lower: Ratio::new(3 * ti - 2, 2),
            upper: p1_level(t).map(|z| Ratio::from_integer((1i64 << (z + 1)) - 2)),
            source: BoundSource::P1,
        },
        BoundSource::GeneralP => {
            let pi = p as i64;
            BoundValues {
                lower: Ratio::new(pi * (3 * ti - 2 * (pi - 1)), 2),
                upper: None,
                source: BoundSource::GeneralP,
            }
        }
        BoundSource::P2 => BoundValues {
            lower: Ratio::new(35 * ti - 40, 11),
            upper: if t >= 3 && t % 2 == 1 {
                Some(Ratio::new(9 * ti - 1, 2))
            } else {
                None
            },
            source: BoundSource::P2,
        },
    }
}

/// The bound family conventionally attached to a magnitude: `P1` for `p = 1`,
/// `P2` for `p = 2`, `GeneralP` otherwise.
pub fn bound_for(t: u32, p: u32) -> BoundValues {
    match p {
        1 => bound(t, 1, BoundSource::P1),
        2 => bound(t, 2, BoundSource::P2),
        _ => bound(t, p, BoundSource::GeneralP),
    }
}

/// The recursion level `z >= 2` with `t = 5·2^{z-2} - 1`, if any.
pub fn p1_level(t: u32) -> Option<u32> {
    let v = t + 1;
    if !v.is_multiple_of(5) {
        return None;
    }
    let pow = v / 5;
    if pow.is_power_of_two() {
        Some(pow.trailing_zeros() + 2)
    } else {
        None
    }
}
