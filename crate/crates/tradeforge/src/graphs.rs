//! The swap graph / potential graph pair behind the magnitude-one lower
//! bound, with machine checks of its per-node degree inequalities.
//!
//! Nodes are companion pairs. The undirected swap graph carries one edge per
//! selected swap, connecting the pairs owning the two endpoints (self-loops
//! and parallel edges allowed). The directed potential graph covers the
//! adjacent swaps *not* selected: an arc `(v_a, v_b)` records that such a
//! swap would widen pair `a`'s post-swap imbalance (or, at a tie, push its
//! signed difference positive), with the other endpoint owned by pair `b`.
//! Two virtual boundary swaps `(0,1)` and `(4t, 4t+1)` feed an auxiliary sink
//! `v0` that never emits arcs and absorbs at most two.
//!
//! These builders are specific to the `p = 1`, cardinality-2 regime; the
//! checks in [`check_lemmas`] apply to minimal worst-case witnesses.

use crate::adversary::DiscrepancyReport;
use crate::domain::{CompanionPair, DefiningSets, Label, SwapSet};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph analysis needs cardinality-2 companion sets (got q={0})")]
    UnsupportedCardinality(u32),
    #[error("potential graph is defined for adjacent swaps only; ({0},{1}) is not")]
    NonAdjacentSwap(Label, Label),
}

/// Undirected multigraph on companion-pair nodes `1..=t`; one edge per swap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapGraph {
    pub t: usize,
    pub edges: Vec<SwapEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapEdge {
    /// Smaller incident node, 1-based.
    pub a: usize,
    /// Larger incident node; equal to `a` for a self-loop.
    pub b: usize,
    /// Originating swap.
    pub swap: (Label, Label),
}

/// Directed multigraph over nodes `0..=t`, node 0 being the auxiliary sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PotentialGraph {
    pub t: usize,
    pub arcs: Vec<PotentialArc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PotentialArc {
    /// Source pair node, 1-based.
    pub from: usize,
    /// Target node, 1-based; 0 is the auxiliary sink.
    pub to: usize,
    /// Originating non-selected swap; boundary arcs carry the virtual swaps
    /// `(0, 1)` and `(4t, 4t+1)`.
    pub swap: (Label, Label),
    /// Which membership/comparison rule fired.
    pub condition: ArcCondition,
}

/// Provenance of a potential arc. `C1`–`C6` are the six membership rules for
/// interior swaps `(i, i+1)`, evaluated with memberships in the original sets
/// and sums after the selected swaps; sums are compared as
/// `signed = Σ(S'_{2a-1}) - Σ(S'_{2a})` for the source pair `a`:
///
/// * `C1`: `i` in the right set, other endpoint elsewhere, `signed < 0`
/// * `C2`: `i+1` in the right set, other endpoint elsewhere, `signed > 0`
/// * `C3`: `i` in the left set, other endpoint elsewhere, `signed > 0`
/// * `C4`: `i+1` in the left set, other endpoint elsewhere, `signed < 0`
/// * `C5`: `i` in the left set, other endpoint elsewhere, `signed = 0`
/// * `C6`: `i+1` in the right set, other endpoint elsewhere, `signed = 0`
///
/// `BoundaryLow`/`BoundaryHigh` are the virtual swaps `(0,1)` and
/// `(4t, 4t+1)`: an arc into `v0` fires when the virtual swap would widen the
/// source pair's imbalance, or at a tie when it would push `signed` positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcCondition {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    BoundaryLow,
    BoundaryHigh,
}

/// Per-node degree accounts plus companion-type classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    /// Indexed by pair node (0-based vector position = node `i+1`).
    pub nodes: Vec<NodeDegrees>,
    /// Arcs absorbed by the auxiliary sink (at most 2).
    pub v0_in: usize,
    pub types: Vec<CompanionType>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NodeDegrees {
    /// Incident swap edges; a self-loop counts once.
    pub d: usize,
    /// Loop-weighted swap degree; a self-loop counts twice.
    pub d_swp: usize,
    /// Incoming potential arcs.
    pub d_pot_in: usize,
    /// Outgoing potential arcs, sink arcs included.
    pub d_pot_out: usize,
}

/// The three gap patterns of a balanced cardinality-2 pair with elements
/// `l1 < l2 < l3 < l4` (balance forces `l2 - l1 = l4 - l3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CompanionType {
    /// `{a, a+b, a+b+1, a+2b+1}`, middle gap 1, `b > 1`.
    Type1 { a: Label, b: Label },
    /// `{a, a+b, a+b+c, a+2b+c}`, all gaps above 1.
    Type2 { a: Label, b: Label, c: Label },
    /// `{a, a+1, a+1+b, a+2+b}`, outer gaps 1.
    Type3 { a: Label, b: Label },
}

/// Classifies a balanced cardinality-2 pair into its gap pattern. Exactly one
/// of the three types matches.
pub fn classify_companion_type(pair: &CompanionPair) -> Result<CompanionType, GraphError> {
    if pair.cardinality() != 2 {
        return Err(GraphError::UnsupportedCardinality(pair.cardinality() as u32));
    }
    let l = pair.labels();
    debug_assert_eq!(l[1] - l[0], l[3] - l[2], "balance forces symmetric gaps");
    Ok(if l[1] - l[0] == 1 {
        CompanionType::Type3 {
            a: l[0],
            b: l[2] - l[1],
        }
    } else if l[2] - l[1] == 1 {
        CompanionType::Type1 {
            a: l[0],
            b: l[1] - l[0],
        }
    } else {
        CompanionType::Type2 {
            a: l[0],
            b: l[1] - l[0],
            c: l[2] - l[1],
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

struct Ownership {
    pair: Vec<usize>,
    side: Vec<Side>,
}

fn ownership(sets: &DefiningSets) -> Result<Ownership, GraphError> {
    if sets.q() != 2 {
        return Err(GraphError::UnsupportedCardinality(sets.q()));
    }
    let n = sets.ground_size() as usize;
    let mut pair = vec![usize::MAX; n + 1];
    let mut side = vec![Side::Left; n + 1];
    for (k, p) in sets.pairs().iter().enumerate() {
        for &x in p.left() {
            pair[x as usize] = k;
        }
        for &x in p.right() {
            pair[x as usize] = k;
            side[x as usize] = Side::Right;
        }
    }
    Ok(Ownership { pair, side })
}

/// Builds the swap graph of a selected swap set: one edge per swap, joining
/// the nodes owning its endpoints.
pub fn build_swap_graph(sets: &DefiningSets, swaps: &SwapSet) -> Result<SwapGraph, GraphError> {
    let own = ownership(sets)?;
    let edges = swaps
        .swaps()
        .iter()
        .map(|&(i, j)| {
            let (u, w) = (own.pair[i as usize], own.pair[j as usize]);
            SwapEdge {
                a: u.min(w) + 1,
                b: u.max(w) + 1,
                swap: (i, j),
            }
        })
        .collect();
    Ok(SwapGraph {
        t: sets.t() as usize,
        edges,
    })
}

/// Builds the potential graph for the non-selected adjacent swaps, evaluating
/// the arc rules on the sums after applying `swaps` (see [`ArcCondition`]).
pub fn build_potential_graph(
    sets: &DefiningSets,
    swaps: &SwapSet,
) -> Result<PotentialGraph, GraphError> {
    let own = ownership(sets)?;
    for &(i, j) in swaps.swaps() {
        if j != i + 1 {
            return Err(GraphError::NonAdjacentSwap(i, j));
        }
    }
    let n = sets.ground_size();
    let perturbed = crate::adversary::apply_swaps(sets, swaps);
    let signed: Vec<i64> = perturbed
        .pairs()
        .iter()
        .map(|(a, b)| {
            let sa: i64 = a.iter().map(|&x| x as i64).sum();
            let sb: i64 = b.iter().map(|&x| x as i64).sum();
            sa - sb
        })
        .collect();
    let selected: std::collections::BTreeSet<(Label, Label)> =
        swaps.swaps().iter().copied().collect();

    let mut arcs = Vec::new();
    for i in 1..n {
        if selected.contains(&(i, i + 1)) {
            continue;
        }
        let (lo, hi) = (i as usize, (i + 1) as usize);
        let (u, w) = (own.pair[lo], own.pair[hi]);
        if u == w && own.side[lo] == own.side[hi] {
            continue; // swap inside one set never fires a rule
        }
        let ordered: &[(usize, usize)] = if u == w { &[(u, u)] } else { &[(u, w), (w, u)] };
        for &(i1, i2) in ordered {
            // membership of one endpoint in pair i1's sets, the other in pair
            // i2's union minus the named set
            let lo_in = |s: Side| own.pair[lo] == i1 && own.side[lo] == s;
            let hi_in = |s: Side| own.pair[hi] == i1 && own.side[hi] == s;
            let lo_other = |excl: Side| own.pair[lo] == i2 && !lo_in(excl);
            let hi_other = |excl: Side| own.pair[hi] == i2 && !hi_in(excl);
            let sgn = signed[i1];
            let condition = if lo_in(Side::Right) && hi_other(Side::Right) && sgn < 0 {
                Some(ArcCondition::C1)
            } else if hi_in(Side::Right) && lo_other(Side::Right) && sgn > 0 {
                Some(ArcCondition::C2)
            } else if lo_in(Side::Left) && hi_other(Side::Left) && sgn > 0 {
                Some(ArcCondition::C3)
            } else if hi_in(Side::Left) && lo_other(Side::Left) && sgn < 0 {
                Some(ArcCondition::C4)
            } else if lo_in(Side::Left) && hi_other(Side::Left) && sgn == 0 {
                Some(ArcCondition::C5)
            } else if hi_in(Side::Right) && lo_other(Side::Right) && sgn == 0 {
                Some(ArcCondition::C6)
            } else {
                None
            };
            if let Some(condition) = condition {
                arcs.push(PotentialArc {
                    from: i1 + 1,
                    to: i2 + 1,
                    swap: (i, i + 1),
                    condition,
                });
            }
        }
    }

    // virtual swap (0, 1): the set holding label 1 would lose one
    {
        let k = own.pair[1];
        let sgn = signed[k];
        let fires = match own.side[1] {
            Side::Left => sgn < 0,
            Side::Right => sgn >= 0,
        };
        if fires {
            arcs.push(PotentialArc {
                from: k + 1,
                to: 0,
                swap: (0, 1),
                condition: ArcCondition::BoundaryLow,
            });
        }
    }
    // virtual swap (4t, 4t+1): the set holding label 4t would gain one
    {
        let k = own.pair[n as usize];
        let sgn = signed[k];
        let fires = match own.side[n as usize] {
            Side::Left => sgn >= 0,
            Side::Right => sgn < 0,
        };
        if fires {
            arcs.push(PotentialArc {
                from: k + 1,
                to: 0,
                swap: (n, n + 1),
                condition: ArcCondition::BoundaryHigh,
            });
        }
    }

    Ok(PotentialGraph {
        t: sets.t() as usize,
        arcs,
    })
}

/// Tallies the degree accounts of both graphs and classifies every pair.
pub fn degree_report(
    sets: &DefiningSets,
    swap_graph: &SwapGraph,
    potential: &PotentialGraph,
) -> Result<DegreeReport, GraphError> {
    let t = sets.t() as usize;
    let mut nodes = vec![
        NodeDegrees {
            d: 0,
            d_swp: 0,
            d_pot_in: 0,
            d_pot_out: 0,
        };
        t
    ];
    for e in &swap_graph.edges {
        if e.a == e.b {
            nodes[e.a - 1].d += 1;
            nodes[e.a - 1].d_swp += 2;
        } else {
            nodes[e.a - 1].d += 1;
            nodes[e.b - 1].d += 1;
            nodes[e.a - 1].d_swp += 1;
            nodes[e.b - 1].d_swp += 1;
        }
    }
    let mut v0_in = 0;
    for a in &potential.arcs {
        nodes[a.from - 1].d_pot_out += 1;
        if a.to == 0 {
            v0_in += 1;
        } else {
            nodes[a.to - 1].d_pot_in += 1;
        }
    }
    let types = sets
        .pairs()
        .iter()
        .map(classify_companion_type)
        .collect::<Result<_, _>>()?;
    Ok(DegreeReport { nodes, v0_in, types })
}

/// One verdict of [`check_lemmas`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub details: String,
}

fn check(pass: bool, details: String) -> Check {
    Check { pass, details }
}

/// Verdicts for the degree inequalities on a minimal worst-case witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaChecks {
    /// `D = 2·|I*|`: every witness swap contributes exactly two.
    pub witness_identity: Check,
    /// `d_pot_in(v) <= d(v)` at every pair node.
    pub pot_in_bounded: Check,
    /// `d_swp(v) + d_pot_out(v) >= 3` at every pair node.
    pub min_degree: Check,
    /// `Σ d_swp + Σ d_pot_in >= 3t - 2`.
    pub aggregate: Check,
}

impl LemmaChecks {
    pub fn all_pass(&self) -> bool {
        self.witness_identity.pass
            && self.pot_in_bounded.pass
            && self.min_degree.pass
            && self.aggregate.pass
    }
}

/// Runs the witness-level degree checks for a `p = 1` worst-case report on
/// cardinality-2 sets. The report must come from [`crate::adversary::worst_case`]
/// so that the witness is a minimal maximizer; failures are reported, not
/// raised.
pub fn check_lemmas(
    sets: &DefiningSets,
    report: &DiscrepancyReport,
) -> Result<LemmaChecks, GraphError> {
    let swap_graph = build_swap_graph(sets, &report.witness)?;
    let potential = build_potential_graph(sets, &report.witness)?;
    let degrees = degree_report(sets, &swap_graph, &potential)?;
    let t = sets.t() as usize;

    let witness_identity = {
        let expect = 2 * report.witness.len() as u64;
        check(
            report.worst_case == expect,
            format!("D={} vs 2|I*|={}", report.worst_case, expect),
        )
    };
    let bad_in: Vec<usize> = (0..t)
        .filter(|&k| degrees.nodes[k].d_pot_in > degrees.nodes[k].d)
        .map(|k| k + 1)
        .collect();
    let pot_in_bounded = check(
        bad_in.is_empty(),
        if bad_in.is_empty() {
            "d_pot_in <= d at every node".into()
        } else {
            format!("d_pot_in > d at nodes {bad_in:?}")
        },
    );
    let bad_deg: Vec<usize> = (0..t)
        .filter(|&k| degrees.nodes[k].d_swp + degrees.nodes[k].d_pot_out < 3)
        .map(|k| k + 1)
        .collect();
    let min_degree = check(
        bad_deg.is_empty(),
        if bad_deg.is_empty() {
            "d_swp + d_pot_out >= 3 at every node".into()
        } else {
            format!("d_swp + d_pot_out < 3 at nodes {bad_deg:?}")
        },
    );
    let sum_swp: usize = degrees.nodes.iter().map(|d| d.d_swp).sum();
    let sum_in: usize = degrees.nodes.iter().map(|d| d.d_pot_in).sum();
    let aggregate = check(
        (sum_swp + sum_in) as i64 >= 3 * t as i64 - 2,
        format!("sum d_swp + sum d_pot_in = {} vs 3t-2 = {}", sum_swp + sum_in, 3 * t as i64 - 2),
    );
    Ok(LemmaChecks {
        witness_identity,
        pot_in_bounded,
        min_degree,
        aggregate,
    })
}

/// Sweep outcome over every balanced partition at one `t`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub t: u32,
    pub partitions: u64,
    pub failures: Vec<SweepFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub pairs: Vec<(Vec<Label>, Vec<Label>)>,
    pub checks: LemmaChecks,
}

/// Checks every balanced partition of `[4t]` at `p = 1`: computes the minimal
/// worst-case witness and runs [`check_lemmas`]. Parallel across partitions
/// with a deterministic report.
pub fn lemma_sweep(t: u32) -> SweepReport {
    let params = crate::domain::Params::new(t, 1).expect("valid parameters");
    let all: Vec<DefiningSets> = crate::search::enumerate_balanced_partitions(t, 2).collect();
    let failures: Vec<SweepFailure> = all
        .par_iter()
        .filter_map(|sets| {
            let report = crate::adversary::worst_case(sets, &params).expect("ground sizes match");
            let checks = check_lemmas(sets, &report).expect("q=2, adjacent witness");
            if checks.all_pass() {
                None
            } else {
                Some(SweepFailure {
                    pairs: sets.raw_pairs(),
                    checks,
                })
            }
        })
        .collect();
    SweepReport {
        t,
        partitions: all.len() as u64,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::worst_case;
    use crate::constructions::base_t4;
    use crate::domain::{canonicalize, Params, SwapSet};

    #[test]
    fn classify_the_three_patterns() {
        let pair = CompanionPair::new(vec![2, 7], vec![4, 5]).unwrap();
        assert_eq!(
            classify_companion_type(&pair).unwrap(),
            CompanionType::Type1 { a: 2, b: 2 }
        );
        let pair = CompanionPair::new(vec![1, 8], vec![3, 6]).unwrap();
        assert_eq!(
            classify_companion_type(&pair).unwrap(),
            CompanionType::Type2 { a: 1, b: 2, c: 3 }
        );
        let pair = CompanionPair::new(vec![1, 4], vec![2, 3]).unwrap();
        assert_eq!(
            classify_companion_type(&pair).unwrap(),
            CompanionType::Type3 { a: 1, b: 1 }
        );
    }

    #[test]
    fn classification_is_total_on_enumerated_pairs() {
        for t in 1..=3u32 {
            for sets in crate::search::enumerate_balanced_partitions(t, 2) {
                for pair in sets.pairs() {
                    classify_companion_type(pair).unwrap();
                }
            }
        }
    }

    #[test]
    fn empty_swap_set_gives_edgeless_graph_and_tie_arcs_only() {
        let sets = base_t4();
        let empty = SwapSet::empty();
        let g = build_swap_graph(&sets, &empty).unwrap();
        assert!(g.edges.is_empty());
        let pot = build_potential_graph(&sets, &empty).unwrap();
        for arc in &pot.arcs {
            assert!(
                matches!(
                    arc.condition,
                    ArcCondition::C5
                        | ArcCondition::C6
                        | ArcCondition::BoundaryLow
                        | ArcCondition::BoundaryHigh
                ),
                "balanced sets with no swaps can only fire tie rules, got {:?}",
                arc.condition
            );
        }
    }

    #[test]
    fn swap_inside_one_pair_is_a_self_loop() {
        // ({1,4},{2,3}): the swap (1,2) crosses the two sets of pair 1
        let sets = canonicalize(vec![(vec![1, 4], vec![2, 3])]).unwrap();
        let swaps = SwapSet::for_ground(vec![(1, 2)], 4).unwrap();
        let g = build_swap_graph(&sets, &swaps).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].a, g.edges[0].b), (1, 1));
    }

    #[test]
    fn degree_sums_match_edge_counts() {
        let sets = base_t4();
        let params = Params::new(4, 1).unwrap();
        let report = worst_case(&sets, &params).unwrap();
        let g = build_swap_graph(&sets, &report.witness).unwrap();
        let pot = build_potential_graph(&sets, &report.witness).unwrap();
        let degrees = degree_report(&sets, &g, &pot).unwrap();
        let sum_swp: usize = degrees.nodes.iter().map(|d| d.d_swp).sum();
        assert_eq!(sum_swp, 2 * g.edges.len());
        // flow conservation including the sink
        let sum_in: usize = degrees.nodes.iter().map(|d| d.d_pot_in).sum::<usize>() + degrees.v0_in;
        let sum_out: usize = degrees.nodes.iter().map(|d| d.d_pot_out).sum();
        assert_eq!(sum_in, sum_out);
        assert!(degrees.v0_in <= 2);
    }

    #[test]
    fn base_family_witness_passes_all_checks() {
        let sets = base_t4();
        let params = Params::new(4, 1).unwrap();
        let report = worst_case(&sets, &params).unwrap();
        let checks = check_lemmas(&sets, &report).unwrap();
        assert!(checks.all_pass(), "{checks:?}");
    }

    #[test]
    fn sweep_t2_is_clean() {
        let report = lemma_sweep(2);
        assert_eq!(report.partitions, 6);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }

    /// The illustrated t=3 instance: an optimal partition of `[12]` whose
    /// worst case is attained by the three swaps {(2,3),(8,9),(11,12)}. Two
    /// of them sit inside one pair (self-loops), one crosses pairs, and
    /// exactly three non-selected swaps fire potential arcs.
    #[test]
    fn t3_witness_instance_has_three_edges_and_three_arcs() {
        let sets = canonicalize(vec![
            (vec![1, 12], vec![6, 7]),
            (vec![2, 5], vec![3, 4]),
            (vec![8, 11], vec![9, 10]),
        ])
        .unwrap();
        let params = Params::new(3, 1).unwrap();
        let swaps = SwapSet::for_ground(vec![(2, 3), (8, 9), (11, 12)], 12).unwrap();
        assert_eq!(crate::adversary::total_discrepancy(&sets, &swaps), 6);
        assert_eq!(worst_case(&sets, &params).unwrap().worst_case, 6);
        let g = build_swap_graph(&sets, &swaps).unwrap();
        assert_eq!(g.edges.len(), 3);
        let pot = build_potential_graph(&sets, &swaps).unwrap();
        assert_eq!(pot.arcs.len(), 3);
    }

    #[test]
    fn every_optimal_t3_partition_passes_the_checks() {
        let r = crate::search::find_optimal(3, 1);
        assert_eq!(r.witnesses.len(), 10);
        let params = Params::new(3, 1).unwrap();
        for sets in &r.witnesses {
            let report = worst_case(sets, &params).unwrap();
            let checks = check_lemmas(sets, &report).unwrap();
            assert!(checks.all_pass(), "{sets} -> {checks:?}");
        }
    }
}
