//! Exhaustive enumeration of balanced partitions, optimal defining-set
//! search, and partition counting.
//!
//! Enumeration anchors on the smallest unassigned element: that element
//! always opens the next pair, its set is completed, and the companion set is
//! chosen among the remaining elements with matching sum. Every canonical
//! partition is generated exactly once, in strictly increasing order under
//! the flattened lexicographic key, with no dedup table.
//!
//! [`find_optimal`] minimizes the exact worst-case discrepancy over all
//! canonical balanced partitions. A partial partition is abandoned as soon as
//! the completed prefix already admits a swap set whose discrepancy exceeds
//! the incumbent: swaps confined to assigned labels perturb no future pair,
//! so the prefix value lower-bounds the worst case of every completion.

use crate::adversary::{self, DpScratch};
use crate::domain::{DefiningSets, Label, Layout};
use rayon::prelude::*;

/// Result of an optimal defining-set search at fixed `(t, p)`.
///
/// `witnesses` holds up to a configured cap of minimizers in enumeration
/// order; `optimal_count` is always the exact number of canonical optimal
/// partitions. `candidates_examined` counts completed partitions that reached
/// evaluation and is independent of the parallelism degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalSearchResult {
    pub optimal_discrepancy: u64,
    pub optimal_count: u64,
    pub witnesses: Vec<DefiningSets>,
    pub candidates_examined: u64,
    pub exact: bool,
}

/// Knobs for [`find_optimal_with`].
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Worker threads across top-level subtrees; `None` uses the rayon
    /// default. Results are bit-identical for every setting.
    pub jobs: Option<usize>,
    /// Cap on stored witnesses (the count stays exact beyond the cap).
    pub max_witnesses: usize,
    /// Candidate budget; when exhausted the partial result is flagged
    /// `exact = false`. Forces single-threaded search.
    pub budget: Option<u64>,
    /// Emit progress lines on stderr as top-level subtrees finish.
    pub progress: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            jobs: None,
            max_witnesses: 100,
            budget: None,
            progress: false,
        }
    }
}

/// Exact `D*(t, p)` with all optimal canonical partitions, default options.
pub fn find_optimal(t: u32, p: u32) -> OptimalSearchResult {
    find_optimal_with(t, p, &SearchOptions::default())
}

pub fn find_optimal_with(t: u32, p: u32, options: &SearchOptions) -> OptimalSearchResult {
    assert!(t >= 1 && p >= 1);
    let n = 4 * t;
    // Seed the incumbent with the exact worst case of the first leaf so every
    // task prunes from the start.
    let seed = {
        let mut probe = TaskState::new(n, t as usize);
        while let Some(quad) = first_quad(&probe.remaining, n) {
            probe.apply(quad);
        }
        debug_assert_eq!(probe.depth, t as usize);
        let view = probe.layout();
        let mut scratch = DpScratch::new();
        adversary::max_discrepancy_value(&view, p, false, &mut scratch)
    };

    let top: Vec<Quad> = {
        let state = TaskState::new(n, t as usize);
        quad_candidates(&state.remaining, n)
    };

    let ctx = SearchCtx {
        n,
        p,
        t: t as usize,
        max_witnesses: options.max_witnesses,
        seed,
    };

    let sequential = options.budget.is_some() || options.jobs == Some(1) || top.len() <= 1;
    let results: Vec<TaskOutcome> = if sequential {
        let mut remaining_budget = options.budget;
        let mut out = Vec::with_capacity(top.len());
        for (idx, &quad) in top.iter().enumerate() {
            let r = run_task(&ctx, quad, remaining_budget);
            if let Some(b) = remaining_budget.as_mut() {
                *b = b.saturating_sub(r.examined);
            }
            if options.progress {
                eprintln!(
                    "search t={t} p={p}: subtree {}/{} done, examined {}",
                    idx + 1,
                    top.len(),
                    r.examined
                );
            }
            let stop = !r.exact;
            out.push(r);
            if stop {
                break;
            }
        }
        out
    } else {
        let run = || {
            top.par_iter()
                .map(|&quad| {
                    let r = run_task(&ctx, quad, None);
                    if options.progress {
                        eprintln!("search t={t} p={p}: subtree done, examined {}", r.examined);
                    }
                    r
                })
                .collect()
        };
        match options.jobs {
            Some(j) if j > 0 => rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .expect("thread pool")
                .install(run),
            _ => run(),
        }
    };

    // Deterministic merge in subtree order.
    let mut best: Option<u64> = None;
    let mut count = 0u64;
    let mut witnesses: Vec<DefiningSets> = Vec::new();
    let mut examined = 0u64;
    let mut exact = true;
    for r in results {
        examined += r.examined;
        exact &= r.exact;
        let Some(d) = r.best else { continue };
        if best.is_none_or(|b| d < b) {
            best = Some(d);
            count = r.count;
            witnesses = r.witnesses;
        } else if best == Some(d) {
            count += r.count;
            witnesses.extend(r.witnesses);
        }
    }
    witnesses.truncate(options.max_witnesses);
    OptimalSearchResult {
        optimal_discrepancy: best.expect("at least one balanced partition exists"),
        optimal_count: count,
        witnesses,
        candidates_examined: examined,
        exact,
    }
}

struct SearchCtx {
    n: u32,
    p: u32,
    t: usize,
    max_witnesses: usize,
    seed: u64,
}

/// One companion pair over cardinality-2 sets, as `left = {a, d}`,
/// `right = {b, c}` with `a < b < c < d` and `a + d = b + c`.
type Quad = (Label, Label, Label, Label);

#[derive(Clone)]
struct TaskState {
    remaining: Vec<bool>,
    pair_of: Vec<u16>,
    sign_of: Vec<i8>,
    quads: Vec<Quad>,
    depth: usize,
    scratch: DpScratch,
}

impl TaskState {
    fn new(n: u32, t: usize) -> Self {
        let mut remaining = vec![true; n as usize + 1];
        remaining[0] = false;
        TaskState {
            remaining,
            pair_of: vec![u16::MAX; n as usize + 1],
            sign_of: vec![0; n as usize + 1],
            quads: Vec::with_capacity(t),
            depth: 0,
            scratch: DpScratch::new(),
        }
    }

    fn apply(&mut self, (a, b, c, d): Quad) {
        let k = self.depth as u16;
        for (x, s) in [(a, 1i8), (d, 1), (b, -1), (c, -1)] {
            self.remaining[x as usize] = false;
            self.pair_of[x as usize] = k;
            self.sign_of[x as usize] = s;
        }
        self.quads.push((a, b, c, d));
        self.depth += 1;
    }

    fn undo(&mut self) {
        let (a, b, c, d) = self.quads.pop().expect("undo without apply");
        self.depth -= 1;
        for x in [a, b, c, d] {
            self.remaining[x as usize] = true;
            self.pair_of[x as usize] = u16::MAX;
            self.sign_of[x as usize] = 0;
        }
    }

    fn layout(&self) -> Layout {
        Layout {
            n: (self.remaining.len() - 1) as u32,
            t: self.depth,
            pair_of: self.pair_of.clone(),
            sign_of: self.sign_of.clone(),
        }
    }

    fn to_sets(&self) -> DefiningSets {
        let pairs = self
            .quads
            .iter()
            .map(|&(a, b, c, d)| (vec![a, d], vec![b, c]))
            .collect();
        DefiningSets::canonicalize(pairs).expect("assembled quads are balanced by construction")
    }
}

/// All balanced quads anchored at the smallest remaining element, in
/// canonical (d, b) order.
fn quad_candidates(remaining: &[bool], n: u32) -> Vec<Quad> {
    let Some(a) = (1..=n).find(|&x| remaining[x as usize]) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for d in (a + 3)..=n {
        if !remaining[d as usize] {
            continue;
        }
        let total = a + d;
        for b in (a + 1)..=(total - 1) / 2 {
            if b >= d || !remaining[b as usize] {
                continue;
            }
            let c = total - b;
            if c <= b || c >= d || !remaining[c as usize] {
                continue;
            }
            out.push((a, b, c, d));
        }
    }
    out
}

/// Smallest candidate quad, if any (used for the incumbent seed).
fn first_quad(remaining: &[bool], n: u32) -> Option<Quad> {
    quad_candidates(remaining, n).into_iter().next()
}

struct TaskOutcome {
    best: Option<u64>,
    count: u64,
    witnesses: Vec<DefiningSets>,
    examined: u64,
    exact: bool,
}

fn run_task(ctx: &SearchCtx, first: Quad, budget: Option<u64>) -> TaskOutcome {
    let mut state = TaskState::new(ctx.n, ctx.t);
    state.apply(first);
    let mut out = TaskOutcome {
        best: None,
        count: 0,
        witnesses: Vec::new(),
        examined: 0,
        exact: true,
    };
    recurse(ctx, &mut state, &mut out, budget);
    out
}

fn recurse(ctx: &SearchCtx, state: &mut TaskState, out: &mut TaskOutcome, budget: Option<u64>) {
    if !out.exact {
        return;
    }
    let incumbent = out.best.map_or(ctx.seed, |b| b.min(ctx.seed));
    if state.depth == ctx.t {
        if let Some(b) = budget {
            if out.examined >= b {
                out.exact = false;
                return;
            }
        }
        out.examined += 1;
        let view = state.layout();
        let mut scratch = std::mem::replace(&mut state.scratch, DpScratch::new());
        let eval = adversary::max_discrepancy_bounded(&view, ctx.p, false, &mut scratch, incumbent);
        state.scratch = scratch;
        match eval {
            adversary::BoundedEval::Exceeds => {}
            adversary::BoundedEval::Exact(d) => {
                if out.best.is_none_or(|b| d < b) {
                    out.best = Some(d);
                    out.count = 1;
                    out.witnesses.clear();
                    out.witnesses.push(state.to_sets());
                } else if out.best == Some(d) {
                    out.count += 1;
                    if out.witnesses.len() < ctx.max_witnesses {
                        out.witnesses.push(state.to_sets());
                    }
                }
            }
        }
        return;
    }
    let cands = quad_candidates(&state.remaining, ctx.n);
    for quad in cands {
        state.apply(quad);
        let prune = state.depth >= 2 && state.depth < ctx.t && {
            let view = state.layout();
            let mut scratch = std::mem::replace(&mut state.scratch, DpScratch::new());
            let eval =
                adversary::max_discrepancy_bounded(&view, ctx.p, false, &mut scratch, incumbent);
            state.scratch = scratch;
            matches!(eval, adversary::BoundedEval::Exceeds)
        };
        if !prune {
            recurse(ctx, state, out, budget);
        }
        state.undo();
        if !out.exact {
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Iterator over every canonical balanced partition of `{1, …, 2tq}` into `t`
/// companion pairs of cardinality `q`, in strictly increasing canonical
/// order.
pub fn enumerate_balanced_partitions(t: u32, q: u32) -> BalancedPartitions {
    assert!(t >= 1 && q >= 2);
    let n = 2 * t * q;
    let mut remaining = vec![true; n as usize + 1];
    remaining[0] = false;
    BalancedPartitions {
        n,
        q: q as usize,
        t: t as usize,
        remaining,
        stack: Vec::new(),
        started: false,
        done: false,
    }
}

pub struct BalancedPartitions {
    n: u32,
    q: usize,
    t: usize,
    remaining: Vec<bool>,
    stack: Vec<Frame>,
    started: bool,
    done: bool,
}

struct Frame {
    candidates: std::vec::IntoIter<(Vec<Label>, Vec<Label>)>,
    applied: Option<(Vec<Label>, Vec<Label>)>,
}

impl BalancedPartitions {
    fn apply(&mut self, pair: &(Vec<Label>, Vec<Label>)) {
        for &x in pair.0.iter().chain(pair.1.iter()) {
            self.remaining[x as usize] = false;
        }
    }

    fn unapply(&mut self, pair: &(Vec<Label>, Vec<Label>)) {
        for &x in pair.0.iter().chain(pair.1.iter()) {
            self.remaining[x as usize] = true;
        }
    }

    /// Backtrack: advance the deepest frame, popping exhausted frames.
    /// Returns false when the whole tree is exhausted.
    fn retreat(&mut self) -> bool {
        loop {
            let Some(top) = self.stack.last_mut() else {
                return false;
            };
            if let Some(prev) = top.applied.take() {
                self.unapply(&prev);
            }
            let top = self.stack.last_mut().expect("frame still present");
            if let Some(cand) = top.candidates.next() {
                self.apply(&cand);
                self.stack
                    .last_mut()
                    .expect("frame still present")
                    .applied = Some(cand);
                return true;
            }
            self.stack.pop();
        }
    }
}

impl Iterator for BalancedPartitions {
    type Item = DefiningSets;

    fn next(&mut self) -> Option<DefiningSets> {
        if self.done {
            return None;
        }
        if self.started && !self.retreat() {
            self.done = true;
            return None;
        }
        self.started = true;
        loop {
            if self.stack.len() == self.t && self.stack.iter().all(|f| f.applied.is_some()) {
                let pairs: Vec<_> = self
                    .stack
                    .iter()
                    .map(|f| f.applied.clone().expect("frame applied"))
                    .collect();
                let sets = DefiningSets::canonicalize(pairs)
                    .expect("enumerated pairs form a balanced partition");
                return Some(sets);
            }
            let cands = pair_candidates(&self.remaining, self.n, self.q);
            let mut it = cands.into_iter();
            match it.next() {
                Some(cand) => {
                    self.apply(&cand);
                    self.stack.push(Frame {
                        candidates: it,
                        applied: Some(cand),
                    });
                }
                None => {
                    if !self.retreat() {
                        self.done = true;
                        return None;
                    }
                }
            }
        }
    }
}

/// Candidate pairs anchored at the smallest remaining element, canonical
/// order, arbitrary cardinality `q`.
fn pair_candidates(remaining: &[bool], n: u32, q: usize) -> Vec<(Vec<Label>, Vec<Label>)> {
    if q == 2 {
        return quad_candidates(remaining, n)
            .into_iter()
            .map(|(a, b, c, d)| (vec![a, d], vec![b, c]))
            .collect();
    }
    let avail: Vec<Label> = (1..=n).filter(|&x| remaining[x as usize]).collect();
    if avail.len() < 2 * q {
        return Vec::new();
    }
    let a = avail[0];
    let rest = &avail[1..];
    let mut out = Vec::new();
    let mut left_tail = Vec::with_capacity(q - 1);
    combinations(rest, q - 1, 0, &mut left_tail, &mut |tail| {
        let mut left = Vec::with_capacity(q);
        left.push(a);
        left.extend_from_slice(tail);
        let target: u64 = left.iter().map(|&x| x as u64).sum();
        let pool: Vec<Label> = rest.iter().copied().filter(|x| !tail.contains(x)).collect();
        let mut right = Vec::with_capacity(q);
        combinations(&pool, q, 0, &mut right, &mut |r| {
            if r.iter().map(|&x| x as u64).sum::<u64>() == target {
                out.push((left.clone(), r.to_vec()));
            }
        });
    });
    out.sort();
    out
}

fn combinations(
    pool: &[Label],
    k: usize,
    from: usize,
    acc: &mut Vec<Label>,
    f: &mut impl FnMut(&[Label]),
) {
    if acc.len() == k {
        f(acc);
        return;
    }
    let need = k - acc.len();
    for i in from..pool.len() {
        if pool.len() - i < need {
            break;
        }
        acc.push(pool[i]);
        combinations(pool, k, i + 1, acc, f);
        acc.pop();
    }
}

/// Exact number of canonical balanced partitions of `[4t]` (cardinality 2).
pub fn count_balanced_partitions(t: u32) -> u64 {
    fn rec(remaining: &mut [bool], n: u32, cnt: &mut u64) {
        let Some(a) = (1..=n).find(|&x| remaining[x as usize]) else {
            *cnt += 1;
            return;
        };
        for d in (a + 3)..=n {
            if !remaining[d as usize] {
                continue;
            }
            let total = a + d;
            for b in (a + 1)..=(total - 1) / 2 {
                if b >= d || !remaining[b as usize] {
                    continue;
                }
                let c = total - b;
                if c <= b || c >= d || !remaining[c as usize] {
                    continue;
                }
                for x in [a, b, c, d] {
                    remaining[x as usize] = false;
                }
                rec(remaining, n, cnt);
                for x in [a, b, c, d] {
                    remaining[x as usize] = true;
                }
            }
        }
    }
    assert!(t >= 1);
    let n = 4 * t;
    let mut remaining = vec![true; n as usize + 1];
    remaining[0] = false;
    let mut cnt = 0;
    rec(&mut remaining, n, &mut cnt);
    cnt
}

/// The constructive lower bound `(2t)!/(t!·2^t) = (2t-1)!!` on the number of
/// balanced partitions (force every set sum to `4t + 1`).
pub fn constructive_lower_bound(t: u32) -> u128 {
    (1..=t as u128).map(|k| 2 * k - 1).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::canonicalize;

    #[test]
    fn t1_has_exactly_one_partition() {
        let all: Vec<_> = enumerate_balanced_partitions(1, 2).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].raw_pairs(), vec![(vec![1, 4], vec![2, 3])]);
        assert_eq!(count_balanced_partitions(1), 1);
    }

    #[test]
    fn t2_enumeration_contains_paper_instances() {
        let all: Vec<_> = enumerate_balanced_partitions(2, 2).collect();
        assert_eq!(all.len() as u64, count_balanced_partitions(2));
        let optimal =
            canonicalize(vec![(vec![1, 8], vec![3, 6]), (vec![2, 7], vec![4, 5])]).unwrap();
        let suboptimal =
            canonicalize(vec![(vec![1, 4], vec![2, 3]), (vec![5, 8], vec![6, 7])]).unwrap();
        assert!(all.contains(&optimal));
        assert!(all.contains(&suboptimal));
    }

    #[test]
    fn enumeration_is_strictly_increasing_and_valid() {
        for t in 1..=4u32 {
            let mut prev: Option<DefiningSets> = None;
            for sets in enumerate_balanced_partitions(t, 2) {
                assert_eq!(sets.ground_size(), 4 * t);
                // canonicalize is the identity on enumerated output
                assert_eq!(DefiningSets::canonicalize(sets.raw_pairs()).unwrap(), sets);
                if let Some(p) = &prev {
                    assert!(*p < sets, "enumeration must be strictly increasing");
                }
                prev = Some(sets);
            }
        }
    }

    #[test]
    fn enumeration_count_matches_counter() {
        for t in 1..=4u32 {
            let n = enumerate_balanced_partitions(t, 2).count() as u64;
            assert_eq!(n, count_balanced_partitions(t));
        }
    }

    #[test]
    fn counts_dominate_constructive_bound() {
        for t in 1..=4u32 {
            assert!(count_balanced_partitions(t) as u128 >= constructive_lower_bound(t));
        }
        assert_eq!(constructive_lower_bound(2), 3);
        assert_eq!(constructive_lower_bound(6), 10395);
    }

    #[test]
    fn wider_cardinality_enumeration() {
        // odd total sum per pair: no balanced split of {1,…,6} exists
        assert_eq!(enumerate_balanced_partitions(1, 3).count(), 0);
        // {1,…,8} into one pair of 4-sets with sums 18 each
        let all: Vec<_> = enumerate_balanced_partitions(1, 4).collect();
        assert!(!all.is_empty());
        let known =
            canonicalize(vec![(vec![1, 2, 7, 8], vec![3, 4, 5, 6])]).unwrap();
        assert!(all.contains(&known));
        for sets in &all {
            assert_eq!(sets.ground_size(), 8);
            assert_eq!(sets.q(), 4);
        }
    }

    /// Brute-force reference for small `t`: evaluate every partition with the
    /// exhaustive adversary engine and take the minimum.
    fn brute_optimal(t: u32, p: u32) -> (u64, u64) {
        let params = crate::domain::Params::new(t, p).unwrap();
        let mut best = u64::MAX;
        let mut count = 0;
        for sets in enumerate_balanced_partitions(t, 2) {
            let d = adversary::worst_case(&sets, &params).unwrap().worst_case;
            if d < best {
                best = d;
                count = 1;
            } else if d == best {
                count += 1;
            }
        }
        (best, count)
    }

    #[test]
    fn find_optimal_matches_brute_force_for_small_t() {
        for (t, p) in [(1u32, 1u32), (2, 1), (2, 2), (3, 1), (3, 2)] {
            let r = find_optimal(t, p);
            let (d, c) = brute_optimal(t, p);
            assert_eq!((r.optimal_discrepancy, r.optimal_count), (d, c), "t={t} p={p}");
            assert!(r.exact);
            for w in &r.witnesses {
                let params = crate::domain::Params::new(t, p).unwrap();
                assert_eq!(adversary::worst_case(w, &params).unwrap().worst_case, d);
            }
        }
    }

    #[test]
    fn find_optimal_is_deterministic_across_jobs() {
        let base = find_optimal_with(
            3,
            1,
            &SearchOptions {
                jobs: Some(1),
                ..SearchOptions::default()
            },
        );
        for jobs in [2usize, 4] {
            let r = find_optimal_with(
                3,
                1,
                &SearchOptions {
                    jobs: Some(jobs),
                    ..SearchOptions::default()
                },
            );
            assert_eq!(r, base);
        }
    }

    #[test]
    fn budget_marks_result_inexact() {
        let r = find_optimal_with(
            3,
            1,
            &SearchOptions {
                budget: Some(1),
                ..SearchOptions::default()
            },
        );
        assert!(!r.exact);
    }

    #[test]
    fn unique_optima_are_the_known_families() {
        // the 8-element worked example is the unique optimum at (2, 1)
        let r = find_optimal(2, 1);
        assert_eq!((r.optimal_discrepancy, r.optimal_count), (4, 1));
        assert_eq!(
            r.witnesses[0].raw_pairs(),
            vec![(vec![1, 8], vec![3, 6]), (vec![2, 7], vec![4, 5])]
        );
        // the closed-form families are the unique optima at (4, 1) and (3, 2)
        let r = find_optimal(4, 1);
        assert_eq!(r.optimal_count, 1);
        assert_eq!(r.witnesses[0], crate::constructions::base_t4());
        let r = find_optimal(3, 2);
        assert_eq!(r.optimal_count, 1);
        assert_eq!(r.witnesses[0], crate::constructions::construct_p2(1));
    }

    #[test]
    fn optima_respect_defined_bound_windows() {
        use num_rational::Ratio;
        for (t, p) in [(4u32, 1u32), (3, 2)] {
            let r = find_optimal(t, p);
            let b = crate::constructions::bound_for(t, p);
            let d = Ratio::from_integer(r.optimal_discrepancy as i64);
            assert!(b.lower <= d, "t={t} p={p}: lower bound violated");
            if let Some(upper) = b.upper {
                assert!(d <= upper, "t={t} p={p}: upper bound violated");
            }
        }
    }
}
