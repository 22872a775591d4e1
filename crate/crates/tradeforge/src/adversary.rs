//! Exact worst-case total discrepancy under limited-magnitude popularity
//! swaps.
//!
//! [`worst_case`] maximizes `D = Σ_i |Σ(S'_{2i-1}) - Σ(S'_{2i})|` over all
//! valid swap sets and returns a smallest-cardinality maximizer. Two exact
//! engines sit behind the same contract:
//!
//! * ground size ≤ [`EXHAUSTIVE_GROUND_LIMIT`]: depth-first enumeration over
//!   labels in ascending order, branching on "label unswapped" versus each
//!   swap `(i, j)` with `j - i <= p`. For `p = 1` this walks the matchings of
//!   a path (Fibonacci-many leaves).
//! * larger grounds: `D` is rewritten as `max_s Σ_k s_k·δ_k` over sign
//!   vectors `s ∈ {±1}^t`, and for each fixed `s` the inner maximum is a
//!   max-weight matching on a banded interval graph, solved by dynamic
//!   programming over a `p`-bit occupancy window. This stays exact far beyond
//!   the reach of plain enumeration.
//!
//! Both engines maximize `(D, -|I|)` lexicographically and break remaining
//! ties by the lexicographically smallest sorted swap list, so results are
//! deterministic and mutually bit-identical (covered by tests).

use crate::domain::{DefiningSets, DomainError, Label, Layout, Params, PerturbedSets, SwapSet};

/// Largest ground size solved by plain depth-first enumeration. Beyond this
/// the sign-vector matching DP takes over (still exact).
pub const EXHAUSTIVE_GROUND_LIMIT: u32 = 36;

// The window DP needs 2^p states; magnitudes beyond this fall back to DFS.
const DP_MAX_MAGNITUDE: u32 = 12;

/// Result of a worst-case search.
///
/// `witness` is a smallest swap set attaining `worst_case`; `per_pair` is the
/// per-pair discrepancy breakdown under that witness (its sum equals
/// `worst_case`). `explored` counts solver steps (search-tree nodes for the
/// DFS engine, DP cell expansions for the matching engine) and is
/// reproducible across runs. `exact` is false only when a node budget was
/// exhausted; an inexact result is never silently returned as exact.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DiscrepancyReport {
    pub worst_case: u64,
    pub witness: SwapSet,
    pub per_pair: Vec<u64>,
    pub explored: u64,
    pub exact: bool,
}

/// Applies a swap set to defining sets, exchanging labels `i` and `j`
/// wherever they occur. Pair order and side order are preserved, so the
/// result lines up index-by-index with the input.
///
/// The swap set must be range-valid for the ground size (checked).
pub fn apply_swaps(sets: &DefiningSets, swaps: &SwapSet) -> PerturbedSets {
    let n = sets.ground_size();
    let mut perm: Vec<Label> = (0..=n).collect();
    for &(i, j) in swaps.swaps() {
        assert!(j <= n, "swap ({i},{j}) outside ground 1..={n}");
        perm[i as usize] = j;
        perm[j as usize] = i;
    }
    let pairs = sets
        .pairs()
        .iter()
        .map(|pair| {
            let mut a: Vec<Label> = pair.left().iter().map(|&x| perm[x as usize]).collect();
            let mut b: Vec<Label> = pair.right().iter().map(|&x| perm[x as usize]).collect();
            a.sort_unstable();
            b.sort_unstable();
            (a, b)
        })
        .collect();
    PerturbedSets::from_parts(pairs, n)
}

/// Total discrepancy `Σ_i |Σ(S'_{2i-1}) - Σ(S'_{2i})|` after applying `swaps`.
///
/// Accepts any range-valid swap set, including swaps internal to one set
/// (which leave that set unchanged).
pub fn total_discrepancy(sets: &DefiningSets, swaps: &SwapSet) -> u64 {
    apply_swaps(sets, swaps).total_discrepancy()
}

/// Exact worst-case discrepancy report for `sets` under `params`.
pub fn worst_case(sets: &DefiningSets, params: &Params) -> Result<DiscrepancyReport, DomainError> {
    worst_case_with_budget(sets, params, None)
}

/// [`worst_case`] with an optional step budget. When the budget runs out the
/// best result found so far is returned with `exact = false`.
pub fn worst_case_with_budget(
    sets: &DefiningSets,
    params: &Params,
    budget: Option<u64>,
) -> Result<DiscrepancyReport, DomainError> {
    if params.ground_size() != sets.ground_size() {
        return Err(DomainError::BadParams(format!(
            "params describe ground {} but sets have ground {}",
            params.ground_size(),
            sets.ground_size()
        )));
    }
    let layout = sets.layout();
    let budget = budget.unwrap_or(u64::MAX);
    let sol = if layout.n <= EXHAUSTIVE_GROUND_LIMIT || params.p > DP_MAX_MAGNITUDE {
        solve_dfs(&layout, params.p, params.exact_distance, budget)
    } else {
        solve_dp(&layout, params.p, params.exact_distance, budget)
    };
    let witness = SwapSet::for_ground(sol.witness, sets.ground_size())
        .expect("solver witnesses are valid by construction");
    let per_pair = apply_swaps(sets, &witness).per_pair_discrepancy();
    debug_assert!(!sol.exact || per_pair.iter().sum::<u64>() == sol.value);
    Ok(DiscrepancyReport {
        worst_case: sol.value,
        witness,
        per_pair,
        explored: sol.explored,
        exact: sol.exact,
    })
}

pub(crate) struct Solution {
    pub value: u64,
    pub witness: Vec<(Label, Label)>,
    pub explored: u64,
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// Depth-first enumeration engine
// ---------------------------------------------------------------------------

pub(crate) fn solve_dfs(layout: &Layout, p: u32, exact_distance: bool, budget: u64) -> Solution {
    let mut dfs = Dfs {
        pair_of: &layout.pair_of,
        sign_of: &layout.sign_of,
        n: layout.n,
        p,
        exact_distance,
        used: vec![false; layout.n as usize + 1],
        delta: vec![0i64; layout.t],
        sum_abs: 0,
        stack: Vec::new(),
        best_d: 0,
        best: Vec::new(),
        explored: 0,
        budget,
        stopped: false,
    };
    dfs.visit(1);
    Solution {
        value: dfs.best_d,
        witness: dfs.best,
        explored: dfs.explored,
        exact: !dfs.stopped,
    }
}

struct Dfs<'a> {
    pair_of: &'a [u16],
    sign_of: &'a [i8],
    n: u32,
    p: u32,
    exact_distance: bool,
    used: Vec<bool>,
    delta: Vec<i64>,
    sum_abs: u64,
    stack: Vec<(Label, Label)>,
    best_d: u64,
    best: Vec<(Label, Label)>,
    explored: u64,
    budget: u64,
    stopped: bool,
}

impl Dfs<'_> {
    fn visit(&mut self, i: u32) {
        self.explored += 1;
        if self.explored > self.budget {
            self.stopped = true;
            return;
        }
        if i > self.n {
            self.consider();
            return;
        }
        if self.used[i as usize] {
            self.visit(i + 1);
            return;
        }
        // label i takes part in no swap
        self.visit(i + 1);
        if self.stopped {
            return;
        }
        let lo = if self.exact_distance { self.p } else { 1 };
        for d in lo..=self.p {
            let j = i + d;
            if j > self.n {
                break;
            }
            if self.used[j as usize] {
                continue;
            }
            let (ki, kj) = (self.pair_of[i as usize], self.pair_of[j as usize]);
            let (si, sj) = (self.sign_of[i as usize], self.sign_of[j as usize]);
            if ki == kj && si == sj {
                // swap inside one set never changes any sum
                continue;
            }
            self.used[j as usize] = true;
            self.bump(ki, si, d as i64);
            self.bump(kj, sj, -(d as i64));
            self.stack.push((i, j));
            self.visit(i + 1);
            self.stack.pop();
            self.bump(ki, si, -(d as i64));
            self.bump(kj, sj, d as i64);
            self.used[j as usize] = false;
            if self.stopped {
                return;
            }
        }
    }

    fn bump(&mut self, k: u16, sign: i8, amount: i64) {
        if sign == 0 {
            return;
        }
        let k = k as usize;
        self.sum_abs -= self.delta[k].unsigned_abs();
        self.delta[k] += sign as i64 * amount;
        self.sum_abs += self.delta[k].unsigned_abs();
    }

    fn consider(&mut self) {
        let d = self.sum_abs;
        let better = match d.cmp(&self.best_d) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match self.stack.len().cmp(&self.best.len()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    !self.stack.is_empty() && self.stack.as_slice() < self.best.as_slice()
                }
            },
        };
        if better {
            self.best_d = d;
            self.best.clear();
            self.best.extend_from_slice(&self.stack);
        }
    }
}

// ---------------------------------------------------------------------------
// Sign-vector matching DP engine
// ---------------------------------------------------------------------------
//
// For a fixed sign vector s, every swap (i, j) contributes
// (j - i) * (c(i) - c(j)) to Σ_k s_k δ_k, where c(x) = s_{pair(x)} * side(x).
// Maximizing over valid swap sets is a max-weight matching on the band graph
// {(i, j) : j - i <= p}, solved left to right with a p-bit usage window.
// Taking the maximum over all 2^t sign vectors recovers max_I Σ_k |δ_k|.

/// Scratch buffers for the value-only DP, reused across calls.
#[derive(Clone)]
pub(crate) struct DpScratch {
    cur: Vec<i64>,
    next: Vec<i64>,
}

impl DpScratch {
    pub(crate) fn new() -> Self {
        DpScratch {
            cur: Vec::new(),
            next: Vec::new(),
        }
    }
}

#[inline]
fn coef(pair_of: &[u16], sign_of: &[i8], s_mask: u64, x: usize) -> i64 {
    let sign = sign_of[x] as i64;
    if sign == 0 {
        return 0;
    }
    if (s_mask >> pair_of[x]) & 1 == 1 {
        -sign
    } else {
        sign
    }
}

/// Max weight matching for one sign vector; value only.
fn dp_value_for_sign(
    layout: &Layout,
    p: u32,
    exact_distance: bool,
    s_mask: u64,
    scratch: &mut DpScratch,
) -> i64 {
    let n = layout.n as usize;
    let m = 1usize << p;
    let full = m - 1;
    scratch.cur.clear();
    scratch.cur.resize(m, i64::MIN);
    scratch.cur[full] = 0;
    scratch.next.clear();
    scratch.next.resize(m, i64::MIN);
    for i in 1..=n {
        let ci = coef(&layout.pair_of, &layout.sign_of, s_mask, i);
        for v in scratch.next.iter_mut() {
            *v = i64::MIN;
        }
        for mask in 0..m {
            let w = scratch.cur[mask];
            if w == i64::MIN {
                continue;
            }
            // leave label i unswapped (still matchable from the right)
            let nm = (mask << 1) & full;
            if w > scratch.next[nm] {
                scratch.next[nm] = w;
            }
            let lo = if exact_distance { p } else { 1 };
            for d in lo..=p {
                let d = d as usize;
                if d > i - 1 {
                    break;
                }
                if mask & (1 << (d - 1)) != 0 {
                    continue;
                }
                let j = i - d;
                if layout.pair_of[j] == layout.pair_of[i] && layout.sign_of[j] == layout.sign_of[i]
                {
                    continue;
                }
                let wt = d as i64 * (coef(&layout.pair_of, &layout.sign_of, s_mask, j) - ci);
                if wt <= 0 {
                    continue;
                }
                let nm = (((mask | (1 << (d - 1))) << 1) & full) | 1;
                let cand = w + wt;
                if cand > scratch.next[nm] {
                    scratch.next[nm] = cand;
                }
            }
        }
        std::mem::swap(&mut scratch.cur, &mut scratch.next);
    }
    scratch.cur.iter().copied().max().unwrap_or(0).max(0)
}

/// Exact maximum of the total discrepancy for a (possibly partial) layout.
/// Unassigned labels may take part in swaps but contribute nothing, so for a
/// partial assignment this is a valid lower bound on the worst case of every
/// completion.
pub(crate) fn max_discrepancy_value(
    layout: &Layout,
    p: u32,
    exact_distance: bool,
    scratch: &mut DpScratch,
) -> u64 {
    if layout.t == 0 {
        return 0;
    }
    debug_assert!(layout.t <= 62 && p <= DP_MAX_MAGNITUDE);
    let mut best = 0i64;
    for s_mask in 0..(1u64 << layout.t) {
        let w = dp_value_for_sign(layout, p, exact_distance, s_mask, scratch);
        if w > best {
            best = w;
        }
    }
    best as u64
}

/// Outcome of [`max_discrepancy_bounded`].
pub(crate) enum BoundedEval {
    /// Some sign vector already beats the cutoff; the true maximum exceeds it.
    Exceeds,
    /// Exact maximum, at most the cutoff.
    Exact(u64),
}

/// Like [`max_discrepancy_value`] but returns early once the maximum provably
/// exceeds `cutoff`. The optimal-partition search uses this both to discard
/// candidates and to prune partial assignments.
pub(crate) fn max_discrepancy_bounded(
    layout: &Layout,
    p: u32,
    exact_distance: bool,
    scratch: &mut DpScratch,
    cutoff: u64,
) -> BoundedEval {
    if layout.t == 0 {
        return BoundedEval::Exact(0);
    }
    debug_assert!(layout.t <= 62 && p <= DP_MAX_MAGNITUDE);
    let mut best = 0i64;
    for s_mask in 0..(1u64 << layout.t) {
        let w = dp_value_for_sign(layout, p, exact_distance, s_mask, scratch);
        if w as u64 > cutoff {
            return BoundedEval::Exceeds;
        }
        if w > best {
            best = w;
        }
    }
    BoundedEval::Exact(best as u64)
}

/// Weight/count value pair ordered by weight first, then fewer edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Wc {
    w: i64,
    c: u32,
}

const WC_NONE: Wc = Wc { w: i64::MIN, c: 0 };

#[inline]
fn wc_better(cand: Wc, cur: Wc) -> bool {
    cand.w > cur.w || (cand.w == cur.w && cand.c < cur.c)
}

/// Full report via the sign DP: value, minimum witness cardinality, and the
/// lexicographically smallest witness among minimum-cardinality maximizers.
fn solve_dp(layout: &Layout, p: u32, exact_distance: bool, budget: u64) -> Solution {
    assert!(layout.t <= 62, "sign enumeration needs t <= 62");
    assert!(p <= DP_MAX_MAGNITUDE);
    let n = layout.n as usize;
    let mut explored: u64 = 0;
    let mut exact = true;
    let mut best = Wc { w: 0, c: 0 };
    let mut qualifying: Vec<u64> = Vec::new();
    for s_mask in 0..(1u64 << layout.t) {
        if explored.saturating_add(n as u64) > budget {
            exact = false;
            break;
        }
        explored += n as u64;
        let v = dp_value_count_for_sign(layout, p, exact_distance, s_mask);
        if v.w > best.w || (v.w == best.w && v.c < best.c) {
            best = v;
            qualifying.clear();
            qualifying.push(s_mask);
        } else if v.w == best.w && v.c == best.c && v.w > 0 {
            qualifying.push(s_mask);
        }
    }
    if best.w <= 0 {
        return Solution {
            value: 0,
            witness: Vec::new(),
            explored,
            exact,
        };
    }
    let mut witness: Option<Vec<(Label, Label)>> = None;
    for &s_mask in &qualifying {
        let cand = reconstruct_for_sign(layout, p, exact_distance, s_mask, best);
        if witness.as_ref().is_none_or(|w| cand < *w) {
            witness = Some(cand);
        }
    }
    Solution {
        value: best.w as u64,
        witness: witness.unwrap_or_default(),
        explored,
        exact,
    }
}

/// Same DP as [`dp_value_for_sign`] but also tracks the minimum number of
/// swaps among maximum-weight matchings.
fn dp_value_count_for_sign(layout: &Layout, p: u32, exact_distance: bool, s_mask: u64) -> Wc {
    let n = layout.n as usize;
    let m = 1usize << p;
    let full = m - 1;
    let mut cur = vec![WC_NONE; m];
    cur[full] = Wc { w: 0, c: 0 };
    let mut next = vec![WC_NONE; m];
    for i in 1..=n {
        let ci = coef(&layout.pair_of, &layout.sign_of, s_mask, i);
        for v in next.iter_mut() {
            *v = WC_NONE;
        }
        for (mask, &v) in cur.iter().enumerate() {
            if v.w == i64::MIN {
                continue;
            }
            let nm = (mask << 1) & full;
            if wc_better(v, next[nm]) {
                next[nm] = v;
            }
            let lo = if exact_distance { p } else { 1 };
            for d in lo..=p {
                let d = d as usize;
                if d > i - 1 {
                    break;
                }
                if mask & (1 << (d - 1)) != 0 {
                    continue;
                }
                let j = i - d;
                if layout.pair_of[j] == layout.pair_of[i] && layout.sign_of[j] == layout.sign_of[i]
                {
                    continue;
                }
                let wt = d as i64 * (coef(&layout.pair_of, &layout.sign_of, s_mask, j) - ci);
                if wt <= 0 {
                    continue;
                }
                let nm = (((mask | (1 << (d - 1))) << 1) & full) | 1;
                let cand = Wc {
                    w: v.w + wt,
                    c: v.c + 1,
                };
                if wc_better(cand, next[nm]) {
                    next[nm] = cand;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut out = Wc { w: 0, c: 0 };
    for v in cur {
        if v.w != i64::MIN && wc_better(v, out) {
            out = v;
        }
    }
    out
}

/// Lexicographically smallest sorted swap list among matchings achieving the
/// target (weight, cardinality) for one sign vector.
///
/// Builds a backward table `bdp[i][mask]` = best value over labels `>= i`
/// given the usage window, then commits edges in ascending `(i, j)` order
/// whenever an optimal completion remains.
fn reconstruct_for_sign(
    layout: &Layout,
    p: u32,
    exact_distance: bool,
    s_mask: u64,
    target: Wc,
) -> Vec<(Label, Label)> {
    let n = layout.n as usize;
    let pw = p as usize;
    let m = 1usize << pw;
    let c = |x: usize| coef(&layout.pair_of, &layout.sign_of, s_mask, x);
    let same_set = |a: usize, b: usize| {
        layout.pair_of[a] == layout.pair_of[b] && layout.sign_of[a] == layout.sign_of[b]
    };
    // bdp[i][mask]: best over labels >= i; mask bit r = label i+r used or > n.
    let mut bdp = vec![vec![WC_NONE; m]; n + 2];
    for v in bdp[n + 1].iter_mut() {
        *v = Wc { w: 0, c: 0 };
    }
    for i in (1..=n).rev() {
        let top = if i + pw > n { 1usize << (pw - 1) } else { 0 };
        for mask in 0..m {
            if mask & 1 == 1 {
                bdp[i][mask] = bdp[i + 1][(mask >> 1) | top];
                continue;
            }
            let mut best = bdp[i + 1][(mask >> 1) | top];
            let lo = if exact_distance { pw } else { 1 };
            for d in lo..=pw {
                let j = i + d;
                if j > n {
                    break;
                }
                if d < pw && mask & (1 << d) != 0 {
                    continue;
                }
                if same_set(i, j) {
                    continue;
                }
                let wt = d as i64 * (c(i) - c(j));
                if wt <= 0 {
                    continue;
                }
                let nm = (((mask | (1 << d)) >> 1) | top) & (m - 1);
                let tail = bdp[i + 1][nm];
                if tail.w == i64::MIN {
                    continue;
                }
                let cand = Wc {
                    w: wt + tail.w,
                    c: 1 + tail.c,
                };
                if wc_better(cand, best) {
                    best = cand;
                }
            }
            bdp[i][mask] = best;
        }
    }
    let mut used = vec![false; n + 2];
    let mut out: Vec<(Label, Label)> = Vec::with_capacity(target.c as usize);
    let mut acc = Wc { w: 0, c: 0 };
    let mut prev_left = 0usize;
    while acc.c < target.c {
        let mut committed = false;
        'scan: for a in (prev_left + 1)..=n {
            if used[a] {
                continue;
            }
            let lo = if exact_distance { pw } else { 1 };
            for d in lo..=pw {
                let b = a + d;
                if b > n {
                    break;
                }
                if used[b] || same_set(a, b) {
                    continue;
                }
                let wt = d as i64 * (c(a) - c(b));
                if wt <= 0 {
                    continue;
                }
                let mut mask = 0usize;
                for r in 0..pw {
                    let pos = a + 1 + r;
                    if pos > n || used[pos] || pos == b {
                        mask |= 1 << r;
                    }
                }
                let tail = bdp[a + 1][mask];
                if tail.w != i64::MIN
                    && acc.w + wt + tail.w == target.w
                    && acc.c + 1 + tail.c == target.c
                {
                    used[a] = true;
                    used[b] = true;
                    out.push((a as Label, b as Label));
                    acc.w += wt;
                    acc.c += 1;
                    prev_left = a;
                    committed = true;
                    break 'scan;
                }
            }
        }
        assert!(committed, "reconstruction lost the optimal matching");
    }
    out
}
