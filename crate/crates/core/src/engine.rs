//! The peel matching: the sparse set `K`, stars, unhappy vertices, the local
//! initial matching and rounds of bounded-length augmenting-path flips.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::generators::Instance;
use crate::graph::{
    check_sparse_dense, k_neighborhood, sparse_witness, BallScratch, Edge, Graph, Matching, Vertex, VertexSet,
};
use crate::labeling::{sparse_labeling, Labeling};
use crate::oracle;
use crate::par::Exec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("schedule constant overflows u64: {0}")]
    ScheduleOverflow(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invariant violated after flipping {path:?}: {detail}")]
    Invariant { path: Vec<Vertex>, detail: String },
}

/// Radii and budgets for one peel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub r: usize,
    pub r_prime: usize,
    pub r1: usize,
    pub n0: usize,
    /// Family size cap used by the diagnostics.
    pub c_tilde: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::practical()
    }
}

impl Schedule {
    pub fn practical() -> Schedule {
        Schedule { r: 1, r_prime: 10, r1: 8, n0: 9, c_tilde: 12 }
    }

    /// The constants used in the proof: `r' = 3r + 7`, `c0 = d^{-r'}`,
    /// `r1 = r2 = ⌈16/c0⌉ + 1` and `c̃ = 2d/c0`. Rejected when any of them
    /// does not fit in a `u64`.
    pub fn theory(d: usize, r: usize, n0: usize) -> Result<Schedule, EngineError> {
        if d < 2 {
            return Err(EngineError::InvalidSchedule("theory schedule needs d >= 2".into()));
        }
        let r_prime = 3 * r + 7;
        let magnitude = |e: usize| format!("d^{} ~ 10^{:.1}", e, e as f64 * (d as f64).log10());
        let inv_c0 = (d as u64)
            .checked_pow(r_prime as u32)
            .ok_or_else(|| EngineError::ScheduleOverflow(format!("1/c0 = {}", magnitude(r_prime))))?;
        let r2 = inv_c0
            .checked_mul(16)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(|| EngineError::ScheduleOverflow(format!("r2 = 16*{} + 1", magnitude(r_prime))))?;
        let c_tilde = inv_c0
            .checked_mul(2 * d as u64)
            .ok_or_else(|| EngineError::ScheduleOverflow(format!("c~ = 2*{}", magnitude(r_prime + 1))))?;
        let r1 = usize::try_from(r2).map_err(|_| EngineError::ScheduleOverflow(format!("r1 = {r2}")))?;
        Ok(Schedule { r, r_prime, r1, n0, c_tilde })
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.r == 0 || self.r_prime == 0 || self.r1 == 0 || self.n0 == 0 || self.c_tilde == 0 {
            return Err(EngineError::InvalidSchedule(format!("all schedule values must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Path-length budgets of the successive rounds: 1, 3, 5, … up to `n0`,
/// followed by `n0` itself when it is even.
pub fn round_budgets(n0: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=n0).step_by(2).collect();
    if n0 % 2 == 0 && n0 > 0 {
        out.push(n0);
    }
    out
}

/// The sparse set `K` with its bookkeeping.
#[derive(Clone, Debug)]
pub struct KContext {
    pub k: VertexSet,
    pub j: VertexSet,
    pub r: usize,
    pub r_prime: usize,
    /// Largest distance from a vertex to `K`; `None` if some vertex cannot
    /// reach `K`.
    pub achieved_radius: Option<usize>,
    pub dense: bool,
    pub warnings: Vec<String>,
}

impl KContext {
    /// A context with `K = ∅`, so every unmatched vertex of degree at least
    /// `d` is unhappy.
    pub fn empty(inst: &Instance) -> KContext {
        KContext {
            k: VertexSet::new(inst.n()),
            j: inst.j.clone(),
            r: 0,
            r_prime: 0,
            achieved_radius: None,
            dense: inst.n() == 0,
            warnings: vec!["empty K".into()],
        }
    }

    pub fn with_k(inst: &Instance, k: VertexSet) -> KContext {
        KContext { k, ..KContext::empty(inst) }
    }
}

/// Greedy construction of `K` over an `(r+2)`-sparse labeling: label class by
/// label class, add every vertex of degree at most `d` that keeps `J ∪ K`
/// `(r+2)`-sparse.
pub fn build_k(inst: &Instance, r: usize, r_prime: usize, labeling: &Labeling) -> KContext {
    assert!(labeling.k >= r + 2, "labeling must be (r+2)-sparse");
    let g = &inst.graph;
    let n = g.n();
    let mut blocked = VertexSet::new(n);
    let mut scratch = BallScratch::new(n);
    let mut mark_ball = |v: Vertex, blocked: &mut VertexSet| {
        for &w in scratch.ball(g, v, r + 2) {
            blocked.insert(w);
        }
    };
    for x in inst.j.iter() {
        mark_ball(x, &mut blocked);
    }
    let mut classes: Vec<Vec<Vertex>> = vec![Vec::new(); labeling.m];
    for v in 0..n {
        classes[labeling.label(v)].push(v);
    }
    let mut k = VertexSet::new(n);
    for class in classes {
        let picked: Vec<Vertex> =
            class.into_iter().filter(|&x| g.degree(x) <= inst.d && !blocked.contains(x)).collect();
        for x in picked {
            k.insert(x);
            mark_ball(x, &mut blocked);
        }
    }
    let mut warnings = Vec::new();
    if let Some((a, b)) = sparse_witness(g, &inst.j.union(&k), r + 2) {
        warnings.push(format!("J ∪ K not {}-sparse: {a} {b}", r + 2));
    }
    let dist = g.distances_from(k.as_slice(), None);
    let achieved_radius = dist.iter().try_fold(0usize, |acc, d| d.map(|d| acc.max(d)));
    let dense = check_sparse_dense(g, &k, r_prime).1;
    if !dense {
        warnings.push(format!("K not {r_prime}-dense; achieved radius {achieved_radius:?}"));
    }
    KContext { k, j: inst.j.clone(), r, r_prime, achieved_radius, dense, warnings }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarKind {
    Complete,
    Heavy,
    Light,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Star {
    pub center: Vertex,
    /// Degree-`d` vertices of `N_1(center)`, sorted.
    pub members: Vec<Vertex>,
    pub kind: StarKind,
    /// Uncovered members except the largest one.
    pub truncated: Vec<Vertex>,
}

pub fn star_members(inst: &Instance, x: Vertex) -> Vec<Vertex> {
    let g = &inst.graph;
    let mut out: Vec<Vertex> =
        std::iter::once(x).chain(g.neighbors(x).iter().copied()).filter(|&y| g.degree(y) == inst.d).collect();
    out.sort_unstable();
    out
}

pub fn classify_stars(inst: &Instance, kctx: &KContext, m: &Matching) -> Vec<Star> {
    kctx.k
        .iter()
        .map(|x| {
            let members = star_members(inst, x);
            let mut uncovered: Vec<Vertex> = members.iter().copied().filter(|&y| !m.is_covered(y)).collect();
            let kind = match uncovered.len() {
                0 => StarKind::Complete,
                1 => StarKind::Heavy,
                _ => StarKind::Light,
            };
            uncovered.pop();
            Star { center: x, members, kind, truncated: uncovered }
        })
        .collect()
}

/// Unmatched vertices of degree at least `d` outside `N_1(K)`, together with
/// all truncated stars.
pub fn unhappy_set(inst: &Instance, kctx: &KContext, m: &Matching) -> VertexSet {
    let g = &inst.graph;
    let near_k = k_neighborhood(g, &kctx.k, 1);
    let mut mask: Vec<bool> =
        (0..g.n()).map(|v| !m.is_covered(v) && g.degree(v) >= inst.d && !near_k.contains(v)).collect();
    for star in classify_stars(inst, kctx, m) {
        for v in star.truncated {
            mask[v] = true;
        }
    }
    VertexSet::from_mask(mask)
}

/// Read-only view used by the path searches.
pub struct PathContext<'a> {
    pub g: &'a Graph,
    pub d: usize,
    pub m: &'a Matching,
    pub unhappy: VertexSet,
    complete_member: Vec<bool>,
}

impl<'a> PathContext<'a> {
    pub fn new(inst: &'a Instance, kctx: &KContext, m: &'a Matching) -> PathContext<'a> {
        let mut complete_member = vec![false; inst.n()];
        for star in classify_stars(inst, kctx, m) {
            if star.kind == StarKind::Complete {
                for v in star.members {
                    complete_member[v] = true;
                }
            }
        }
        PathContext { g: &inst.graph, d: inst.d, m, unhappy: unhappy_set(inst, kctx, m), complete_member }
    }

    /// Endpoint rule for an alternating path of length `len` ending at `w`.
    pub fn is_valid_end(&self, len: usize, w: Vertex) -> bool {
        if len % 2 == 1 {
            !self.m.is_covered(w)
        } else {
            len > 0 && (self.g.degree(w) < self.d || self.complete_member[w])
        }
    }

    /// Calls `visit(path)` for every augmenting path of length at most
    /// `max_len` starting at `u`, in DFS order (neighbors ascending).
    pub fn for_each_augmenting<F: FnMut(&[Vertex])>(&self, u: Vertex, max_len: usize, mut visit: F) {
        if !self.unhappy.contains(u) || max_len == 0 {
            return;
        }
        let mut on_path = vec![false; self.g.n()];
        let mut path = vec![u];
        on_path[u] = true;
        self.dfs(&mut path, &mut on_path, max_len, &mut visit);
    }

    fn dfs<F: FnMut(&[Vertex])>(&self, path: &mut Vec<Vertex>, on_path: &mut [bool], max_len: usize, visit: &mut F) {
        let len = path.len() - 1;
        if len == max_len {
            return;
        }
        let v = *path.last().unwrap();
        let mut step = |w: Vertex, path: &mut Vec<Vertex>, on_path: &mut [bool]| {
            if on_path[w] {
                return;
            }
            path.push(w);
            on_path[w] = true;
            if self.is_valid_end(len + 1, w) {
                visit(path);
            }
            self.dfs(path, on_path, max_len, visit);
            on_path[w] = false;
            path.pop();
        };
        if len % 2 == 0 {
            for &w in self.g.neighbors(v) {
                if self.m.partner(v) != Some(w) {
                    step(w, path, on_path);
                }
            }
        } else if let Some(w) = self.m.partner(v) {
            step(w, path, on_path);
        }
    }

    /// Follows the unique alternating walk from `u` whose labels spell
    /// `pattern`, returning it if it is an augmenting path.
    pub fn walk_pattern(&self, lab: &Labeling, u: Vertex, pattern: &[usize]) -> Option<Vec<Vertex>> {
        if !self.unhappy.contains(u) || pattern.len() < 2 || lab.label(u) != pattern[0] {
            return None;
        }
        let mut path = vec![u];
        for (i, &want) in pattern.iter().enumerate().skip(1) {
            let v = *path.last().unwrap();
            let next = if (i - 1) % 2 == 0 {
                self.g
                    .neighbors(v)
                    .iter()
                    .copied()
                    .find(|&w| lab.label(w) == want && self.m.partner(v) != Some(w))
            } else {
                self.m.partner(v).filter(|&w| lab.label(w) == want)
            }?;
            if path.contains(&next) {
                return None;
            }
            path.push(next);
        }
        self.is_valid_end(path.len() - 1, *path.last().unwrap()).then_some(path)
    }
}

/// All augmenting paths from `u` of length at most `max_len`.
pub fn augmenting_paths_from(ctx: &PathContext, u: Vertex, max_len: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    ctx.for_each_augmenting(u, max_len, |p| out.push(p.to_vec()));
    out
}

/// Augmenting paths of length at most `max_len` whose labels spell
/// `pattern`, ordered by start vertex. With a `(max_len + 2)`-sparse
/// labeling these are pairwise at distance at least 3.
pub fn find_augmenting_paths(
    inst: &Instance,
    kctx: &KContext,
    m: &Matching,
    lab: &Labeling,
    max_len: usize,
    pattern: &[usize],
) -> Vec<Vec<Vertex>> {
    let ctx = PathContext::new(inst, kctx, m);
    paths_for_pattern(&ctx, lab, max_len, pattern)
}

fn paths_for_pattern(ctx: &PathContext, lab: &Labeling, max_len: usize, pattern: &[usize]) -> Vec<Vec<Vertex>> {
    if pattern.len() > max_len + 1 {
        return Vec::new();
    }
    ctx.unhappy.iter().filter_map(|u| ctx.walk_pattern(lab, u, pattern)).collect()
}

/// Some augmenting path of length at most `max_len`, searching starts in
/// increasing order.
pub fn first_augmenting_path(inst: &Instance, kctx: &KContext, m: &Matching, max_len: usize) -> Option<Vec<Vertex>> {
    let ctx = PathContext::new(inst, kctx, m);
    for u in ctx.unhappy.iter() {
        let mut found = None;
        ctx.for_each_augmenting(u, max_len, |p| {
            if found.is_none() {
                found = Some(p.to_vec())
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Swaps matched and unmatched edges along `path` (which starts with an
/// unmatched edge).
pub fn flip_path(m: &mut Matching, path: &[Vertex]) {
    for i in (1..path.len().saturating_sub(1)).step_by(2) {
        m.remove(path[i], path[i + 1]);
    }
    for i in (0..path.len().saturating_sub(1)).step_by(2) {
        m.insert(path[i], path[i + 1]);
    }
}

/// Per-round record of the flip log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundLog {
    pub round: usize,
    pub path_len_budget: usize,
    pub flips: usize,
    pub sym_diff_vertices: usize,
    pub unhappy_count: usize,
}

impl RoundLog {
    /// `|V(M_i △ M_{i+1})| ≤ (2i + 2)·|U_{M_i}|`.
    pub fn within_bound(&self) -> bool {
        self.sym_diff_vertices <= (2 * self.round + 2) * self.unhappy_count
    }
}

pub fn flip_log_csv(log: &[RoundLog]) -> String {
    let mut s = String::from("round,path_len_budget,flips,sym_diff_vertices,unhappy_count\n");
    for r in log {
        let _ = writeln!(s, "{},{},{},{},{}", r.round, r.path_len_budget, r.flips, r.sym_diff_vertices, r.unhappy_count);
    }
    s
}

#[derive(Clone, Debug)]
pub struct EngineState {
    pub matching: Matching,
    pub unhappy: VertexSet,
    pub round: usize,
    pub flip_log: Vec<RoundLog>,
    /// `M_0, M_1, …` when history recording is enabled.
    pub history: Vec<Matching>,
}

impl EngineState {
    pub fn new(inst: &Instance, kctx: &KContext, matching: Matching) -> EngineState {
        let unhappy = unhappy_set(inst, kctx, &matching);
        EngineState { matching, unhappy, round: 0, flip_log: Vec::new(), history: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub exec: Exec,
    pub record_history: bool,
    /// Re-derive stars and `U` after every single flip and check the flip
    /// invariants.
    pub check_each_flip: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { exec: Exec::default(), record_history: false, check_each_flip: true }
    }
}

/// Flips `paths` one after another, checking after each flip that the start
/// left `U`, `U` did not grow, `J` stayed covered and no complete star became
/// light.
pub fn flip_round(
    inst: &Instance,
    kctx: &KContext,
    state: &mut EngineState,
    paths: &[Vec<Vertex>],
    check: bool,
) -> Result<(), EngineError> {
    for p in paths {
        let before_stars = if check { classify_stars(inst, kctx, &state.matching) } else { Vec::new() };
        let j_covered: Vec<Vertex> = if check {
            inst.j.iter().filter(|&v| state.matching.is_covered(v)).collect()
        } else {
            Vec::new()
        };
        flip_path(&mut state.matching, p);
        let after = unhappy_set(inst, kctx, &state.matching);
        if check {
            let fail = |detail: String| Err(EngineError::Invariant { path: p.clone(), detail });
            if !state.matching.is_valid_in(&inst.graph) {
                return fail("matching invalid".into());
            }
            if after.contains(p[0]) {
                return fail(format!("start {} still unhappy", p[0]));
            }
            if let Some(v) = after.iter().find(|&v| !state.unhappy.contains(v)) {
                return fail(format!("vertex {v} became unhappy"));
            }
            if let Some(&v) = j_covered.iter().find(|&&v| !state.matching.is_covered(v)) {
                return fail(format!("degree-(d+1) vertex {v} lost its cover"));
            }
            let after_stars = classify_stars(inst, kctx, &state.matching);
            for (b, a) in before_stars.iter().zip(&after_stars) {
                if b.kind == StarKind::Complete && a.kind == StarKind::Light {
                    return fail(format!("complete star at {} became light", b.center));
                }
            }
        }
        state.unhappy = after;
    }
    Ok(())
}

/// Collects the label patterns of all current augmenting paths of length at
/// most `max_len`.
fn current_patterns(ctx: &PathContext, lab: &Labeling, max_len: usize, exec: Exec) -> BTreeSet<Vec<usize>> {
    let starts: Vec<Vertex> = ctx.unhappy.iter().collect();
    let per_start = exec.map(&starts, |&u| {
        let mut pats = BTreeSet::new();
        ctx.for_each_augmenting(u, max_len, |p| {
            pats.insert(p.iter().map(|&v| lab.label(v)).collect::<Vec<_>>());
        });
        pats
    });
    per_start.into_iter().flatten().collect()
}

/// Runs the rounds with budgets `1, 3, 5, …, n0`. Each round sweeps the label
/// patterns of an `(L+2)`-sparse labeling in lexicographic order, flipping
/// all paths of a pattern at once, and repeats until a full pass flips
/// nothing.
pub fn run_rounds(
    inst: &Instance,
    kctx: &KContext,
    initial: Matching,
    n0: usize,
    opts: RunOptions,
) -> Result<EngineState, EngineError> {
    let mut state = EngineState::new(inst, kctx, initial);
    if opts.record_history {
        state.history.push(state.matching.clone());
    }
    for (round, budget) in round_budgets(n0).into_iter().enumerate() {
        if state.unhappy.is_empty() {
            break;
        }
        state.round = round;
        let lab = sparse_labeling(&inst.graph, budget + 2);
        let start = state.matching.clone();
        let unhappy_count = state.unhappy.len();
        let mut flips = 0;
        loop {
            let patterns = {
                let ctx = PathContext::new(inst, kctx, &state.matching);
                current_patterns(&ctx, &lab, budget, opts.exec)
            };
            let mut pass_flips = 0;
            for pat in &patterns {
                let paths = {
                    let ctx = PathContext::new(inst, kctx, &state.matching);
                    paths_for_pattern(&ctx, &lab, budget, pat)
                };
                pass_flips += paths.len();
                flip_round(inst, kctx, &mut state, &paths, opts.check_each_flip)?;
            }
            flips += pass_flips;
            if pass_flips == 0 {
                break;
            }
        }
        state.flip_log.push(RoundLog {
            round,
            path_len_budget: budget,
            flips,
            sym_diff_vertices: start.symmetric_difference_vertices(&state.matching),
            unhappy_count,
        });
        if opts.record_history {
            state.history.push(state.matching.clone());
        }
    }
    Ok(state)
}

/// Why no local cover was found around a degree-`(d+1)` vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialMatchingFailure {
    pub center: Vertex,
    /// Vertices of the target set left uncovered by the partial matching.
    pub uncovered: Vec<Vertex>,
    /// A set `S` with more odd components inside the target than `|S|`,
    /// when the neighborhood is small enough to search for one.
    pub tutte_set: Option<Vec<Vertex>>,
    pub partial: Matching,
}

/// Node budget of the per-neighborhood backtracking search.
pub const INITIAL_MATCHING_BUDGET: usize = 2_000_000;

/// For each `x ∈ J`, the lexicographically smallest matching of
/// `G[N_{ρ+1}(x)]` covering every vertex of degree at least `d` in `N_ρ(x)`,
/// `ρ = ⌊r1/4⌋`. Vertices already matched for an earlier center stay fixed.
pub fn initial_matching(inst: &Instance, r1: usize) -> Result<Matching, Box<InitialMatchingFailure>> {
    let (m, mut failures) = initial_matching_inner(inst, r1, true);
    match failures.pop() {
        Some(f) => Err(Box::new(f)),
        None => Ok(m),
    }
}

/// Like [`initial_matching`], but skips centers whose neighborhood has no
/// cover and reports them instead of stopping.
pub fn initial_matching_lenient(inst: &Instance, r1: usize) -> (Matching, Vec<InitialMatchingFailure>) {
    initial_matching_inner(inst, r1, false)
}

fn initial_matching_inner(inst: &Instance, r1: usize, stop_at_failure: bool) -> (Matching, Vec<InitialMatchingFailure>) {
    let g = &inst.graph;
    let rho = r1 / 4;
    let mut m = Matching::new(g.n());
    let mut failures = Vec::new();
    for x in inst.j.iter() {
        let outer = g.ball(x, rho + 1);
        let inner = g.ball(x, rho);
        let mut allowed = vec![false; g.n()];
        for &v in &outer {
            allowed[v] = true;
        }
        let z: Vec<Vertex> = inner.iter().copied().filter(|&v| g.degree(v) >= inst.d).collect();
        let mut local = m.clone();
        let mut nodes = 0usize;
        if cover_backtrack(g, &z, 0, &allowed, &mut local, &mut nodes) {
            m = local;
            continue;
        }
        let uncovered: Vec<Vertex> = z.iter().copied().filter(|&v| !m.is_covered(v)).collect();
        let free: Vec<Vertex> = outer.iter().copied().filter(|&v| !m.is_covered(v)).collect();
        let tutte_set = if free.len() <= 20 {
            let (h, map) = g.induced(&free);
            let zmask = VertexSet::from_iter(h.n(), (0..h.n()).filter(|&i| z.contains(&map[i])));
            match oracle::tutte_check(&h, &zmask) {
                Ok(oracle::TutteVerdict::Violated(s)) => Some(s.into_iter().map(|i| map[i]).collect()),
                _ => None,
            }
        } else {
            None
        };
        failures.push(InitialMatchingFailure { center: x, uncovered, tutte_set, partial: m.clone() });
        if stop_at_failure {
            break;
        }
    }
    (m, failures)
}

fn cover_backtrack(
    g: &Graph,
    z: &[Vertex],
    from: usize,
    allowed: &[bool],
    m: &mut Matching,
    nodes: &mut usize,
) -> bool {
    *nodes += 1;
    if *nodes > INITIAL_MATCHING_BUDGET {
        return false;
    }
    let Some(i) = (from..z.len()).find(|&i| !m.is_covered(z[i])) else {
        return true;
    };
    let v = z[i];
    for &w in g.neighbors(v) {
        if allowed[w] && !m.is_covered(w) {
            m.insert(v, w);
            if cover_backtrack(g, z, i + 1, allowed, m, nodes) {
                return true;
            }
            m.remove(v, w);
        }
    }
    false
}

/// Edge list of `m` restricted to `vertices`.
pub fn matching_edges_within(m: &Matching, vertices: &[Vertex]) -> Vec<Edge> {
    m.edges().into_iter().filter(|e| vertices.contains(&e.0) && vertices.contains(&e.1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{plant_high_degree, rotation_cycle};

    fn inst(g: Graph, d: usize) -> Instance {
        Instance::new(g, d, None).unwrap()
    }

    #[test]
    fn budgets() {
        assert_eq!(round_budgets(9), vec![1, 3, 5, 7, 9]);
        assert_eq!(round_budgets(4), vec![1, 3, 4]);
        assert_eq!(round_budgets(1), vec![1]);
    }

    #[test]
    fn theory_schedule_values_and_overflow() {
        let s = Schedule::theory(2, 1, 9).unwrap();
        assert_eq!((s.r_prime, s.r1, s.c_tilde), (10, 16 * 1024 + 1, 4 * 1024));
        assert!(matches!(Schedule::theory(3, 20, 9), Err(EngineError::ScheduleOverflow(_))));
        assert!(Schedule { r_prime: 0, ..Schedule::practical() }.validate().is_err());
    }

    #[test]
    fn k_on_long_cycle() {
        let c = rotation_cycle(100).unwrap();
        let lab = sparse_labeling(&c.graph, 3);
        let k = build_k(&c, 1, 10, &lab);
        assert!(check_sparse_dense(&c.graph, &k.k, 3).0);
        assert!(k.dense);
        assert!(k.k.len() >= 20 && k.k.len() <= 25, "{}", k.k.len());
    }

    #[test]
    fn k_on_single_vertex() {
        let i = inst(Graph::empty(1), 0);
        let k = build_k(&i, 1, 10, &sparse_labeling(&i.graph, 3));
        assert_eq!(k.k.as_slice(), &[0]);
        assert!(k.dense);
    }

    #[test]
    fn k_avoids_planted_vertex() {
        let base = rotation_cycle(6).unwrap();
        let p = plant_high_degree(&base, 3, 0.2, 0).unwrap();
        assert_eq!(p.j.len(), 1);
        let k = build_k(&p, 1, 10, &sparse_labeling(&p.graph, 3));
        assert!(check_sparse_dense(&p.graph, &p.j.union(&k.k), 3).0);
        assert!(k.k.iter().all(|x| p.graph.degree(x) <= 2));
    }

    #[test]
    fn star_examples() {
        // Path a - x - b with a, b of degree 2 (d = 2): C_4 0-1-2-3 with x = 0.
        let i = inst(Graph::cycle(4), 2);
        let kc = KContext::with_k(&i, VertexSet::from_iter(4, [0]));
        let stars = classify_stars(&i, &kc, &Matching::new(4));
        assert_eq!(stars[0].kind, StarKind::Light);
        assert_eq!(stars[0].members, vec![0, 1, 3]);
        let mut m = Matching::new(4);
        m.insert(0, 1);
        let s = &classify_stars(&i, &kc, &m)[0];
        assert_eq!((s.kind, s.truncated.clone()), (StarKind::Heavy, vec![]));
        // Center whose star is empty.
        let i = inst(Graph::path(2), 2);
        let kc = KContext::with_k(&i, VertexSet::from_iter(2, [0]));
        let s = &classify_stars(&i, &kc, &Matching::new(2))[0];
        assert!(s.members.is_empty() && s.kind == StarKind::Complete);
    }

    #[test]
    fn light_star_on_path_excludes_max() {
        // a - x - b where a, b have degree 2 = d and x has degree 2 as well.
        let g = Graph::from_edges(5, [(3, 0), (0, 1), (1, 2), (2, 4)]).unwrap();
        let i = inst(g, 2);
        let kc = KContext::with_k(&i, VertexSet::from_iter(5, [1]));
        let s = &classify_stars(&i, &kc, &Matching::new(5))[0];
        assert_eq!(s.kind, StarKind::Light);
        assert_eq!(s.truncated, vec![0, 1]);
    }

    #[test]
    fn unhappy_examples() {
        let i = inst(Graph::cycle(4), 2);
        assert_eq!(unhappy_set(&i, &KContext::empty(&i), &Matching::new(4)).len(), 4);
        let kc = KContext::with_k(&i, VertexSet::from_iter(4, [0]));
        // D(0) = {0, 1, 3}: uncovered, so the truncated star is {0, 1}; vertex 2 is
        // outside N_1(K).
        assert_eq!(unhappy_set(&i, &kc, &Matching::new(4)).as_slice(), &[0, 1, 2]);
        let pm = Matching::from_edges(&i.graph, &[Edge(0, 1), Edge(2, 3)]).unwrap();
        assert!(unhappy_set(&i, &kc, &pm).is_empty());
    }

    #[test]
    fn augmenting_path_examples() {
        let i = inst(Graph::path(2), 1);
        let kc = KContext::empty(&i);
        let m = Matching::new(2);
        let lab = sparse_labeling(&i.graph, 3);
        let pat = vec![lab.label(0), lab.label(1)];
        assert_eq!(find_augmenting_paths(&i, &kc, &m, &lab, 1, &pat), vec![vec![0, 1]]);

        // u - v - w with vw matched, deg(w) = 1 < d = 2; u needs degree 2, so add a
        // matched pendant pair on the other side of u.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 3), (3, 4)]).unwrap();
        let i = inst(g, 2);
        let m = Matching::from_edges(&i.graph, &[Edge(1, 2), Edge(3, 4)]).unwrap();
        let kc = KContext::empty(&i);
        let ctx = PathContext::new(&i, &kc, &m);
        assert!(ctx.unhappy.contains(0));
        assert_eq!(augmenting_paths_from(&ctx, 0, 2), vec![vec![0, 1, 2], vec![0, 3, 4]]);
        assert!(augmenting_paths_from(&ctx, 0, 1).is_empty());
    }

    #[test]
    fn flip_examples() {
        let g = Graph::path(3);
        let mut m = Matching::new(3);
        flip_path(&mut m, &[0, 1]);
        assert_eq!(m.edges(), vec![Edge(0, 1)]);
        let mut m = Matching::from_edges(&g, &[Edge(1, 2)]).unwrap();
        flip_path(&mut m, &[0, 1, 2]);
        assert_eq!(m.edges(), vec![Edge(0, 1)]);
        assert!(!m.is_covered(2));
        let i = inst(g, 1);
        let kc = KContext::empty(&i);
        let mut st = EngineState::new(&i, &kc, m.clone());
        flip_round(&i, &kc, &mut st, &[], true).unwrap();
        assert_eq!(st.matching, m);
    }

    fn run(i: &Instance, n0: usize) -> (KContext, EngineState) {
        let s = Schedule::practical();
        let kc = build_k(i, s.r, s.r_prime, &sparse_labeling(&i.graph, s.r + 2));
        let m0 = initial_matching(i, s.r1).unwrap();
        let st = run_rounds(i, &kc, m0, n0, RunOptions { record_history: true, ..Default::default() }).unwrap();
        (kc, st)
    }

    #[test]
    fn even_cycle_run_leaves_no_augmenting_path() {
        let i = rotation_cycle(8).unwrap();
        let (kc, st) = run(&i, 7);
        assert!(first_augmenting_path(&i, &kc, &st.matching, 7).is_none());
        assert!(st.unhappy.len() <= 1);
        assert!(st.flip_log.iter().all(RoundLog::within_bound));
    }

    #[test]
    fn perfectly_matched_graph_has_empty_log() {
        let i = inst(Graph::cycle(6), 2);
        let kc = KContext::empty(&i);
        let pm = Matching::from_edges(&i.graph, &[Edge(0, 1), Edge(2, 3), Edge(4, 5)]).unwrap();
        let st = run_rounds(&i, &kc, pm, 9, RunOptions::default()).unwrap();
        assert!(st.flip_log.is_empty());
    }

    #[test]
    fn odd_cycle_unhappy_count_monotone() {
        let i = rotation_cycle(9).unwrap();
        let (_, st) = run(&i, 9);
        let counts: Vec<usize> = st.flip_log.iter().map(|r| r.unhappy_count).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
        assert!(st.history.windows(2).count() + 1 == st.history.len());
    }

    #[test]
    fn initial_matching_examples() {
        assert!(initial_matching(&rotation_cycle(10).unwrap(), 8).unwrap().is_empty());
        // T-shaped tree with legs of length 5, center 0 of degree 3 (d = 2).
        let mut e = Vec::new();
        for leg in 0..3 {
            let mut prev = 0;
            for s in 0..5 {
                let v = 1 + leg * 5 + s;
                e.push((prev, v));
                prev = v;
            }
        }
        let i = inst(Graph::from_edges(16, e).unwrap(), 2);
        assert_eq!(i.j.as_slice(), &[0]);
        let m = initial_matching(&i, 8).unwrap();
        for v in i.graph.ball(0, 2) {
            if i.graph.degree(v) >= 2 {
                assert!(m.is_covered(v), "{v}");
            }
        }
        let k4p = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)]).unwrap();
        let i = inst(k4p, 3);
        let m = initial_matching(&i, 4).unwrap();
        assert!((0..4).all(|v| m.is_covered(v)));
    }

    #[test]
    fn initial_matching_failure_has_certificate() {
        // Center 0 (degree 3, d = 2) whose three neighbors all lead to vertex 4:
        // at most two of them can be matched.
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
        let i = inst(g, 2);
        let f = initial_matching(&i, 4).unwrap_err();
        assert_eq!(f.center, 0);
        assert_eq!(f.tutte_set, Some(vec![0, 4]));
    }
}
