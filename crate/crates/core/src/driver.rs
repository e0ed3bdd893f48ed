//! The degree-peeling induction: stump removal, clean-up of finite
//! components, one matching per level, and reinsertion of the stumps.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::coloring::{color_small, Method};
use crate::engine::{
    build_k, classify_stars, initial_matching_lenient, run_rounds, EngineError, RunOptions, Schedule,
};
use crate::generators::Instance;
use crate::graph::{check_sparse_dense, component_lists, Edge, Graph, Matching, Vertex, VertexSet};
use crate::labeling::sparse_labeling;
use crate::par::Exec;
use crate::precolor::{extend_precoloring, ExtendOptions, PreColoring};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// No stump handling; `d + 1` colors.
    Bipartite,
    General,
}

#[derive(Clone, Debug)]
pub struct DriverParams {
    pub schedule: Schedule,
    /// Components with at most this many vertices count as finite.
    pub finite_threshold: usize,
    /// Search radius for stumps: sinks sit at distance `s_max` from the root.
    pub s_max: usize,
    pub extend: ExtendOptions,
    pub exec: Exec,
    pub check_each_flip: bool,
}

impl Default for DriverParams {
    fn default() -> Self {
        DriverParams {
            schedule: Schedule::practical(),
            finite_threshold: 100,
            s_max: 10,
            extend: ExtendOptions::default(),
            exec: Exec::default(),
            check_each_flip: true,
        }
    }
}

/// A removed stump: its vertices, internal edges and the boundary edges kept
/// in the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stump {
    pub vertices: Vec<Vertex>,
    pub interior: Vec<Edge>,
    pub boundary: Vec<Edge>,
    pub d: usize,
}

/// Whether `a` is a stump of `g` at level `d`, with components of more than
/// `finite_threshold` vertices counting as infinite. A whole component is
/// never a stump.
pub fn is_stump(g: &Graph, d: usize, a: &[Vertex], finite_threshold: usize) -> bool {
    if a.len() < 2 {
        return false;
    }
    let set = VertexSet::from_iter(g.n(), a.iter().copied());
    let high = a.iter().filter(|&&v| g.degree(v) == d + 1).count();
    if high > 1 || a.iter().any(|&v| g.degree(v) != d && g.degree(v) != d + 1) {
        return false;
    }
    let boundary: usize = a.iter().map(|&v| g.neighbors(v).iter().filter(|&&w| !set.contains(w)).count()).sum();
    if boundary + 1 > d {
        return false;
    }
    let comp = component_lists(g).into_iter().find(|c| c.contains(&a[0])).unwrap();
    comp.len() > finite_threshold && a.len() < comp.len() && a.iter().all(|v| comp.contains(v))
}

/// Minimal source side of a minimum cut separating `root` from every vertex
/// that cannot join a stump with it, if that cut has fewer than `d` edges.
fn stump_at(g: &Graph, d: usize, root: Vertex, s_max: usize) -> Option<Vec<Vertex>> {
    let dist = g.distances_from(&[root], Some(s_max));
    let mut t = s_max;
    if !dist.iter().any(|&x| x == Some(s_max)) {
        // The component lies within distance s_max of the root; use its
        // farthest layer as the sink.
        let full = g.distances_from(&[root], None);
        t = full.iter().filter_map(|&x| x).max().unwrap_or(0);
        if t == 0 {
            return None;
        }
    }
    let eligible = |v: Vertex| dist[v].map_or(false, |x| x < t) && (g.degree(v) == d || v == root);
    // flow[v][i]: flow on the edge from v to its i-th neighbor, in {-1, 0, 1}.
    let mut flow: Vec<Vec<i8>> = (0..g.n()).map(|v| vec![0; g.degree(v)]).collect();
    let slot = |v: Vertex, w: Vertex| g.neighbors(v).iter().position(|&x| x == w).unwrap();
    let mut value = 0;
    loop {
        // BFS in the residual graph; `None` parent marks the root.
        let mut parent: Vec<Option<(Vertex, usize)>> = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut hit = None;
        'bfs: while let Some(u) = queue.pop_front() {
            for (i, &w) in g.neighbors(u).iter().enumerate() {
                if flow[u][i] >= 1 {
                    continue;
                }
                if !eligible(w) {
                    hit = Some((u, i));
                    break 'bfs;
                }
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((u, i));
                    queue.push_back(w);
                }
            }
        }
        match hit {
            None => {
                let set: Vec<Vertex> = (0..g.n()).filter(|&v| seen[v]).collect();
                return (set.len() >= 2).then_some(set);
            }
            Some((mut u, i)) => {
                value += 1;
                if value >= d {
                    return None;
                }
                flow[u][i] += 1;
                while let Some((p, j)) = parent[u] {
                    flow[p][j] += 1;
                    let back = slot(u, p);
                    flow[u][back] -= 1;
                    u = p;
                }
                // The edge into the sink has no reverse slot to update
                // because the sink side is never expanded.
            }
        }
    }
}

/// Removes the internal edges of stumps one at a time, roots in id order.
/// Every stump with at most `s_max` vertices is found unless its component
/// lies within distance `|A| − 1` of the root; larger stumps found on the
/// way are removed as well.
pub fn find_and_remove_stumps(g: &Graph, d: usize, s_max: usize, finite_threshold: usize) -> (Graph, Vec<Stump>) {
    let mut cur = g.clone();
    let mut stumps = Vec::new();
    if d < 2 {
        return (cur, stumps);
    }
    let mut comp_size = component_sizes(&cur);
    for root in 0..g.n() {
        let deg = cur.degree(root);
        if (deg != d && deg != d + 1) || comp_size[root] <= finite_threshold {
            continue;
        }
        let Some(a) = stump_at(&cur, d, root, s_max) else {
            continue;
        };
        let set = VertexSet::from_iter(cur.n(), a.iter().copied());
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for e in cur.edges() {
            match (set.contains(e.0), set.contains(e.1)) {
                (true, true) => interior.push(e),
                (true, false) | (false, true) => boundary.push(e),
                _ => {}
            }
        }
        debug_assert!(is_stump(&cur, d, &a, finite_threshold));
        cur = cur.without_edges(interior.iter());
        comp_size = component_sizes(&cur);
        stumps.push(Stump { vertices: a, interior, boundary, d });
    }
    (cur, stumps)
}

fn component_sizes(g: &Graph) -> Vec<usize> {
    let mut size = vec![0; g.n()];
    for comp in component_lists(g) {
        for &v in &comp {
            size[v] = comp.len();
        }
    }
    size
}

/// Colors available to one level: `level[i]` for small indices, then
/// `extra_start + j` once the level colors run out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    pub level: Vec<usize>,
    pub extra_start: usize,
}

impl Palette {
    pub fn color(&self, i: usize) -> usize {
        self.level.get(i).copied().unwrap_or(self.extra_start + i - self.level.len())
    }
}

/// Colors of the components with at most `finite_threshold` vertices.
#[derive(Clone, Debug, Default)]
pub struct FiniteColoring {
    pub colored: Vec<(Edge, usize)>,
    pub components: usize,
    pub vizing_components: usize,
}

/// Colors every component with at least one edge and at most
/// `finite_threshold` vertices, each by [`color_small`] on its sorted vertex
/// list. Larger components are left alone.
pub fn color_finite_components(g: &Graph, finite_threshold: usize, palette: &Palette) -> FiniteColoring {
    let mut out = FiniteColoring::default();
    for comp in component_lists(g) {
        if comp.len() < 2 || comp.len() > finite_threshold {
            continue;
        }
        let (h, map) = g.induced(&comp);
        let (c, method) = color_small(&h);
        out.components += 1;
        if method == Method::Vizing {
            out.vizing_components += 1;
        }
        for (e, i) in c.pairs() {
            out.colored.push((Edge::new(map[e.0], map[e.1]), palette.color(i)));
        }
    }
    out
}

/// Per-level bookkeeping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PeelAudit {
    pub level: usize,
    pub matching: usize,
    pub stumps: usize,
    pub finite_components: usize,
    pub initial_failures: usize,
    pub rounds: usize,
    pub unhappy_initial: usize,
    pub unhappy_final: usize,
    pub exceptional_edges: usize,
    pub j_next: usize,
    pub j_next_sparse: bool,
    pub k_size: usize,
    pub k_dense: bool,
}

#[derive(Clone, Debug)]
pub struct PeelOutcome {
    pub matching: Matching,
    /// The level `d − 1` instance on `G \ (M ∪ E_0)`.
    pub next: Instance,
    pub exceptional: Vec<Edge>,
    pub audit: PeelAudit,
    /// `|U|` before each round, for decay curves.
    pub unhappy_curve: Vec<usize>,
}

/// One level of the induction: `K`, `M_0`, the augmenting rounds, then the
/// residue. Every still-unhappy vertex drops edges to its smallest-id
/// non-matching neighbors into `E_0` until its degree is below `d`.
pub fn peel_round(inst: &Instance, params: &DriverParams) -> Result<PeelOutcome, EngineError> {
    let g = &inst.graph;
    let d = inst.d;
    let sched = &params.schedule;
    let lab = sparse_labeling(g, sched.r + 2);
    let kctx = build_k(inst, sched.r, sched.r_prime, &lab);
    let (m0, failures) = initial_matching_lenient(inst, sched.r1);
    let opts = RunOptions { exec: params.exec, record_history: false, check_each_flip: params.check_each_flip };
    let state = run_rounds(inst, &kctx, m0, sched.n0, opts)?;
    let m = state.matching;

    let mut deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v) - usize::from(m.is_covered(v))).collect();
    let mut dropped: BTreeSet<Edge> = BTreeSet::new();
    for v in state.unhappy.iter() {
        for &w in g.neighbors(v) {
            if deg[v] < d {
                break;
            }
            let e = Edge::new(v, w);
            if m.contains(v, w) || dropped.contains(&e) {
                continue;
            }
            dropped.insert(e);
            deg[v] -= 1;
            deg[w] -= 1;
        }
    }
    let removed: Vec<Edge> = m.edges().into_iter().chain(dropped.iter().copied()).collect();
    let rest = g.without_edges(removed.iter());
    assert!(rest.max_degree() <= d, "peel left a vertex of degree above {d}");
    let next = Instance::new(rest, d - 1, inst.seed).expect("degrees bounded by d");
    let j_next_sparse = check_sparse_dense(&next.graph, &next.j, sched.r).0;
    let stars = classify_stars(inst, &kctx, &m);
    debug_assert!(stars.iter().all(|s| s.truncated.iter().all(|&v| !next.j.contains(v))));
    let mut unhappy_curve: Vec<usize> = state.flip_log.iter().map(|l| l.unhappy_count).collect();
    unhappy_curve.push(state.unhappy.len());
    let audit = PeelAudit {
        level: d,
        matching: m.len(),
        stumps: 0,
        finite_components: 0,
        initial_failures: failures.len(),
        rounds: state.flip_log.len(),
        unhappy_initial: unhappy_curve[0],
        unhappy_final: state.unhappy.len(),
        exceptional_edges: dropped.len(),
        j_next: next.j.len(),
        j_next_sparse,
        k_size: kctx.k.len(),
        k_dense: kctx.dense,
    };
    Ok(PeelOutcome { matching: m, next, exceptional: dropped.into_iter().collect(), audit, unhappy_curve })
}

/// Why a stump interior stayed uncolored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StumpAudit {
    pub level: usize,
    pub size: usize,
    pub precolored: usize,
    pub colors: usize,
    pub fallback: bool,
}

/// A partial proper edge coloring with its exceptional set.
#[derive(Clone, Debug)]
pub struct ColoringState {
    pub graph: Graph,
    pub edges: Vec<Edge>,
    pub colors: Vec<Option<usize>>,
    pub mode: Mode,
    pub audit: Vec<PeelAudit>,
    pub stumps: Vec<StumpAudit>,
    /// `|U|` before each round, one curve per peel level.
    pub unhappy_curves: Vec<Vec<usize>>,
}

impl ColoringState {
    fn new(graph: &Graph, mode: Mode) -> ColoringState {
        let edges = graph.edges();
        ColoringState {
            graph: graph.clone(),
            colors: vec![None; edges.len()],
            edges,
            mode,
            audit: Vec::new(),
            stumps: Vec::new(),
            unhappy_curves: Vec::new(),
        }
    }

    fn set(&mut self, e: Edge, c: usize) {
        let i = self.edges.binary_search(&e).expect("edge of the input graph");
        debug_assert!(self.colors[i].is_none(), "edge {e} colored twice");
        self.colors[i] = Some(c);
    }

    pub fn color_of(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok().and_then(|i| self.colors[i])
    }

    pub fn colored_pairs(&self) -> Vec<(Edge, usize)> {
        self.edges.iter().zip(&self.colors).filter_map(|(&e, c)| c.map(|c| (e, c))).collect()
    }

    pub fn exceptional(&self) -> Vec<Edge> {
        self.edges.iter().zip(&self.colors).filter(|(_, c)| c.is_none()).map(|(&e, _)| e).collect()
    }

    /// `|V(E_0)| / n`.
    pub fn exceptional_vertex_fraction(&self) -> f64 {
        if self.graph.n() == 0 {
            return 0.0;
        }
        let touched: BTreeSet<Vertex> = self.exceptional().iter().flat_map(|e| [e.0, e.1]).collect();
        touched.len() as f64 / self.graph.n() as f64
    }

    /// Distinct colors on colored edges.
    pub fn palette_used(&self) -> usize {
        self.colors.iter().flatten().collect::<BTreeSet<_>>().len()
    }

    /// `u v c` per colored edge and `u v *` per exceptional edge.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in self.edges.iter().zip(&self.colors) {
            match c {
                Some(c) => writeln!(s, "{} {} {}", e.0, e.1, c).unwrap(),
                None => writeln!(s, "{} {} *", e.0, e.1).unwrap(),
            }
        }
        s
    }

    pub fn audit_csv(&self) -> String {
        let mut s = String::from(
            "level,matching,stumps,finite_components,initial_failures,rounds,unhappy_initial,unhappy_final,exceptional_edges,j_next,j_next_sparse,k_size,k_dense\n",
        );
        for a in &self.audit {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                a.level,
                a.matching,
                a.stumps,
                a.finite_components,
                a.initial_failures,
                a.rounds,
                a.unhappy_initial,
                a.unhappy_final,
                a.exceptional_edges,
                a.j_next,
                a.j_next_sparse,
                a.k_size,
                a.k_dense
            )
            .unwrap();
        }
        s
    }
}

/// Colors `inst` level by level. At level `d` the peeled matching gets color
/// `d0 − d`, finite components use the colors `d0 − d ..= d0` (and colors
/// above `d0` only if Vizing needs one more), and at level 1 every remaining
/// component is colored directly. In general mode stumps removed at level
/// `d` are colored last, in reverse order of removal, by extending the
/// colors on their boundary edges.
pub fn edge_color(inst: &Instance, mode: Mode, params: &DriverParams) -> Result<ColoringState, EngineError> {
    let d0 = inst.d;
    let mut state = ColoringState::new(&inst.graph, mode);
    let mut cur = inst.graph.clone();
    let mut removed_stumps: Vec<Stump> = Vec::new();
    let mut d = d0;
    loop {
        let palette = Palette { level: (d0 - d..=d0).collect(), extra_start: d0 + 1 };
        let mut audit = PeelAudit { level: d, ..PeelAudit::default() };
        if mode == Mode::General {
            let (g2, stumps) = find_and_remove_stumps(&cur, d, params.s_max, params.finite_threshold);
            audit.stumps = stumps.len();
            cur = g2;
            removed_stumps.extend(stumps);
        }
        let threshold = if d <= 1 { usize::MAX } else { params.finite_threshold };
        let finite = color_finite_components(&cur, threshold, &palette);
        audit.finite_components = finite.components;
        for &(e, c) in &finite.colored {
            state.set(e, c);
        }
        cur = cur.without_edges(finite.colored.iter().map(|p| &p.0));
        if d <= 1 || cur.edge_count() == 0 {
            state.audit.push(audit);
            break;
        }
        let level = Instance::new(cur, d, inst.seed).expect("degree bound maintained between levels");
        let out = peel_round(&level, params)?;
        for e in out.matching.edges() {
            state.set(e, d0 - d);
        }
        let PeelAudit { stumps, finite_components, .. } = audit;
        state.audit.push(PeelAudit { stumps, finite_components, ..out.audit });
        state.unhappy_curves.push(out.unhappy_curve);
        cur = out.next.graph;
        d -= 1;
    }
    for stump in removed_stumps.iter().rev() {
        let audit = reinsert_stump(&mut state, stump, d0, params);
        state.stumps.push(audit);
    }
    Ok(state)
}

/// Colors a stump's interior by extending the colors on its boundary edges.
/// Boundary colors become symbols `0..k`; the other symbols map, in order,
/// to the colors from `d0 − d` upward that no boundary edge uses.
fn reinsert_stump(state: &mut ColoringState, stump: &Stump, d0: usize, params: &DriverParams) -> StumpAudit {
    let d = stump.d;
    let local: &[Vertex] = &stump.vertices;
    let colored_boundary: Vec<(Edge, usize)> =
        stump.boundary.iter().filter_map(|&e| state.color_of(e).map(|c| (e, c))).collect();
    let mut boundary_colors: Vec<usize> = colored_boundary.iter().map(|p| p.1).collect();
    boundary_colors.sort_unstable();
    boundary_colors.dedup();
    let index = |v: Vertex| local.binary_search(&v).unwrap();
    let mut edges: Vec<Edge> = stump.interior.iter().map(|e| Edge::new(index(e.0), index(e.1))).collect();
    let mut leaves = Vec::new();
    for &(e, c) in &colored_boundary {
        let inside = if local.binary_search(&e.0).is_ok() { e.0 } else { e.1 };
        let leaf = local.len() + leaves.len();
        let sym = boundary_colors.binary_search(&c).unwrap();
        edges.push(Edge(index(inside), leaf));
        leaves.push((Edge(index(inside), leaf), sym));
    }
    let n_local = local.len() + leaves.len();
    let graph = Graph::from_edge_list(n_local, &edges);
    let pc = PreColoring::new(graph, d, &leaves).expect("stump extension instance is valid");
    let ext = extend_precoloring(&pc, &params.extend);
    let free: Vec<usize> = (d0 - d..).filter(|c| boundary_colors.binary_search(c).is_err()).take(ext.span).collect();
    let mut symbols: Vec<usize> = stump
        .interior
        .iter()
        .map(|e| ext.coloring.color_of(Edge::new(index(e.0), index(e.1))).unwrap())
        .filter(|&c| c >= boundary_colors.len())
        .collect();
    symbols.sort_unstable();
    symbols.dedup();
    for e in &stump.interior {
        let sym = ext.coloring.color_of(Edge::new(index(e.0), index(e.1))).unwrap();
        let c = if sym < boundary_colors.len() {
            boundary_colors[sym]
        } else {
            free[symbols.binary_search(&sym).unwrap()]
        };
        state.set(*e, c);
    }
    StumpAudit {
        level: d,
        size: stump.vertices.len(),
        precolored: colored_boundary.len(),
        colors: ext.coloring.palette_size(),
        fallback: ext.fallback,
    }
}
