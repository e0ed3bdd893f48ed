//! Extending a pre-coloring of leaf edges to the whole graph, and an
//! exhaustive search for small graphs where `d + 1` colors do not suffice.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coloring::{vizing_color, EdgeColoring};
use crate::generators::random_bounded_degree;
use crate::graph::{Edge, Graph, GraphError, Vertex};
use crate::oracle::{self, enumerate_connected, OracleError};
use crate::par::Exec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreColorError {
    #[error("{0} is not an edge of the graph")]
    NotAnEdge(Edge),
    #[error("{0} is not a leaf edge")]
    NotALeaf(Edge),
    #[error("{count} pre-colored edges exceed d = {d}")]
    TooMany { count: usize, d: usize },
    #[error("color {color} on {edge} is outside [0, {d})")]
    ColorOutOfRange { edge: Edge, color: usize, d: usize },
    #[error("pre-colored edges {0} and {1} share a vertex and a color")]
    Improper(Edge, Edge),
    #[error("degree {degree} at vertex {vertex} is not allowed for d = {d}")]
    DegreeTooHigh { vertex: Vertex, degree: usize, d: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("search limits are d <= 4 and n_max <= 10, got d = {d}, n_max = {n_max}")]
    SearchTooLarge { d: usize, n_max: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which degree assumption an instance satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `Δ ≤ d`.
    Bounded,
    /// Exactly one vertex of degree `d + 1`.
    OneHigh,
}

/// A graph with some leaf edges already colored from `[0, d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreColoring {
    pub graph: Graph,
    pub d: usize,
    pub colored_leaves: BTreeMap<Edge, usize>,
}

impl PreColoring {
    pub fn new(graph: Graph, d: usize, leaves: &[(Edge, usize)]) -> Result<PreColoring, PreColorError> {
        let high: Vec<Vertex> = (0..graph.n()).filter(|&v| graph.degree(v) > d).collect();
        if let Some(&v) = high.iter().find(|&&v| graph.degree(v) > d + 1).or(high.get(1)) {
            return Err(PreColorError::DegreeTooHigh { vertex: v, degree: graph.degree(v), d });
        }
        if leaves.len() > d {
            return Err(PreColorError::TooMany { count: leaves.len(), d });
        }
        let mut colored_leaves = BTreeMap::new();
        let mut at: BTreeMap<(Vertex, usize), Edge> = BTreeMap::new();
        for &(e, c) in leaves {
            let e = Edge::new(e.0, e.1);
            if e.1 >= graph.n() || !graph.has_edge(e.0, e.1) {
                return Err(PreColorError::NotAnEdge(e));
            }
            if graph.degree(e.0) != 1 && graph.degree(e.1) != 1 {
                return Err(PreColorError::NotALeaf(e));
            }
            if c >= d {
                return Err(PreColorError::ColorOutOfRange { edge: e, color: c, d });
            }
            for x in [e.0, e.1] {
                if let Some(&f) = at.get(&(x, c)) {
                    return Err(PreColorError::Improper(f, e));
                }
                at.insert((x, c), e);
            }
            colored_leaves.insert(e, c);
        }
        Ok(PreColoring { graph, d, colored_leaves })
    }

    pub fn regime(&self) -> Regime {
        if self.graph.max_degree() > self.d {
            Regime::OneHigh
        } else {
            Regime::Bounded
        }
    }

    /// Parses the text format: an edge list (optionally with an `n` header),
    /// a `d <bound>` line and `precolor u v c` lines. Without a `d` line the
    /// maximum degree is used.
    pub fn parse(text: &str) -> Result<PreColoring, PreColorError> {
        let mut graph_text = String::new();
        let mut d = None;
        let mut leaves = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| PreColorError::Parse { line: i + 1, msg: msg.to_string() };
            match toks.first() {
                Some(&"precolor") => {
                    if toks.len() != 4 {
                        return Err(err("expected `precolor u v c`"));
                    }
                    let nums: Result<Vec<usize>, _> = toks[1..].iter().map(|t| t.parse::<usize>()).collect();
                    let nums = nums.map_err(|_| err("bad number"))?;
                    leaves.push((Edge::new(nums[0], nums[1]), nums[2]));
                    graph_text.push('\n');
                }
                Some(&"d") => {
                    if toks.len() != 2 || d.is_some() {
                        return Err(err("malformed `d` line"));
                    }
                    d = Some(toks[1].parse::<usize>().map_err(|_| err("bad degree bound"))?);
                    graph_text.push('\n');
                }
                _ => {
                    graph_text.push_str(raw);
                    graph_text.push('\n');
                }
            }
        }
        let graph = Graph::parse_edge_list(&graph_text)?;
        let d = d.unwrap_or(graph.max_degree());
        PreColoring::new(graph, d, &leaves)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.graph.to_edge_list();
        s.push_str(&format!("d {}\n", self.d));
        for (e, c) in &self.colored_leaves {
            s.push_str(&format!("precolor {} {} {}\n", e.0, e.1, c));
        }
        s
    }
}

/// The color budget `d + ⌈9√d⌉`.
pub fn color_budget(d: usize) -> usize {
    d + (9.0 * (d as f64).sqrt()).ceil() as usize
}

#[derive(Clone, Copy, Debug)]
pub struct ExtendOptions {
    /// Permutations tried before falling back.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions { samples: 64, seed: 0 }
    }
}

/// An extended coloring with the bookkeeping of each stage.
#[derive(Clone, Debug)]
pub struct Extension {
    pub coloring: EdgeColoring,
    pub regime: Regime,
    /// Vertices carrying at least `√d` pre-colored edges.
    pub y: Vec<Vertex>,
    /// `⌊d + 2√d⌋`.
    pub s: usize,
    /// Fresh colors used on `G[Y]`.
    pub y_colors: usize,
    /// Largest number of forbidden colors met by a `Y–Z` edge.
    pub max_forbidden: usize,
    /// `Y–Z` edges that found no color below `s`.
    pub stage2_overruns: usize,
    /// Index of the accepted permutation, if any met the bounds.
    pub accepted_sample: Option<usize>,
    pub conflict_edges: usize,
    pub conflict_max_degree: usize,
    /// No sampled permutation met the conflict bounds.
    pub fallback: bool,
    /// Largest color index plus one.
    pub span: usize,
    pub budget: usize,
}

impl Extension {
    pub fn within_budget(&self) -> bool {
        self.span <= self.budget
    }
}

/// Extends the pre-coloring in five stages: fresh colors on `G[Y]`, greedy
/// `Y–Z` edges inside `[s]`, Vizing on `H = G[Z]`, a sampled color
/// permutation of `H` with few conflicts, and fresh colors on the conflicts.
pub fn extend_precoloring(pc: &PreColoring, opts: &ExtendOptions) -> Extension {
    let g = &pc.graph;
    let n = g.n();
    let d = pc.d;
    let sq = (d as f64).sqrt();
    let s = (d as f64 + 2.0 * sq).floor() as usize;
    let edges = g.edges();
    let id = |u: Vertex, v: Vertex| edges.binary_search(&Edge::new(u, v)).unwrap();
    let mut color: Vec<Option<usize>> = vec![None; edges.len()];
    let mut pre_count = vec![0usize; n];
    for (&e, &c) in &pc.colored_leaves {
        color[id(e.0, e.1)] = Some(c);
        pre_count[e.0] += 1;
        pre_count[e.1] += 1;
    }
    let in_l: Vec<bool> = (0..n).map(|v| g.degree(v) == 1 && pre_count[v] == 1).collect();
    let y: Vec<Vertex> = (0..n).filter(|&v| !in_l[v] && pre_count[v] > 0 && pre_count[v] as f64 >= sq).collect();
    let mut in_y = vec![false; n];
    for &v in &y {
        in_y[v] = true;
    }
    let in_z = |v: Vertex| !in_l[v] && !in_y[v];

    // Stage 1: G[Y] with |Y| colors from [s] that the pre-coloring avoids.
    let pre_used: Vec<usize> = pc.colored_leaves.values().copied().collect();
    let mut fresh: Vec<usize> = (0..).filter(|c| !pre_used.contains(c)).take(y.len()).collect();
    fresh.sort_unstable();
    let (gy, ymap) = g.induced(&y);
    let cy = vizing_color(&gy);
    let y_colors = cy.palette_size();
    for (e, c) in cy.pairs() {
        color[id(ymap[e.0], ymap[e.1])] = Some(fresh[c]);
    }

    // Stage 2: greedy on the Y–Z edges.
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in color.iter().enumerate() {
        if let Some(c) = *c {
            at[edges[i].0].push(c);
            at[edges[i].1].push(c);
        }
    }
    let mut max_forbidden = 0;
    let mut stage2_overruns = 0;
    for (i, &Edge(u, v)) in edges.iter().enumerate() {
        if color[i].is_some() || !((in_y[u] && in_z(v)) || (in_z(u) && in_y[v])) {
            continue;
        }
        let mut forbidden: Vec<usize> = at[u].iter().chain(&at[v]).copied().collect();
        forbidden.sort_unstable();
        forbidden.dedup();
        max_forbidden = max_forbidden.max(forbidden.len());
        let c = (0..).find(|c| !forbidden.contains(c)).unwrap();
        if c >= s {
            stage2_overruns += 1;
        }
        color[i] = Some(c);
        at[u].push(c);
        at[v].push(c);
    }
    if pc.regime() == Regime::Bounded && pc.colored_leaves.len() <= d {
        assert!(stage2_overruns == 0, "a Y–Z edge met more than s - 1 = {} forbidden colors", s.saturating_sub(1));
    }

    // Stage 3: Vizing on H = G[Z].
    let zs: Vec<Vertex> = (0..n).filter(|&v| in_z(v)).collect();
    let (h, zmap) = g.induced(&zs);
    let ch = vizing_color(&h);
    let q = (d + 1).max(h.max_degree() + 1);
    let h_edges: Vec<(usize, usize)> = ch.pairs().into_iter().map(|(e, c)| (id(zmap[e.0], zmap[e.1]), c)).collect();

    // Colors reaching each Z vertex from L ∪ Y.
    let outside: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            if !in_z(v) {
                return Vec::new();
            }
            g.neighbors(v).iter().filter(|&&w| !in_z(w)).filter_map(|&w| color[id(v, w)]).collect()
        })
        .collect();
    let ly: Vec<Vertex> = (0..n).filter(|&v| !in_z(v)).collect();
    let near = g.distances_from(&ly, Some(2));

    // Stage 4: permutations of [q].
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let evaluate = |sigma: &[usize]| {
        let mut conflict_deg = vec![0usize; n];
        let mut x_count = vec![0usize; n];
        let mut conflicts = Vec::new();
        for &(i, c) in &h_edges {
            let Edge(u, v) = edges[i];
            let sc = sigma[c];
            let at_u = outside[u].contains(&sc);
            let at_v = outside[v].contains(&sc);
            if at_u || at_v {
                conflicts.push(i);
                conflict_deg[u] += 1;
                conflict_deg[v] += 1;
            }
            // X_z counts conflicts caused at the other endpoint.
            if at_v {
                x_count[u] += 1;
            }
            if at_u {
                x_count[v] += 1;
            }
        }
        let max_deg = conflict_deg.iter().copied().max().unwrap_or(0);
        let x_ok = (0..n).filter(|&v| in_z(v) && near[v].is_some()).all(|v| (x_count[v] as f64) < 4.5 * sq);
        (conflicts, max_deg, x_ok && max_deg as f64 <= 6.5 * sq)
    };
    let mut sigma: Vec<usize> = (0..q).collect();
    let mut accepted_sample = None;
    let mut best: Option<(usize, Vec<usize>)> = None;
    for t in 0..opts.samples.max(1) {
        sigma.shuffle(&mut rng);
        let (_, max_deg, ok) = evaluate(&sigma);
        if ok {
            accepted_sample = Some(t);
            best = Some((max_deg, sigma.clone()));
            break;
        }
        if best.as_ref().map_or(true, |(b, _)| max_deg < *b) {
            best = Some((max_deg, sigma.clone()));
        }
    }
    let (_, sigma) = best.unwrap();
    let (conflicts, conflict_max_degree, _) = evaluate(&sigma);
    for &(i, c) in &h_edges {
        color[i] = Some(sigma[c]);
    }

    // Stage 5: fresh colors on the conflict graph.
    let mut is_conflict = vec![false; edges.len()];
    for &i in &conflicts {
        is_conflict[i] = true;
    }
    let base = color
        .iter()
        .enumerate()
        .filter(|&(i, _)| !is_conflict[i])
        .filter_map(|(_, c)| *c)
        .max()
        .map_or(0, |m| m + 1)
        .max(s);
    let conflict_graph = Graph::from_edge_list(n, &conflicts.iter().map(|&i| edges[i]).collect::<Vec<_>>());
    let cc = vizing_color(&conflict_graph);
    for (e, c) in cc.pairs() {
        color[id(e.0, e.1)] = Some(base + c);
    }

    let colors: Vec<usize> = color.into_iter().map(|c| c.expect("every edge colored")).collect();
    let span = colors.iter().max().map_or(0, |m| m + 1);
    Extension {
        coloring: EdgeColoring { edges, colors },
        regime: pc.regime(),
        y,
        s,
        y_colors,
        max_forbidden,
        stage2_overruns,
        accepted_sample,
        conflict_edges: conflicts.len(),
        conflict_max_degree,
        fallback: accepted_sample.is_none(),
        span,
        budget: color_budget(d),
    }
}

/// A random instance with `Δ ≤ d` and exactly `d` pre-colored leaves, some
/// of them gathered on up to `⌊√d⌋` hub vertices.
pub fn random_precoloring(n_core: usize, d: usize, seed: u64) -> PreColoring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = random_bounded_degree(n_core, d, n_core * d / 2, seed ^ 0x9e37_79b9);
    let mut edges = core.edges();
    let hubs = rng.gen_range(0..=((d as f64).sqrt() as usize).min(n_core));
    let mut owner: Vec<Vertex> = Vec::with_capacity(d);
    for i in 0..d {
        owner.push(if i < hubs * (d / (hubs + 1)) { i % hubs.max(1) } else { rng.gen_range(0..n_core) });
    }
    let mut need = vec![0usize; n_core];
    for &v in &owner {
        need[v] += 1;
    }
    // Make room at each owner by dropping core edges.
    for v in 0..n_core {
        if need[v] == 0 {
            continue;
        }
        let mut deg = edges.iter().filter(|e| e.touches(v)).count();
        while deg + need[v] > d {
            let pos = edges.iter().position(|e| e.touches(v)).unwrap();
            edges.remove(pos);
            deg -= 1;
        }
    }
    let mut leaves = Vec::new();
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); n_core];
    for (i, &v) in owner.iter().enumerate() {
        let leaf = n_core + i;
        edges.push(Edge(v, leaf));
        let free: Vec<usize> = (0..d).filter(|c| !used[v].contains(c)).collect();
        let c = free[rng.gen_range(0..free.len())];
        used[v].push(c);
        leaves.push((Edge(v, leaf), c));
    }
    let g = Graph::from_edge_list(n_core + d, &edges);
    PreColoring::new(g, d, &leaves).expect("generator keeps the invariants")
}

/// Outcome of the exhaustive `f = 1` search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FVerdict {
    NoCounterexample,
    Counterexample { graph: Graph, precoloring: Vec<(Edge, usize)> },
    /// The oracle budget ran out; graphs up to `completed_n` vertices were
    /// fully checked.
    Partial { completed_n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSearch {
    pub d: usize,
    pub n_max: usize,
    pub graphs: usize,
    pub precolorings: usize,
    pub verdict: FVerdict,
}

/// Node budget per extendability query.
pub const F_SEARCH_BUDGET: usize = 5_000_000;

/// Checks every connected graph on at most `n_max` vertices with degrees at
/// most `d` except one vertex of degree `d + 1`, under every proper
/// pre-coloring of at most `d - 1` leaves (colors up to renaming), for an
/// extension with `d + 1` colors.
pub fn search_f_counterexample(d: usize, n_max: usize, exec: Exec) -> Result<FSearch, PreColorError> {
    if d == 0 || d > 4 || n_max > 10 {
        return Err(PreColorError::SearchTooLarge { d, n_max });
    }
    let admissible = move |g: &Graph| {
        let high = (0..g.n()).filter(|&v| g.degree(v) > d).count();
        g.max_degree() <= d + 1 && high <= 1
    };
    let levels = enumerate_connected(n_max, admissible, exec);
    let mut graphs = 0;
    let mut precolorings = 0;
    for (i, level) in levels.iter().enumerate() {
        let results = exec.map(level, |g| check_graph(g, d));
        for (g, r) in level.iter().zip(results) {
            graphs += 1;
            match r {
                Ok((count, None)) => precolorings += count,
                Ok((count, Some(pre))) => {
                    precolorings += count;
                    let graph = g.clone();
                    return Ok(FSearch { d, n_max, graphs, precolorings, verdict: FVerdict::Counterexample { graph, precoloring: pre } });
                }
                Err(_) => {
                    return Ok(FSearch { d, n_max, graphs, precolorings, verdict: FVerdict::Partial { completed_n: i } });
                }
            }
        }
    }
    Ok(FSearch { d, n_max, graphs, precolorings, verdict: FVerdict::NoCounterexample })
}

/// Number of pre-colorings tried, and the first one without a
/// `(d+1)`-extension.
fn check_graph(g: &Graph, d: usize) -> Result<(usize, Option<Vec<(Edge, usize)>>), OracleError> {
    let leaves: Vec<Edge> = g.edges().into_iter().filter(|e| g.degree(e.0) == 1 || g.degree(e.1) == 1).collect();
    let mut count = 0;
    let mut chosen: Vec<(Edge, usize)> = Vec::new();
    let mut found = None;
    fn rec(
        g: &Graph,
        d: usize,
        leaves: &[Edge],
        from: usize,
        chosen: &mut Vec<(Edge, usize)>,
        count: &mut usize,
        found: &mut Option<Vec<(Edge, usize)>>,
    ) -> Result<(), OracleError> {
        if found.is_some() {
            return Ok(());
        }
        *count += 1;
        if !oracle::extendable(g, chosen, d + 1, F_SEARCH_BUDGET)? {
            *found = Some(chosen.clone());
            return Ok(());
        }
        if chosen.len() + 1 >= d {
            return Ok(());
        }
        let next_new = chosen.iter().map(|p| p.1 + 1).max().unwrap_or(0);
        for i in from..leaves.len() {
            let e = leaves[i];
            for c in 0..=next_new.min(d - 1) {
                if chosen.iter().any(|&(f, fc)| fc == c && (f.touches(e.0) || f.touches(e.1))) {
                    continue;
                }
                chosen.push((e, c));
                rec(g, d, leaves, i + 1, chosen, count, found)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    rec(g, d, &leaves, 0, &mut chosen, &mut count, &mut found)?;
    Ok((count, found))
}
