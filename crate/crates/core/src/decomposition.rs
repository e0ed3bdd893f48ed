//! Edge decompositions built on the colorings: partial injections, greedy
//! matchings, the matching breaker, and generating maps for the edge set.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::driver::{edge_color, DriverParams, Mode};
use crate::engine::EngineError;
use crate::generators::Instance;
use crate::graph::{component_lists, Edge, Graph, Vertex};
use crate::labeling::{verify_labeling, Labeling};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("maximum degree {found} exceeds bound {bound}")]
    DegreeTooHigh { found: usize, bound: usize },
    #[error("labeling is not 2-sparse")]
    BadLabeling,
    #[error("set {0} has a vertex of degree above 2")]
    NotDegreeTwo(usize),
    #[error("F_0 is not a matching")]
    NotAMatching,
    #[error("edge {0} appears in two sets")]
    Overlap(Edge),
    #[error("component of {size} vertices in {set} exceeds bound {bound}")]
    Residual { set: String, size: usize, bound: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Arc lists, one per function; `(u, v)` means the function sends `u` to `v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Orientation {
    pub functions: Vec<Vec<(Vertex, Vertex)>>,
}

impl Orientation {
    pub fn k(&self) -> usize {
        self.functions.len()
    }

    /// Checks that the arcs partition the edges of `g` and every function is
    /// injective. With `disjoint`, domain and range must also be disjoint.
    pub fn verify(&self, g: &Graph, disjoint: bool) -> Result<(), String> {
        let mut seen = BTreeSet::new();
        for (j, f) in self.functions.iter().enumerate() {
            let mut out = vec![false; g.n()];
            let mut inn = vec![false; g.n()];
            for &(u, v) in f {
                if !g.has_edge(u, v) {
                    return Err(format!("map {j}: {u} -> {v} is not an edge"));
                }
                if !seen.insert(Edge::new(u, v)) {
                    return Err(format!("edge {} used twice", Edge::new(u, v)));
                }
                if std::mem::replace(&mut out[u], true) {
                    return Err(format!("map {j}: {u} has two images"));
                }
                if std::mem::replace(&mut inn[v], true) {
                    return Err(format!("map {j}: {v} has two preimages"));
                }
            }
            if disjoint {
                if let Some(v) = (0..g.n()).find(|&v| out[v] && inn[v]) {
                    return Err(format!("map {j}: {v} in domain and range"));
                }
            }
        }
        if seen.len() != g.edge_count() {
            return Err(format!("{} of {} edges covered", seen.len(), g.edge_count()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (j, f) in self.functions.iter().enumerate() {
            for &(u, v) in f {
                writeln!(s, "map {j}: {u} -> {v}").unwrap();
            }
        }
        s
    }
}

/// At most `d` injective partial maps whose arcs cover every edge once.
/// Edges are handled in order of their label pair; each takes the smallest
/// feasible `(j, ℓ(a), ℓ(b))`.
pub fn orient_into_functions(g: &Graph, d: usize, labeling: &Labeling) -> Result<Orientation, DecompositionError> {
    if g.max_degree() > d {
        return Err(DecompositionError::DegreeTooHigh { found: g.max_degree(), bound: d });
    }
    if labeling.k < 2 || !verify_labeling(g, labeling) {
        return Err(DecompositionError::BadLabeling);
    }
    let l = |v: Vertex| labeling.label(v);
    let mut edges = g.edges();
    edges.sort_by_key(|e| {
        let (a, b) = (l(e.0), l(e.1));
        (a.min(b), a.max(b), e.0, e.1)
    });
    let mut out: Vec<Vec<bool>> = vec![vec![false; g.n()]; d];
    let mut inn: Vec<Vec<bool>> = vec![vec![false; g.n()]; d];
    let mut functions: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); d];
    for e in edges {
        let (a, b) = if l(e.0) < l(e.1) { (e.0, e.1) } else { (e.1, e.0) };
        let pick = (0..d)
            .flat_map(|j| [(j, a, b), (j, b, a)])
            .find(|&(j, s, t)| !out[j][s] && !inn[j][t])
            .expect("some function has room when the degree bound holds");
        let (j, s, t) = pick;
        out[j][s] = true;
        inn[j][t] = true;
        functions[j].push((s, t));
    }
    while functions.last().map_or(false, Vec::is_empty) {
        functions.pop();
    }
    Ok(Orientation { functions })
}

/// Greedy proper coloring of the line graph in edge order; at most `2Δ − 1`
/// classes.
pub fn greedy_matchings(g: &Graph) -> Vec<Vec<Edge>> {
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    let mut classes: Vec<Vec<Edge>> = Vec::new();
    for e in g.edges() {
        let c = (0..).find(|c| !used[e.0].contains(c) && !used[e.1].contains(c)).unwrap();
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(e);
        used[e.0].push(c);
        used[e.1].push(c);
    }
    classes
}

/// `d_i = 8·2^i` for `sweeps` sweeps.
pub fn default_schedule(sweeps: usize) -> Vec<usize> {
    (0..sweeps).map(|i| 8usize << i).collect()
}

/// Component bound after a schedule ending in `d_last`.
pub fn breaker_bound(schedule: &[usize]) -> usize {
    2 * schedule.last().copied().unwrap_or(0) + 4
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreakerOutcome {
    pub matching: Vec<Edge>,
    pub bound: usize,
    /// Largest component of `F_j \ M` for each `j ≥ 1`, then of `F_0 ∪ M`.
    pub largest: Vec<usize>,
}

struct EdgeGraph {
    adj: Vec<Vec<Vertex>>,
}

impl EdgeGraph {
    fn new(n: usize, edges: &BTreeSet<Edge>) -> EdgeGraph {
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        EdgeGraph { adj }
    }

    /// Whether some vertex within distance `r` of `e` satisfies `hit`.
    fn near(&self, e: Edge, r: usize, hit: &dyn Fn(Vertex) -> bool) -> bool {
        let mut dist = std::collections::HashMap::new();
        let mut queue = VecDeque::new();
        for v in [e.0, e.1] {
            dist.insert(v, 0usize);
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            if hit(v) {
                return true;
            }
            let dv = dist[&v];
            if dv == r {
                continue;
            }
            for &w in &self.adj[v] {
                if !dist.contains_key(&w) {
                    dist.insert(w, dv + 1);
                    queue.push_back(w);
                }
            }
        }
        false
    }
}

/// Greedy maximal `(Y, r)`-sparse subset of `x ⊆ y`, in edge order.
fn sparse_subset(n: usize, y: &BTreeSet<Edge>, x: &BTreeSet<Edge>, r: usize) -> Vec<Edge> {
    let yg = EdgeGraph::new(n, y);
    let boundary: Vec<bool> = yg.adj.iter().map(|a| a.len() == 1).collect();
    let mut chosen = vec![false; n];
    let mut out = Vec::new();
    for &e in x {
        if !yg.near(e, r, &|v| boundary[v] || chosen[v]) {
            chosen[e.0] = true;
            chosen[e.1] = true;
            out.push(e);
        }
    }
    out
}

fn largest_component(n: usize, edges: &BTreeSet<Edge>) -> usize {
    let g = Graph::from_edge_list(n, &edges.iter().copied().collect::<Vec<_>>());
    component_lists(&g).iter().filter(|c| c.len() > 1).map(Vec::len).max().unwrap_or(0)
}

/// One sweep per `d_i`, each visiting `F_1, …, F_k` and then `F_0`. The
/// result is a matching whose removal from each `F_j` and addition to `F_0`
/// leaves components of at most `2·d_last + 4` vertices.
pub fn matching_breaker(n: usize, f: &[Vec<Edge>], f0: &[Edge], schedule: &[usize]) -> Result<BreakerOutcome, DecompositionError> {
    let sets: Vec<BTreeSet<Edge>> = f.iter().map(|s| s.iter().map(|e| Edge::new(e.0, e.1)).collect()).collect();
    let f0: BTreeSet<Edge> = f0.iter().map(|e| Edge::new(e.0, e.1)).collect();
    let mut all = f0.clone();
    for (j, s) in sets.iter().enumerate() {
        let mut deg = vec![0usize; n];
        for e in s {
            deg[e.0] += 1;
            deg[e.1] += 1;
            if !all.insert(*e) {
                return Err(DecompositionError::Overlap(*e));
            }
        }
        if deg.iter().any(|&x| x > 2) {
            return Err(DecompositionError::NotDegreeTwo(j + 1));
        }
    }
    let mut deg0 = vec![0usize; n];
    for e in &f0 {
        deg0[e.0] += 1;
        deg0[e.1] += 1;
    }
    if deg0.iter().any(|&x| x > 1) {
        return Err(DecompositionError::NotAMatching);
    }

    let mut m: BTreeSet<Edge> = BTreeSet::new();
    for &r in schedule {
        for s in &sets {
            let fj: BTreeSet<Edge> = s.difference(&m).copied().collect();
            let d = sparse_subset(n, &fj, &fj, r);
            let mut covered = vec![false; n];
            for e in &d {
                covered[e.0] = true;
                covered[e.1] = true;
            }
            m.retain(|e| !covered[e.0] && !covered[e.1]);
            m.extend(d);
        }
        let y: BTreeSet<Edge> = f0.union(&m).copied().collect();
        for e in sparse_subset(n, &y, &m.clone(), r) {
            m.remove(&e);
        }
    }

    let bound = breaker_bound(schedule);
    let mut largest: Vec<usize> = sets.iter().map(|s| largest_component(n, &s.difference(&m).copied().collect())).collect();
    largest.push(largest_component(n, &f0.union(&m).copied().collect()));
    for (i, &size) in largest.iter().enumerate() {
        if size > bound {
            let set = if i == sets.len() { "F_0 + M".to_string() } else { format!("F_{} - M", i + 1) };
            return Err(DecompositionError::Residual { set, size, bound });
        }
    }
    Ok(BreakerOutcome { matching: m.into_iter().collect(), bound, largest })
}

/// Orients a graph of maximum degree 2 so every vertex has in- and
/// out-degree at most 1.
fn orient_paths_and_cycles(n: usize, edges: &[Edge]) -> Vec<(Vertex, Vertex)> {
    let g = Graph::from_edge_list(n, edges);
    let mut arcs = Vec::new();
    let mut done = BTreeSet::new();
    let mut starts: Vec<Vertex> = (0..n).filter(|&v| g.degree(v) == 1).collect();
    starts.extend((0..n).filter(|&v| g.degree(v) == 2));
    for s in starts {
        let mut prev = None;
        let mut v = s;
        loop {
            let next = g.neighbors(v).iter().copied().find(|&w| Some(w) != prev && !done.contains(&Edge::new(v, w)));
            match next {
                Some(w) => {
                    done.insert(Edge::new(v, w));
                    arcs.push((v, w));
                    prev = Some(v);
                    v = w;
                }
                None => break,
            }
        }
    }
    arcs
}

#[derive(Clone, Debug)]
pub struct GeneratorReport {
    pub relaxed: bool,
    pub maps: Orientation,
    /// Matchings from the coloring, including any for exceptional edges.
    pub matchings: usize,
    pub exceptional_edges: usize,
    pub bound: usize,
    pub breaker: Option<BreakerOutcome>,
}

impl GeneratorReport {
    pub fn k(&self) -> usize {
        self.maps.k()
    }

    pub fn to_csv(&self) -> String {
        format!(
            "relaxed,k,bound,matchings,exceptional_edges,largest_component\n{},{},{},{},{},{}\n",
            self.relaxed,
            self.k(),
            self.bound,
            self.matchings,
            self.exceptional_edges,
            self.breaker.as_ref().and_then(|b| b.largest.iter().max().copied()).unwrap_or(0)
        )
    }
}

fn ceil_sqrt(x: usize) -> usize {
    let mut s = (x as f64).sqrt() as usize;
    while s * s < x {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= x {
        s -= 1;
    }
    s
}

/// Palette bound `d + ⌈9√d⌉`.
pub fn strict_bound(d: usize) -> usize {
    d + ceil_sqrt(81 * d)
}

pub fn relaxed_bound(d: usize) -> usize {
    (strict_bound(d) + 2) / 2
}

/// Maps generating the edge set. Strict mode returns one oriented matching
/// per color class; relaxed mode pairs the classes into degree-2 graphs,
/// runs the matching breaker with the leftover class as `F_0`, and orients
/// the pieces. Exceptional edges of the coloring get greedy matchings of
/// their own.
pub fn generator_count(inst: &Instance, relaxed: bool, params: &DriverParams) -> Result<GeneratorReport, DecompositionError> {
    let g = &inst.graph;
    let mode = if inst.bipartite { Mode::Bipartite } else { Mode::General };
    let state = edge_color(inst, mode, params)?;
    let mut classes: Vec<Vec<Edge>> = Vec::new();
    for (e, c) in state.colored_pairs() {
        if c >= classes.len() {
            classes.resize(c + 1, Vec::new());
        }
        classes[c].push(e);
    }
    classes.retain(|c| !c.is_empty());
    let exceptional = state.exceptional();
    classes.extend(greedy_matchings(&Graph::from_edge_list(g.n(), &exceptional)));
    let matchings = classes.len();

    if !relaxed {
        let functions = classes.into_iter().map(|c| c.into_iter().map(|e| (e.0, e.1)).collect()).collect();
        return Ok(GeneratorReport {
            relaxed,
            maps: Orientation { functions },
            matchings,
            exceptional_edges: exceptional.len(),
            bound: strict_bound(inst.d),
            breaker: None,
        });
    }

    let pairs = matchings / 2;
    let f: Vec<Vec<Edge>> = (0..pairs).map(|i| [classes[2 * i].clone(), classes[2 * i + 1].clone()].concat()).collect();
    let f0: Vec<Edge> = if matchings % 2 == 1 { classes[matchings - 1].clone() } else { Vec::new() };
    let breaker = matching_breaker(g.n(), &f, &f0, &default_schedule(4))?;
    let m: BTreeSet<Edge> = breaker.matching.iter().copied().collect();
    let mut functions = Vec::new();
    for fj in &f {
        let rest: Vec<Edge> = fj.iter().copied().filter(|e| !m.contains(e)).collect();
        functions.push(orient_paths_and_cycles(g.n(), &rest));
    }
    let mut last: Vec<Edge> = f0.clone();
    last.extend(m.iter().copied());
    functions.push(orient_paths_and_cycles(g.n(), &last));
    functions.retain(|f| !f.is_empty());
    Ok(GeneratorReport {
        relaxed,
        maps: Orientation { functions },
        matchings,
        exceptional_edges: exceptional.len(),
        bound: relaxed_bound(inst.d),
        breaker: Some(breaker),
    })
}
