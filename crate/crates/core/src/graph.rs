//! Finite simple graphs, vertex and edge sets, matchings and the distance
//! primitives the rest of the crate is built on.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Vertex identifier. Ids are dense in `0..n` and their natural order is the
/// canonical tie-breaking order everywhere in the crate.
pub type Vertex = usize;

/// An undirected edge stored with `.0 < .1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    /// Builds the normalized edge `{u, v}`.
    pub fn new(u: Vertex, v: Vertex) -> Edge {
        if u < v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn other(self, x: Vertex) -> Vertex {
        if x == self.0 {
            self.1
        } else {
            self.0
        }
    }

    pub fn touches(self, x: Vertex) -> bool {
        self.0 == x || self.1 == x
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.0, self.1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge {0} {1}")]
    ParallelEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range for n = {n}")]
    OutOfRange { vertex: Vertex, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

/// Immutable finite simple graph with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    delta: usize,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n], delta: 0, m: 0 }
    }

    /// Builds a graph on `n` vertices, rejecting loops, repeated edges and
    /// ids outside `0..n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::OutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let e = Edge::new(u, w[0]);
                return Err(GraphError::ParallelEdge(e.0, e.1));
            }
            m += list.len();
        }
        let delta = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph { adj, delta, m: m / 2 })
    }

    /// Like [`Graph::from_edges`] for inputs known to be valid.
    pub fn from_edge_list(n: usize, edges: &[Edge]) -> Graph {
        Graph::from_edges(n, edges.iter().map(|e| (e.0, e.1))).expect("valid edge list")
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, e).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, e).unwrap()
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn max_degree(&self) -> usize {
        self.delta
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.m);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push(Edge(u, v));
                }
            }
        }
        out
    }

    /// Copy of the graph with the given edges deleted (vertex ids unchanged).
    pub fn without_edges<'a, I>(&self, removed: I) -> Graph
    where
        I: IntoIterator<Item = &'a Edge>,
    {
        let gone: BTreeSet<Edge> = removed.into_iter().copied().collect();
        let kept: Vec<Edge> = self.edges().into_iter().filter(|e| !gone.contains(e)).collect();
        Graph::from_edge_list(self.n(), &kept)
    }

    /// Subgraph induced on `vertices` (sorted, deduplicated), relabelled to
    /// `0..len`. The returned vector maps new ids to old ones.
    pub fn induced(&self, vertices: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut map: Vec<Vertex> = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        let mut idx = vec![usize::MAX; self.n()];
        for (i, &v) in map.iter().enumerate() {
            idx[v] = i;
        }
        let mut e = Vec::new();
        for (i, &v) in map.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = idx[w];
                if j != usize::MAX && i < j {
                    e.push((i, j));
                }
            }
        }
        (Graph::from_edges(map.len(), e).unwrap(), map)
    }

    /// Multi-source BFS distances, truncated at `limit` when given.
    pub fn distances_from(&self, sources: &[Vertex], limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            if limit.is_some_and(|l| dv >= l) {
                continue;
            }
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.distances_from(&[u], None)[v]
    }

    /// Sorted ball of radius `k` around `v`.
    pub fn ball(&self, v: Vertex, k: usize) -> Vec<Vertex> {
        let mut scratch = BallScratch::new(self.n());
        let mut out = scratch.ball(self, v, k).to_vec();
        out.sort_unstable();
        out
    }

    /// Proper 2-coloring of the vertices if the graph has no odd cycle.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for s in 0..self.n() {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                let sv = side[v].unwrap();
                for &w in &self.adj[v] {
                    match side[w] {
                        None => {
                            side[w] = Some(!sv);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == sv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Parses the edge-list text format: `u v` per line, `#` comments,
    /// optional `n <count>` header.
    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut header_n = None;
        let mut edges = Vec::new();
        let mut max_id = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| GraphError::Parse { line: i + 1, msg: msg.to_string() };
            if toks[0] == "n" {
                if toks.len() != 2 || header_n.is_some() {
                    return Err(err("malformed header"));
                }
                header_n = Some(toks[1].parse::<usize>().map_err(|_| err("bad vertex count"))?);
                continue;
            }
            if toks.len() != 2 {
                return Err(err("expected two vertex ids"));
            }
            let u: usize = toks[0].parse().map_err(|_| err("bad vertex id"))?;
            let v: usize = toks[1].parse().map_err(|_| err("bad vertex id"))?;
            max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
            edges.push((u, v, i + 1));
        }
        let n = match (header_n, max_id) {
            (Some(h), _) => h,
            (None, Some(m)) => m + 1,
            (None, None) => 0,
        };
        let mut seen = BTreeSet::new();
        for &(u, v, line) in &edges {
            if u >= n || v >= n {
                return Err(GraphError::Parse { line, msg: format!("vertex id exceeds n = {n}") });
            }
            if u == v {
                return Err(GraphError::Parse { line, msg: "self-loop".into() });
            }
            if !seen.insert(Edge::new(u, v)) {
                return Err(GraphError::Parse { line, msg: "repeated edge".into() });
            }
        }
        Graph::from_edges(n, edges.into_iter().map(|(u, v, _)| (u, v)))
    }

    pub fn load_edge_list(path: &Path) -> Result<Graph, GraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| GraphError::Io(e.to_string()))?;
        Graph::parse_edge_list(&text)
    }

    /// Serializes to the edge-list format with an explicit `n` header.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n());
        for e in self.edges() {
            s.push_str(&format!("{} {}\n", e.0, e.1));
        }
        s
    }
}

/// Reusable buffers for repeated truncated BFS.
pub struct BallScratch {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    epoch: u32,
    out: Vec<Vertex>,
}

impl BallScratch {
    pub fn new(n: usize) -> BallScratch {
        BallScratch { stamp: vec![0; n], dist: vec![0; n], epoch: 0, out: Vec::new() }
    }

    /// Vertices within distance `k` of `v`, in BFS order (unsorted).
    pub fn ball(&mut self, g: &Graph, v: Vertex, k: usize) -> &[Vertex] {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.out.clear();
        self.stamp[v] = self.epoch;
        self.dist[v] = 0;
        self.out.push(v);
        let mut head = 0;
        while head < self.out.len() {
            let x = self.out[head];
            head += 1;
            let dx = self.dist[x];
            if dx as usize >= k {
                continue;
            }
            for &w in g.neighbors(x) {
                if self.stamp[w] != self.epoch {
                    self.stamp[w] = self.epoch;
                    self.dist[w] = dx + 1;
                    self.out.push(w);
                }
            }
        }
        &self.out
    }
}

/// Set of vertices with O(1) membership and sorted iteration.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VertexSet {
    mask: Vec<bool>,
    members: Vec<Vertex>,
}

impl VertexSet {
    pub fn new(n: usize) -> VertexSet {
        VertexSet { mask: vec![false; n], members: Vec::new() }
    }

    pub fn full(n: usize) -> VertexSet {
        VertexSet { mask: vec![true; n], members: (0..n).collect() }
    }

    pub fn from_iter<I: IntoIterator<Item = Vertex>>(n: usize, it: I) -> VertexSet {
        let mut mask = vec![false; n];
        for v in it {
            mask[v] = true;
        }
        VertexSet::from_mask(mask)
    }

    pub fn from_mask(mask: Vec<bool>) -> VertexSet {
        let members = (0..mask.len()).filter(|&v| mask[v]).collect();
        VertexSet { mask, members }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        if self.mask[v] {
            return false;
        }
        self.mask[v] = true;
        let pos = self.members.binary_search(&v).unwrap_err();
        self.members.insert(pos, v);
        true
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        if !self.contains(v) {
            return false;
        }
        self.mask[v] = false;
        let pos = self.members.binary_search(&v).unwrap();
        self.members.remove(pos);
        true
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && !*b).collect())
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().map(|a| !a).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Uniform counting measure `|S| / n`.
    pub fn measure(&self) -> f64 {
        if self.mask.is_empty() {
            0.0
        } else {
            self.len() as f64 / self.mask.len() as f64
        }
    }
}

pub type EdgeSet = BTreeSet<Edge>;

/// Vertices within distance `k` of `a`.
pub fn k_neighborhood(g: &Graph, a: &VertexSet, k: usize) -> VertexSet {
    let dist = g.distances_from(a.as_slice(), Some(k));
    VertexSet::from_mask(dist.iter().map(|d| d.is_some()).collect())
}

/// Returns `(is_r_sparse, is_r_dense)` for `a`.
pub fn check_sparse_dense(g: &Graph, a: &VertexSet, r: usize) -> (bool, bool) {
    let dense = g.distances_from(a.as_slice(), Some(r)).iter().all(Option::is_some);
    (is_sparse(g, a, r), dense)
}

/// True when distinct members of `a` are at distance more than `r`.
pub fn is_sparse(g: &Graph, a: &VertexSet, r: usize) -> bool {
    sparse_witness(g, a, r).is_none()
}

/// A pair of distinct members at distance at most `r`, if any.
pub fn sparse_witness(g: &Graph, a: &VertexSet, r: usize) -> Option<(Vertex, Vertex)> {
    let mut scratch = BallScratch::new(g.n());
    for v in a.iter() {
        if let Some(&w) = scratch.ball(g, v, r).iter().find(|&&w| w != v && a.contains(w)) {
            return Some((v.min(w), v.max(w)));
        }
    }
    None
}

/// Undirected edges with exactly one endpoint in `a`, each listed once.
///
/// Note the ordered-pair quantity `E(A, B)` counts edges inside `A ∩ B`
/// twice; for `B = A^c` the two conventions agree.
pub fn edge_boundary(g: &Graph, a: &VertexSet) -> (usize, EdgeSet) {
    let mut out = EdgeSet::new();
    for v in a.iter() {
        for &w in g.neighbors(v) {
            if !a.contains(w) {
                out.insert(Edge::new(v, w));
            }
        }
    }
    (out.len(), out)
}

/// Connected components ordered by their minimum vertex id.
pub fn connected_components(g: &Graph) -> Vec<VertexSet> {
    component_lists(g).into_iter().map(|c| VertexSet::from_iter(g.n(), c)).collect()
}

/// Connected components as sorted vertex lists, ordered by minimum id.
pub fn component_lists(g: &Graph) -> Vec<Vec<Vertex>> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut out: Vec<Vec<Vertex>> = Vec::new();
    for s in 0..g.n() {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut list = vec![s];
        let mut head = 0;
        while head < list.len() {
            let v = list[head];
            head += 1;
            for &w in g.neighbors(v) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    list.push(w);
                }
            }
        }
        list.sort_unstable();
        out.push(list);
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("edge {0} is not in the graph")]
    NotAnEdge(Edge),
    #[error("edges {0} and {1} share a vertex")]
    Overlap(Edge, Edge),
}

/// A set of pairwise disjoint edges with a partner index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matching {
    partner: Vec<Option<Vertex>>,
    size: usize,
}

impl Matching {
    pub fn new(n: usize) -> Matching {
        Matching { partner: vec![None; n], size: 0 }
    }

    /// Validates `edges` against `g` and builds the matching, reporting the
    /// first offending edge or overlapping pair.
    pub fn from_edges(g: &Graph, edges: &[Edge]) -> Result<Matching, MatchingError> {
        let mut m = Matching::new(g.n());
        let mut owner: Vec<Option<Edge>> = vec![None; g.n()];
        for &e in edges {
            if !g.has_edge(e.0, e.1) {
                return Err(MatchingError::NotAnEdge(e));
            }
            for x in [e.0, e.1] {
                if let Some(f) = owner[x] {
                    return Err(MatchingError::Overlap(f, e));
                }
            }
            owner[e.0] = Some(e);
            owner[e.1] = Some(e);
            m.insert(e.0, e.1);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, v: Vertex) -> Option<Vertex> {
        self.partner[v]
    }

    pub fn is_covered(&self, v: Vertex) -> bool {
        self.partner[v].is_some()
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.partner[u] == Some(v)
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn insert(&mut self, u: Vertex, v: Vertex) {
        assert!(self.partner[u].is_none() && self.partner[v].is_none(), "vertex already matched");
        self.partner[u] = Some(v);
        self.partner[v] = Some(u);
        self.size += 1;
    }

    pub fn remove(&mut self, u: Vertex, v: Vertex) {
        assert!(self.contains(u, v), "edge not in matching");
        self.partner[u] = None;
        self.partner[v] = None;
        self.size -= 1;
    }

    /// Matched edges in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        (0..self.n())
            .filter_map(|u| self.partner[u].filter(|&v| u < v).map(|v| Edge(u, v)))
            .collect()
    }

    pub fn covered(&self) -> VertexSet {
        VertexSet::from_mask(self.partner.iter().map(Option::is_some).collect())
    }

    /// Vertices covered by exactly one of the two matchings.
    pub fn symmetric_difference_vertices(&self, other: &Matching) -> usize {
        (0..self.n()).filter(|&v| self.partner[v] != other.partner[v]).count()
    }

    /// Checks that every matched pair is an edge of `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        (0..self.n()).all(|u| match self.partner[u] {
            Some(v) => g.has_edge(u, v) && self.partner[v] == Some(u),
            None => true,
        })
    }
}
