//! Problem instances and the generators that build them.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{check_sparse_dense, BallScratch, Edge, Graph, GraphError, Vertex, VertexSet};

/// Resample cap for the configuration model.
pub const REJECTION_BUDGET: usize = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex {vertex} has degree {degree} > d + 1 = {}", d + 1)]
    DegreeTooHigh { vertex: Vertex, degree: usize, d: usize },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no simple graph after {0} resamples; try another seed")]
    RejectionBudget(usize),
    #[error("base instance is not {0}-regular")]
    NotRegular(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graph together with its degree bound `d`; `j` holds the vertices of
/// degree `d + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub d: usize,
    pub j: VertexSet,
    pub bipartite: bool,
    pub seed: Option<u64>,
}

impl Instance {
    pub fn new(graph: Graph, d: usize, seed: Option<u64>) -> Result<Instance, InstanceError> {
        if let Some(v) = (0..graph.n()).find(|&v| graph.degree(v) > d + 1) {
            return Err(InstanceError::DegreeTooHigh { vertex: v, degree: graph.degree(v), d });
        }
        let j = VertexSet::from_iter(graph.n(), (0..graph.n()).filter(|&v| graph.degree(v) == d + 1));
        let bipartite = graph.is_bipartite();
        Ok(Instance { graph, d, j, bipartite, seed })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Re-checks the type invariants.
    pub fn validate(&self) -> bool {
        let g = &self.graph;
        (0..g.n()).all(|v| g.degree(v) <= self.d + 1 && (g.degree(v) == self.d + 1) == self.j.contains(v))
            && self.bipartite == g.is_bipartite()
    }
}

/// The cycle `C_N`, the finite model of a single rotation orbit.
pub fn rotation_cycle(n: usize) -> Result<Instance, InstanceError> {
    if n < 3 {
        return Err(InstanceError::Infeasible(format!("cycle needs N >= 3, got {n}")));
    }
    Instance::new(Graph::cycle(n), 2, None)
}

/// Uniform-ish simple `d`-regular graph via the configuration model with
/// rejection. The bipartite variant pairs stubs across two equal sides
/// `0..n/2` and `n/2..n`.
pub fn random_regular(n: usize, d: usize, bipartite: bool, seed: u64) -> Result<Instance, InstanceError> {
    if d == 0 {
        return Err(InstanceError::Infeasible("d must be at least 1".into()));
    }
    if (n * d) % 2 == 1 {
        return Err(InstanceError::Infeasible(format!("n*d = {} is odd", n * d)));
    }
    if bipartite && (n % 2 == 1 || d > n / 2) {
        return Err(InstanceError::Infeasible(format!("no bipartite {d}-regular graph on {n} vertices")));
    }
    if !bipartite && d >= n {
        return Err(InstanceError::Infeasible(format!("no {d}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_BUDGET {
        let edges = if bipartite {
            let half = n / 2;
            let left: Vec<Vertex> = (0..half).flat_map(|v| std::iter::repeat(v).take(d)).collect();
            let mut right: Vec<Vertex> = (half..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
            right.shuffle(&mut rng);
            left.into_iter().zip(right).collect::<Vec<_>>()
        } else {
            let mut stubs: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
            stubs.shuffle(&mut rng);
            stubs.chunks(2).map(|c| (c[0], c[1])).collect()
        };
        if let Ok(g) = Graph::from_edges(n, edges) {
            return Instance::new(g, d, Some(seed));
        }
    }
    Err(InstanceError::RejectionBudget(REJECTION_BUDGET))
}

/// Attaches pendant vertices to a greedily chosen `r`-sparse set of old
/// vertices, so the chosen vertices become the degree-`(d+1)` set.
pub fn plant_high_degree(inst: &Instance, r: usize, fraction: f64, seed: u64) -> Result<Instance, InstanceError> {
    let g = &inst.graph;
    let n = g.n();
    if (0..n).any(|v| g.degree(v) != inst.d) {
        return Err(InstanceError::NotRegular(inst.d));
    }
    let cap = (fraction.max(0.0) * n as f64).floor() as usize;
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut chosen = VertexSet::new(n);
    let mut scratch = BallScratch::new(n);
    for v in order {
        if chosen.len() >= cap {
            break;
        }
        if scratch.ball(g, v, r).iter().all(|&w| !chosen.contains(w)) {
            chosen.insert(v);
        }
    }
    let plants: Vec<Vertex> = chosen.iter().collect();
    let mut edges = g.edges();
    for (i, &v) in plants.iter().enumerate() {
        edges.push(Edge(v, n + i));
    }
    let out = Instance::new(Graph::from_edge_list(n + plants.len(), &edges), inst.d, Some(seed))?;
    debug_assert!(check_sparse_dense(&out.graph, &out.j, r).0);
    Ok(out)
}

/// Infers `d` from a graph's degree census: `max − 1` when some vertex
/// exceeds the modal degree, otherwise `max`.
pub fn infer_degree_bound(g: &Graph) -> Result<usize, InstanceError> {
    let max = g.max_degree();
    let mut counts = vec![0usize; max + 1];
    for v in 0..g.n() {
        counts[g.degree(v)] += 1;
    }
    // Ties go to the larger degree.
    let mode = (0..=max).max_by_key(|&k| (counts[k], k)).unwrap_or(0);
    if max > mode + 1 {
        let v = (0..g.n()).find(|&v| g.degree(v) == max).unwrap();
        return Err(InstanceError::DegreeTooHigh { vertex: v, degree: max, d: mode });
    }
    Ok(if max > mode { max - 1 } else { max })
}

pub fn instance_from_graph(g: Graph) -> Result<Instance, InstanceError> {
    let d = infer_degree_bound(&g)?;
    Instance::new(g, d, None)
}

pub fn load_edge_list(path: &Path) -> Result<Instance, InstanceError> {
    instance_from_graph(Graph::load_edge_list(path)?)
}

/// Random graph with maximum degree at most `max_deg`, built by adding
/// random admissible edges until `target_edges` or a stall. Used for broad
/// test coverage rather than any particular distribution.
pub fn random_bounded_degree(n: usize, max_deg: usize, target_edges: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deg = vec![0usize; n];
    let mut edges = std::collections::BTreeSet::new();
    let mut stall = 0;
    while edges.len() < target_edges && stall < 50 * (target_edges + 1) && n >= 2 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || deg[u] >= max_deg || deg[v] >= max_deg || !edges.insert(Edge::new(u, v)) {
            stall += 1;
            continue;
        }
        deg[u] += 1;
        deg[v] += 1;
    }
    Graph::from_edge_list(n, &edges.into_iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connected_components;

    #[test]
    fn rotation_cycle_examples() {
        let even = rotation_cycle(8).unwrap();
        assert!(even.bipartite && (0..8).all(|v| even.graph.degree(v) == 2) && even.j.is_empty());
        assert!(!rotation_cycle(7).unwrap().bipartite);
        assert!(rotation_cycle(2).is_err());
        let c = rotation_cycle(31).unwrap();
        assert_eq!(c.graph.edge_count(), 31);
        assert_eq!(connected_components(&c.graph).len(), 1);
    }

    #[test]
    fn random_regular_examples() {
        let k4 = random_regular(4, 3, false, 1).unwrap();
        assert_eq!(k4.graph, Graph::complete(4));
        for seed in 0..20 {
            let b = random_regular(6, 3, true, seed).unwrap();
            assert!(b.bipartite && (0..6).all(|v| b.graph.degree(v) == 3));
        }
        assert!(matches!(random_regular(5, 3, false, 0), Err(InstanceError::Infeasible(_))));
    }

    #[test]
    fn random_regular_is_deterministic_per_seed() {
        assert_eq!(random_regular(100, 3, false, 7).unwrap(), random_regular(100, 3, false, 7).unwrap());
    }

    #[test]
    fn plant_examples() {
        let c12 = rotation_cycle(12).unwrap();
        for seed in 0..10 {
            let p = plant_high_degree(&c12, 3, 0.25, seed).unwrap();
            assert!(p.j.len() <= 3 && !p.j.is_empty());
            assert!(check_sparse_dense(&p.graph, &p.j, 3).0);
            assert!(p.validate());
        }
        assert_eq!(plant_high_degree(&c12, 3, 0.0, 1).unwrap().graph, c12.graph);
        let c6 = rotation_cycle(6).unwrap();
        assert_eq!(plant_high_degree(&c6, 10, 1.0, 3).unwrap().j.len(), 1);
    }

    #[test]
    fn degree_inference() {
        let c4 = instance_from_graph(Graph::cycle(4)).unwrap();
        assert!(c4.d == 2 && c4.j.is_empty() && c4.bipartite);
        let k4p = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)]).unwrap();
        let inst = instance_from_graph(k4p).unwrap();
        assert_eq!((inst.d, inst.j.as_slice()), (3, &[0][..]));
        // C_6 with one vertex joined to two extra pendants: degrees 4 vs mode 2.
        let bad = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6), (0, 7)]).unwrap();
        assert!(instance_from_graph(bad).is_err());
    }
}
