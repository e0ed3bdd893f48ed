//! Brute-force ground truth for small graphs. Nothing here shares code with
//! the algorithms it checks.

mod enumerate;

pub use enumerate::{canonical_code, canonical_form, enumerate_connected};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{Edge, Graph, Vertex, VertexSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the oracle: {0}")]
    TooLarge(String),
    #[error("search budget of {0} nodes exhausted")]
    Budget(usize),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
}

/// Default node budget for backtracking searches.
pub const NODE_BUDGET: usize = 50_000_000;

/// Exact chromatic index by backtracking over edge colorings, trying
/// `k = Δ, Δ+1, …`. New colors are introduced in order, which removes color
/// permutation symmetry.
pub fn brute_chromatic_index(g: &Graph) -> Result<usize, OracleError> {
    let edges = g.edges();
    if edges.len() > 24 {
        return Err(OracleError::TooLarge(format!("{} edges > 24", edges.len())));
    }
    if edges.is_empty() {
        return Ok(0);
    }
    let order = bfs_edge_order(g, &edges);
    let mut k = g.max_degree();
    loop {
        let mut nodes = 0;
        if edge_colorable(g, &order, k, &mut nodes)? {
            return Ok(k);
        }
        k += 1;
    }
}

// Edges ordered so that each edge tends to touch earlier ones.
fn bfs_edge_order(g: &Graph, edges: &[Edge]) -> Vec<Edge> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut visited = vec![false; g.n()];
    for s in 0..g.n() {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                let e = Edge::new(v, w);
                if seen.insert(e) {
                    out.push(e);
                }
                if !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    debug_assert_eq!(out.len(), edges.len());
    out
}

/// Whether the edges in `order` admit a proper coloring with `k` colors.
fn edge_colorable(g: &Graph, order: &[Edge], k: usize, nodes: &mut usize) -> Result<bool, OracleError> {
    let mut used = vec![0u64; g.n()];
    fn rec(
        order: &[Edge],
        i: usize,
        k: usize,
        max_used: usize,
        used: &mut [u64],
        nodes: &mut usize,
    ) -> Result<bool, OracleError> {
        *nodes += 1;
        if *nodes > NODE_BUDGET {
            return Err(OracleError::Budget(NODE_BUDGET));
        }
        let Some(&Edge(u, v)) = order.get(i) else {
            return Ok(true);
        };
        let limit = k.min(max_used + 1);
        for c in 0..limit {
            let bit = 1u64 << c;
            if used[u] & bit == 0 && used[v] & bit == 0 {
                used[u] |= bit;
                used[v] |= bit;
                let ok = rec(order, i + 1, k, max_used.max(c + 1), used, nodes)?;
                used[u] &= !bit;
                used[v] &= !bit;
                if ok {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
    assert!(k <= 64);
    rec(order, 0, k, 0, &mut used, nodes)
}

/// True iff no two edges sharing a vertex have the same color and every
/// listed edge exists exactly once.
pub fn verify_proper(g: &Graph, coloring: &[(Edge, usize)]) -> bool {
    proper_witness(g, coloring).is_none()
}

/// A pair of conflicting entries, or a bad edge paired with itself.
pub fn proper_witness(g: &Graph, coloring: &[(Edge, usize)]) -> Option<((Edge, usize), (Edge, usize))> {
    let mut seen = BTreeSet::new();
    let mut at: Vec<Vec<(usize, Edge)>> = vec![Vec::new(); g.n()];
    for &(e, c) in coloring {
        if e.0 >= g.n() || !g.has_edge(e.0, e.1) || !seen.insert(e) {
            return Some(((e, c), (e, c)));
        }
        for x in [e.0, e.1] {
            if let Some(&(_, f)) = at[x].iter().find(|(c2, _)| *c2 == c) {
                return Some(((f, c), (e, c)));
            }
            at[x].push((c, e));
        }
    }
    None
}

/// True iff every class is a matching of `g` and the classes are disjoint.
pub fn verify_matching_partition(g: &Graph, classes: &[Vec<Edge>]) -> bool {
    let coloring: Vec<(Edge, usize)> =
        classes.iter().enumerate().flat_map(|(c, es)| es.iter().map(move |&e| (e, c))).collect();
    verify_proper(g, &coloring)
}

/// Inputs of an augmenting-path query, given as plain data so the oracle can
/// recompute everything from definitions.
pub struct AugmentingQuery<'a> {
    pub g: &'a Graph,
    pub d: usize,
    pub k: &'a [Vertex],
    pub matching: &'a [Edge],
}

/// Any augmenting path of length at most `max_len`, recomputing stars and
/// the unhappy set from their definitions and enumerating simple paths with
/// an explicit stack.
pub fn brute_augmenting_path(q: &AugmentingQuery, max_len: usize) -> Result<Option<Vec<Vertex>>, OracleError> {
    let g = q.g;
    let n = g.n();
    if n > 60 {
        return Err(OracleError::TooLarge(format!("n = {n} > 60")));
    }
    let matched: BTreeSet<Edge> = q.matching.iter().copied().collect();
    let covered: BTreeSet<Vertex> = q.matching.iter().flat_map(|e| [e.0, e.1]).collect();
    let mut near_k = BTreeSet::new();
    let mut unhappy = BTreeSet::new();
    let mut complete = BTreeSet::new();
    for &x in q.k {
        let mut star: Vec<Vertex> = Vec::new();
        near_k.insert(x);
        if g.degree(x) == q.d {
            star.push(x);
        }
        for &y in g.neighbors(x) {
            near_k.insert(y);
            if g.degree(y) == q.d {
                star.push(y);
            }
        }
        let mut open: Vec<Vertex> = star.iter().copied().filter(|y| !covered.contains(y)).collect();
        open.sort_unstable();
        if open.is_empty() {
            complete.extend(star);
        } else {
            open.pop();
            unhappy.extend(open);
        }
    }
    for v in 0..n {
        if !covered.contains(&v) && g.degree(v) >= q.d && !near_k.contains(&v) {
            unhappy.insert(v);
        }
    }
    let mut nodes = 0usize;
    for &u in &unhappy {
        let mut stack: Vec<Vec<Vertex>> = vec![vec![u]];
        while let Some(path) = stack.pop() {
            nodes += 1;
            if nodes > NODE_BUDGET {
                return Err(OracleError::Budget(NODE_BUDGET));
            }
            let len = path.len() - 1;
            let end = *path.last().unwrap();
            if len > 0 {
                let ok = if len % 2 == 1 {
                    !covered.contains(&end)
                } else {
                    g.degree(end) < q.d || complete.contains(&end)
                };
                if ok {
                    return Ok(Some(path));
                }
            }
            if len == max_len {
                continue;
            }
            for &w in g.neighbors(end) {
                let want_matched = len % 2 == 1;
                if matched.contains(&Edge::new(end, w)) == want_matched && !path.contains(&w) {
                    let mut next = path.clone();
                    next.push(w);
                    stack.push(next);
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TutteVerdict {
    /// A matching covering the target set.
    Exists(Vec<Edge>),
    /// A set `S` such that more than `|S|` odd components of `G − S` lie
    /// entirely inside the target set.
    Violated(Vec<Vertex>),
}

/// Decides whether some matching covers `z`, by enumerating every `S`
/// (smallest first, then lexicographically) and, if none violates the odd
/// component condition, exhibiting a covering matching by direct search.
pub fn tutte_check(g: &Graph, z: &VertexSet) -> Result<TutteVerdict, OracleError> {
    let n = g.n();
    if n > 20 {
        return Err(OracleError::TooLarge(format!("n = {n} > 20")));
    }
    let mut subsets: Vec<u32> = (0..(1u32 << n)).collect();
    subsets.sort_by_key(|&s| {
        let mut bits: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
        bits.insert(0, s.count_ones() as usize);
        bits
    });
    for s in subsets {
        if odd_components_inside(g, z, s) > s.count_ones() as usize {
            return Ok(TutteVerdict::Violated((0..n).filter(|&i| s >> i & 1 == 1).collect()));
        }
    }
    match covering_matching(g, z) {
        Some(m) => Ok(TutteVerdict::Exists(m)),
        None => Err(OracleError::Inconsistent("no violating set but no covering matching".into())),
    }
}

fn odd_components_inside(g: &Graph, z: &VertexSet, s: u32) -> usize {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] || s >> start & 1 == 1 {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut size = 0;
        let mut inside = true;
        while let Some(v) = stack.pop() {
            size += 1;
            inside &= z.contains(v);
            for &w in g.neighbors(v) {
                if !seen[w] && s >> w & 1 == 0 {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if inside && size % 2 == 1 {
            count += 1;
        }
    }
    count
}

/// Direct exhaustive search for a matching covering `z`.
pub fn covering_matching(g: &Graph, z: &VertexSet) -> Option<Vec<Edge>> {
    fn rec(g: &Graph, z: &[Vertex], taken: &mut Vec<bool>, acc: &mut Vec<Edge>) -> bool {
        let Some(&v) = z.iter().find(|&&v| !taken[v]) else {
            return true;
        };
        taken[v] = true;
        for &w in g.neighbors(v) {
            if !taken[w] {
                taken[w] = true;
                acc.push(Edge::new(v, w));
                if rec(g, z, taken, acc) {
                    return true;
                }
                acc.pop();
                taken[w] = false;
            }
        }
        taken[v] = false;
        false
    }
    let mut taken = vec![false; g.n()];
    let mut acc = Vec::new();
    rec(g, z.as_slice(), &mut taken, &mut acc).then(|| {
        acc.sort();
        acc
    })
}

/// Whether `g` has a proper edge coloring with `k` colors extending the
/// given partial coloring (colors `< k`).
pub fn extendable(g: &Graph, fixed: &[(Edge, usize)], k: usize, budget: usize) -> Result<bool, OracleError> {
    let fixed_set: BTreeSet<Edge> = fixed.iter().map(|p| p.0).collect();
    let mut used = vec![0u64; g.n()];
    for &(e, c) in fixed {
        let bit = 1u64 << c;
        if used[e.0] & bit != 0 || used[e.1] & bit != 0 {
            return Ok(false);
        }
        used[e.0] |= bit;
        used[e.1] |= bit;
    }
    let order: Vec<Edge> = bfs_edge_order(g, &g.edges()).into_iter().filter(|e| !fixed_set.contains(e)).collect();
    let mut nodes = 0usize;
    fn rec(order: &[Edge], i: usize, k: usize, used: &mut [u64], nodes: &mut usize, budget: usize) -> Result<bool, OracleError> {
        *nodes += 1;
        if *nodes > budget {
            return Err(OracleError::Budget(budget));
        }
        let Some(&Edge(u, v)) = order.get(i) else {
            return Ok(true);
        };
        for c in 0..k {
            let bit = 1u64 << c;
            if used[u] & bit == 0 && used[v] & bit == 0 {
                used[u] |= bit;
                used[v] |= bit;
                let ok = rec(order, i + 1, k, used, nodes, budget)?;
                used[u] &= !bit;
                used[v] &= !bit;
                if ok {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
    rec(&order, 0, k, &mut used, &mut nodes, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chromatic_index_baselines() {
        assert_eq!(brute_chromatic_index(&Graph::cycle(6)), Ok(2));
        assert_eq!(brute_chromatic_index(&Graph::cycle(5)), Ok(3));
        assert_eq!(brute_chromatic_index(&Graph::complete(4)), Ok(3));
        assert_eq!(brute_chromatic_index(&Graph::petersen()), Ok(4));
        assert_eq!(brute_chromatic_index(&Graph::empty(3)), Ok(0));
    }

    #[test]
    fn proper_checker() {
        let c6 = Graph::cycle(6);
        let alt: Vec<(Edge, usize)> = (0..6).map(|i| (Edge::new(i, (i + 1) % 6), i % 2)).collect();
        assert!(verify_proper(&c6, &alt));
        let bad = vec![(Edge(0, 1), 0), (Edge(1, 2), 0)];
        assert!(!verify_proper(&c6, &bad));
    }

    #[test]
    fn augmenting_examples() {
        let g = Graph::path(2);
        let q = AugmentingQuery { g: &g, d: 1, k: &[], matching: &[] };
        assert_eq!(brute_augmenting_path(&q, 1), Ok(Some(vec![0, 1])));
        let g = Graph::cycle(4);
        let m = [Edge(0, 1), Edge(2, 3)];
        let q = AugmentingQuery { g: &g, d: 2, k: &[], matching: &m };
        assert_eq!(brute_augmenting_path(&q, 9), Ok(None));
    }

    #[test]
    fn tutte_examples() {
        let g = Graph::cycle(5);
        assert_eq!(tutte_check(&g, &VertexSet::new(5)), Ok(TutteVerdict::Exists(vec![])));
        let k4p = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4)]).unwrap();
        assert!(matches!(tutte_check(&k4p, &VertexSet::from_iter(5, 0..4)), Ok(TutteVerdict::Exists(_))));
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(tutte_check(&star, &VertexSet::from_iter(4, 1..4)), Ok(TutteVerdict::Violated(vec![0])));
    }

    #[test]
    fn extension_search() {
        let c5 = Graph::cycle(5);
        assert_eq!(extendable(&c5, &[], 2, 1000), Ok(false));
        assert_eq!(extendable(&c5, &[(Edge(0, 1), 2)], 3, 1000), Ok(true));
    }
}
