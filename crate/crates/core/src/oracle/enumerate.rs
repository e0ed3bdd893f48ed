//! Isomorph-free enumeration of small connected graphs.

use std::collections::BTreeMap;

use crate::graph::{Graph, Vertex};
use crate::par::Exec;

/// Refines a vertex coloring until every vertex in a class sees the same
/// multiset of neighbor classes. Class numbers are ranks of isomorphism
/// invariant signatures.
fn refine(g: &Graph, colors: &mut Vec<usize>) {
    let n = g.n();
    let mut classes = count_classes(colors);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = g.neighbors(v).iter().map(|&w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        for v in 0..n {
            colors[v] = sorted.binary_search(&sigs[v]).unwrap();
        }
        let now = sorted.len();
        if now == classes {
            return;
        }
        classes = now;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn code_for(g: &Graph, colors: &[usize]) -> u128 {
    let n = g.n();
    let mut order = vec![0; n];
    for v in 0..n {
        order[colors[v]] = v;
    }
    let mut code: u128 = 0;
    for i in 0..n {
        for j in i + 1..n {
            code = (code << 1) | g.has_edge(order[i], order[j]) as u128;
        }
    }
    code
}

fn search(g: &Graph, mut colors: Vec<usize>, best: &mut Option<(u128, Vec<usize>)>) {
    refine(g, &mut colors);
    let n = g.n();
    if count_classes(&colors) == n {
        let code = code_for(g, &colors);
        if best.as_ref().map_or(true, |(b, _)| code > *b) {
            *best = Some((code, colors));
        }
        return;
    }
    let mut size = vec![0usize; n];
    for &c in &colors {
        size[c] += 1;
    }
    let target = (0..n).find(|&c| size[c] > 1).unwrap();
    for v in 0..n {
        if colors[v] == target {
            let mut next: Vec<usize> = colors.iter().map(|&c| 2 * c + 1).collect();
            next[v] = 2 * target;
            search(g, next, best);
        }
    }
}

/// Largest adjacency code over all refinement-consistent orderings; two
/// graphs on at most 16 vertices are isomorphic iff their codes (and vertex
/// counts) agree.
pub fn canonical_code(g: &Graph) -> u128 {
    canonical_labeling(g).0
}

fn canonical_labeling(g: &Graph) -> (u128, Vec<usize>) {
    assert!(g.n() <= 16, "canonical codes support at most 16 vertices");
    if g.n() == 0 {
        return (0, Vec::new());
    }
    let mut best = None;
    search(g, vec![0; g.n()], &mut best);
    best.unwrap()
}

/// The graph relabelled into canonical order.
pub fn canonical_form(g: &Graph) -> Graph {
    let (_, pos) = canonical_labeling(g);
    let edges: Vec<(Vertex, Vertex)> = g.edges().into_iter().map(|e| (pos[e.0], pos[e.1])).collect();
    Graph::from_edges(g.n(), edges).unwrap()
}

/// Connected graphs with `1..=n_max` vertices satisfying `admissible`, one per
/// isomorphism class, grouped by vertex count. `admissible` must be closed
/// under deleting a vertex whose removal keeps the graph connected (any
/// degree bound is), since every graph is grown from such a subgraph.
pub fn enumerate_connected<F>(n_max: usize, admissible: F, exec: Exec) -> Vec<Vec<Graph>>
where
    F: Fn(&Graph) -> bool + Sync + Send,
{
    let mut levels: Vec<Vec<Graph>> = Vec::new();
    if n_max == 0 {
        return levels;
    }
    let single = Graph::empty(1);
    levels.push(if admissible(&single) { vec![single] } else { Vec::new() });
    for n in 2..=n_max {
        let prev = &levels[n - 2];
        let found: Vec<Vec<(u128, Graph)>> = exec.map(prev, |g| {
            let k = g.n();
            let base = g.edges();
            let mut out = Vec::new();
            for mask in 1u32..(1 << k) {
                let mut edges: Vec<(Vertex, Vertex)> = base.iter().map(|e| (e.0, e.1)).collect();
                edges.extend((0..k).filter(|&i| mask >> i & 1 == 1).map(|i| (i, k)));
                let h = Graph::from_edges(k + 1, edges).unwrap();
                if admissible(&h) {
                    let c = canonical_form(&h);
                    out.push((canonical_code(&c), c));
                }
            }
            out
        });
        let mut seen: BTreeMap<u128, Graph> = BTreeMap::new();
        for (code, g) in found.into_iter().flatten() {
            seen.entry(code).or_insert(g);
        }
        levels.push(seen.into_values().collect());
    }
    levels
}
