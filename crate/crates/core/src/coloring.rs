//! Proper edge colorings of finite graphs: Kőnig for bipartite graphs,
//! Fournier's Δ-coloring when the maximum-degree vertices are independent,
//! and Misra–Gries for Vizing's Δ+1 bound.

use crate::graph::{Edge, Graph, Vertex};

/// A color for every edge of a graph, indexed like [`Graph::edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub edges: Vec<Edge>,
    pub colors: Vec<usize>,
}

impl EdgeColoring {
    pub fn color_of(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok().map(|i| self.colors[i])
    }

    /// Number of distinct colors used.
    pub fn palette_size(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn pairs(&self) -> Vec<(Edge, usize)> {
        self.edges.iter().copied().zip(self.colors.iter().copied()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Konig,
    Fournier,
    Vizing,
}

/// Working state: colors per edge and, per vertex, the edge holding each
/// color.
struct Partial<'a> {
    g: &'a Graph,
    edges: Vec<Edge>,
    k: usize,
    color: Vec<Option<usize>>,
    at: Vec<Vec<Option<usize>>>,
}

impl<'a> Partial<'a> {
    fn new(g: &'a Graph, k: usize) -> Partial<'a> {
        let edges = g.edges();
        Partial { g, k, color: vec![None; edges.len()], at: vec![vec![None; k]; g.n()], edges }
    }

    fn id(&self, u: Vertex, v: Vertex) -> usize {
        self.edges.binary_search(&Edge::new(u, v)).expect("edge exists")
    }

    fn is_free(&self, v: Vertex, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn free(&self, v: Vertex) -> Option<usize> {
        (0..self.k).find(|&c| self.at[v][c].is_none())
    }

    fn set(&mut self, e: usize, c: usize) {
        let Edge(u, v) = self.edges[e];
        assert!(self.color[e].is_none() && self.is_free(u, c) && self.is_free(v, c), "color clash");
        self.color[e] = Some(c);
        self.at[u][c] = Some(e);
        self.at[v][c] = Some(e);
    }

    fn unset(&mut self, e: usize) -> usize {
        let c = self.color[e].take().expect("edge colored");
        let Edge(u, v) = self.edges[e];
        self.at[u][c] = None;
        self.at[v][c] = None;
        c
    }

    /// Swaps colors `a` and `b` along the maximal path from `x` that starts
    /// with the `a`-edge at `x`.
    fn invert_path(&mut self, x: Vertex, a: usize, b: usize) {
        let mut path = Vec::new();
        let (mut cur, mut col) = (x, a);
        while let Some(e) = self.at[cur][col] {
            path.push(e);
            cur = self.edges[e].other(cur);
            if cur == x {
                break;
            }
            col = if col == a { b } else { a };
        }
        let old: Vec<usize> = path.iter().map(|&e| self.unset(e)).collect();
        for (e, c) in path.into_iter().zip(old) {
            self.set(e, if c == a { b } else { a });
        }
    }

    /// Kőnig step for bipartite graphs with `k ≥ Δ`.
    fn color_bipartite(&mut self, e: usize) {
        let Edge(u, v) = self.edges[e];
        let a = self.free(u).expect("free color at u");
        if !self.is_free(v, a) {
            let b = self.free(v).expect("free color at v");
            self.invert_path(v, a, b);
        }
        self.set(e, a);
    }

    /// Misra–Gries step coloring the edge `{u, v}` with center `u`.
    /// Requires a free color at `u` and at every fan vertex.
    fn color_fan(&mut self, u: Vertex, v: Vertex) -> bool {
        let mut fan = vec![v];
        loop {
            let last = *fan.last().unwrap();
            let next = self.g.neighbors(u).iter().copied().find(|&w| {
                if fan.contains(&w) {
                    return false;
                }
                match self.color[self.id(u, w)] {
                    Some(c) => self.is_free(last, c),
                    None => false,
                }
            });
            match next {
                Some(w) => fan.push(w),
                None => break,
            }
        }
        let (Some(c), Some(d)) = (self.free(u), self.free(*fan.last().unwrap())) else {
            return false;
        };
        if !self.is_free(u, d) {
            self.invert_path(u, d, c);
        }
        // First fan prefix that is still a fan and ends at a vertex missing d.
        let mut pick = None;
        for i in 0..fan.len() {
            if i > 0 {
                let ci = self.color[self.id(u, fan[i])];
                if ci.map_or(true, |ci| !self.is_free(fan[i - 1], ci)) {
                    break;
                }
            }
            if self.is_free(fan[i], d) {
                pick = Some(i);
                break;
            }
        }
        let Some(i) = pick else {
            return false;
        };
        let shifted: Vec<usize> = (1..=i).map(|j| self.unset(self.id(u, fan[j]))).collect();
        for (j, c) in shifted.into_iter().enumerate() {
            let e = self.id(u, fan[j]);
            self.set(e, c);
        }
        let e = self.id(u, fan[i]);
        self.set(e, d);
        true
    }

    fn finish(self) -> EdgeColoring {
        let colors = self.color.into_iter().map(|c| c.expect("all edges colored")).collect();
        EdgeColoring { edges: self.edges, colors }
    }
}

/// Kőnig coloring with `Δ` colors; `None` if the graph has an odd cycle.
pub fn konig_color(g: &Graph) -> Option<EdgeColoring> {
    if !g.is_bipartite() {
        return None;
    }
    let mut p = Partial::new(g, g.max_degree());
    for e in 0..p.edges.len() {
        p.color_bipartite(e);
    }
    Some(p.finish())
}

/// Δ+1 coloring by Misra–Gries, edges processed in lexicographic order.
pub fn vizing_color(g: &Graph) -> EdgeColoring {
    let mut p = Partial::new(g, g.max_degree() + 1);
    for e in 0..p.edges.len() {
        let Edge(u, v) = p.edges[e];
        assert!(p.color_fan(u, v), "fan recoloring failed");
    }
    p.finish()
}

/// Δ-coloring when no two maximum-degree vertices are adjacent (Fournier);
/// `None` otherwise. Edges away from maximum-degree vertices are colored
/// first, then the edges at each maximum-degree vertex with that vertex as
/// the fan center.
pub fn fournier_color(g: &Graph) -> Option<EdgeColoring> {
    let delta = g.max_degree();
    let is_max = |v: Vertex| g.degree(v) == delta && delta > 0;
    if g.edges().iter().any(|e| is_max(e.0) && is_max(e.1)) {
        return None;
    }
    let mut p = Partial::new(g, delta);
    let edges = p.edges.clone();
    for &Edge(u, v) in edges.iter().filter(|e| !is_max(e.0) && !is_max(e.1)) {
        if !p.color_fan(u, v) {
            return None;
        }
    }
    for &Edge(u, v) in edges.iter().filter(|e| is_max(e.0) || is_max(e.1)) {
        let (center, leaf) = if is_max(u) { (u, v) } else { (v, u) };
        if !p.color_fan(center, leaf) {
            return None;
        }
    }
    Some(p.finish())
}

/// Colors a finite graph with the fewest colors these constructions
/// guarantee: Kőnig (Δ) for bipartite graphs, Fournier (Δ) when
/// maximum-degree vertices are independent, Vizing (Δ+1) otherwise.
pub fn color_small(g: &Graph) -> (EdgeColoring, Method) {
    if let Some(c) = konig_color(g) {
        return (c, Method::Konig);
    }
    if let Some(c) = fournier_color(g) {
        return (c, Method::Fournier);
    }
    (vizing_color(g), Method::Vizing)
}
