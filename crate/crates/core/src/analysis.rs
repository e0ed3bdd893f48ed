//! Alternating search layers around the unhappy set, stubborn vertices and
//! their families, the growth invariant, and checkers for the structural
//! claims on a finished run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{star_members, unhappy_set, KContext};
use crate::generators::Instance;
use crate::graph::{check_sparse_dense, edge_boundary, Edge, Graph, Matching, Vertex, VertexSet};
use crate::par::Exec;

/// Shortest odd and even (length ≥ 2) alternating paths from the unhappy
/// set, over simple paths of length at most `max_len`.
#[derive(Clone, Debug)]
pub struct AlternatingLengths {
    pub unhappy: VertexSet,
    pub odd: Vec<Option<usize>>,
    pub even: Vec<Option<usize>>,
    pub max_len: usize,
}

/// Calls `visit(v, len)` for every simple path from `start` that begins with
/// an unmatched edge and alternates, restricted to `allowed` vertices, with
/// at most `max_len` edges.
fn walk_alternating<F: FnMut(Vertex, usize)>(
    g: &Graph,
    m: &Matching,
    start: Vertex,
    max_len: usize,
    allowed: &dyn Fn(Vertex) -> bool,
    visit: &mut F,
) {
    fn rec<F: FnMut(Vertex, usize)>(
        g: &Graph,
        m: &Matching,
        v: Vertex,
        len: usize,
        max_len: usize,
        on_path: &mut Vec<bool>,
        allowed: &dyn Fn(Vertex) -> bool,
        visit: &mut F,
    ) {
        if len == max_len {
            return;
        }
        // Even length so far: next edge unmatched; odd: next edge matched.
        let step = |w: Vertex, on_path: &mut Vec<bool>, visit: &mut F| {
            if on_path[w] || !allowed(w) {
                return;
            }
            visit(w, len + 1);
            on_path[w] = true;
            rec(g, m, w, len + 1, max_len, on_path, allowed, visit);
            on_path[w] = false;
        };
        if len % 2 == 0 {
            for &w in g.neighbors(v) {
                if !m.contains(v, w) {
                    step(w, on_path, visit);
                }
            }
        } else if let Some(w) = m.partner(v) {
            step(w, on_path, visit);
        }
    }
    let mut on_path = vec![false; g.n()];
    on_path[start] = true;
    rec(g, m, start, 0, max_len, &mut on_path, allowed, visit);
}

pub fn alternating_lengths(g: &Graph, m: &Matching, unhappy: &VertexSet, max_len: usize, exec: Exec) -> AlternatingLengths {
    let starts: Vec<Vertex> = unhappy.iter().collect();
    let per_start = exec.map(&starts, |&u| {
        let mut found: BTreeMap<Vertex, (Option<usize>, Option<usize>)> = BTreeMap::new();
        walk_alternating(g, m, u, max_len, &|_| true, &mut |w, len| {
            let slot = found.entry(w).or_default();
            let target = if len % 2 == 1 { &mut slot.0 } else { &mut slot.1 };
            if target.map_or(true, |x| len < x) {
                *target = Some(len);
            }
        });
        found
    });
    let mut odd = vec![None; g.n()];
    let mut even = vec![None; g.n()];
    let keep_min = |slot: &mut Option<usize>, x: Option<usize>| {
        if let Some(x) = x {
            if slot.map_or(true, |s| x < s) {
                *slot = Some(x);
            }
        }
    };
    for found in per_start {
        for (w, (o, e)) in found {
            keep_min(&mut odd[w], o);
            keep_min(&mut even[w], e);
        }
    }
    AlternatingLengths { unhappy: unhappy.clone(), odd, even, max_len }
}

/// The partition of the vertices reached by alternating paths of length at
/// most `2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchState {
    pub n: usize,
    pub u: VertexSet,
    pub h_tilde: VertexSet,
    pub t_tilde: VertexSet,
    pub h: VertexSet,
    pub t: VertexSet,
    pub b: VertexSet,
    pub o: VertexSet,
    pub x: VertexSet,
}

impl AlternatingLengths {
    /// Layers at depth `n`; needs `2n ≤ max_len`.
    pub fn state(&self, n: usize) -> SearchState {
        assert!(2 * n <= self.max_len, "depth {n} needs paths up to {}", 2 * n);
        let nv = self.odd.len();
        let h_tilde = VertexSet::from_iter(nv, (0..nv).filter(|&v| n >= 1 && self.odd[v].map_or(false, |l| l < 2 * n)));
        let t_tilde = VertexSet::from_iter(nv, (0..nv).filter(|&v| self.even[v].map_or(false, |l| l <= 2 * n)));
        let h = h_tilde.difference(&t_tilde);
        let t = t_tilde.difference(&h_tilde);
        let b = h_tilde.intersection(&t_tilde);
        let x = self.unhappy.union(&h_tilde).union(&t_tilde);
        let o = x.complement();
        SearchState { n, u: self.unhappy.clone(), h_tilde, t_tilde, h, t, b, o, x }
    }

    /// Whether `v ∈ H̃_k`.
    pub fn in_h_tilde(&self, v: Vertex, k: usize) -> bool {
        k >= 1 && self.odd[v].map_or(false, |l| l < 2 * k)
    }

    /// Smallest `k ≤ n` with `v ∈ T_k`.
    pub fn first_tail_time(&self, v: Vertex, n: usize) -> Option<usize> {
        (1..=n).find(|&k| self.even[v].map_or(false, |l| l <= 2 * k) && !self.in_h_tilde(v, k))
    }
}

/// The layers at depth `n` computed from scratch.
pub fn alternating_bfs(inst: &Instance, m: &Matching, u: &VertexSet, n: usize) -> SearchState {
    alternating_lengths(&inst.graph, m, u, 2 * n, Exec::Sequential).state(n)
}

/// Stubborn vertices at depth `n`, their ages and families.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyLedger {
    pub n: usize,
    pub stubborn: Vec<Vertex>,
    pub age: BTreeMap<Vertex, usize>,
    pub families: BTreeMap<Vertex, Vec<Vertex>>,
    /// Vertices whose small family has an edge into `B_n` outside it.
    pub expanding: Vec<Vertex>,
    /// `e_n(x)`, nonzero entries only.
    pub e: BTreeMap<Vertex, usize>,
}

/// Vertices of `T_n ∪ U` with a neighbor in `B_n` that are not in
/// `H̃_{n+1}`. Needs `max_len ≥ 2n + 1`.
pub fn stubborn_vertices(g: &Graph, lengths: &AlternatingLengths, state: &SearchState) -> Vec<Vertex> {
    assert!(lengths.max_len > 2 * state.n);
    state
        .t
        .union(&state.u)
        .iter()
        .filter(|&x| g.neighbors(x).iter().any(|&y| state.b.contains(y)) && !lengths.in_h_tilde(x, state.n + 1))
        .collect()
}

pub fn age(lengths: &AlternatingLengths, x: Vertex, n: usize) -> usize {
    if lengths.unhappy.contains(x) {
        n
    } else {
        n - lengths.first_tail_time(x, n).expect("stubborn vertex lies in some T_k")
    }
}

/// Shortest odd and even weakly-alternating paths from `x` inside
/// `allowed ∪ {x}` with at most `budget` edges.
fn weak_lengths(g: &Graph, m: &Matching, x: Vertex, allowed: &[bool], budget: usize) -> BTreeMap<Vertex, (Option<usize>, Option<usize>)> {
    let mut found: BTreeMap<Vertex, (Option<usize>, Option<usize>)> = BTreeMap::new();
    walk_alternating(g, m, x, budget, &|w| allowed[w], &mut |w, len| {
        let slot = found.entry(w).or_default();
        let target = if len % 2 == 1 { &mut slot.0 } else { &mut slot.1 };
        if target.map_or(true, |l| len < l) {
            *target = Some(len);
        }
    });
    found
}

/// The largest subset of `X_n \ {x}` with the descendant property, found by
/// pruning vertices without an odd and an even path of total length at most
/// `2a + 1` inside the surviving set until nothing changes.
pub fn family(g: &Graph, m: &Matching, x: Vertex, age: usize, x_n: &VertexSet) -> Vec<Vertex> {
    let budget = 2 * age + 1;
    let mut allowed: Vec<bool> = x_n.mask().to_vec();
    allowed[x] = false;
    loop {
        let lens = weak_lengths(g, m, x, &allowed, budget);
        let mut changed = false;
        for v in 0..g.n() {
            if !allowed[v] {
                continue;
            }
            let ok = match lens.get(&v) {
                Some(&(Some(o), Some(e))) => o + e <= budget,
                _ => false,
            };
            if !ok {
                allowed[v] = false;
                changed = true;
            }
        }
        if !changed {
            return (0..g.n()).filter(|&v| allowed[v]).collect();
        }
    }
}

/// Ledgers for depths `0..=n_max`. Needs `max_len ≥ 2 n_max + 1`.
pub fn family_ledgers(
    g: &Graph,
    m: &Matching,
    lengths: &AlternatingLengths,
    n_max: usize,
    c_tilde: usize,
    exec: Exec,
) -> Vec<FamilyLedger> {
    let mut out: Vec<FamilyLedger> = Vec::new();
    let mut e: BTreeMap<Vertex, usize> = BTreeMap::new();
    for n in 0..=n_max {
        let state = lengths.state(n);
        let stubborn = if n == 0 { Vec::new() } else { stubborn_vertices(g, lengths, &state) };
        let ages: Vec<usize> = stubborn.iter().map(|&x| age(lengths, x, n)).collect();
        let pairs: Vec<(Vertex, usize)> = stubborn.iter().copied().zip(ages.iter().copied()).collect();
        let fams = exec.map(&pairs, |&(x, a)| family(g, m, x, a, &state.x));
        let families: BTreeMap<Vertex, Vec<Vertex>> = stubborn.iter().copied().zip(fams).collect();
        let expanding: Vec<Vertex> = families
            .iter()
            .filter(|(_, f)| !f.is_empty() && f.len() < c_tilde)
            .filter(|(_, f)| {
                f.iter().any(|&v| g.neighbors(v).iter().any(|&w| state.b.contains(w) && f.binary_search(&w).is_err()))
            })
            .map(|(&x, _)| x)
            .collect();
        out.push(FamilyLedger {
            n,
            stubborn,
            age: pairs.into_iter().collect(),
            families,
            expanding: expanding.clone(),
            e: e.clone(),
        });
        for x in expanding {
            *e.entry(x).or_default() += 1;
        }
    }
    out
}

/// One row of the growth table.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub x: usize,
    pub b: usize,
    pub e_sum: usize,
    /// `(|X_n| + |B_n| + ½ Σ_{X_n} e_n) / N`.
    pub invariant: f64,
    pub tm: usize,
    pub tt: usize,
    pub tb: usize,
    pub te: usize,
    pub tg: usize,
}

pub fn growth_invariant(lengths: &AlternatingLengths, ledgers: &[FamilyLedger], c_tilde: usize) -> Vec<GrowthRow> {
    let nv = lengths.odd.len().max(1) as f64;
    ledgers
        .iter()
        .map(|led| {
            let st = lengths.state(led.n);
            let e_sum: usize = led.e.iter().filter(|(&v, _)| st.x.contains(v)).map(|(_, &c)| c).sum();
            let tu = st.t.union(&st.u).len();
            let tt = led.stubborn.len();
            let tb = led.families.values().filter(|f| f.len() >= c_tilde).count();
            let te = led.expanding.len();
            GrowthRow {
                n: led.n,
                x: st.x.len(),
                b: st.b.len(),
                e_sum,
                invariant: (st.x.len() as f64 + st.b.len() as f64 + 0.5 * e_sum as f64) / nv,
                tm: tu - tt,
                tt,
                tb,
                te,
                tg: tt - tb - te,
            }
        })
        .collect()
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut s = String::from("n,x,b,e_sum,invariant,tm,tt,tb,te,tg\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{:.6},{},{},{},{},{}", r.n, r.x, r.b, r.e_sum, r.invariant, r.tm, r.tt, r.tb, r.te, r.tg).unwrap();
    }
    s
}

/// Everything the claim checkers read.
#[derive(Clone, Debug)]
pub struct DiagnosticRun<'a> {
    pub inst: &'a Instance,
    pub kctx: &'a KContext,
    /// Raw edge list, so a corrupted matching can be checked too.
    pub matching: Vec<Edge>,
    /// Path budget the matching was optimized for.
    pub n0: usize,
    pub c_tilde: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimResult {
    pub claim: &'static str,
    pub n: usize,
    pub pass: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ClaimReport {
    pub results: Vec<ClaimResult>,
    pub growth: Vec<GrowthRow>,
}

impl ClaimReport {
    pub fn failures(&self) -> Vec<&ClaimResult> {
        self.results.iter().filter(|r| !r.pass).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    /// `(claim, passed, checked)` per claim id, in first-seen order.
    pub fn tally(&self) -> Vec<(&'static str, usize, usize)> {
        let mut out: Vec<(&'static str, usize, usize)> = Vec::new();
        for r in &self.results {
            match out.iter_mut().find(|t| t.0 == r.claim) {
                Some(t) => {
                    t.1 += usize::from(r.pass);
                    t.2 += 1;
                }
                None => out.push((r.claim, usize::from(r.pass), 1)),
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("claim,n,pass,witness\n");
        for r in &self.results {
            writeln!(s, "{},{},{},{}", r.claim, r.n, r.pass, r.witness.as_deref().unwrap_or("")).unwrap();
        }
        s
    }
}

fn first<I: IntoIterator<Item = Vertex>>(it: I) -> Option<String> {
    it.into_iter().next().map(|v| format!("vertex {v}"))
}

/// Checks the structural claims at every admissible depth: the layer
/// properties for `1 ≤ n ≤ n0/2` and the stubborn/family claims for
/// `1 ≤ n ≤ (n0−1)/2`. A matching that is not valid fails `matching-valid`
/// and nothing else is checked.
pub fn check_structural_claims(run: &DiagnosticRun, exec: Exec) -> ClaimReport {
    let g = &run.inst.graph;
    let mut report = ClaimReport::default();
    let m = match Matching::from_edges(g, &run.matching) {
        Ok(m) => m,
        Err(e) => {
            report.results.push(ClaimResult { claim: "matching-valid", n: 0, pass: false, witness: Some(e.to_string()) });
            return report;
        }
    };
    report.results.push(ClaimResult { claim: "matching-valid", n: 0, pass: true, witness: None });
    let inst = run.inst;
    let kctx = run.kctx;
    let u = unhappy_set(inst, kctx, &m);
    let n_layers = run.n0 / 2;
    let n_fam = run.n0.saturating_sub(1) / 2;
    let lengths = alternating_lengths(g, &m, &u, 2 * n_layers.max(n_fam) + 2, exec);
    let mut push = |claim: &'static str, n: usize, witness: Option<String>| {
        report.results.push(ClaimResult { claim, n, pass: witness.is_none(), witness });
    };

    push("k-disjoint-unhappy", 0, first(kctx.k.intersection(&u).iter()));
    let mut prev_b = VertexSet::new(g.n());
    for n in 1..=n_layers {
        let st = lengths.state(n);
        push("heads-covered", n, first(st.h_tilde.iter().filter(|&v| !m.is_covered(v))));
        let bij = st.h_tilde.iter().find(|&h| !m.partner(h).map_or(false, |p| st.t_tilde.contains(p))).or_else(|| {
            st.t_tilde.iter().find(|&t| !m.partner(t).map_or(false, |p| st.h_tilde.contains(p)))
        });
        let bij = bij.or_else(|| st.h_tilde.union(&st.t_tilde).intersection(&st.u).iter().next());
        push("head-tail-bijection", n, first(bij));
        push("tails-min-degree", n, first(st.t_tilde.iter().filter(|&v| g.degree(v) < inst.d)));
        let star_fail = kctx.k.iter().find(|&x| {
            let dx = star_members(inst, x);
            !dx.is_empty() && dx.iter().all(|&y| st.x.contains(y)) && !dx.iter().any(|&y| st.u.contains(y))
        });
        push("complete-star-hit", n, star_fail.map(|x| format!("center {x}")));
        if kctx.dense {
            let dense = check_sparse_dense(g, &st.o, kctx.r_prime + 1).1;
            push("outside-dense", n, (!dense).then(|| format!("O_{n} not {}-dense", kctx.r_prime + 1)));
        }
        let parts = st.u.len() + st.h.len() + st.t.len() + st.b.len();
        let overlap = st.u.intersection(&st.h_tilde.union(&st.t_tilde)).iter().next();
        push(
            "disjoint-partition",
            n,
            overlap.map(|v| format!("vertex {v}")).or_else(|| (parts != st.x.len()).then(|| format!("sizes {parts} vs {}", st.x.len()))),
        );
        push("both-monotone", n, first(prev_b.difference(&st.b).iter()));
        let pm = st.h.iter().find(|&h| !m.partner(h).map_or(false, |p| st.t.contains(p)))
            .or_else(|| st.t.iter().find(|&t| !m.partner(t).map_or(false, |p| st.h.contains(p))))
            .or_else(|| st.b.iter().find(|&b| !m.partner(b).map_or(false, |p| st.b.contains(p))));
        push("head-tail-matching", n, first(pm));
        if inst.bipartite {
            push("bipartite-no-both", n, first(st.b.iter()));
        }
        prev_b = st.b;
    }

    let ledgers = family_ledgers(g, &m, &lengths, n_fam, run.c_tilde, exec);
    for led in ledgers.iter().skip(1) {
        let n = led.n;
        let st = lengths.state(n);
        let next = lengths.state(n + 1);
        let tu = st.t.union(&st.u);
        let tt_fail = g.edges().into_iter().find(|e| {
            tu.contains(e.0) && tu.contains(e.1) && !next.b.contains(e.0) && !next.b.contains(e.1)
        });
        push("tt-edge-both", n, tt_fail.map(|e| format!("edge {e}")));
        let mut edge_fail = None;
        let mut in_b_fail = None;
        let mut owner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let mut disjoint_fail = None;
        for (&x, fam) in &led.families {
            for &y in g.neighbors(x) {
                if st.b.contains(y) && fam.binary_search(&y).is_err() && edge_fail.is_none() {
                    edge_fail = Some(format!("edge {} outside family of {x}", Edge::new(x, y)));
                }
            }
            if let Some(&v) = fam.iter().find(|&&v| !st.b.contains(v)) {
                in_b_fail.get_or_insert(format!("vertex {v} in family of {x}"));
            }
            for &v in fam {
                if let Some(&other) = owner.get(&v) {
                    disjoint_fail.get_or_insert(format!("vertex {v} in families of {other} and {x}"));
                }
                owner.insert(v, x);
            }
        }
        push("stubborn-edge-in-family", n, edge_fail);
        push("family-in-both", n, in_b_fail);
        push("families-disjoint", n, disjoint_fail);
        let stubborn = VertexSet::from_iter(g.n(), led.stubborn.iter().copied());
        let unique_fail = led.families.iter().find_map(|(&x, fam)| {
            fam.iter().find_map(|&v| {
                g.neighbors(v)
                    .iter()
                    .find(|&&y| y != x && stubborn.contains(y))
                    .map(|&y| format!("family of {x} touches stubborn {y}"))
            })
        });
        push("family-unique-neighbor", n, unique_fail);
        let c2 = run.c_tilde * run.c_tilde;
        push("e-bound", n, led.e.iter().find(|(_, &c)| c > c2).map(|(&v, &c)| format!("e({v}) = {c}")));
        let total: usize = led.families.values().map(Vec::len).sum();
        push("family-budget", n, (total > st.b.len()).then(|| format!("{total} > |B| = {}", st.b.len())));
    }
    report.growth = growth_invariant(&lengths, &ledgers, run.c_tilde);
    for w in report.growth.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        push("growth-monotone", b.n, (b.invariant < a.invariant).then(|| format!("I({}) < I({})", b.n, a.n)));
    }
    if let Some(r0) = report.growth.first() {
        let expect = u.len() as f64 / g.n().max(1) as f64;
        push("growth-start", 0, ((r0.invariant - expect).abs() > 1e-12).then(|| format!("I(0) = {}", r0.invariant)));
    }
    report
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("Q is not {0}-dense")]
    NotDense(usize),
    #[error("W meets Q at vertex {0}")]
    Overlap(Vertex),
}

/// Whether `|E(W, W^c)| ≥ d^{-r} |W|` for a set `W` avoiding the
/// `(r+1)`-dense set `Q`.
pub fn expansion_check(g: &Graph, d: usize, q: &VertexSet, r: usize, w: &VertexSet) -> Result<bool, ExpansionError> {
    if !check_sparse_dense(g, q, r + 1).1 {
        return Err(ExpansionError::NotDense(r + 1));
    }
    if let Some(v) = w.intersection(q).iter().next() {
        return Err(ExpansionError::Overlap(v));
    }
    let (boundary, _) = edge_boundary(g, w);
    let scale = (d as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
    Ok((boundary as u128).saturating_mul(scale) >= w.len() as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_rounds, RunOptions};
    use crate::generators::{random_regular, rotation_cycle};

    fn inst(g: Graph, d: usize) -> Instance {
        Instance::new(g, d, None).unwrap()
    }

    #[test]
    fn single_step_layers() {
        // Path 0-1-2 with 1-2 matched, U = {0}.
        let g = Graph::path(3);
        let m = Matching::from_edges(&g, &[Edge(1, 2)]).unwrap();
        let u = VertexSet::from_iter(3, [0]);
        let st = alternating_bfs(&inst(g, 2), &m, &u, 1);
        assert_eq!(st.h_tilde.as_slice(), &[1]);
        assert_eq!(st.t_tilde.as_slice(), &[2]);
        assert!(st.b.is_empty());
    }

    #[test]
    fn perfect_matching_has_empty_layers() {
        let g = Graph::cycle(6);
        let m = Matching::from_edges(&g, &[Edge(0, 1), Edge(2, 3), Edge(4, 5)]).unwrap();
        let st = alternating_bfs(&inst(g, 2), &m, &VertexSet::new(6), 3);
        assert!(st.x.is_empty() && st.o.len() == 6);
    }

    #[test]
    fn odd_cycle_creates_both_vertices() {
        // C_5 with 1-2 and 3-4 matched, vertex 0 uncovered.
        let g = Graph::cycle(5);
        let m = Matching::from_edges(&g, &[Edge(1, 2), Edge(3, 4)]).unwrap();
        let u = VertexSet::from_iter(5, [0]);
        let i = inst(g, 2);
        assert!(alternating_bfs(&i, &m, &u, 1).b.is_empty());
        let st = alternating_bfs(&i, &m, &u, 2);
        assert!(!st.b.is_empty());
        assert_eq!(st.b.as_slice(), &[1, 2, 3, 4]);
    }

    /// Union of all subsets of `X_n \ {x}` with the descendant property,
    /// checked path pair by path pair.
    fn brute_family(g: &Graph, m: &Matching, x: Vertex, age: usize, x_n: &VertexSet) -> Vec<Vertex> {
        let cand: Vec<Vertex> = x_n.iter().filter(|&v| v != x).collect();
        assert!(cand.len() <= 16);
        let mut union = vec![false; g.n()];
        for mask in 0u32..(1 << cand.len()) {
            let mut allowed = vec![false; g.n()];
            for (i, &v) in cand.iter().enumerate() {
                allowed[v] = mask >> i & 1 == 1;
            }
            // All simple weakly-alternating paths from x inside the subset.
            let mut odd = vec![usize::MAX; g.n()];
            let mut even = vec![usize::MAX; g.n()];
            walk_alternating(g, m, x, 2 * age + 1, &|w| allowed[w], &mut |w, len| {
                let t = if len % 2 == 1 { &mut odd[w] } else { &mut even[w] };
                *t = (*t).min(len);
            });
            let ok = cand.iter().enumerate().filter(|&(i, _)| mask >> i & 1 == 1).all(|(_, &v)| {
                odd[v] != usize::MAX && even[v] != usize::MAX && odd[v] + even[v] <= 2 * age + 1
            });
            if ok {
                for (i, &v) in cand.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        union[v] = true;
                    }
                }
            }
        }
        (0..g.n()).filter(|&v| union[v]).collect()
    }

    #[test]
    fn odd_cycle_family_contains_return_vertex() {
        // Pendant path into a triangle: u=0 unmatched, 1-2 matched, 2 on the
        // triangle 2-3-4 with 3-4 matched, and a tail 5 matched to nothing.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 2)]).unwrap();
        let m = Matching::from_edges(&g, &[Edge(1, 2), Edge(3, 4)]).unwrap();
        let u = VertexSet::from_iter(5, [0]);
        let lengths = alternating_lengths(&g, &m, &u, 7, Exec::Sequential);
        let st = lengths.state(2);
        assert_eq!(st.b.as_slice(), &[3, 4]);
        let stubborn = stubborn_vertices(&g, &lengths, &st);
        assert_eq!(stubborn, vec![2]);
        let a = age(&lengths, 2, 2);
        let fam = family(&g, &m, 2, a, &st.x);
        assert_eq!(fam, vec![3, 4]);
        assert_eq!(fam, brute_family(&g, &m, 2, a, &st.x));
    }

    #[test]
    fn families_match_brute_force() {
        let mut checked = 0;
        for seed in 0..200 {
            let n = 8 + seed as usize % 10;
            let g = crate::generators::random_bounded_degree(n, 3, 2 * n, seed);
            let i = inst(g.clone(), 3.min(g.max_degree().max(1)));
            let kctx = KContext::empty(&i);
            let mut m = Matching::new(n);
            // A maximal matching in id order.
            for e in g.edges() {
                if !m.is_covered(e.0) && !m.is_covered(e.1) && (e.0 + e.1 + seed as usize) % 3 != 0 {
                    m.insert(e.0, e.1);
                }
            }
            let u = unhappy_set(&i, &kctx, &m);
            let lengths = alternating_lengths(&g, &m, &u, 9, Exec::Sequential);
            for n_depth in 1..=4 {
                let st = lengths.state(n_depth);
                if st.x.len() > 17 {
                    continue;
                }
                for x in stubborn_vertices(&g, &lengths, &st) {
                    let a = age(&lengths, x, n_depth);
                    assert_eq!(family(&g, &m, x, a, &st.x), brute_family(&g, &m, x, a, &st.x), "seed {seed}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    fn conforming_run(i: &Instance, n0: usize) -> (KContext, Matching) {
        let kctx = KContext::empty(i);
        let st = run_rounds(i, &kctx, Matching::new(i.n()), n0, RunOptions::default()).unwrap();
        (kctx, st.matching)
    }

    #[test]
    fn claims_hold_on_conforming_runs() {
        for (i, bip) in [(rotation_cycle(31).unwrap(), false), (random_regular(60, 3, true, 2).unwrap(), true), (random_regular(60, 3, false, 5).unwrap(), false)] {
            let (kctx, m) = conforming_run(&i, 9);
            let run = DiagnosticRun { inst: &i, kctx: &kctx, matching: m.edges(), n0: 9, c_tilde: 12 };
            let rep = check_structural_claims(&run, Exec::default());
            assert!(rep.all_pass(), "{:?}", rep.failures());
            assert_eq!(bip, rep.results.iter().any(|r| r.claim == "bipartite-no-both"));
            assert!(!rep.to_csv().is_empty());
        }
    }

    #[test]
    fn corrupted_matching_is_reported() {
        let i = rotation_cycle(8).unwrap();
        let kctx = KContext::empty(&i);
        let run = DiagnosticRun { inst: &i, kctx: &kctx, matching: vec![Edge(0, 1), Edge(1, 2)], n0: 9, c_tilde: 12 };
        let rep = check_structural_claims(&run, Exec::Sequential);
        let f = rep.failures();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].claim, "matching-valid");
        assert!(f[0].witness.as_ref().unwrap().contains("0 1"));
    }

    #[test]
    fn growth_starts_at_unhappy_measure() {
        let i = rotation_cycle(9).unwrap();
        let kctx = KContext::empty(&i);
        let m = Matching::new(9);
        let u = unhappy_set(&i, &kctx, &m);
        let lengths = alternating_lengths(&i.graph, &m, &u, 3, Exec::Sequential);
        let ledgers = family_ledgers(&i.graph, &m, &lengths, 1, 12, Exec::Sequential);
        let rows = growth_invariant(&lengths, &ledgers, 12);
        assert!((rows[0].invariant - 1.0).abs() < 1e-12);
        let c6 = rotation_cycle(6).unwrap();
        let pm = Matching::from_edges(&c6.graph, &[Edge(0, 1), Edge(2, 3), Edge(4, 5)]).unwrap();
        let l = alternating_lengths(&c6.graph, &pm, &VertexSet::new(6), 5, Exec::Sequential);
        let rows = growth_invariant(&l, &family_ledgers(&c6.graph, &pm, &l, 2, 12, Exec::Sequential), 12);
        assert!(rows.iter().all(|r| r.invariant == 0.0));
    }

    #[test]
    fn expansion_examples() {
        let d = 4;
        let star = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
        let q = VertexSet::from_iter(5, [0]);
        assert_eq!(expansion_check(&star, d, &q, 0, &VertexSet::from_iter(5, [1, 3])), Ok(true));
        let c12 = Graph::cycle(12);
        let q = VertexSet::from_iter(12, [0, 4, 8]);
        let w = VertexSet::from_iter(12, [1, 2]);
        assert_eq!(edge_boundary(&c12, &w).0, 2);
        assert_eq!(expansion_check(&c12, 2, &q, 1, &w), Ok(true));
        assert_eq!(expansion_check(&c12, 2, &q, 1, &VertexSet::new(12)), Ok(true));
        assert_eq!(expansion_check(&c12, 2, &q, 0, &w), Err(ExpansionError::NotDense(1)));
        assert_eq!(expansion_check(&c12, 2, &q, 1, &VertexSet::from_iter(12, [0])), Err(ExpansionError::Overlap(0)));
    }
}
