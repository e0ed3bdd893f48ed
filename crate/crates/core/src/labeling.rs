//! Distance-`k` labelings: every label class is `k`-sparse.

use crate::graph::{is_sparse, BallScratch, Graph, Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    /// Certified sparsity radius.
    pub k: usize,
    /// Zero-based label per vertex.
    pub labels: Vec<usize>,
    /// Number of labels in use (`max label + 1`).
    pub m: usize,
}

impl Labeling {
    pub fn label(&self, v: Vertex) -> usize {
        self.labels[v]
    }

    /// Wraps explicit labels without checking them.
    pub fn from_labels(k: usize, labels: Vec<usize>) -> Labeling {
        let m = labels.iter().map(|l| l + 1).max().unwrap_or(0);
        Labeling { k, labels, m }
    }
}

/// Upper bound `1 + Δ·Σ_{i=1..k}(Δ−1)^{i−1}` on the size of a `k`-ball,
/// saturating at `u64::MAX`.
pub fn label_bound(delta: usize, k: usize) -> u64 {
    let d = delta as u64;
    let mut sum: u64 = 0;
    let mut pow: u64 = 1;
    for _ in 0..k {
        sum = sum.saturating_add(pow);
        pow = pow.saturating_mul(d.saturating_sub(1));
    }
    1u64.saturating_add(d.saturating_mul(sum))
}

/// Greedy labeling in vertex-id order: each vertex takes the least label not
/// used within distance `k`.
pub fn sparse_labeling(g: &Graph, k: usize) -> Labeling {
    assert!(k >= 1, "sparsity radius must be at least 1");
    let n = g.n();
    let mut labels = vec![usize::MAX; n];
    let mut scratch = BallScratch::new(n);
    let mut stamp: Vec<usize> = Vec::new();
    for v in 0..n {
        let ball = scratch.ball(g, v, k);
        let epoch = v + 1;
        for &w in ball {
            let l = labels[w];
            if l != usize::MAX {
                if l >= stamp.len() {
                    stamp.resize(l + 1, 0);
                }
                stamp[l] = epoch;
            }
        }
        let mut l = 0;
        while l < stamp.len() && stamp[l] == epoch {
            l += 1;
        }
        labels[v] = l;
    }
    Labeling::from_labels(k, labels)
}

/// Independent check: every class is `k`-sparse and `m` respects the bound.
pub fn verify_labeling(g: &Graph, lab: &Labeling) -> bool {
    if lab.labels.len() != g.n() {
        return false;
    }
    if lab.m as u64 > label_bound(g.max_degree(), lab.k) {
        return false;
    }
    let mut classes: Vec<Vec<Vertex>> = vec![Vec::new(); lab.m];
    for (v, &l) in lab.labels.iter().enumerate() {
        if l >= lab.m {
            return false;
        }
        classes[l].push(v);
    }
    classes
        .into_iter()
        .all(|c| is_sparse(g, &VertexSet::from_iter(g.n(), c), lab.k))
}
