use ndarray::ArrayView2;

use crate::geometry::euclidean_rows;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Connected components of the graph linking every pair within distance `theta`.
///
/// Cluster ids are contiguous and numbered by first appearance, so particle 0
/// is always in cluster 0.
pub fn extract_clusters(final_positions: ArrayView2<'_, f64>, sigma: f64, theta: f64) -> Vec<usize> {
    let n = final_positions.nrows();
    // exp(‖Δ‖ / 2σ²) <= θ  ⇔  ‖Δ‖ <= 2σ² ln θ
    let radius = 2.0 * sigma * sigma * theta.ln();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        let xi = final_positions.row(i);
        for j in (i + 1)..n {
            if euclidean_rows(xi, final_positions.row(j)) <= radius {
                uf.union(i, j);
            }
        }
    }
    relabel((0..n).map(|i| uf.find(i)).collect::<Vec<_>>().as_slice())
}

/// Maps arbitrary ids onto 0..k in order of first appearance.
pub(crate) fn relabel(ids: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::HashMap::new();
    ids.iter()
        .map(|&id| {
            let next = seen.len();
            *seen.entry(id).or_insert(next)
        })
        .collect()
}

pub fn cluster_count(assignments: &[usize]) -> usize {
    assignments.iter().max().map_or(0, |m| m + 1)
}
