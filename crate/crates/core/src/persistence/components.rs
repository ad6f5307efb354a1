use super::diagram::{Bar, PersistenceDiagram};
use crate::geometry::DistanceMatrix;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Edge of a Rips complex keyed for filtration order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Edge {
    pub value: f64,
    pub a: usize,
    pub b: usize,
}

/// All edges with length at most `r_max`, in filtration order.
pub(crate) fn sorted_edges(d: &DistanceMatrix, r_max: f64) -> Vec<Edge> {
    let n = d.size();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let value = d.get(a, b);
            if value <= r_max {
                edges.push(Edge { value, a, b });
            }
        }
    }
    edges.sort_by(|x, y| {
        x.value
            .total_cmp(&y.value)
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });
    edges
}

/// Marks which of `edges` merge two components; returns the flags and the
/// dimension-0 barcode.
pub(crate) fn component_pairs(n: usize, edges: &[Edge]) -> (Vec<bool>, PersistenceDiagram) {
    let mut uf = UnionFind::new(n);
    let mut merging = vec![false; edges.len()];
    let mut bars = Vec::new();
    let mut components = n;
    for (i, e) in edges.iter().enumerate() {
        if uf.union(e.a, e.b) {
            merging[i] = true;
            components -= 1;
            if e.value > 0.0 {
                bars.push(Bar::new(0.0, e.value));
            }
        }
    }
    bars.extend(std::iter::repeat_n(Bar::essential(0.0), components));
    (merging, PersistenceDiagram::new(0, bars))
}

/// Dimension-0 barcode by Kruskal-style union-find over the sorted edges.
pub fn connected_components_h0(d: &DistanceMatrix, r_max: f64) -> PersistenceDiagram {
    let edges = sorted_edges(d, r_max);
    component_pairs(d.size(), &edges).1
}
