//! Persistent cohomology in dimensions 0 and 1 with implicit coboundaries.
//!
//! Barcodes coincide with those of the homology reduction; this path avoids
//! materialising the triangles and only reduces edges that create cycles.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::components::{component_pairs, sorted_edges};
use super::diagram::{Bar, PersistenceDiagram};
use crate::geometry::DistanceMatrix;

/// Triangle key ordered like the filtration: value bits, then vertices
/// lexicographically (encoded in base `n`).
type TriKey = (u64, u64);

fn key_value(k: TriKey) -> f64 {
    f64::from_bits(k.0)
}

/// Pops the smallest entry that survives cancellation mod 2.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<TriKey>>) -> Option<TriKey> {
    while let Some(Reverse(top)) = heap.pop() {
        if heap.peek() == Some(&Reverse(top)) {
            heap.pop();
        } else {
            return Some(top);
        }
    }
    None
}

fn peek_pivot(heap: &mut BinaryHeap<Reverse<TriKey>>) -> Option<TriKey> {
    let pivot = pop_pivot(heap)?;
    heap.push(Reverse(pivot));
    Some(pivot)
}

/// Keeps the indices that occur an odd number of times.
fn reduce_mod2(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn cofacet(d: &DistanceMatrix, a: usize, b: usize, c: usize, r_max: f64) -> Option<TriKey> {
    let value = d.get(a, b).max(d.get(a, c)).max(d.get(b, c));
    if value > r_max {
        return None;
    }
    let n = d.size() as u64;
    let mut v = [a as u64, b as u64, c as u64];
    v.sort_unstable();
    Some(((value + 0.0).to_bits(), (v[0] * n + v[1]) * n + v[2]))
}

fn coboundary(d: &DistanceMatrix, a: usize, b: usize, r_max: f64) -> impl Iterator<Item = TriKey> + '_ {
    (0..d.size())
        .filter(move |&c| c != a && c != b)
        .filter_map(move |c| cofacet(d, a, b, c, r_max))
}

/// Barcodes in dimensions 0 and 1 of the Rips filtration of `d` truncated at
/// `r_max`.
pub fn persistence_low_dim(d: &DistanceMatrix, r_max: f64) -> [PersistenceDiagram; 2] {
    let edges = sorted_edges(d, r_max);
    let (merging, h0) = component_pairs(d.size(), &edges);

    // Reduced columns are kept as sets of edges and their coboundaries
    // regenerated on demand, which avoids fill-in.
    let mut owner: HashMap<TriKey, usize> = HashMap::new();
    let mut combos: Vec<Vec<usize>> = Vec::new();
    let mut bars = Vec::new();
    for (idx, e) in edges.iter().enumerate().rev() {
        if merging[idx] {
            continue;
        }
        let first = coboundary(d, e.a, e.b, r_max).min();
        let apparent = first.filter(|p| !owner.contains_key(p));
        let pivot = match apparent {
            Some(p) => {
                owner.insert(p, combos.len());
                combos.push(vec![idx]);
                Some(p)
            }
            None if first.is_none() => None,
            None => {
                let mut heap: BinaryHeap<Reverse<TriKey>> =
                    coboundary(d, e.a, e.b, r_max).map(Reverse).collect();
                let mut combo = vec![idx];
                let mut pivot = peek_pivot(&mut heap);
                while let Some(&j) = pivot.and_then(|p| owner.get(&p)) {
                    for &f in &combos[j] {
                        let g = &edges[f];
                        heap.extend(coboundary(d, g.a, g.b, r_max).map(Reverse));
                    }
                    combo.extend_from_slice(&combos[j]);
                    pivot = peek_pivot(&mut heap);
                }
                if let Some(p) = pivot {
                    owner.insert(p, combos.len());
                    combos.push(reduce_mod2(combo));
                }
                pivot
            }
        };
        match pivot {
            Some(p) => {
                let death = key_value(p);
                if death > e.value {
                    bars.push(Bar::new(e.value, death));
                }
            }
            None => bars.push(Bar::essential(e.value)),
        }
    }
    [h0, PersistenceDiagram::new(1, bars)]
}
