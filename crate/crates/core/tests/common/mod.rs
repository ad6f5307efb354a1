#![allow(dead_code)]

pub mod oracles;

use proptest::prelude::*;
use topocp_core::geometry::{DistanceMatrix, PointCloud};
use topocp_core::persistence::{Bar, PersistenceDiagram};

pub fn bars(d: &PersistenceDiagram) -> Vec<(f64, f64)> {
    d.bars().iter().map(|b| (b.birth, b.death)).collect()
}

pub fn diagram(dim: usize, pairs: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram::new(dim, pairs.iter().map(|&(b, d)| Bar::new(b, d)).collect())
}

pub fn matrix(rows: &[Vec<f64>]) -> DistanceMatrix {
    DistanceMatrix::from_rows(rows).unwrap()
}

pub fn rows(d: &DistanceMatrix) -> Vec<Vec<f64>> {
    (0..d.size()).map(|i| d.row(i).to_vec()).collect()
}

pub fn cloud(points: Vec<Vec<f64>>) -> PointCloud {
    PointCloud::new(1, points).unwrap()
}

/// Clouds of `1..=max_n` points in dimension `1..=max_dim`, coordinates on a
/// coarse grid so that tied distances occur.
pub fn points_strategy(max_n: usize, max_dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_dim).prop_flat_map(move |dim| {
        prop::collection::vec(prop::collection::vec((0i32..8).prop_map(|x| x as f64 * 0.25), dim), 1..=max_n)
    })
}

/// Continuous coordinates in `[-1, 1]`.
pub fn smooth_points(min_n: usize, max_n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), min_n..=max_n)
}

/// Diagrams with up to `max_len` finite bars on a coarse grid.
pub fn diagram_strategy(max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(
        ((0i32..12), (1i32..12)).prop_map(|(b, l)| (b as f64 * 0.5, (b + l) as f64 * 0.5)),
        0..=max_len,
    )
}
