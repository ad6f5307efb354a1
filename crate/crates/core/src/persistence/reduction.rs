use std::collections::HashMap;

use super::diagram::{Bar, PersistenceDiagram};
use super::filtration::Filtration;

/// Symmetric difference of two ascending index lists.
fn add_columns(target: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

fn boundary_columns(f: &Filtration) -> Vec<Vec<usize>> {
    let index: HashMap<&[usize], usize> = f
        .simplices()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.vertices.as_slice(), i))
        .collect();
    f.simplices()
        .iter()
        .map(|s| {
            if s.vertices.len() == 1 {
                return Vec::new();
            }
            let mut col: Vec<usize> = (0..s.vertices.len())
                .map(|skip| {
                    let face: Vec<usize> = s
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    index[face.as_slice()]
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// Persistence pairs (as filtration positions) and unpaired positive simplices.
pub(crate) struct Pairing {
    pub pairs: Vec<(usize, usize)>,
    pub essential: Vec<usize>,
}

/// Column reduction of the boundary matrix over the two-element field,
/// highest dimension first so that pivots of a dimension clear the columns
/// of the dimension below.
pub(crate) fn reduce(f: &Filtration) -> Pairing {
    let mut columns = boundary_columns(f);
    let len = f.len();
    let top = f.simplices().iter().map(|s| s.dim()).max().unwrap_or(0);
    let mut pivot_owner: Vec<Option<usize>> = vec![None; len];
    let mut cleared = vec![false; len];
    let mut pairs = Vec::new();
    for dim in (1..=top).rev() {
        for j in 0..len {
            if f.simplices()[j].dim() != dim {
                continue;
            }
            if cleared[j] {
                columns[j].clear();
                continue;
            }
            while let Some(&low) = columns[j].last() {
                match pivot_owner[low] {
                    Some(k) => {
                        let other = std::mem::take(&mut columns[k]);
                        add_columns(&mut columns[j], &other);
                        columns[k] = other;
                    }
                    None => break,
                }
            }
            if let Some(&low) = columns[j].last() {
                pivot_owner[low] = Some(j);
                cleared[low] = true;
                pairs.push((low, j));
            }
        }
    }
    let paired: Vec<bool> = {
        let mut p = vec![false; len];
        for &(b, d) in &pairs {
            p[b] = true;
            p[d] = true;
        }
        p
    };
    let essential = (0..len).filter(|&i| !paired[i]).collect();
    Pairing { pairs, essential }
}

/// Barcodes in dimensions `0..=max_dim` of a filtration, by standard matrix
/// reduction. Zero-length bars are dropped; classes still alive at `r_max`
/// are reported with infinite death.
pub fn compute_persistence(f: &Filtration) -> Vec<PersistenceDiagram> {
    let pairing = reduce(f);
    let mut bars: Vec<Vec<Bar>> = vec![Vec::new(); f.max_dim() + 1];
    let s = f.simplices();
    for (b, d) in pairing.pairs {
        let dim = s[b].dim();
        if dim <= f.max_dim() && s[d].value > s[b].value {
            bars[dim].push(Bar::new(s[b].value, s[d].value));
        }
    }
    for e in pairing.essential {
        let dim = s[e].dim();
        if dim <= f.max_dim() {
            bars[dim].push(Bar::essential(s[e].value));
        }
    }
    bars.into_iter()
        .enumerate()
        .map(|(k, b)| PersistenceDiagram::new(k, b))
        .collect()
}
