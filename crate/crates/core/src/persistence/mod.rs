//! Vietoris-Rips persistent homology over the two-element field.

mod cohomology;
mod components;
mod diagram;
mod filtration;
mod reduction;

pub use cohomology::persistence_low_dim;
pub use components::{connected_components_h0, UnionFind};
pub use diagram::{Bar, PersistenceDiagram};
pub use filtration::{
    build_rips, FilteredSimplex, Filtration, RipsConfig, DEFAULT_SIMPLEX_BUDGET,
};
pub use reduction::compute_persistence;

use crate::error::Result;
use crate::geometry::DistanceMatrix;

/// Barcodes for dimensions `0..=config.max_dim`.
///
/// Dimensions up to one go through the implicit cohomology path; anything
/// higher builds the explicit filtration and reduces it.
pub fn rips_diagrams(d: &DistanceMatrix, config: &RipsConfig) -> Result<Vec<PersistenceDiagram>> {
    let r_max = config.resolve_r_max(d)?;
    if config.max_dim <= 1 {
        check_low_dim_budget(d, r_max, config.simplex_budget)?;
        let [h0, h1] = persistence_low_dim(d, r_max);
        let mut out = vec![h0];
        if config.max_dim == 1 {
            out.push(h1);
        }
        return Ok(out);
    }
    let f = build_rips(d, config)?;
    Ok(compute_persistence(&f))
}

/// The implicit path never stores triangles, but the same size guard applies
/// so that both paths accept the same inputs.
fn check_low_dim_budget(d: &DistanceMatrix, r_max: f64, budget: u64) -> Result<()> {
    let n = d.size() as u64;
    let upper = n + n * n.saturating_sub(1) / 2 + n * n.saturating_sub(1) * n.saturating_sub(2) / 6;
    if upper <= budget {
        return Ok(());
    }
    let mut count = n;
    for a in 0..d.size() {
        for b in (a + 1)..d.size() {
            if d.get(a, b) > r_max {
                continue;
            }
            count += 1;
            count += ((b + 1)..d.size())
                .filter(|&c| d.get(a, c) <= r_max && d.get(b, c) <= r_max)
                .count() as u64;
        }
        if count > budget {
            return Err(crate::error::Error::SimplexBudget {
                what: format!("Rips complex up to dimension 2 on {n} points"),
                count,
                budget,
            });
        }
    }
    Ok(())
}
