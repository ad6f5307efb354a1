use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

/// Default cap on the number of simplices a single filtration may hold.
pub const DEFAULT_SIMPLEX_BUDGET: u64 = 20_000_000;

/// A simplex together with the scale at which it enters the filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSimplex {
    pub vertices: Vec<usize>,
    pub value: f64,
}

impl FilteredSimplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Filtration order: value, then dimension, then vertices lexicographically.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.vertices.len().cmp(&other.vertices.len()))
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// Parameters for building a Vietoris-Rips filtration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsConfig {
    /// Highest homology dimension of interest; simplices are built one
    /// dimension higher so that classes in `max_dim` can die.
    pub max_dim: usize,
    /// Truncation scale; `None` uses the diameter (the full filtration).
    pub r_max: Option<f64>,
    pub simplex_budget: u64,
}

impl RipsConfig {
    pub fn new(max_dim: usize) -> Self {
        Self {
            max_dim,
            r_max: None,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
        }
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = Some(r_max);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.simplex_budget = budget;
        self
    }

    /// The effective truncation scale for `d`.
    pub fn resolve_r_max(&self, d: &DistanceMatrix) -> Result<f64> {
        match self.r_max {
            None => Ok(d.diameter()),
            Some(r) if r > 0.0 && !r.is_nan() => Ok(r),
            Some(r) => Err(Error::input(format!("r_max must be positive, got {r}"))),
        }
    }
}

/// Simplices of a Rips complex sorted so that every face precedes its cofaces.
#[derive(Debug, Clone)]
pub struct Filtration {
    simplices: Vec<FilteredSimplex>,
    max_dim: usize,
    r_max: f64,
    n_vertices: usize,
}

impl Filtration {
    /// Wrap an arbitrary simplex list, sorting it into filtration order.
    /// Callers are responsible for closure under faces.
    pub fn from_simplices(
        mut simplices: Vec<FilteredSimplex>,
        max_dim: usize,
        r_max: f64,
        n_vertices: usize,
    ) -> Self {
        simplices.sort_by(FilteredSimplex::filtration_cmp);
        Self {
            simplices,
            max_dim,
            r_max,
            n_vertices,
        }
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }
}

struct CliqueBuilder<'a> {
    d: &'a DistanceMatrix,
    neighbors: Vec<Vec<usize>>,
    top_dim: usize,
    budget: u64,
    out: Vec<FilteredSimplex>,
}

impl CliqueBuilder<'_> {
    fn push(&mut self, s: FilteredSimplex) -> Result<()> {
        if self.out.len() as u64 >= self.budget {
            return Err(Error::SimplexBudget {
                what: format!(
                    "Rips complex up to dimension {} on {} points",
                    self.top_dim,
                    self.d.size()
                ),
                count: self.out.len() as u64 + 1,
                budget: self.budget,
            });
        }
        self.out.push(s);
        Ok(())
    }

    /// Extend `clique` by each candidate, recursing while the dimension allows.
    fn extend(&mut self, clique: &mut Vec<usize>, value: f64, candidates: &[usize]) -> Result<()> {
        if clique.len() > self.top_dim {
            return Ok(());
        }
        for (pos, &v) in candidates.iter().enumerate() {
            let mut new_value = value;
            for &u in clique.iter() {
                new_value = new_value.max(self.d.get(u, v));
            }
            clique.push(v);
            self.push(FilteredSimplex {
                vertices: clique.clone(),
                value: new_value,
            })?;
            if clique.len() <= self.top_dim {
                let next: Vec<usize> = candidates[pos + 1..]
                    .iter()
                    .copied()
                    .filter(|w| self.neighbors[v].binary_search(w).is_ok())
                    .collect();
                self.extend(clique, new_value, &next)?;
            }
            clique.pop();
        }
        Ok(())
    }
}

/// Vietoris-Rips filtration of `d` with simplices up to dimension
/// `max_dim + 1`, excluding anything whose diameter exceeds `r_max`.
pub fn build_rips(d: &DistanceMatrix, config: &RipsConfig) -> Result<Filtration> {
    let r_max = config.resolve_r_max(d)?;
    let n = d.size();
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| ((i + 1)..n).filter(|&j| d.get(i, j) <= r_max).collect())
        .collect();
    let mut builder = CliqueBuilder {
        d,
        neighbors,
        top_dim: config.max_dim + 1,
        budget: config.simplex_budget,
        out: Vec::new(),
    };
    for v in 0..n {
        builder.push(FilteredSimplex {
            vertices: vec![v],
            value: 0.0,
        })?;
        let nbrs = builder.neighbors[v].clone();
        let mut clique = vec![v];
        builder.extend(&mut clique, 0.0, &nbrs)?;
    }
    Ok(Filtration::from_simplices(builder.out, config.max_dim, r_max, n))
}
