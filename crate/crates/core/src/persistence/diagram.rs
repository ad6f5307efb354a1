use std::cmp::Ordering;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One interval of a barcode. `death == f64::INFINITY` marks an essential class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
}

impl Bar {
    pub fn new(birth: f64, death: f64) -> Self {
        Self { birth, death }
    }

    pub fn essential(birth: f64) -> Self {
        Self {
            birth,
            death: f64::INFINITY,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

/// Barcode of one homology dimension. Bars are kept in canonical order
/// (by birth, then death), so equal multisets compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    dim: usize,
    bars: Vec<Bar>,
}

impl PersistenceDiagram {
    pub fn new(dim: usize, mut bars: Vec<Bar>) -> Self {
        bars.sort_by(Bar::total_cmp);
        Self { dim, bars }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, bars: vec![] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn finite(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| !b.is_essential())
    }

    pub fn essential(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| b.is_essential())
    }

    pub fn essential_count(&self) -> usize {
        self.essential().count()
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    dim: usize,
    pairs: Vec<(f64, Option<f64>)>,
}

impl Serialize for PersistenceDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DiagramRepr {
            dim: self.dim,
            pairs: self
                .bars
                .iter()
                .map(|b| (b.birth, (!b.is_essential()).then_some(b.death)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PersistenceDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DiagramRepr::deserialize(d)?;
        let mut bars = Vec::with_capacity(repr.pairs.len());
        for (birth, death) in repr.pairs {
            let death = death.unwrap_or(f64::INFINITY);
            if !birth.is_finite() || birth < 0.0 || death.is_nan() || death < birth {
                return Err(D::Error::custom(format!("invalid bar ({birth}, {death})")));
            }
            bars.push(Bar::new(birth, death));
        }
        Ok(PersistenceDiagram::new(repr.dim, bars))
    }
}
