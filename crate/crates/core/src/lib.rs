//! Change-point tests for time series of point clouds, built on
//! Vietoris-Rips persistent homology and bottleneck distances.

pub mod ballvolume;
pub mod change;
pub mod error;
pub mod geometry;
pub mod ingest;
pub mod metrics;
pub mod null_limits;
pub mod persistence;
pub mod pipeline;
pub mod procgen;
pub mod report;

pub use error::{Error, Result};
