//! Exact theta-section algebra, tropical geometry, Kähler-metric
//! certification and disc counting for the genus-2 mirror pair.

pub mod charts;
pub mod cli;
pub mod error;
pub mod fukaya;
pub mod gw;
pub mod kahler;
pub mod lattice;
pub mod numeric;
pub mod report;
pub mod series;
pub mod tropical;

pub use error::{Error, Result};
