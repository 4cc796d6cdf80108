//! Field normalization of citation counts.
//!
//! Normalization methods are split by the shape of their per-cell mapping
//! from raw citations to scores: linear methods (`y = kx + b`) keep
//! citation units equidistant, so their scores may be summed and averaged;
//! nonlinear methods do not, and the [`linearity::guarded_aggregate`] guard
//! refuses to aggregate them.

pub mod citing_side;
pub mod cli;
pub mod corpus;
mod error;
pub mod fairness;
pub mod linearity;
pub mod normalizers;

pub use error::{Error, Result};
