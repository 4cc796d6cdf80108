//! Equidistance checking, per-cell linearity classification, the
//! aggregation guard, and the misuse demonstration.

mod classify;
mod demo;
mod equidistance;
mod guard;

pub use classify::{classify_linearity, CellClass, CellVerdict, Classification};
pub use demo::{misuse_demo, Comparison, DemoReport};
pub use equidistance::{check_equidistance, EquidistanceVerdict, Witness, DEFAULT_TOLERANCE};
pub use guard::{guarded_aggregate, AggregateResult, Statistic};
