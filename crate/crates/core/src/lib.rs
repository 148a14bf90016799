//! Numerical laboratory for critical circle maps: closest returns,
//! dynamical partitions, cross-ratio distortion, singularity of the
//! invariant measure and partition discrepancy.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cf;
pub mod crossratio;
pub mod discrepancy;
pub mod error;
pub mod exec;
pub mod map;
pub mod measure;
pub mod partition;
pub mod precision;
mod quad;

pub use cf::{ContinuedFraction, RotationNumber, RotationTarget};
pub use error::{Error, Result};
pub use exec::Execution;
pub use map::{tune_parameter, CircleMap, Family, SmoothMap, TunedMap};
pub use partition::{AtomLabel, DynamicalPartition};
