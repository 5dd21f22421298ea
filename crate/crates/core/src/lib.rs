//! Exact finite-size machinery and tangent-method asymptotics for the
//! six-vertex model with domain wall boundaries (6V), its reflecting-boundary
//! variant on a `(2n-1)×n` grid (6V′), the twenty-vertex model with DWBC3 (20V),
//! and domino tilings of the Aztec triangle (DT).

pub mod arctic;
pub mod asymptotics;
pub mod enumerate;
pub mod error;
pub mod partition;
pub mod paths;
pub mod trig_core;

pub use error::{ArcticError, Result};
pub use partition::{Model, ModelParams, NamedPoint};
pub use trig_core::{Dual, Mp, Real};
