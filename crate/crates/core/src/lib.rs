//! Design and Monte Carlo evaluation of lite-sparse hierarchical partial power
//! processing (LS-HiPPP) for series strings of heterogeneous second-use
//! batteries, compared against full power processing (FPP) and the
//! conventional adjacent-converter ladder (C-PPP).
//!
//! The pipeline:
//!
//! 1. [`supply::flatten`] turns a Gaussian battery supply into an ordered
//!    expected set of per-slot capabilities.
//! 2. [`design::design_layer1`] places the sparse Layer-1 converters by
//!    exhaustive search on that set, and [`design::design_layer2`] traces the
//!    Monte Carlo utilization curve of the dense Layer-2 ladder.
//! 3. [`powerflow::optimal_flow`] solves the operating-point LP for any
//!    architecture and concrete battery string with the in-crate simplex in
//!    [`lp`].
//! 4. [`evaluate`] runs the seeded comparison sweeps and [`cli`] writes them
//!    out as CSV.
//!
//! See `examples/` for one runnable program per capability.

pub mod architecture;
pub mod cli;
pub mod design;
pub mod error;
pub mod evaluate;
pub mod lp;
pub mod powerflow;
pub mod supply;

pub use architecture::{Architecture, ArchitectureKind, ConverterEdge, Layer1Design, Layer2Design, Topology};
pub use design::{DesignConfig, Layer2Curve};
pub use error::{Error, Result};
pub use evaluate::{EvalSettings, MetricsRecord};
pub use powerflow::PowerFlowSolution;
pub use supply::{BatterySample, BatterySupply, ExpectedSet};
