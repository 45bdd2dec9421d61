//! Performance, energy and design-space model for reconfigurable
//! systolic-array CNN accelerators built from four square PE tiles.
//!
//! - [`workload`]: topology files and GEMM lowering
//! - [`timing`]: per-array cycle model and its cycle-stepped reference
//! - [`arrangement`]: tile arrangements, GEMM partitioning, selector bits
//! - [`energy`]: technology parameters and energy/power/EDP
//! - [`dse`]: Pareto-based choice of dataflow and base size
//! - [`reconfig`]: run-time arrangement selection
//! - [`cli`]: the `arman` command-line front end

pub mod arrangement;
pub mod cli;
pub mod dse;
pub mod energy;
pub mod reconfig;
pub mod timing;
pub mod workload;

pub use arrangement::{Arrangement, NetworkStats};
pub use dse::{DesignSpace, DseResult, HwConfig};
pub use energy::{EnergyReport, TechParams};
pub use reconfig::{Objective, ReconfigDecision};
pub use timing::{ArrayDims, Dataflow, LayerStats};
pub use workload::{GemmShape, LayerSpec, NetworkModel};
