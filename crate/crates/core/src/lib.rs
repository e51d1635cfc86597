//! Simulation of a parallel Quick Sort on the OTIS Hyper Hexa-Cell (OHHC)
//! optoelectronic interconnection network.
//!
//! The crate is organised bottom-up:
//!
//! - [`topology`] builds the OHHC graph (electronic links inside each group,
//!   optical transpose links between groups) and answers neighbour, partner
//!   and diameter queries.
//! - [`partition`] generates input arrays and splits them into value-ordered
//!   buckets, one per processor.
//! - [`quicksort`] is the instrumented sequential kernel.
//! - [`simulator`] scatters the buckets over the network, sorts them on every
//!   node and gathers them back to the master node following the static
//!   wait/send plan, in synchronous rounds.
//! - [`analytics`] holds the closed-form cost model and the measured
//!   speedup/efficiency helpers.
//! - [`experiment`] ties everything together into single runs and sweeps that
//!   emit JSON reports and CSV tables.

pub mod analytics;
pub mod error;
pub mod experiment;
pub mod io;
pub mod partition;
pub mod quicksort;
pub mod simulator;
pub mod topology;

pub use analytics::CostModelParams;
pub use error::{OhhcError, Result};
pub use experiment::{Engine, RunConfig, RunReport, SweepMatrix, SweepRow};
pub use partition::{BucketSet, Distribution, DistributionSpec};
pub use quicksort::{quicksort, sequential_baseline, Baseline, SortMetrics};
pub use simulator::{
    count_comm_steps, max_hops, run_parallel_sort, GatherPlan, ParallelRun, PayloadChunk,
    SimOptions, SimReport, TraceRecord,
};
pub use topology::{GroupMode, Link, LinkKind, NodeAddress, OhhcConfig, OhhcTopology};
