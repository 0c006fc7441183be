//! Exact weighted all-pairs (and k-source) shortest paths over the CONGEST
//! simulator: the scaling loop with per-iteration reduced weights, rounded
//! short-range sweeps, the reversed r-sink exchange, and a distributed
//! verification pass that gates every run.

pub mod driver;
pub mod reversed_sinks;
pub mod scaling;
pub mod short_range;
pub mod view;

pub use driver::{apsp, kssp, verify_distributed, RunConfig, RunReport, VerifyReport};
pub use scaling::{exchange_and_reduce, lift_distance, ReducedWeights, ScalingContext, SourceSet};
pub use short_range::{round_up_units, short_range, short_range_extension, sigma_for, ShortRangeResult};
pub use view::{Orientation, WeightView};

use graph_core::NodeId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApspError {
    #[error(transparent)]
    Engine(#[from] congest_sim::EngineError),
    #[error("negative reduced weight at arc ({from}, {to}) for source {src}")]
    NegativeReducedWeight { src: NodeId, from: NodeId, to: NodeId },
    #[error("node {node} found no parent toward sink {sink}")]
    NoValidParent { node: NodeId, sink: NodeId },
    #[error("verification failed with {0} witness pair(s)")]
    VerificationFailed(usize, Vec<(NodeId, NodeId)>),
    #[error("level {level} ({orientation:?}): no estimate for pair ({s},{t}); center sample missed")]
    MissedPair { level: u32, orientation: Orientation, s: NodeId, t: NodeId },
    #[error("inspection failed: {0}")]
    Inspection(String),
    #[error("level {level} ({orientation:?}) diverges from reference at ({s},{t}): got {got}, want {want}")]
    IterationMismatch {
        level: u32,
        orientation: Orientation,
        s: NodeId,
        t: NodeId,
        got: u64,
        want: u64,
    },
}
