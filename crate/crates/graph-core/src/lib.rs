//! Bidirected weighted graphs with asymmetric integer weights, the graph file
//! format, and the bit-level weight decomposition used by the scaling loop.

pub mod format;
pub mod graph;
pub mod scale;
pub mod testing;

pub use graph::{Arc, GraphError, NodeId, EdgeId, ValidateOptions, WeightedDigraph};
pub use scale::{bit_decompose, iteration_bit, BitDecomposition, LevelPair, ScaleError};
