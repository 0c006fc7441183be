//! Synchronous CONGEST-style network simulation: per-round single-message
//! discipline on every directed edge, bandwidth-checked payloads, and the
//! model-level primitives (Bellman-Ford, BFS-tree construction, broadcast,
//! parallel composition) with round/congestion accounting.

pub mod bellman_ford;
pub mod bfs_tree;
pub mod broadcast;
pub mod engine;
pub mod message;
pub mod stats;
pub mod tables;

pub use bellman_ford::{bellman_ford, Direction};
pub use bfs_tree::{build_bfs_tree, BfsTree};
pub use broadcast::broadcast;
pub use engine::{EngineConfig, EngineError, Io, Phase, RoundEngine};
pub use message::{BroadcastItem, Payload};
pub use stats::{PhaseStats, RoundStats};
pub use tables::{DistanceTables, UNKNOWN};
