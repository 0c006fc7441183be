//! Per-node distance knowledge: for each node, an estimate of the distance
//! between it and every tracked source under one labeled weight function.
//! Estimates only ever decrease and, once finite, stay above the true
//! distance (checked against the oracle in tests).

use graph_core::NodeId;

pub const UNKNOWN: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTables {
    pub label: String,
    /// Tracked source ids, in index order; globally announced.
    pub sources: Vec<NodeId>,
    /// values[node][source index].
    values: Vec<Vec<u64>>,
}

impl DistanceTables {
    pub fn unknown(label: &str, n: usize, sources: Vec<NodeId>) -> Self {
        let values = vec![vec![UNKNOWN; sources.len()]; n];
        DistanceTables { label: label.to_string(), sources, values }
    }

    /// All-zero tables (the level-0 weight function is identically zero).
    pub fn zero(label: &str, n: usize, sources: Vec<NodeId>) -> Self {
        let values = vec![vec![0; sources.len()]; n];
        DistanceTables { label: label.to_string(), sources, values }
    }

    pub fn from_rows(label: &str, sources: Vec<NodeId>, values: Vec<Vec<u64>>) -> Self {
        DistanceTables { label: label.to_string(), sources, values }
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn source_index(&self, s: NodeId) -> Option<usize> {
        self.sources.iter().position(|&x| x == s)
    }

    pub fn get(&self, node: NodeId, src_idx: usize) -> u64 {
        self.values[node][src_idx]
    }

    pub fn row(&self, node: NodeId) -> &[u64] {
        &self.values[node]
    }

    pub fn set(&mut self, node: NodeId, src_idx: usize, value: u64) {
        debug_assert!(value <= self.values[node][src_idx], "estimates are monotone");
        self.values[node][src_idx] = value;
    }

    /// Lower the estimate; returns true if it changed.
    pub fn update_min(&mut self, node: NodeId, src_idx: usize, value: u64) -> bool {
        if value < self.values[node][src_idx] {
            self.values[node][src_idx] = value;
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_updates_only() {
        let mut t = DistanceTables::unknown("w", 2, vec![0, 1]);
        assert!(t.update_min(1, 0, 5));
        assert!(!t.update_min(1, 0, 7));
        assert!(t.update_min(1, 0, 3));
        assert_eq!(t.get(1, 0), 3);
        assert_eq!(t.get(0, 1), UNKNOWN);
    }
}
