//! Small fixture graphs shared by tests across the workspace.

use crate::graph::{ValidateOptions, WeightedDigraph};

/// Three nodes, all links present, asymmetric weights:
/// 0->1: 2, 1->0: 1, 1->2: 3, 2->1: 1, 0->2: 6, 2->0: 1.
/// Distance matrix under these weights is (0,2,5 / 1,0,3 / 1,1,0).
pub fn triangle3() -> WeightedDigraph {
    WeightedDigraph::validate(
        3,
        vec![(0, 1, 2), (1, 0, 1), (1, 2, 3), (2, 1, 1), (0, 2, 6), (2, 0, 1)],
        ValidateOptions::default(),
    )
    .unwrap()
}

/// Unit-weight bidirected path 0-1-...-(n-1).
pub fn path(n: usize) -> WeightedDigraph {
    let mut raw = Vec::new();
    for u in 0..n - 1 {
        raw.push((u, u + 1, 1));
        raw.push((u + 1, u, 1));
    }
    WeightedDigraph::validate(n, raw, ValidateOptions::default()).unwrap()
}

/// Unit-weight star with hub 0.
pub fn star(n: usize) -> WeightedDigraph {
    let mut raw = Vec::new();
    for u in 1..n {
        raw.push((0, u, 1));
        raw.push((u, 0, 1));
    }
    WeightedDigraph::validate(n, raw, ValidateOptions::default()).unwrap()
}
