//! Sequential ground truth for the simulator's tests: exact distances under
//! arbitrary nonnegative arc weights, canonical hop-minimal shortest paths,
//! per-source reduced weights, and brute-force path enumeration on tiny
//! graphs. Deliberately shares nothing with the distributed code but the
//! graph type.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use graph_core::{NodeId, WeightedDigraph};
use thiserror::Error;

pub mod canonical;

pub use canonical::CanonicalPaths;

pub const UNREACHABLE: u64 = u64::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph too large for enumeration: n = {0} > {1}")]
    TooLarge(usize, usize),
}

/// Arc weights as a plain vector indexed by arc id.
pub fn base_weights(g: &WeightedDigraph) -> Vec<u64> {
    g.arcs().iter().map(|a| a.weight).collect()
}

/// Weights truncated to the `level` most significant bits, `beta` as in the
/// scaling decomposition.
pub fn level_weights(g: &WeightedDigraph, beta: u32, level: u32) -> Vec<u64> {
    g.arcs().iter().map(|a| a.weight >> (beta - level)).collect()
}

/// Number of bits of the largest weight.
pub fn beta(g: &WeightedDigraph) -> u32 {
    let max = g.max_weight();
    if max == 0 { 0 } else { 64 - max.leading_zeros() }
}

/// Exact distances from `source` to every node.
pub fn dijkstra_from(g: &WeightedDigraph, w: &[u64], source: NodeId) -> Vec<u64> {
    dijkstra(g, w, source, false)
}

/// Exact distances from every node to `sink`.
pub fn dijkstra_to(g: &WeightedDigraph, w: &[u64], sink: NodeId) -> Vec<u64> {
    dijkstra(g, w, sink, true)
}

fn dijkstra(g: &WeightedDigraph, w: &[u64], root: NodeId, reversed: bool) -> Vec<u64> {
    let mut dist = vec![UNREACHABLE; g.n()];
    dist[root] = 0;
    let mut heap: BinaryHeap<Reverse<(u64, NodeId)>> = BinaryHeap::new();
    heap.push(Reverse((0, root)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        let arcs = if reversed { g.in_arcs(u) } else { g.out_arcs(u) };
        for &e in arcs {
            let v = if reversed { g.arc(e).from } else { g.arc(e).to };
            let nd = d + w[e];
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Full matrix: `rows[s][t]` = distance from `s` to `t`.
pub fn all_pairs(g: &WeightedDigraph, w: &[u64]) -> Vec<Vec<u64>> {
    (0..g.n()).map(|s| dijkstra_from(g, w, s)).collect()
}

/// Second, independent method for the mutual oracle check: repeated
/// sequential Bellman-Ford.
pub fn all_pairs_bellman_ford(g: &WeightedDigraph, w: &[u64]) -> Vec<Vec<u64>> {
    (0..g.n())
        .map(|s| {
            let mut dist = vec![UNREACHABLE; g.n()];
            dist[s] = 0;
            for _ in 0..g.n() {
                let mut changed = false;
                for (e, a) in g.arcs().iter().enumerate() {
                    if dist[a.from] != UNREACHABLE && dist[a.from] + w[e] < dist[a.to] {
                        dist[a.to] = dist[a.from] + w[e];
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            dist
        })
        .collect()
}

/// Per-arc reduced weights for one source: `2 d_w(s,u) + w'(u,v) - 2 d_w(s,v)`.
/// Signed so tests can assert nonnegativity rather than assume it.
pub fn reduced_weights(g: &WeightedDigraph, dist_w_from_s: &[u64], wprime: &[u64]) -> Vec<i64> {
    g.arcs()
        .iter()
        .enumerate()
        .map(|(e, a)| {
            2 * dist_w_from_s[a.from] as i64 + wprime[e] as i64 - 2 * dist_w_from_s[a.to] as i64
        })
        .collect()
}

/// All simple paths between every ordered pair, with their weights. Only for
/// tiny graphs.
pub fn brute_force_paths(
    g: &WeightedDigraph,
    w: &[u64],
    max_n: usize,
) -> Result<Vec<Vec<Vec<(Vec<NodeId>, u64)>>>, OracleError> {
    if g.n() > max_n {
        return Err(OracleError::TooLarge(g.n(), max_n));
    }
    let n = g.n();
    let mut out = vec![vec![Vec::new(); n]; n];
    for s in 0..n {
        let mut visited = vec![false; n];
        let mut path = vec![s];
        visited[s] = true;
        dfs(g, w, s, 0, &mut visited, &mut path, &mut out[s]);
    }
    Ok(out)
}

fn dfs(
    g: &WeightedDigraph,
    w: &[u64],
    u: NodeId,
    weight: u64,
    visited: &mut Vec<bool>,
    path: &mut Vec<NodeId>,
    out: &mut Vec<Vec<(Vec<NodeId>, u64)>>,
) {
    for &e in g.out_arcs(u) {
        let v = g.arc(e).to;
        if visited[v] {
            continue;
        }
        visited[v] = true;
        path.push(v);
        out[v].push((path.clone(), weight + w[e]));
        dfs(g, w, v, weight + w[e], visited, path, out);
        path.pop();
        visited[v] = false;
    }
}

/// Minimum weight over a set of enumerated paths.
pub fn min_weight(paths: &[(Vec<NodeId>, u64)]) -> Option<u64> {
    paths.iter().map(|&(_, w)| w).min()
}

/// Weight of a concrete path under a weight vector.
pub fn path_weight(g: &WeightedDigraph, w: &[u64], path: &[NodeId]) -> u64 {
    path.windows(2)
        .map(|p| w[g.find_arc(p[0], p[1]).expect("path uses graph arcs")])
        .sum()
}
