//! Canonical shortest paths: minimum weight, then fewest edges, then
//! lexicographically smallest node sequence. Pinning the tie-break makes
//! hop-count claims about "the" shortest path reproducible in tests.

use graph_core::{NodeId, WeightedDigraph};

use crate::{dijkstra_to, UNREACHABLE};

pub struct CanonicalPaths<'g> {
    g: &'g WeightedDigraph,
    w: Vec<u64>,
    /// dist_to[t][x] = distance x -> t.
    dist_to: Vec<Vec<u64>>,
    /// hops_to[t][x] = edges on the hop-minimal shortest x -> t path.
    hops_to: Vec<Vec<u64>>,
}

impl<'g> CanonicalPaths<'g> {
    pub fn new(g: &'g WeightedDigraph, w: &[u64]) -> Self {
        let n = g.n();
        let mut dist_to = Vec::with_capacity(n);
        let mut hops_to = Vec::with_capacity(n);
        for t in 0..n {
            let dist = dijkstra_to(g, w, t);
            // BFS from t over tight arcs, walked backward, gives the minimal
            // edge count among weight-optimal paths.
            let mut hops = vec![UNREACHABLE; n];
            hops[t] = 0;
            let mut frontier = vec![t];
            let mut next = Vec::new();
            let mut level = 0u64;
            while !frontier.is_empty() {
                level += 1;
                for &y in &frontier {
                    for &e in g.in_arcs(y) {
                        let x = g.arc(e).from;
                        let tight = dist[x] != UNREACHABLE
                            && dist[y] != UNREACHABLE
                            && dist[x] == w[e] + dist[y];
                        if tight && hops[x] == UNREACHABLE {
                            hops[x] = level;
                            next.push(x);
                        }
                    }
                }
                frontier = std::mem::take(&mut next);
            }
            dist_to.push(dist);
            hops_to.push(hops);
        }
        CanonicalPaths { g, w: w.to_vec(), dist_to, hops_to }
    }

    pub fn dist(&self, s: NodeId, t: NodeId) -> u64 {
        self.dist_to[t][s]
    }

    /// Edge count of the canonical path, `UNREACHABLE` if none exists.
    pub fn hops(&self, s: NodeId, t: NodeId) -> u64 {
        self.hops_to[t][s]
    }

    /// The canonical node sequence from `s` to `t`.
    pub fn path(&self, s: NodeId, t: NodeId) -> Option<Vec<NodeId>> {
        if self.hops(s, t) == UNREACHABLE {
            return None;
        }
        let mut seq = vec![s];
        let mut x = s;
        while x != t {
            let hx = self.hops_to[t][x];
            // Smallest-id successor that keeps the path tight and hop-minimal.
            let mut best: Option<NodeId> = None;
            for &e in self.g.out_arcs(x) {
                let y = self.g.arc(e).to;
                let tight = self.dist_to[t][x] == self.w[e] + self.dist_to[t][y];
                if tight && self.hops_to[t][y] == hx - 1 {
                    best = Some(best.map_or(y, |b| b.min(y)));
                }
            }
            x = best.expect("hop table promises a successor");
            seq.push(x);
        }
        Some(seq)
    }

    /// Edge count of the suffix after the last center on the canonical path
    /// (the whole path if no center lies on it).
    pub fn suffix_after_last_center(&self, s: NodeId, t: NodeId, is_center: &[bool]) -> Option<u64> {
        let path = self.path(s, t)?;
        let mut last = 0usize;
        for (i, &x) in path.iter().enumerate() {
            if is_center[x] {
                last = i;
            }
        }
        Some((path.len() - 1 - last) as u64)
    }
}
