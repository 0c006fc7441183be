//! Distributed Bellman-Ford from a single root, forward (distances from a
//! source) or reversed (distances to a sink). A node re-announces only when
//! its estimate strictly decreases, so the relaxation quiesces within n
//! rounds of useful work.

use graph_core::{EdgeId, NodeId, WeightedDigraph};

use crate::engine::{EngineError, Io, Phase, RoundEngine};
use crate::message::Payload;

pub const UNKNOWN: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Estimates are distances root -> node; announcements relax out-arcs.
    FromSource,
    /// Estimates are distances node -> root; announcements relax in reverse.
    ToSink,
}

struct BellmanFord<'a> {
    g: &'a WeightedDigraph,
    weights: &'a [u64],
    direction: Direction,
    dist: Vec<u64>,
}

impl BellmanFord<'_> {
    fn announce(&self, node: NodeId, io: &mut Io) {
        for &e in self.g.out_arcs(node) {
            io.send(e, Payload::Relax { src: 0, value: self.dist[node] });
        }
    }
}

impl Phase for BellmanFord<'_> {
    fn init(&mut self, io: &mut Io) {
        let root = self.dist.iter().position(|&d| d == 0).expect("root seeded");
        self.announce(root, io);
    }

    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, io: &mut Io) {
        let Payload::Relax { value, .. } = payload else { unreachable!("bf carries relax") };
        let w = match self.direction {
            Direction::FromSource => self.weights[arc],
            Direction::ToSink => self.weights[self.g.reverse(arc)],
        };
        let cand = value + w;
        if cand < self.dist[node] {
            self.dist[node] = cand;
            self.announce(node, io);
        }
    }
}

/// Run to quiescence; estimates are then exact on every reachable node.
pub fn bellman_ford(
    engine: &mut RoundEngine,
    root: NodeId,
    weights: &[u64],
    direction: Direction,
    phase: &str,
) -> Result<Vec<u64>, EngineError> {
    let g = engine.graph();
    let mut dist = vec![UNKNOWN; g.n()];
    dist[root] = 0;
    let mut prog = BellmanFord { g, weights, direction, dist };
    // Zero-weight plateaus can pipeline improvements well past n rounds in
    // pathological orders; the cap is generous and quiescence is the norm.
    let cap = 16 * g.n() as u64 * g.n() as u64 + 64;
    engine.run(phase, &mut prog, cap)?;
    Ok(prog.dist)
}
