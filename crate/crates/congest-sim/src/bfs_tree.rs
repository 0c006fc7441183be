//! Node-0-rooted BFS spanning tree over the unweighted graph: the substrate
//! for upcast/downcast broadcasting. A node's depth is the round its first
//! exploration message arrives (rounds are globally known); its parent is the
//! smallest-id sender in that wave. Children announce themselves with claim
//! messages.

use graph_core::{EdgeId, NodeId};

use crate::engine::{EngineError, Io, Phase, RoundEngine};
use crate::message::Payload;

#[derive(Debug, Clone)]
pub struct BfsTree {
    pub parent: Vec<Option<NodeId>>,
    /// Arc from the node to its parent.
    pub parent_arc: Vec<Option<EdgeId>>,
    /// Arcs from a node to each of its children.
    pub child_arcs: Vec<Vec<EdgeId>>,
    pub depth: Vec<u64>,
    /// Measured eccentricity of node 0 in hops.
    pub dhat: u64,
}

struct TreeBuild<'g> {
    g: &'g graph_core::WeightedDigraph,
    reached: Vec<bool>,
    depth: Vec<u64>,
    parent: Vec<Option<NodeId>>,
    parent_arc: Vec<Option<EdgeId>>,
    child_arcs: Vec<Vec<EdgeId>>,
    /// Nodes reached this round; they claim parents and fan out next round.
    fresh: Vec<NodeId>,
    rounds_done: u64,
}

impl Phase for TreeBuild<'_> {
    fn init(&mut self, io: &mut Io) {
        self.reached[0] = true;
        for &e in self.g.out_arcs(0) {
            io.send(e, Payload::BfsExplore);
        }
    }

    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, _io: &mut Io) {
        match payload {
            Payload::BfsExplore => {
                // Deliveries come in arc order, so the first explore a node
                // sees within a wave is from its smallest-id wave neighbor.
                if !self.reached[node] {
                    self.reached[node] = true;
                    self.depth[node] = self.rounds_done + 1;
                    self.parent[node] = Some(self.g.arc(arc).from);
                    self.parent_arc[node] = Some(self.g.reverse(arc));
                    self.fresh.push(node);
                }
            }
            Payload::BfsChildClaim => {
                self.child_arcs[node].push(self.g.reverse(arc));
            }
            _ => unreachable!("unexpected payload in tree build"),
        }
    }

    fn advance(&mut self, io: &mut Io) {
        self.rounds_done += 1;
        for &v in &std::mem::take(&mut self.fresh) {
            io.send(self.parent_arc[v].unwrap(), Payload::BfsChildClaim);
            for &e in self.g.out_arcs(v) {
                io.send(e, Payload::BfsExplore);
            }
        }
    }
}

/// Build the tree and measure node 0's hop eccentricity. Errors with
/// `Disconnected` if some node is never reached.
pub fn build_bfs_tree(engine: &mut RoundEngine, phase: &str) -> Result<BfsTree, EngineError> {
    let g = engine.graph();
    let n = g.n();
    let mut prog = TreeBuild {
        g,
        reached: vec![false; n],
        depth: vec![0; n],
        parent: vec![None; n],
        parent_arc: vec![None; n],
        child_arcs: vec![Vec::new(); n],
        fresh: Vec::new(),
        rounds_done: 0,
    };
    engine.run(phase, &mut prog, 4 * n as u64 + 16)?;
    if let Some(u) = prog.reached.iter().position(|r| !r) {
        return Err(EngineError::Disconnected(u));
    }
    for arcs in prog.child_arcs.iter_mut() {
        arcs.sort_unstable();
    }
    let dhat = prog.depth.iter().copied().max().unwrap_or(0);
    Ok(BfsTree {
        parent: prog.parent,
        parent_arc: prog.parent_arc,
        child_arcs: prog.child_arcs,
        depth: prog.depth,
        dhat,
    })
}
