//! Network-wide broadcast of K items over the BFS tree: items upcast toward
//! the root, which re-emits them downward as they arrive; every tree edge
//! forwards one item per round, so the whole exchange takes O(K + D) rounds.

use graph_core::{EdgeId, NodeId};

use crate::bfs_tree::BfsTree;
use crate::engine::{EngineError, Io, Phase, RoundEngine};
use crate::message::{BroadcastItem, Payload};

struct Pipeline<'t> {
    tree: &'t BfsTree,
    /// Arc parent -> node, i.e. the arc downward copies arrive on.
    down_arc: Vec<Option<EdgeId>>,
    initial: Vec<(NodeId, BroadcastItem)>,
    collected: Vec<BroadcastItem>,
    received: Vec<Vec<BroadcastItem>>,
}

impl Pipeline<'_> {
    fn at_root(&mut self, item: BroadcastItem, io: &mut Io) {
        self.collected.push(item);
        self.received[0].push(item);
        for &arc in &self.tree.child_arcs[0] {
            io.send(arc, Payload::Item(item));
        }
    }
}

impl Phase for Pipeline<'_> {
    fn init(&mut self, io: &mut Io) {
        for i in 0..self.initial.len() {
            let (holder, item) = self.initial[i];
            match self.tree.parent_arc[holder] {
                Some(arc) => io.send(arc, Payload::Item(item)),
                None => self.at_root(item, io),
            }
        }
    }

    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, io: &mut Io) {
        let Payload::Item(item) = payload else { unreachable!("broadcast carries items") };
        if self.down_arc[node] == Some(arc) {
            // Downward copy: keep it and fan out.
            self.received[node].push(*item);
            for &carc in &self.tree.child_arcs[node] {
                io.send(carc, Payload::Item(*item));
            }
        } else {
            // Upward item from a child.
            match self.tree.parent_arc[node] {
                Some(up) => io.send(up, Payload::Item(*item)),
                None => self.at_root(*item, io),
            }
        }
    }
}

/// Broadcast every `(holder, item)` pair to all nodes. Returns the items in
/// the root's collection order plus what each node received.
pub fn broadcast(
    engine: &mut RoundEngine,
    tree: &BfsTree,
    initial: Vec<(NodeId, BroadcastItem)>,
    phase: &str,
) -> Result<(Vec<BroadcastItem>, Vec<Vec<BroadcastItem>>), EngineError> {
    let g = engine.graph();
    let n = g.n();
    let down_arc: Vec<Option<EdgeId>> =
        (0..n).map(|v| tree.parent_arc[v].map(|up| g.reverse(up))).collect();
    let cap = 8 * (initial.len() as u64 + 2 * tree.dhat + 2) + 16;
    let mut prog =
        Pipeline { tree, down_arc, initial, collected: Vec::new(), received: vec![Vec::new(); n] };
    engine.run(phase, &mut prog, cap)?;
    Ok((prog.collected, prog.received))
}
