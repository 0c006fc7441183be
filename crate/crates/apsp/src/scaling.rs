//! Per-iteration reduced weights: neighbors exchange their distance tables
//! for the coarser weight function, and every node derives, for each tracked
//! source, a nonnegative reweighting of its incident arcs under which all
//! source distances are at most n-1.

use congest_sim::engine::{Io, Phase, RoundEngine};
use congest_sim::message::Payload;
use congest_sim::tables::{DistanceTables, UNKNOWN};
use graph_core::{EdgeId, NodeId, WeightedDigraph};

use crate::view::{Orientation, WeightView};
use crate::ApspError;

/// A tracked source set with O(1) id -> index lookup. Ids are kept sorted so
/// indexes are globally agreed once the set is announced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSet {
    ids: Vec<NodeId>,
    index: Vec<u32>,
}

const NO_INDEX: u32 = u32::MAX;

impl SourceSet {
    pub fn new(n: usize, mut ids: Vec<NodeId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        let mut index = vec![NO_INDEX; n];
        for (k, &s) in ids.iter().enumerate() {
            index[s] = k as u32;
        }
        SourceSet { ids, index }
    }

    pub fn all(n: usize) -> Self {
        SourceSet::new(n, (0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, k: usize) -> NodeId {
        self.ids[k]
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        match self.index[node] {
            NO_INDEX => None,
            k => Some(k as usize),
        }
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.index[node] != NO_INDEX
    }
}

/// Reduced weights `r[arc][source index]`, in the exchange's source order.
/// Values live at both endpoints of every arc (each endpoint can derive them
/// from its own row plus the received neighbor row).
pub struct ReducedWeights {
    pub sources: SourceSet,
    r: Vec<Vec<u64>>,
}

impl ReducedWeights {
    pub fn get(&self, arc: EdgeId, src_idx: usize) -> u64 {
        self.r[arc][src_idx]
    }
}

/// `dist_{w'} = 2 dist_w + dist_{r_s}` once both are exact.
pub fn lift_distance(dist_w: u64, dist_rs: u64) -> u64 {
    2 * dist_w + dist_rs
}

/// One scaling iteration's state: the `(w, w')` level pair plus both
/// orientations' distance tables for `w` (a node's knowledge of distances
/// from tracked sources to itself, and from itself to tracked sources).
pub struct ScalingContext<'g> {
    pub g: &'g WeightedDigraph,
    pub pair: graph_core::LevelPair,
    pub forward: DistanceTables,
    pub reversed: DistanceTables,
}

impl<'g> ScalingContext<'g> {
    pub fn view(&self, orient: Orientation) -> WeightView<'g> {
        WeightView::new(self.g, self.pair, orient)
    }

    pub fn tables(&self, orient: Orientation) -> &DistanceTables {
        match orient {
            Orientation::Forward => &self.forward,
            Orientation::Reversed => &self.reversed,
        }
    }
}

struct RowExchange<'a> {
    g: &'a WeightedDigraph,
    tables: &'a DistanceTables,
    q: usize,
    next: usize,
    /// received[arc][k] = sender's table entry for source k, where the sender
    /// is the arc's tail.
    received: Vec<Vec<u64>>,
}

impl Phase for RowExchange<'_> {
    fn init(&mut self, _io: &mut Io) {}

    fn deliver(&mut self, _node: NodeId, arc: EdgeId, payload: &Payload, _io: &mut Io) {
        let Payload::Table { src, value } = payload else { unreachable!("exchange carries rows") };
        self.received[arc][*src as usize] = *value;
    }

    fn advance(&mut self, io: &mut Io) {
        if self.next < self.q {
            for node in 0..self.g.n() {
                let value = self.tables.get(node, self.next);
                debug_assert_ne!(value, UNKNOWN, "exchange requires complete tables");
                for &e in self.g.out_arcs(node) {
                    io.send(e, Payload::Table { src: self.next as u32, value });
                }
            }
            self.next += 1;
        }
    }

    fn pending(&self) -> bool {
        self.next < self.q
    }
}

/// Pipelined neighbor exchange of a full table set, one source per round.
/// Returns `received[arc][k]`: the arc tail's entry for source k, as held by
/// the arc head afterwards.
pub(crate) fn exchange_rows(
    engine: &mut RoundEngine,
    g: &WeightedDigraph,
    tables: &DistanceTables,
    phase: &str,
) -> Result<Vec<Vec<u64>>, ApspError> {
    let q = tables.source_count();
    let mut prog = RowExchange {
        g,
        tables,
        q,
        next: 0,
        received: vec![vec![UNKNOWN; q]; g.arc_count()],
    };
    engine.run(phase, &mut prog, 8 * (q as u64 + 2) + 16)?;
    Ok(prog.received)
}

/// Pipelined neighbor exchange of the `w` tables (one source per round),
/// then local derivation of the reduced weights on every incident arc.
/// With `analytic_zero` (first iteration, `w` identically zero) no messages
/// are sent and `r = w'` directly.
pub fn exchange_and_reduce(
    engine: &mut RoundEngine,
    view: &WeightView,
    tables: &DistanceTables,
    analytic_zero: bool,
    phase: &str,
) -> Result<ReducedWeights, ApspError> {
    let g = view.g;
    let sources = SourceSet::new(g.n(), tables.sources.clone());
    let q = sources.len();
    let arcs = g.arc_count();

    if analytic_zero {
        let r = (0..arcs).map(|e| vec![view.wprime(e); q]).collect();
        return Ok(ReducedWeights { sources, r });
    }

    let received = exchange_rows(engine, g, tables, phase)?;

    // Logical arc u -> v carries r_s = 2 d_w(s,u) + w'(u,v) - 2 d_w(s,v);
    // under the reversed view the tables are the reversed-orientation ones,
    // so the formula is the same. Computed at the head from the received
    // tail row; nonnegativity is the triangle inequality on the tables.
    let mut r = vec![vec![0u64; q]; arcs];
    for e in 0..arcs {
        let u = view.tail(e);
        let v = view.head(e);
        let wp = view.wprime(e);
        for k in 0..q {
            let at_tail = received[e][k];
            debug_assert_eq!(at_tail, tables.get(u, k));
            let val = 2 * at_tail as i128 + wp as i128 - 2 * tables.get(v, k) as i128;
            if val < 0 {
                return Err(ApspError::NegativeReducedWeight { src: sources.id(k), from: u, to: v });
            }
            r[e][k] = val as u64;
        }
    }
    Ok(ReducedWeights { sources, r })
}
