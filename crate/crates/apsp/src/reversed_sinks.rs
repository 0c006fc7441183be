//! Reversed r-sink shortest paths: every node starts out knowing its own
//! distance to each of r sinks, and the sinks must learn those distances.
//! Distance records ride up sink-rooted shortest-path trees; any node whose
//! subtrees would carry more than g records is elected a bottleneck, handled
//! by dedicated Bellman-Ford runs plus a network-wide broadcast, and pruned
//! from the trees.

use congest_sim::bellman_ford::{bellman_ford, Direction};
use congest_sim::bfs_tree::BfsTree;
use congest_sim::broadcast::broadcast;
use congest_sim::engine::{Io, Phase, RoundEngine};
use congest_sim::message::{BroadcastItem, Payload};
use congest_sim::tables::UNKNOWN;
use graph_core::{EdgeId, NodeId};

use crate::scaling::SourceSet;
use crate::view::WeightView;
use crate::ApspError;

pub struct SinkTreeSet {
    pub sinks: Vec<NodeId>,
    /// parent[sink index][node]; the sink itself has none.
    pub parent: Vec<Vec<Option<NodeId>>>,
    pub parent_arc: Vec<Vec<Option<EdgeId>>>,
    pub children: Vec<Vec<Vec<NodeId>>>,
}

struct SinkExchange<'a> {
    view: &'a WeightView<'a>,
    dist: &'a [Vec<u64>],
    r: usize,
    next: usize,
    /// received[arc][i] = sender's distance to sink i.
    received: Vec<Vec<u64>>,
}

impl Phase for SinkExchange<'_> {
    fn init(&mut self, _io: &mut Io) {}

    fn deliver(&mut self, _node: NodeId, arc: EdgeId, payload: &Payload, _io: &mut Io) {
        let Payload::SinkDist { tree, value } = payload else { unreachable!("exchange") };
        self.received[arc][*tree as usize] = *value;
    }

    fn advance(&mut self, io: &mut Io) {
        if self.next < self.r {
            for node in 0..self.view.n() {
                for &e in self.view.out_arcs(node) {
                    io.send(
                        e,
                        Payload::SinkDist { tree: self.next as u32, value: self.dist[node][self.next] },
                    );
                }
            }
            self.next += 1;
        }
    }

    fn pending(&self) -> bool {
        self.next < self.r
    }
}

/// Attachment wave: a node joins tree i once a neighbor that is already in
/// the tree proves tightness (dist(node) = w'(node, x) + dist(x)); earliest
/// wave wins, ties by smallest neighbor id. Parents always attached strictly
/// earlier, so the parent relation is a tree even across zero-weight arcs.
struct AttachWave<'a> {
    view: &'a WeightView<'a>,
    sinks: &'a [NodeId],
    dist: &'a [Vec<u64>],
    nbr: &'a [Vec<u64>],
    r: usize,
    attached: Vec<bool>,
    parent: Vec<Vec<Option<NodeId>>>,
    parent_arc: Vec<Vec<Option<EdgeId>>>,
    children: Vec<Vec<Vec<NodeId>>>,
    /// (node, tree, sender, delivery arc) candidates this round.
    pending_attach: Vec<(NodeId, usize, NodeId, EdgeId)>,
}

impl Phase for AttachWave<'_> {
    fn init(&mut self, io: &mut Io) {
        for (i, &s) in self.sinks.iter().enumerate() {
            self.attached[s * self.r + i] = true;
            for &e in self.view.out_arcs(s) {
                io.send(e, Payload::TreeAttach { tree: i as u32 });
            }
        }
    }

    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, _io: &mut Io) {
        match payload {
            Payload::TreeAttach { tree } => {
                let i = *tree as usize;
                if self.attached[node * self.r + i] {
                    return;
                }
                let from = self.view.tail(arc);
                // w' of the logical arc node -> from.
                let wp = self.view.wprime(self.view.g.reverse(arc));
                if self.nbr[arc][i] != UNKNOWN && self.dist[node][i] == wp + self.nbr[arc][i] {
                    self.pending_attach.push((node, i, from, arc));
                }
            }
            Payload::TreeChildClaim { tree } => {
                let from = self.view.tail(arc);
                self.children[*tree as usize][node].push(from);
            }
            _ => unreachable!("attach wave"),
        }
    }

    fn advance(&mut self, io: &mut Io) {
        for &(node, i, from, arc) in &std::mem::take(&mut self.pending_attach) {
            let flat = node * self.r + i;
            if self.attached[flat] {
                // Deliveries arrive in arc order, so the first candidate of
                // the round already has the smallest sender id.
                continue;
            }
            self.attached[flat] = true;
            self.parent[i][node] = Some(from);
            let up = self.view.g.reverse(arc);
            self.parent_arc[i][node] = Some(up);
            io.send(up, Payload::TreeChildClaim { tree: i as u32 });
            for &e in self.view.out_arcs(node) {
                io.send(e, Payload::TreeAttach { tree: i as u32 });
            }
        }
    }

    fn pending(&self) -> bool {
        !self.pending_attach.is_empty()
    }
}

/// Steps 1-2: exchange sink distances with neighbors, then build all r
/// sink-rooted shortest-path trees.
pub fn build_sink_trees(
    engine: &mut RoundEngine,
    view: &WeightView,
    sinks: &[NodeId],
    dist: &[Vec<u64>],
    phase: &str,
) -> Result<SinkTreeSet, ApspError> {
    let n = view.n();
    let r = sinks.len();
    let arcs = view.g.arc_count();
    let mut ex = SinkExchange { view, dist, r, next: 0, received: vec![vec![UNKNOWN; r]; arcs] };
    engine.run(phase, &mut ex, 8 * (r as u64 + 2) + 16)?;

    let mut wave = AttachWave {
        view,
        sinks,
        dist,
        nbr: &ex.received,
        r,
        attached: vec![false; n * r],
        parent: vec![vec![None; n]; r],
        parent_arc: vec![vec![None; n]; r],
        children: vec![vec![Vec::new(); n]; r],
        pending_attach: Vec::new(),
    };
    engine.run(phase, &mut wave, 16 * (n as u64 + 2) * (r as u64 + 2) + 64)?;

    for i in 0..r {
        for node in 0..n {
            if node != sinks[i] && wave.parent[i][node].is_none() {
                return Err(ApspError::NoValidParent { node, sink: sinks[i] });
            }
        }
    }
    let mut children = wave.children;
    for tree in children.iter_mut() {
        for list in tree.iter_mut() {
            list.sort_unstable();
        }
    }
    Ok(SinkTreeSet {
        sinks: sinks.to_vec(),
        parent: wave.parent,
        parent_arc: wave.parent_arc,
        children,
    })
}

struct Convergecast<'a> {
    trees: &'a SinkTreeSet,
    r: usize,
    is_bottleneck: &'a [bool],
    is_source: &'a [bool],
    received: Vec<u64>,
    acc: Vec<u64>,
    fired: Vec<bool>,
    counts: Vec<u64>,
}

impl Convergecast<'_> {
    fn try_fire(&mut self, node: NodeId, i: usize, io: &mut Io) {
        let flat = node * self.r + i;
        if self.fired[flat] || self.received[flat] < self.trees.children[i][node].len() as u64 {
            return;
        }
        self.fired[flat] = true;
        let value = if self.is_bottleneck[node] {
            0
        } else {
            self.is_source[node] as u64 + self.acc[flat]
        };
        self.counts[flat] = value;
        if let Some(arc) = self.trees.parent_arc[i][node] {
            io.send(arc, Payload::SubtreeCount { tree: i as u32, value });
        }
    }
}

impl Phase for Convergecast<'_> {
    fn init(&mut self, io: &mut Io) {
        let n = self.counts.len() / self.r;
        for node in 0..n {
            for i in 0..self.r {
                self.try_fire(node, i, io);
            }
        }
    }

    fn deliver(&mut self, node: NodeId, _arc: EdgeId, payload: &Payload, io: &mut Io) {
        let Payload::SubtreeCount { tree, value } = payload else { unreachable!("counting") };
        let i = *tree as usize;
        let flat = node * self.r + i;
        self.received[flat] += 1;
        self.acc[flat] += value;
        self.try_fire(node, i, io);
    }
}

/// Step 4: per-tree convergecast of descendant record counts. A bottleneck
/// reports 0 (pruning its subtree); every other node reports its own record
/// (if it is a tracked source) plus its children's totals.
pub fn count_descendants(
    engine: &mut RoundEngine,
    view: &WeightView,
    trees: &SinkTreeSet,
    is_bottleneck: &[bool],
    is_source: &[bool],
    phase: &str,
) -> Result<Vec<Vec<u64>>, ApspError> {
    let n = view.n();
    let r = trees.sinks.len();
    let mut prog = Convergecast {
        trees,
        r,
        is_bottleneck,
        is_source,
        received: vec![0; n * r],
        acc: vec![0; n * r],
        fired: vec![false; n * r],
        counts: vec![0; n * r],
    };
    engine.run(phase, &mut prog, 16 * (n as u64 + 2) * (r as u64 + 2) + 64)?;
    debug_assert!(prog.fired.iter().all(|&f| f));
    Ok((0..n).map(|node| prog.counts[node * r..(node + 1) * r].to_vec()).collect())
}

struct ElectUpcast<'a> {
    tree: &'a BfsTree,
    candidate: Vec<u64>,
    received: Vec<u64>,
    fired: Vec<bool>,
}

impl ElectUpcast<'_> {
    fn try_fire(&mut self, node: NodeId, io: &mut Io) {
        if self.fired[node] || self.received[node] < self.tree.child_arcs[node].len() as u64 {
            return;
        }
        self.fired[node] = true;
        if let Some(arc) = self.tree.parent_arc[node] {
            io.send(arc, Payload::CandidateMin { node: self.candidate[node] });
        }
    }
}

impl Phase for ElectUpcast<'_> {
    fn init(&mut self, io: &mut Io) {
        for node in 0..self.candidate.len() {
            self.try_fire(node, io);
        }
    }

    fn deliver(&mut self, node: NodeId, _arc: EdgeId, payload: &Payload, io: &mut Io) {
        let Payload::CandidateMin { node: cand } = payload else { unreachable!("elect") };
        self.candidate[node] = self.candidate[node].min(*cand);
        self.received[node] += 1;
        self.try_fire(node, io);
    }
}

/// Step 5(i)-(ii): nodes over the threshold announce candidacy; node 0 picks
/// the smallest id and broadcasts the decision. Realized as a min-convergecast
/// up the BFS tree plus a one-item broadcast.
pub fn elect_bottleneck(
    engine: &mut RoundEngine,
    totals: &[u64],
    g_threshold: u64,
    eligible: &[bool],
    tree: &BfsTree,
    phase: &str,
) -> Result<Option<NodeId>, ApspError> {
    let n = totals.len();
    let none = n as u64;
    let candidate: Vec<u64> = (0..n)
        .map(|v| if eligible[v] && totals[v] > g_threshold { v as u64 } else { none })
        .collect();
    let mut up = ElectUpcast {
        tree,
        candidate,
        received: vec![0; n],
        fired: vec![false; n],
    };
    engine.run(phase, &mut up, 8 * n as u64 + 64)?;
    let decision = up.candidate[0];
    broadcast(engine, tree, vec![(0, BroadcastItem::Decision { node: decision })], phase)?;
    Ok(if decision == none { None } else { Some(decision as usize) })
}

pub struct Integration {
    /// dist(node -> b) at every node.
    pub to_b: Vec<u64>,
    /// dist(b -> node) at every node.
    pub from_b: Vec<u64>,
    /// Broadcast records: dist(source -> b) per tracked source index.
    pub source_to_b: Vec<u64>,
}

/// Step 5(iii)-(iv): Bellman-Ford to and from the new bottleneck, then every
/// tracked source broadcasts its distance to it.
pub fn integrate_bottleneck(
    engine: &mut RoundEngine,
    view: &WeightView,
    b: NodeId,
    sources: &SourceSet,
    tree: &BfsTree,
    phase: &str,
) -> Result<Integration, ApspError> {
    let weights = view.wprime_vec();
    let to_b = bellman_ford(engine, b, &weights, Direction::ToSink, phase)?;
    let from_b = bellman_ford(engine, b, &weights, Direction::FromSource, phase)?;
    let items: Vec<(NodeId, BroadcastItem)> = sources
        .ids()
        .iter()
        .enumerate()
        .map(|(k, &s)| (s, BroadcastItem::BottleneckDist { src: k as u32, value: to_b[s] }))
        .collect();
    let (collected, _) = broadcast(engine, tree, items, phase)?;
    let mut source_to_b = vec![UNKNOWN; sources.len()];
    for item in collected {
        if let BroadcastItem::BottleneckDist { src, value } = item {
            source_to_b[src as usize] = value;
        }
    }
    Ok(Integration { to_b, from_b, source_to_b })
}

pub struct RelayOutcome {
    /// records[sink index][source index], UNKNOWN where nothing arrived.
    pub records: Vec<Vec<u64>>,
    /// Most records forwarded by any node that is neither a bottleneck nor a
    /// sink (the load the threshold g is meant to cap).
    pub max_load_capped: u64,
    /// Most records forwarded by any non-bottleneck node including sinks.
    pub max_load_any: u64,
}

struct Relay<'a> {
    trees: &'a SinkTreeSet,
    sink_index: Vec<Option<usize>>,
    is_bottleneck: &'a [bool],
    sources: &'a SourceSet,
    dist: &'a [Vec<u64>],
    records: Vec<Vec<u64>>,
    forwarded: Vec<u64>,
}

impl Phase for Relay<'_> {
    fn init(&mut self, io: &mut Io) {
        for (k, &s) in self.sources.ids().iter().enumerate() {
            if self.is_bottleneck[s] {
                continue;
            }
            for (i, &sink) in self.trees.sinks.iter().enumerate() {
                if s == sink {
                    self.records[i][k] = 0;
                    continue;
                }
                if self.dist[s][i] == UNKNOWN {
                    continue;
                }
                let arc = self.trees.parent_arc[i][s].expect("non-sink has a parent");
                io.send(
                    arc,
                    Payload::RelayRecord { tree: i as u32, src: k as u32, value: self.dist[s][i] },
                );
            }
        }
    }

    fn deliver(&mut self, node: NodeId, _arc: EdgeId, payload: &Payload, io: &mut Io) {
        let Payload::RelayRecord { tree, src, value } = payload else { unreachable!("relay") };
        let i = *tree as usize;
        if self.trees.sinks[i] == node {
            let k = *src as usize;
            self.records[i][k] = self.records[i][k].min(*value);
            return;
        }
        if self.is_bottleneck[node] {
            return;
        }
        let arc = self.trees.parent_arc[i][node].expect("non-sink has a parent");
        self.forwarded[node] += 1;
        io.send(arc, Payload::RelayRecord { tree: *tree, src: *src, value: *value });
    }
}

/// Step 6: tracked sources outside B send their distance records up each
/// sink tree; bottlenecks drop, everyone else forwards.
pub fn relay(
    engine: &mut RoundEngine,
    view: &WeightView,
    trees: &SinkTreeSet,
    is_bottleneck: &[bool],
    sources: &SourceSet,
    dist: &[Vec<u64>],
    phase: &str,
) -> Result<RelayOutcome, ApspError> {
    let n = view.n();
    let r = trees.sinks.len();
    let mut sink_index = vec![None; n];
    for (i, &s) in trees.sinks.iter().enumerate() {
        sink_index[s] = Some(i);
    }
    let mut prog = Relay {
        trees,
        sink_index,
        is_bottleneck,
        sources,
        dist,
        records: vec![vec![UNKNOWN; sources.len()]; r],
        forwarded: vec![0; n],
    };
    let cap = 16 * (n as u64 + 2) * (sources.len() as u64 + 2) * (r as u64).max(1) + 64;
    engine.run(phase, &mut prog, cap)?;
    let mut max_load_capped = 0;
    let mut max_load_any = 0;
    for node in 0..n {
        if is_bottleneck[node] {
            continue;
        }
        max_load_any = max_load_any.max(prog.forwarded[node]);
        if prog.sink_index[node].is_none() {
            max_load_capped = max_load_capped.max(prog.forwarded[node]);
        }
    }
    Ok(RelayOutcome { records: prog.records, max_load_capped, max_load_any })
}

pub struct RsinkOutcome {
    /// values[sink index][source index] = dist(source -> sink), exact.
    pub values: Vec<Vec<u64>>,
    pub bottlenecks: Vec<NodeId>,
    pub max_relay_load: u64,
    pub g_threshold: u64,
}

/// The full loop: trees, then repeat {count, elect, integrate} until no node
/// exceeds the threshold, then relay and assemble at each sink (direct record
/// or best composition through a bottleneck).
#[allow(clippy::too_many_arguments)]
pub fn reversed_rsink(
    engine: &mut RoundEngine,
    view: &WeightView,
    sinks: &[NodeId],
    source_ids: &[NodeId],
    g_threshold: u64,
    dist: &[Vec<u64>],
    tree: &BfsTree,
    labels: &RsinkLabels,
) -> Result<RsinkOutcome, ApspError> {
    let n = view.n();
    let r = sinks.len();
    let sources = SourceSet::new(n, source_ids.to_vec());
    let q = sources.len();
    if r == 0 || q == 0 {
        return Ok(RsinkOutcome {
            values: vec![vec![]; r],
            bottlenecks: vec![],
            max_relay_load: 0,
            g_threshold,
        });
    }
    let trees = build_sink_trees(engine, view, sinks, dist, labels.trees)?;

    let is_source: Vec<bool> = (0..n).map(|v| sources.contains(v)).collect();
    let mut is_sink = vec![false; n];
    for &s in sinks {
        is_sink[s] = true;
    }
    let mut is_bottleneck = vec![false; n];
    let mut bottlenecks = Vec::new();
    let mut integrations: Vec<(NodeId, Integration)> = Vec::new();
    loop {
        let counts =
            count_descendants(engine, view, &trees, &is_bottleneck, &is_source, labels.count)?;
        let totals: Vec<u64> = counts.iter().map(|row| row.iter().sum()).collect();
        let eligible: Vec<bool> =
            (0..n).map(|v| !is_sink[v] && !is_bottleneck[v]).collect();
        let Some(b) =
            elect_bottleneck(engine, &totals, g_threshold, &eligible, tree, labels.elect)?
        else {
            break;
        };
        is_bottleneck[b] = true;
        bottlenecks.push(b);
        let integration = integrate_bottleneck(engine, view, b, &sources, tree, labels.integrate)?;
        integrations.push((b, integration));
    }
    // Charging argument: each elected bottleneck pruned more than g of the
    // q*r total records.
    debug_assert!(
        bottlenecks.len() as u64 <= (q as u64 * r as u64).div_ceil(g_threshold.max(1)),
        "bottleneck count exceeds the pruning bound"
    );

    let relay_out = relay(engine, view, &trees, &is_bottleneck, &sources, dist, labels.relay)?;

    let mut values = vec![vec![UNKNOWN; q]; r];
    for i in 0..r {
        for k in 0..q {
            let mut best = relay_out.records[i][k];
            if sources.id(k) == sinks[i] {
                best = 0;
            }
            for (_, integ) in &integrations {
                let via = integ.source_to_b[k].saturating_add(integ.from_b[sinks[i]]);
                best = best.min(via);
            }
            values[i][k] = best;
            if best == UNKNOWN {
                return Err(ApspError::NoValidParent { node: sources.id(k), sink: sinks[i] });
            }
        }
    }
    Ok(RsinkOutcome {
        values,
        bottlenecks,
        max_relay_load: relay_out.max_load_capped,
        g_threshold,
    })
}

/// Phase labels so the driver's stats distinguish the five stages.
pub struct RsinkLabels {
    pub trees: &'static str,
    pub count: &'static str,
    pub elect: &'static str,
    pub integrate: &'static str,
    pub relay: &'static str,
}

pub const RSINK_LABELS: RsinkLabels = RsinkLabels {
    trees: "rsink-trees",
    count: "rsink-count",
    elect: "rsink-elect",
    integrate: "rsink-integrate",
    relay: "rsink-relay",
};
