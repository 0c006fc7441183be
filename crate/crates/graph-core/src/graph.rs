//! The network graph: bidirected (every arc has a reverse arc), weights are
//! per-direction nonnegative integers. Node ids are `0..n-1`.

use std::collections::BTreeMap;

use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

/// One directed edge with its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub weight: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} out of range (n = {1})")]
    NodeOutOfRange(NodeId, usize),
    #[error("self loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(NodeId, NodeId),
    #[error("arc ({0}, {1}) has no reverse arc ({1}, {0})")]
    MissingReverseArc(NodeId, NodeId),
    #[error("arc ({0}, {1}) weight {2} out of range 1..={3}")]
    WeightOutOfRange(NodeId, NodeId, u64, u64),
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Maximum input weight is `n^weight_exponent`.
    pub weight_exponent: u32,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { weight_exponent: 2 }
    }
}

impl ValidateOptions {
    pub fn max_weight(&self, n: usize) -> u64 {
        (n as u64).saturating_pow(self.weight_exponent)
    }
}

/// Immutable after validation; arcs are stored sorted by `(from, to)` so the
/// representation is canonical.
#[derive(Debug, Clone)]
pub struct WeightedDigraph {
    n: usize,
    arcs: Vec<Arc>,
    out: Vec<Vec<EdgeId>>,
    inc: Vec<Vec<EdgeId>>,
    rev: Vec<EdgeId>,
}

impl WeightedDigraph {
    /// Validate a raw arc list and build adjacency. Checks every invariant:
    /// ids in range, no self loops, no duplicate arcs, every arc paired with
    /// its reverse, weights in `1..=n^c`.
    pub fn validate(
        n: usize,
        mut raw: Vec<(NodeId, NodeId, u64)>,
        opts: ValidateOptions,
    ) -> Result<Self, GraphError> {
        let max_w = opts.max_weight(n);
        for &(u, v, w) in &raw {
            if u >= n {
                return Err(GraphError::NodeOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::NodeOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if w == 0 || w > max_w {
                return Err(GraphError::WeightOutOfRange(u, v, w, max_w));
            }
        }
        raw.sort_by_key(|&(u, v, _)| (u, v));
        for pair in raw.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(GraphError::DuplicateArc(pair[0].0, pair[0].1));
            }
        }
        let index: BTreeMap<(NodeId, NodeId), EdgeId> = raw
            .iter()
            .enumerate()
            .map(|(e, &(u, v, _))| ((u, v), e))
            .collect();
        let mut rev = vec![0; raw.len()];
        for (e, &(u, v, _)) in raw.iter().enumerate() {
            match index.get(&(v, u)) {
                Some(&r) => rev[e] = r,
                None => return Err(GraphError::MissingReverseArc(u, v)),
            }
        }
        let arcs: Vec<Arc> = raw
            .into_iter()
            .map(|(from, to, weight)| Arc { from, to, weight })
            .collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (e, a) in arcs.iter().enumerate() {
            out[a.from].push(e);
            inc[a.to].push(e);
        }
        Ok(WeightedDigraph { n, arcs, out, inc, rev })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of directed arcs (twice the number of undirected links).
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, e: EdgeId) -> Arc {
        self.arcs[e]
    }

    pub fn weight(&self, e: EdgeId) -> u64 {
        self.arcs[e].weight
    }

    /// Arc ids leaving `u`, sorted by head node id.
    pub fn out_arcs(&self, u: NodeId) -> &[EdgeId] {
        &self.out[u]
    }

    /// Arc ids entering `u`.
    pub fn in_arcs(&self, u: NodeId) -> &[EdgeId] {
        &self.inc[u]
    }

    /// The paired arc in the opposite direction.
    pub fn reverse(&self, e: EdgeId) -> EdgeId {
        self.rev[e]
    }

    pub fn find_arc(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.out[u]
            .binary_search_by_key(&v, |&e| self.arcs[e].to)
            .ok()
            .map(|i| self.out[u][i])
    }

    pub fn max_weight(&self) -> u64 {
        self.arcs.iter().map(|a| a.weight).max().unwrap_or(0)
    }

    /// Neighbors of `u` (either direction; identical sets by bidirectedness).
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out[u].iter().map(move |&e| self.arcs[e].to)
    }
}
