//! Oriented weight views. Reversing the network only transposes weights
//! across each arc pair (the graph is bidirected), so algorithms are written
//! once against a view and messages always travel physical arcs.

use graph_core::{EdgeId, LevelPair, NodeId, WeightedDigraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reversed,
}

impl Orientation {
    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Orientation::Forward => "forward",
            Orientation::Reversed => "reversed",
        }
    }
}

/// One scaling iteration's `(w, w')` weights under an orientation. Distances
/// under `Reversed` are physical distances with endpoints swapped.
#[derive(Clone, Copy)]
pub struct WeightView<'g> {
    pub g: &'g WeightedDigraph,
    pub pair: LevelPair,
    pub orient: Orientation,
}

impl<'g> WeightView<'g> {
    pub fn new(g: &'g WeightedDigraph, pair: LevelPair, orient: Orientation) -> Self {
        WeightView { g, pair, orient }
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    fn logical(&self, e: EdgeId) -> EdgeId {
        match self.orient {
            Orientation::Forward => e,
            Orientation::Reversed => self.g.reverse(e),
        }
    }

    /// Level i-1 weight of the arc, oriented.
    pub fn w(&self, e: EdgeId) -> u64 {
        self.pair.w(self.g, self.logical(e))
    }

    /// Level i weight of the arc, oriented.
    pub fn wprime(&self, e: EdgeId) -> u64 {
        self.pair.wprime(self.g, self.logical(e))
    }

    pub fn tail(&self, e: EdgeId) -> NodeId {
        self.g.arc(e).from
    }

    pub fn head(&self, e: EdgeId) -> NodeId {
        self.g.arc(e).to
    }

    pub fn out_arcs(&self, u: NodeId) -> &'g [EdgeId] {
        self.g.out_arcs(u)
    }

    pub fn in_arcs(&self, u: NodeId) -> &'g [EdgeId] {
        self.g.in_arcs(u)
    }

    /// All `w'` weights as a plain arc-indexed vector (for the single-root
    /// Bellman-Ford primitive).
    pub fn wprime_vec(&self) -> Vec<u64> {
        (0..self.g.arc_count()).map(|e| self.wprime(e)).collect()
    }
}
