//! The synchronous round engine. One round delivers at most one queued message
//! per directed edge (FIFO, round-robin across composed programs), then lets
//! every node react. Node programs see only their own state, incident edges,
//! delivered messages, and globally announced values.

use std::collections::VecDeque;

use graph_core::{EdgeId, NodeId, WeightedDigraph};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::message::Payload;
use crate::stats::RoundStats;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("phase {phase}: payload of {bits} bits exceeds budget of {budget} bits")]
    BandwidthViolation { phase: String, bits: u32, budget: u32 },
    #[error("phase {phase}: not quiescent after {rounds} rounds")]
    NonQuiescent { phase: String, rounds: u64 },
    #[error("graph is disconnected: node {0} unreachable from node 0")]
    Disconnected(NodeId),
}

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    /// Budget is `bandwidth_factor * max(ceil(log2 n), 3)` bits per message.
    pub bandwidth_factor: u32,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { bandwidth_factor: 8, seed: 0 }
    }
}

/// A node program driven by the engine. One instance covers all nodes; the
/// engine hands it one node at a time and implementations must only touch
/// that node's slice of their state.
pub trait Phase {
    /// Round-0 sends, before any delivery.
    fn init(&mut self, io: &mut Io);
    /// One message delivered to `node` over `arc` (so the sender is
    /// `arc.from`). Runs once per delivered message.
    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, io: &mut Io);
    /// Once per round after all deliveries; for clock-driven sends.
    fn advance(&mut self, _io: &mut Io) {}
    /// True while the program still intends to send in a future round
    /// (deliveries aside). Quiescence = empty queues and not pending.
    fn pending(&self) -> bool {
        false
    }
}

/// Send interface handed to a program; owns the program's outbound queues for
/// the current phase.
pub struct Io<'a> {
    queues: &'a mut [VecDeque<Payload>],
    congestion: &'a mut [u64],
    messages: &'a mut u64,
    budget: u32,
    violation: &'a mut Option<u32>,
}

impl<'a> Io<'a> {
    /// Enqueue on a directed edge; the bandwidth assertion fires here.
    pub fn send(&mut self, arc: EdgeId, payload: Payload) {
        let bits = payload.bits();
        if bits > self.budget {
            self.violation.get_or_insert(bits);
            return;
        }
        self.queues[arc].push_back(payload);
        self.congestion[arc] += 1;
        *self.messages += 1;
    }
}

pub struct RoundEngine<'g> {
    g: &'g WeightedDigraph,
    pub stats: RoundStats,
    /// Global round counter across all phases.
    pub round: u64,
    budget: u32,
    seed: u64,
}

impl<'g> RoundEngine<'g> {
    pub fn new(g: &'g WeightedDigraph, cfg: EngineConfig) -> Self {
        let n = g.n().max(2);
        let log = (usize::BITS - (n - 1).leading_zeros()).max(3);
        RoundEngine {
            g,
            stats: RoundStats::default(),
            round: 0,
            budget: cfg.bandwidth_factor * log,
            seed: cfg.seed,
        }
    }

    pub fn graph(&self) -> &'g WeightedDigraph {
        self.g
    }

    pub fn budget_bits(&self) -> u32 {
        self.budget
    }

    /// One global seed stretched into per-node streams.
    pub fn node_rng(&self, node: NodeId) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(node as u64 + 1);
        rng
    }

    /// Run a single program to quiescence. Returns rounds executed.
    pub fn run(
        &mut self,
        phase: &str,
        prog: &mut dyn Phase,
        max_rounds: u64,
    ) -> Result<u64, EngineError> {
        self.run_composed(phase, &mut [prog], max_rounds)
    }

    /// Run several programs over shared edges. Each round drains at most one
    /// message per directed edge, round-robin over the programs' queues.
    pub fn run_composed(
        &mut self,
        phase: &str,
        progs: &mut [&mut dyn Phase],
        max_rounds: u64,
    ) -> Result<u64, EngineError> {
        let k = progs.len();
        let arcs = self.g.arc_count();
        let mut queues: Vec<Vec<VecDeque<Payload>>> =
            (0..k).map(|_| vec![VecDeque::new(); arcs]).collect();
        let mut rr = vec![0usize; arcs];
        let mut congestion = vec![0u64; arcs];
        let mut messages = 0u64;
        let mut violation: Option<u32> = None;

        for (p, prog) in progs.iter_mut().enumerate() {
            let mut io = Io {
                queues: &mut queues[p],
                congestion: &mut congestion,
                messages: &mut messages,
                budget: self.budget,
                violation: &mut violation,
            };
            prog.init(&mut io);
        }

        let mut rounds = 0u64;
        let mut deliveries: Vec<(usize, EdgeId, Payload)> = Vec::new();
        loop {
            if let Some(bits) = violation {
                return Err(EngineError::BandwidthViolation {
                    phase: phase.to_string(),
                    bits,
                    budget: self.budget,
                });
            }
            let queued = queues.iter().any(|q| q.iter().any(|d| !d.is_empty()));
            let pending = progs.iter().any(|p| p.pending());
            if !queued && !pending {
                break;
            }
            if rounds >= max_rounds {
                self.finish(phase, rounds, &congestion, messages);
                return Err(EngineError::NonQuiescent { phase: phase.to_string(), rounds });
            }
            rounds += 1;
            self.round += 1;

            // Pop this round's deliveries first so that sends made while
            // processing them cannot be delivered in the same round.
            deliveries.clear();
            for arc in 0..arcs {
                for j in 0..k {
                    let p = (rr[arc] + j) % k;
                    if let Some(payload) = queues[p][arc].pop_front() {
                        rr[arc] = (p + 1) % k;
                        deliveries.push((p, arc, payload));
                        break;
                    }
                }
            }
            for &(p, arc, payload) in deliveries.iter() {
                let dst = self.g.arc(arc).to;
                let mut io = Io {
                    queues: &mut queues[p],
                    congestion: &mut congestion,
                    messages: &mut messages,
                    budget: self.budget,
                    violation: &mut violation,
                };
                progs[p].deliver(dst, arc, &payload, &mut io);
            }
            for (p, prog) in progs.iter_mut().enumerate() {
                let mut io = Io {
                    queues: &mut queues[p],
                    congestion: &mut congestion,
                    messages: &mut messages,
                    budget: self.budget,
                    violation: &mut violation,
                };
                prog.advance(&mut io);
            }
        }
        self.finish(phase, rounds, &congestion, messages);
        Ok(rounds)
    }

    fn finish(&mut self, phase: &str, rounds: u64, congestion: &[u64], messages: u64) {
        let max_c = congestion.iter().copied().max().unwrap_or(0);
        self.stats.record(phase, rounds, max_c, messages);
    }
}
