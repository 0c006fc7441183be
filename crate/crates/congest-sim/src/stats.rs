//! Round and congestion accounting, emitted as JSON with stable keys.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PhaseStats {
    pub rounds: u64,
    /// Messages enqueued on the busiest directed edge during the phase.
    pub max_edge_congestion: u64,
    pub messages: u64,
}

/// Per-phase counters; `rounds_total` is always the sum over phases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RoundStats {
    pub rounds_total: u64,
    pub messages_total: u64,
    pub phases: BTreeMap<String, PhaseStats>,
}

impl RoundStats {
    pub fn record(&mut self, phase: &str, rounds: u64, max_edge_congestion: u64, messages: u64) {
        let p = self.phases.entry(phase.to_string()).or_default();
        p.rounds += rounds;
        p.max_edge_congestion = p.max_edge_congestion.max(max_edge_congestion);
        p.messages += messages;
        self.rounds_total += rounds;
        self.messages_total += messages;
        debug_assert_eq!(
            self.rounds_total,
            self.phases.values().map(|p| p.rounds).sum::<u64>()
        );
    }

    pub fn phase(&self, name: &str) -> PhaseStats {
        self.phases.get(name).copied().unwrap_or_default()
    }

    /// Sum of rounds over phases whose label starts with `prefix`.
    pub fn rounds_with_prefix(&self, prefix: &str) -> u64 {
        self.phases
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(_, p)| p.rounds)
            .sum()
    }

    pub fn merge(&mut self, other: &RoundStats) {
        for (k, p) in &other.phases {
            self.record(k, p.rounds, p.max_edge_congestion, p.messages);
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "phases": self.phases,
            "totals": { "rounds": self.rounds_total, "messages": self.messages_total },
        })
    }
}
