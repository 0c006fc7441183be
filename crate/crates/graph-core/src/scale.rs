//! Bit-level weight decomposition: level `i` keeps the `i` most significant
//! bits of every weight, so consecutive levels differ per arc by a doubling
//! plus one bit.

use thiserror::Error;

use crate::graph::{EdgeId, WeightedDigraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScaleError {
    #[error("arc {arc}: level difference {diff} not a bit (levels {level} -> {})", level + 1)]
    BitRangeViolation { arc: EdgeId, level: usize, diff: i64 },
}

/// `beta` levels over a graph's weights: `w_i(e) = floor(w(e) / 2^(beta-i))`,
/// so `w_0 = 0` and `w_beta = w`.
#[derive(Debug, Clone, Copy)]
pub struct BitDecomposition {
    pub beta: u32,
}

impl BitDecomposition {
    pub fn level_weight(&self, g: &WeightedDigraph, level: u32, e: EdgeId) -> u64 {
        debug_assert!(level <= self.beta);
        g.weight(e) >> (self.beta - level)
    }

    pub fn max_level_weight(&self, g: &WeightedDigraph, level: u32) -> u64 {
        g.arcs()
            .iter()
            .enumerate()
            .map(|(e, _)| self.level_weight(g, level, e))
            .max()
            .unwrap_or(0)
    }

    /// The `(w, w')` pair for one scaling iteration: `w = w_{level-1}`,
    /// `w' = w_level`.
    pub fn pair(&self, level: u32) -> LevelPair {
        debug_assert!(level >= 1 && level <= self.beta);
        LevelPair { beta: self.beta, level }
    }
}

/// One iteration's weight views.
#[derive(Debug, Clone, Copy)]
pub struct LevelPair {
    beta: u32,
    level: u32,
}

impl LevelPair {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn w(&self, g: &WeightedDigraph, e: EdgeId) -> u64 {
        g.weight(e) >> (self.beta - self.level + 1)
    }

    pub fn wprime(&self, g: &WeightedDigraph, e: EdgeId) -> u64 {
        g.weight(e) >> (self.beta - self.level)
    }

    /// The bit added this iteration; always 0 or 1 by the floor definition.
    pub fn bit(&self, g: &WeightedDigraph, e: EdgeId) -> u64 {
        self.wprime(g, e) - 2 * self.w(g, e)
    }
}

/// Decompose and assert the per-level invariants on every arc.
pub fn bit_decompose(g: &WeightedDigraph) -> BitDecomposition {
    let max = g.max_weight();
    // beta = 0 only for an edgeless graph.
    let beta = if max == 0 { 0 } else { 64 - max.leading_zeros() };
    if beta > 0 {
        debug_assert!(1u64 << (beta - 1) <= max && max < 1u64 << beta);
    }
    let dec = BitDecomposition { beta };
    for level in 0..beta {
        for e in 0..g.arc_count() {
            let lo = dec.level_weight(g, level, e);
            let hi = dec.level_weight(g, level + 1, e);
            debug_assert!(hi == 2 * lo || hi == 2 * lo + 1);
        }
    }
    dec
}

/// Recover the per-arc bit between two consecutive levels, checking it is in
/// {0, 1} (anything else means the level tables are corrupted).
pub fn iteration_bit(
    g: &WeightedDigraph,
    w: &[u64],
    wprime: &[u64],
    level: usize,
) -> Result<Vec<u64>, ScaleError> {
    let mut bits = Vec::with_capacity(g.arc_count());
    for e in 0..g.arc_count() {
        let diff = wprime[e] as i64 - 2 * w[e] as i64;
        if diff != 0 && diff != 1 {
            return Err(ScaleError::BitRangeViolation { arc: e, level, diff });
        }
        bits.push(diff as u64);
    }
    Ok(bits)
}
