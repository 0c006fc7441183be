//! Deterministic graph generation: every shape is bidirected and connected,
//! with each direction's weight drawn independently from the given range.

use graph_core::{format, NodeId, ValidateOptions, WeightedDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub enum GenError {
    BadSpec(String),
}

pub fn generate(
    shape: &str,
    n: usize,
    lo: u64,
    hi: u64,
    seed: u64,
) -> Result<WeightedDigraph, GenError> {
    if n < 2 {
        return Err(GenError::BadSpec(format!("n = {n} too small")));
    }
    if lo == 0 || lo > hi {
        return Err(GenError::BadSpec(format!("bad weight range {lo}..{hi}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut links: Vec<(NodeId, NodeId)> = Vec::new();
    match shape {
        "path" => {
            for u in 0..n - 1 {
                links.push((u, u + 1));
            }
        }
        "cycle" => {
            for u in 0..n {
                links.push((u, (u + 1) % n));
            }
        }
        "star" => {
            for u in 1..n {
                links.push((0, u));
            }
        }
        "grid" => {
            let side = (n as f64).sqrt() as usize;
            if side * side != n {
                return Err(GenError::BadSpec(format!("grid needs a square n, got {n}")));
            }
            for row in 0..side {
                for col in 0..side {
                    let u = row * side + col;
                    if col + 1 < side {
                        links.push((u, u + 1));
                    }
                    if row + 1 < side {
                        links.push((u, u + side));
                    }
                }
            }
        }
        "random" => {
            // Random spanning tree plus extra random links up to ~3n arcsets.
            let mut have = std::collections::HashSet::new();
            for v in 1..n {
                let u = rng.gen_range(0..v);
                links.push((u, v));
                have.insert((u.min(v), u.max(v)));
            }
            let extra = 2 * n;
            for _ in 0..extra {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && have.insert((u.min(v), u.max(v))) {
                    links.push((u, v));
                }
            }
        }
        other => return Err(GenError::BadSpec(format!("unknown shape {other:?}"))),
    }
    let mut raw = Vec::with_capacity(2 * links.len());
    for (u, v) in links {
        raw.push((u, v, rng.gen_range(lo..=hi)));
        raw.push((v, u, rng.gen_range(lo..=hi)));
    }
    let opts = weight_opts(n, hi);
    WeightedDigraph::validate(n, raw, opts).map_err(|e| GenError::BadSpec(e.to_string()))
}

/// Smallest exponent c with n^c >= hi, at least 2.
pub fn weight_opts(n: usize, hi: u64) -> ValidateOptions {
    let mut c = 2u32;
    while (n as u64).saturating_pow(c) < hi {
        c += 1;
    }
    ValidateOptions { weight_exponent: c }
}

pub fn to_text(g: &WeightedDigraph) -> String {
    format::serialize(g)
}
