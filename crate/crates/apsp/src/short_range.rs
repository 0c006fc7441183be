//! Exact distances over shortest paths of at most h edges: reduced weights
//! are rounded up to positive multiples of 1/sigma so a time-indexed BFS can
//! compute bounded-depth distances with additive error at most h/sigma, and a
//! communication-gated Bellman-Ford then repairs the error. The extension
//! variant seeds nodes that already know exact answers so knowledge extends
//! another h hops past them.

use std::collections::BTreeMap;

use congest_sim::engine::{Io, Phase, RoundEngine};
use congest_sim::message::Payload;
use congest_sim::tables::{DistanceTables, UNKNOWN};
use graph_core::{EdgeId, NodeId};

use crate::scaling::{lift_distance, ReducedWeights, ScalingContext, SourceSet};
use crate::view::{Orientation, WeightView};
use crate::ApspError;

/// Smallest sigma with sigma^2 * n >= q * h, at least 1. For q = n this is
/// ceil(sqrt(h)).
pub fn sigma_for(q: usize, h: u64, n: usize) -> u64 {
    let target = q as u128 * h as u128;
    let n = n as u128;
    let mut s = ((q as f64 * h as f64 / n as f64).sqrt().ceil()) as u64;
    s = s.max(1);
    while (s as u128) * (s as u128) * n < target {
        s += 1;
    }
    while s > 1 && ((s - 1) as u128) * ((s - 1) as u128) * n >= target {
        s -= 1;
    }
    s
}

/// Round a reduced weight up to a positive number of 1/sigma units.
pub fn round_up_units(r: u64, sigma: u64) -> u64 {
    if r == 0 {
        1
    } else {
        r * sigma
    }
}

/// An already-exact value planted at a node before the sweep (the extension's
/// imaginary edges): the node behaves as if it had received `exact_reduced`
/// at its rounded send time, and the repair keeps it pinned.
#[derive(Debug, Clone, Copy)]
pub struct Seed {
    pub node: NodeId,
    pub src_idx: usize,
    pub exact_reduced: u64,
}

pub struct SrCoreOutcome {
    /// BFS outcome in units, [node][src index].
    pub units: Vec<Vec<u64>>,
    /// Repaired reduced-distance integers, [node][src index].
    pub reduced_dist: Vec<Vec<u64>>,
    /// Largest per (node, source) announcement count in the repair.
    pub max_announcements: u64,
    pub sigma: u64,
}

struct BoundedBfs<'a> {
    view: &'a WeightView<'a>,
    /// Rounded units per [arc][local source index].
    runit: &'a [Vec<u64>],
    bound: u64,
    q: usize,
    est: Vec<u64>,
    sent: Vec<bool>,
    buckets: BTreeMap<u64, Vec<usize>>,
    lambda: u64,
    inflight: BTreeMap<u64, u64>,
    unsent_due: u64,
}

impl BoundedBfs<'_> {
    fn settle(&mut self, flat: usize, value: u64) {
        let old = self.est[flat];
        if value >= old {
            return;
        }
        if old > self.bound && value <= self.bound {
            self.unsent_due += 1;
        }
        self.est[flat] = value;
        self.buckets.entry(value).or_default().push(flat);
    }
}

impl Phase for BoundedBfs<'_> {
    fn init(&mut self, _io: &mut Io) {}

    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, _io: &mut Io) {
        let Payload::BfsUnits { src, units } = payload else { unreachable!("bfs payload") };
        let k = *src as usize;
        match self.inflight.get_mut(units) {
            Some(c) if *c > 1 => *c -= 1,
            _ => {
                self.inflight.remove(units);
            }
        }
        self.settle(node * self.q + k, units + self.runit[arc][k]);
    }

    fn advance(&mut self, io: &mut Io) {
        // Emit every settled value due at the current logical time. A value
        // is sent exactly once per (node, source), at the logical round equal
        // to its unit count.
        while let Some((&key, _)) = self.buckets.iter().next() {
            if key > self.lambda {
                break;
            }
            let flats = self.buckets.remove(&key).unwrap();
            for flat in flats {
                if self.sent[flat] || self.est[flat] != key || key > self.bound {
                    continue;
                }
                self.sent[flat] = true;
                self.unsent_due -= 1;
                let node = flat / self.q;
                let k = (flat % self.q) as u32;
                for &e in self.view.out_arcs(node) {
                    io.send(e, Payload::BfsUnits { src: k, units: key });
                    *self.inflight.entry(key).or_insert(0) += 1;
                }
            }
        }
        // The clock moves one step per round, and only once nothing scheduled
        // at or below it remains in flight; congestion therefore stalls it
        // rather than losing sends.
        let inflight_ok = self.inflight.keys().next().map_or(true, |&k| k >= self.lambda);
        if inflight_ok {
            self.lambda += 1;
        }
    }

    fn pending(&self) -> bool {
        self.unsent_due > 0
    }
}

struct GatedRepair<'a> {
    view: &'a WeightView<'a>,
    reduced: &'a ReducedWeights,
    /// local source index -> column of `reduced`.
    red_col: &'a [usize],
    q: usize,
    /// Repaired integers, flattened [node * q + k].
    d: Vec<u64>,
    /// BFS units for the gate, flattened; UNKNOWN keeps the gate shut.
    units: Vec<u64>,
    pinned: Vec<bool>,
    h: u64,
    sigma: u64,
    ann: Vec<u16>,
    max_ann: u64,
}

impl GatedRepair<'_> {
    fn gate_open(&self, flat: usize, value: u64) -> bool {
        self.units[flat] != UNKNOWN && value * self.sigma + self.h >= self.units[flat]
    }

    fn announce(&mut self, flat: usize, io: &mut Io) {
        let node = flat / self.q;
        let k = (flat % self.q) as u32;
        self.ann[flat] += 1;
        self.max_ann = self.max_ann.max(self.ann[flat] as u64);
        for &e in self.view.out_arcs(node) {
            io.send(e, Payload::Relax { src: k, value: self.d[flat] });
        }
    }
}

impl Phase for GatedRepair<'_> {
    fn init(&mut self, io: &mut Io) {
        for flat in 0..self.d.len() {
            if self.d[flat] != UNKNOWN {
                self.announce(flat, io);
            }
        }
    }

    fn deliver(&mut self, node: NodeId, arc: EdgeId, payload: &Payload, io: &mut Io) {
        let Payload::Relax { src, value } = payload else { unreachable!("repair payload") };
        let k = *src as usize;
        let flat = node * self.q + k;
        let cand = value + self.reduced.get(arc, self.red_col[k]);
        if cand < self.d[flat] {
            // Cannot fire for pinned exact values: estimates never go below
            // the true distance.
            debug_assert!(!self.pinned[flat]);
            self.d[flat] = cand;
            if self.gate_open(flat, cand) {
                self.announce(flat, io);
            }
        }
    }
}

/// The rounded sweep plus gated repair, under one orientation. The returned
/// integers upper-bound the reduced distances and are exact wherever the
/// guarantee applies (h-hop paths, or h hops past a seeded node).
pub fn short_range_core(
    engine: &mut RoundEngine,
    view: &WeightView,
    reduced: &ReducedWeights,
    source_ids: &[NodeId],
    h: u64,
    seeds: &[Seed],
    phase: &str,
) -> Result<SrCoreOutcome, ApspError> {
    let n = view.n();
    let sources = SourceSet::new(n, source_ids.to_vec());
    let q = sources.len();
    let sigma = sigma_for(q, h, n);
    let bound = n as u64 * sigma + h;
    let red_col: Vec<usize> = sources
        .ids()
        .iter()
        .map(|&s| reduced.sources.index_of(s).expect("sources covered by exchange"))
        .collect();

    // Both arc endpoints can round locally; precomputed per arc and source.
    let runit: Vec<Vec<u64>> = (0..view.g.arc_count())
        .map(|e| (0..q).map(|k| round_up_units(reduced.get(e, red_col[k]), sigma)).collect())
        .collect();

    let mut bfs = BoundedBfs {
        view,
        runit: &runit,
        bound,
        q,
        est: vec![UNKNOWN; n * q],
        sent: vec![false; n * q],
        buckets: BTreeMap::new(),
        lambda: 0,
        inflight: BTreeMap::new(),
        unsent_due: 0,
    };
    for (k, &s) in sources.ids().iter().enumerate() {
        bfs.settle(s * q + k, 0);
    }
    for seed in seeds {
        bfs.settle(seed.node * q + seed.src_idx, round_up_units(seed.exact_reduced, sigma));
    }
    let bfs_cap = 8 * (bound + q as u64 * (n as u64 + 4)) + 64;
    engine.run(phase, &mut bfs, bfs_cap)?;
    let units = bfs.est;

    let mut d: Vec<u64> = units
        .iter()
        .map(|&u| if u == UNKNOWN { UNKNOWN } else { u / sigma })
        .collect();
    let mut pinned = vec![false; n * q];
    for seed in seeds {
        let flat = seed.node * q + seed.src_idx;
        d[flat] = d[flat].min(seed.exact_reduced);
        pinned[flat] = true;
    }
    for (k, &s) in sources.ids().iter().enumerate() {
        d[s * q + k] = 0;
    }

    let mut repair = GatedRepair {
        view,
        reduced,
        red_col: &red_col,
        q,
        d,
        units,
        pinned,
        h,
        sigma,
        ann: vec![0; n * q],
        max_ann: 0,
    };
    let repair_cap = 8 * (n as u64 * q as u64 * (h / sigma + 2)) + 64;
    engine.run(phase, &mut repair, repair_cap)?;

    // Announcements fit the gate window: distinct integers spanning at most
    // h/sigma, plus the initial value.
    debug_assert!(repair.max_ann * sigma <= h + 2 * sigma);

    Ok(SrCoreOutcome {
        units: unflatten(&repair.units, q),
        reduced_dist: unflatten(&repair.d, q),
        max_announcements: repair.max_ann,
        sigma,
    })
}

fn unflatten(flat: &[u64], q: usize) -> Vec<Vec<u64>> {
    flat.chunks(q).map(|c| c.to_vec()).collect()
}

/// Lift repaired reduced distances to `w'` estimates with the iteration's
/// `w` tables (same orientation).
pub fn lift_outcome(
    outcome: &SrCoreOutcome,
    sources: &[NodeId],
    tables: &DistanceTables,
) -> Vec<Vec<u64>> {
    let tab_col: Vec<usize> = sources
        .iter()
        .map(|&s| tables.sources.iter().position(|&x| x == s).expect("table column"))
        .collect();
    outcome
        .reduced_dist
        .iter()
        .enumerate()
        .map(|(node, row)| {
            row.iter()
                .enumerate()
                .map(|(k, &rd)| {
                    if rd == UNKNOWN {
                        UNKNOWN
                    } else {
                        lift_distance(tables.get(node, tab_col[k]), rd)
                    }
                })
                .collect()
        })
        .collect()
}

/// Estimates of `w'` distances for the given sources.
pub struct ShortRangeResult {
    pub sources: Vec<NodeId>,
    pub flip: bool,
    /// flip = false: values[node][source index] held at each node.
    /// flip = true: values[source index][node] held at each source.
    pub values: Vec<Vec<u64>>,
    pub max_announcements: u64,
    pub sigma: u64,
}

impl ShortRangeResult {
    pub fn estimate(&self, s: NodeId, t: NodeId) -> u64 {
        let k = self.sources.iter().position(|&x| x == s).expect("tracked source");
        if self.flip {
            self.values[k][t]
        } else {
            self.values[t][k]
        }
    }
}

/// The short-range sweep. Without `flip`, every node learns its distance
/// from each source, exact whenever the hop-minimal shortest path has at
/// most h edges. With `flip`, the pipeline runs on the reversed orientation
/// from every node, so each listed source learns its distances *to* all
/// nodes instead.
pub fn short_range(
    engine: &mut RoundEngine,
    ctx: &ScalingContext,
    reduced: &ReducedWeights,
    source_ids: &[NodeId],
    h: u64,
    flip: bool,
    phase: &str,
) -> Result<ShortRangeResult, ApspError> {
    let orient = if flip { Orientation::Reversed } else { Orientation::Forward };
    let view = ctx.view(orient);
    let tables = ctx.tables(orient);
    let bfs_sources: Vec<NodeId> =
        if flip { (0..ctx.g.n()).collect() } else { source_ids.to_vec() };
    let outcome = short_range_core(engine, &view, reduced, &bfs_sources, h, &[], phase)?;
    let lifted = lift_outcome(&outcome, &bfs_sources, tables);
    let values = if flip {
        source_ids
            .iter()
            .map(|&s| (0..ctx.g.n()).map(|t| lifted[s][t]).collect())
            .collect()
    } else {
        lifted
    };
    Ok(ShortRangeResult {
        sources: source_ids.to_vec(),
        flip,
        values,
        max_announcements: outcome.max_announcements,
        sigma: outcome.sigma,
    })
}

/// The short-range extension: nodes in `centers` already know their exact
/// `w'` distance from every source (`center_rows[j][k]`, sources in sorted
/// id order);
/// seeding them extends exactness to every pair whose canonical path has at
/// most h edges after its last center.
#[allow(clippy::too_many_arguments)]
pub fn short_range_extension(
    engine: &mut RoundEngine,
    ctx: &ScalingContext,
    reduced: &ReducedWeights,
    source_ids: &[NodeId],
    centers: &[NodeId],
    center_rows: &[Vec<u64>],
    h: u64,
    phase: &str,
) -> Result<ShortRangeResult, ApspError> {
    extension_core(
        engine,
        &ctx.view(Orientation::Forward),
        ctx.tables(Orientation::Forward),
        reduced,
        source_ids,
        centers,
        center_rows,
        h,
        phase,
    )
}

/// Orientation-generic extension; the driver runs it both ways.
#[allow(clippy::too_many_arguments)]
pub fn extension_core(
    engine: &mut RoundEngine,
    view: &WeightView,
    tables: &DistanceTables,
    reduced: &ReducedWeights,
    source_ids: &[NodeId],
    centers: &[NodeId],
    center_rows: &[Vec<u64>],
    h: u64,
    phase: &str,
) -> Result<ShortRangeResult, ApspError> {
    let sources = SourceSet::new(view.n(), source_ids.to_vec());
    let tab_col: Vec<usize> = sources
        .ids()
        .iter()
        .map(|&s| tables.sources.iter().position(|&x| x == s).expect("table column"))
        .collect();
    let mut seeds = Vec::with_capacity(centers.len() * sources.len());
    for (j, &c) in centers.iter().enumerate() {
        for k in 0..sources.len() {
            let wp = center_rows[j][k];
            if wp == UNKNOWN {
                continue;
            }
            let base = 2 * tables.get(c, tab_col[k]);
            assert!(wp >= base, "claimed center distance below its w floor");
            seeds.push(Seed { node: c, src_idx: k, exact_reduced: wp - base });
        }
    }
    let outcome =
        short_range_core(engine, view, reduced, sources.ids(), h, &seeds, phase)?;
    let values = lift_outcome(&outcome, sources.ids(), tables);
    Ok(ShortRangeResult {
        sources: sources.ids().to_vec(),
        flip: false,
        values,
        max_announcements: outcome.max_announcements,
        sigma: outcome.sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_for(4, 4, 4), 2); // ceil(sqrt(h)) when q = n
        assert_eq!(sigma_for(16, 4, 16), 2);
        assert_eq!(sigma_for(1, 64, 64), 1);
        assert_eq!(sigma_for(64, 8, 64), 3); // ceil(sqrt(8))
        assert_eq!(sigma_for(10, 100, 1000), 1);
    }

    #[test]
    fn rounding_examples() {
        // h = 4 gives sigma = 2, one unit = 1/2.
        let sigma = sigma_for(4, 4, 4);
        assert_eq!(round_up_units(0, sigma), 1);
        assert_eq!(round_up_units(1, sigma), 2);
        assert_eq!(round_up_units(3, sigma), 6);
    }
}
