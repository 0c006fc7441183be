//! The outer scaling loop. Each level refines every weight by one bit and
//! runs the per-iteration algorithm twice, once per orientation, so that
//! every node ends up knowing both its distances from all tracked sources
//! and its distances to them (the reversed tables are what the next level's
//! flipped short-range sweep consumes). A distributed verification pass
//! gates the final answer.

use std::collections::BTreeMap;

use congest_sim::bfs_tree::{build_bfs_tree, BfsTree};
use congest_sim::broadcast::broadcast;
use congest_sim::engine::{EngineConfig, RoundEngine};
use congest_sim::message::BroadcastItem;
use congest_sim::stats::{PhaseStats, RoundStats};
use congest_sim::tables::{DistanceTables, UNKNOWN};
use graph_core::{bit_decompose, LevelPair, NodeId, WeightedDigraph};
use rand_chacha::ChaCha12Rng;

use crate::reversed_sinks::{reversed_rsink, RSINK_LABELS};
use crate::scaling::{exchange_and_reduce, exchange_rows, ReducedWeights, SourceSet};
use crate::short_range::{extension_core, lift_outcome, short_range_core};
use crate::view::{Orientation, WeightView};
use crate::ApspError;

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub seed: u64,
    /// Center oversampling factor in `ceil(alpha * min(k, sqrt n) * ln n)`.
    pub alpha: f64,
    pub h_override: Option<u64>,
    pub bandwidth_factor: u32,
    /// Run the distributed verification pass at the end.
    pub verify: bool,
    /// Cross-check every level's tables against the sequential oracle.
    pub check_each_level: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            alpha: 3.0,
            h_override: None,
            bandwidth_factor: 8,
            verify: true,
            check_each_level: false,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub witnesses: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IterationBreakdown {
    pub level: u32,
    pub orientation: &'static str,
    pub phases: BTreeMap<String, PhaseStats>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RsinkSummary {
    pub level: u32,
    pub orientation: &'static str,
    pub sinks: usize,
    pub tracked: usize,
    pub g_threshold: u64,
    pub bottlenecks: usize,
    pub max_relay_load: u64,
}

pub struct RunReport {
    pub sources: Vec<NodeId>,
    /// distances[source index][target node].
    pub distances: Vec<Vec<u64>>,
    pub stats: RoundStats,
    pub iterations: Vec<IterationBreakdown>,
    pub rsink: Vec<RsinkSummary>,
    pub verify: Option<VerifyReport>,
    pub beta: u32,
    pub dhat: u64,
    pub h: u64,
    pub centers: Vec<Vec<NodeId>>,
    /// Largest per (node, source) announcement count in any repair phase.
    pub max_announcements: u64,
    /// Total broadcast workload sum(K + dhat) over center-pair broadcasts,
    /// the denominator the broadcast budget constant is fitted against.
    pub broadcast_work: u64,
}

impl RunReport {
    /// The stats document: per-phase counters, totals, and the per-iteration
    /// breakdown. Keys are stable.
    pub fn stats_json(&self) -> serde_json::Value {
        let mut json = self.stats.to_json();
        json["iterations"] = serde_json::to_value(&self.iterations).unwrap();
        json
    }

    pub fn distance(&self, s: NodeId, t: NodeId) -> u64 {
        let k = self.sources.iter().position(|&x| x == s).expect("tracked source");
        self.distances[k][t]
    }
}

/// Everything an external check may want to see about one finished
/// (level, orientation) iteration.
pub struct IterationSnapshot<'a> {
    pub level: u32,
    pub orientation: Orientation,
    pub pair: LevelPair,
    pub reduced: &'a ReducedWeights,
    pub tables_w: &'a DistanceTables,
    /// produced[node][tracked index] = the new `w'` table entries.
    pub produced: &'a [Vec<u64>],
    pub tracked: &'a [NodeId],
    pub centers: &'a [NodeId],
}

pub type Inspector<'a> = dyn FnMut(&IterationSnapshot) -> Result<(), String> + 'a;

/// All-pairs shortest paths: every node ends up knowing its distance from
/// every other node, exactly.
pub fn apsp(g: &WeightedDigraph, cfg: RunConfig) -> Result<RunReport, ApspError> {
    run(g, (0..g.n()).collect(), true, cfg, None)
}

pub fn apsp_inspect(
    g: &WeightedDigraph,
    cfg: RunConfig,
    inspector: &mut Inspector,
) -> Result<RunReport, ApspError> {
    run(g, (0..g.n()).collect(), true, cfg, Some(inspector))
}

/// k-source shortest paths: every node learns its distance from each listed
/// source. Center sets shrink with k, and the per-level tracked sets fold the
/// later levels' centers in so their knowledge is ready when needed.
pub fn kssp(g: &WeightedDigraph, sources: &[NodeId], cfg: RunConfig) -> Result<RunReport, ApspError> {
    run(g, sources.to_vec(), false, cfg, None)
}

pub fn kssp_inspect(
    g: &WeightedDigraph,
    sources: &[NodeId],
    cfg: RunConfig,
    inspector: &mut Inspector,
) -> Result<RunReport, ApspError> {
    run(g, sources.to_vec(), false, cfg, Some(inspector))
}

/// Node 0 samples `count` distinct ids and broadcasts them.
pub fn sample_centers(
    engine: &mut RoundEngine,
    tree: &BfsTree,
    rng: &mut ChaCha12Rng,
    count: usize,
    phase: &str,
) -> Result<Vec<NodeId>, ApspError> {
    let n = engine.graph().n();
    let count = count.min(n);
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut ids: Vec<NodeId> = rand::seq::index::sample(rng, n, count).into_iter().collect();
    let items: Vec<(NodeId, BroadcastItem)> =
        ids.iter().map(|&c| (0, BroadcastItem::CenterId(c as u32))).collect();
    broadcast(engine, tree, items, phase)?;
    ids.sort_unstable();
    Ok(ids)
}

/// One forward iteration as a standalone operation: given the iteration's
/// context (the level pair and both orientations' exact `w` tables), sampled
/// centers and h, produce every node's exact `w'` distances from the tracked
/// sources. Exposed for direct exercise; the full runs drive the same path
/// through both orientations per level.
pub fn run_iteration<'g>(
    engine: &mut RoundEngine<'g>,
    ctx: &crate::scaling::ScalingContext<'g>,
    sources: &[NodeId],
    centers: &[NodeId],
    h: u64,
    tree: &BfsTree,
) -> Result<Vec<Vec<u64>>, ApspError> {
    let view_f = ctx.view(Orientation::Forward);
    let view_r = ctx.view(Orientation::Reversed);
    let red_f = exchange_and_reduce(engine, &view_f, &ctx.forward, false, "exchange")?;
    let red_r = exchange_and_reduce(engine, &view_r, &ctx.reversed, false, "exchange")?;
    let mut summaries = Vec::new();
    let mut max_ann = 0;
    let mut bwork = 0;
    iterate_once(IterateArgs {
        engine,
        view: &view_f,
        tables: &ctx.forward,
        reduced: &red_f,
        flip_view: &view_r,
        flip_tables: &ctx.reversed,
        flip_reduced: &red_r,
        tracked: sources,
        tracked_prev: ctx.forward.sources.as_slice(),
        centers,
        h,
        tree,
        level: ctx.pair.level(),
        orient: Orientation::Forward,
        rsink_summaries: &mut summaries,
        max_announcements: &mut max_ann,
        broadcast_work: &mut bwork,
    })
}

fn run(
    g: &WeightedDigraph,
    final_sources: Vec<NodeId>,
    is_apsp: bool,
    cfg: RunConfig,
    mut inspector: Option<&mut Inspector>,
) -> Result<RunReport, ApspError> {
    let n = g.n();
    let k = final_sources.len();
    assert!(k >= 1, "at least one source");
    if n == 1 {
        return Ok(RunReport {
            sources: final_sources,
            distances: vec![vec![0]],
            stats: RoundStats::default(),
            iterations: Vec::new(),
            rsink: Vec::new(),
            verify: Some(VerifyReport { ok: true, witnesses: Vec::new() }),
            beta: 0,
            dhat: 0,
            h: 1,
            centers: Vec::new(),
            max_announcements: 0,
            broadcast_work: 0,
        });
    }

    let mut engine =
        RoundEngine::new(g, EngineConfig { bandwidth_factor: cfg.bandwidth_factor, seed: cfg.seed });
    let tree = build_bfs_tree(&mut engine, "bfs-tree")?;
    let dec = bit_decompose(g);
    let beta = dec.beta;
    let sqrt_n = (n as f64).sqrt();

    let h = cfg
        .h_override
        .unwrap_or_else(|| {
            if is_apsp {
                sqrt_n.ceil() as u64
            } else {
                (n as u64).div_ceil(k as u64).max(sqrt_n.ceil() as u64)
            }
        })
        .max(1);
    let zeta = {
        let base = if is_apsp { sqrt_n } else { (k as f64).min(sqrt_n) };
        ((cfg.alpha * base * (n as f64).ln()).ceil() as usize).min(n)
    };

    let mut rng = engine.node_rng(0);
    let mut centers: Vec<Vec<NodeId>> = Vec::with_capacity(beta as usize);
    if is_apsp {
        // Sampled fresh at the top of each level, inside the loop below.
    } else {
        // All levels' center sets are drawn and announced up front, and the
        // sources announce themselves so indexes are globally agreed.
        for _ in 1..=beta {
            centers.push(sample_centers(&mut engine, &tree, &mut rng, zeta, "centers")?);
        }
        let items: Vec<(NodeId, BroadcastItem)> = final_sources
            .iter()
            .map(|&s| (s, BroadcastItem::SourceId(s as u32)))
            .collect();
        broadcast(&mut engine, &tree, items, "centers")?;
    }

    // tracked[i] = sources the level-i tables must cover.
    let tracked: Vec<Vec<NodeId>> = if is_apsp {
        (0..=beta).map(|_| (0..n).collect()).collect()
    } else {
        (0..=beta)
            .map(|i| {
                let mut set: Vec<NodeId> = final_sources.clone();
                for c in centers.iter().skip(i as usize) {
                    set.extend_from_slice(c);
                }
                set.sort_unstable();
                set.dedup();
                set
            })
            .collect()
    };

    let mut tables_f = DistanceTables::zero("w0", n, tracked[0].clone());
    let mut tables_r = DistanceTables::zero("w0-rev", n, tracked[0].clone());
    let mut iterations = Vec::new();
    let mut rsink_summaries = Vec::new();
    let mut max_announcements = 0u64;
    let mut broadcast_work = 0u64;

    for level in 1..=beta {
        let pair = dec.pair(level);
        if is_apsp {
            centers.push(sample_centers(&mut engine, &tree, &mut rng, zeta, "centers")?);
        }
        let level_centers = centers[level as usize - 1].clone();
        let view_f = WeightView::new(g, pair, Orientation::Forward);
        let view_r = WeightView::new(g, pair, Orientation::Reversed);
        let red_f = exchange_and_reduce(&mut engine, &view_f, &tables_f, level == 1, "exchange")?;
        let red_r = exchange_and_reduce(&mut engine, &view_r, &tables_r, level == 1, "exchange")?;

        let mut produced_f: Option<Vec<Vec<u64>>> = None;
        let mut produced_r: Option<Vec<Vec<u64>>> = None;
        for orient in [Orientation::Forward, Orientation::Reversed] {
            let before = engine.stats.phases.clone();
            let (view, tables, reduced, flip_tables, flip_reduced) = match orient {
                Orientation::Forward => (&view_f, &tables_f, &red_f, &tables_r, &red_r),
                Orientation::Reversed => (&view_r, &tables_r, &red_r, &tables_f, &red_f),
            };
            let produced = iterate_once(IterateArgs {
                engine: &mut engine,
                view,
                tables,
                reduced,
                flip_view: &match orient {
                    Orientation::Forward => view_r,
                    Orientation::Reversed => view_f,
                },
                flip_tables,
                flip_reduced,
                tracked: &tracked[level as usize],
                tracked_prev: &tracked[level as usize - 1],
                centers: &level_centers,
                h,
                tree: &tree,
                level,
                orient,
                rsink_summaries: &mut rsink_summaries,
                max_announcements: &mut max_announcements,
                broadcast_work: &mut broadcast_work,
            })?;

            if let Some(ins) = inspector.as_deref_mut() {
                let snap = IterationSnapshot {
                    level,
                    orientation: orient,
                    pair,
                    reduced,
                    tables_w: tables,
                    produced: &produced,
                    tracked: &tracked[level as usize],
                    centers: &level_centers,
                };
                ins(&snap).map_err(ApspError::Inspection)?;
            }
            if cfg.check_each_level {
                check_level(g, &dec, level, orient, &tracked[level as usize], &produced)?;
            }
            iterations.push(IterationBreakdown {
                level,
                orientation: orient.label(),
                phases: diff_phases(&before, &engine.stats.phases),
            });
            match orient {
                Orientation::Forward => produced_f = Some(produced),
                Orientation::Reversed => produced_r = Some(produced),
            }
        }
        tables_f = DistanceTables::from_rows("w", tracked[level as usize].clone(), produced_f.unwrap());
        tables_r =
            DistanceTables::from_rows("w-rev", tracked[level as usize].clone(), produced_r.unwrap());
    }

    let sources = tracked[beta as usize].clone();
    debug_assert_eq!(sources, {
        let mut s = final_sources.clone();
        s.sort_unstable();
        s
    });
    let distances: Vec<Vec<u64>> =
        (0..sources.len()).map(|k| (0..n).map(|t| tables_f.get(t, k)).collect()).collect();

    let verify = if cfg.verify {
        let weights: Vec<u64> = g.arcs().iter().map(|a| a.weight).collect();
        Some(verify_distributed(&mut engine, &tables_f, &weights, &tree, "verify")?)
    } else {
        None
    };

    Ok(RunReport {
        sources,
        distances,
        stats: engine.stats,
        iterations,
        rsink: rsink_summaries,
        verify,
        beta,
        dhat: tree.dhat,
        h,
        centers,
        max_announcements,
        broadcast_work,
    })
}

struct IterateArgs<'a, 'g> {
    engine: &'a mut RoundEngine<'g>,
    view: &'a WeightView<'g>,
    tables: &'a DistanceTables,
    reduced: &'a ReducedWeights,
    flip_view: &'a WeightView<'g>,
    flip_tables: &'a DistanceTables,
    flip_reduced: &'a ReducedWeights,
    tracked: &'a [NodeId],
    tracked_prev: &'a [NodeId],
    centers: &'a [NodeId],
    h: u64,
    tree: &'a BfsTree,
    level: u32,
    orient: Orientation,
    rsink_summaries: &'a mut Vec<RsinkSummary>,
    max_announcements: &'a mut u64,
    broadcast_work: &'a mut u64,
}

/// One orientation of one scaling iteration: flipped short-range so every
/// node knows its distances toward the previous tracked set, center matrix
/// broadcast and min-plus closure, reversed r-sink into the centers, then the
/// extension producing the new tables.
fn iterate_once(args: IterateArgs) -> Result<Vec<Vec<u64>>, ApspError> {
    let IterateArgs {
        engine,
        view,
        tables,
        reduced,
        flip_view,
        flip_tables,
        flip_reduced,
        tracked,
        tracked_prev,
        centers,
        h,
        tree,
        level,
        orient,
        rsink_summaries,
        max_announcements,
        broadcast_work,
    } = args;
    let n = view.n();
    let prev = SourceSet::new(n, tracked_prev.to_vec());

    // Every node x learns frm[x][a] >= dist(x -> a), exact within h hops:
    // the sweep runs on the flipped orientation from the previous tracked
    // set, so knowledge lands at the path's tail.
    let sr = short_range_core(engine, flip_view, flip_reduced, prev.ids(), h, &[], "short-range")?;
    *max_announcements = (*max_announcements).max(sr.max_announcements);
    let frm = lift_outcome(&sr, prev.ids(), flip_tables);

    let r = centers.len();
    let center_rows: Vec<Vec<u64>> = if r == 0 {
        Vec::new()
    } else {
        let ccol: Vec<usize> =
            centers.iter().map(|&c| prev.index_of(c).expect("centers tracked")).collect();
        // Each center broadcasts its own row toward the other centers.
        let mut items = Vec::with_capacity(r * r);
        for (j2, &c2) in centers.iter().enumerate() {
            for j in 0..r {
                let value = frm[c2][ccol[j]];
                let item = if value == UNKNOWN {
                    BroadcastItem::CenterUnknown { a: j2 as u32, b: j as u32 }
                } else {
                    BroadcastItem::CenterDist { a: j2 as u32, b: j as u32, value }
                };
                items.push((c2, item));
            }
        }
        *broadcast_work += items.len() as u64 + tree.dhat;
        let (collected, _) = broadcast(engine, tree, items, "broadcast")?;
        let mut m = vec![vec![UNKNOWN; r]; r];
        for j in 0..r {
            m[j][j] = 0;
        }
        for item in collected {
            if let BroadcastItem::CenterDist { a, b, value } = item {
                let cell = &mut m[a as usize][b as usize];
                *cell = (*cell).min(value);
            }
        }
        // Min-plus closure of the center matrix: chains of exact <= h-hop
        // segments reach every center pair.
        for mid in 0..r {
            for a in 0..r {
                if m[a][mid] == UNKNOWN {
                    continue;
                }
                for b in 0..r {
                    if m[mid][b] == UNKNOWN {
                        continue;
                    }
                    let via = m[a][mid] + m[mid][b];
                    if via < m[a][b] {
                        m[a][b] = via;
                    }
                }
            }
        }
        // Every node folds the closure into its own sweep column: its
        // distance to each center becomes exact.
        let mut sinkdist = vec![vec![UNKNOWN; r]; n];
        for (x, row) in sinkdist.iter_mut().enumerate() {
            for j in 0..r {
                let mut best = frm[x][ccol[j]];
                for j2 in 0..r {
                    let first = frm[x][ccol[j2]];
                    if first == UNKNOWN || m[j2][j] == UNKNOWN {
                        continue;
                    }
                    best = best.min(first + m[j2][j]);
                }
                row[j] = best;
            }
        }

        let q = tracked.len();
        let g_threshold = isqrt_ceil(n as u128 * q as u128 * r as u128).max(1);
        let rs = reversed_rsink(
            engine,
            view,
            centers,
            tracked,
            g_threshold,
            &sinkdist,
            tree,
            &RSINK_LABELS,
        )?;
        rsink_summaries.push(RsinkSummary {
            level,
            orientation: orient.label(),
            sinks: r,
            tracked: q,
            g_threshold,
            bottlenecks: rs.bottlenecks.len(),
            max_relay_load: rs.max_relay_load,
        });
        rs.values
    };

    let ext = extension_core(
        engine,
        view,
        tables,
        reduced,
        tracked,
        centers,
        &center_rows,
        h,
        "short-range-ext",
    )?;
    *max_announcements = (*max_announcements).max(ext.max_announcements);
    for (t, row) in ext.values.iter().enumerate() {
        for (kk, &v) in row.iter().enumerate() {
            if v == UNKNOWN {
                return Err(ApspError::MissedPair { level, orientation: orient, s: tracked[kk], t });
            }
        }
    }
    Ok(ext.values)
}

fn check_level(
    g: &WeightedDigraph,
    dec: &graph_core::BitDecomposition,
    level: u32,
    orient: Orientation,
    tracked: &[NodeId],
    produced: &[Vec<u64>],
) -> Result<(), ApspError> {
    let w = oracle::level_weights(g, dec.beta, level);
    for (kk, &s) in tracked.iter().enumerate() {
        let want = match orient {
            Orientation::Forward => oracle::dijkstra_from(g, &w, s),
            Orientation::Reversed => oracle::dijkstra_to(g, &w, s),
        };
        for t in 0..g.n() {
            if produced[t][kk] != want[t] {
                return Err(ApspError::IterationMismatch {
                    level,
                    orientation: orient,
                    s,
                    t,
                    got: produced[t][kk],
                    want: want[t],
                });
            }
        }
    }
    Ok(())
}

/// The end-of-run check: one pipelined table exchange, then every node
/// verifies its own rows against its neighbors' (zero diagonal, and each
/// off-diagonal entry equal to the best in-neighbor relaxation). Violations
/// are broadcast as witnesses; silence means the tables are a true fixed
/// point and hence exact.
pub fn verify_distributed(
    engine: &mut RoundEngine,
    tables: &DistanceTables,
    weights: &[u64],
    tree: &BfsTree,
    phase: &str,
) -> Result<VerifyReport, ApspError> {
    let g = engine.graph();
    let received = exchange_rows(engine, g, tables, phase)?;
    let mut witnesses: Vec<(NodeId, NodeId)> = Vec::new();
    for t in 0..g.n() {
        for (k, &s) in tables.sources.iter().enumerate() {
            let claimed = tables.get(t, k);
            if t == s {
                if claimed != 0 {
                    witnesses.push((s, t));
                }
                continue;
            }
            let mut best = UNKNOWN;
            for &arc in g.in_arcs(t) {
                let via = received[arc][k];
                if via != UNKNOWN {
                    best = best.min(via + weights[arc]);
                }
            }
            if claimed != best {
                witnesses.push((s, t));
            }
        }
    }
    witnesses.sort_unstable();
    witnesses.dedup();
    let items: Vec<(NodeId, BroadcastItem)> = witnesses
        .iter()
        .map(|&(s, t)| (t, BroadcastItem::Witness { src: s as u32, node: t as u32 }))
        .collect();
    broadcast(engine, tree, items, phase)?;
    Ok(VerifyReport { ok: witnesses.is_empty(), witnesses })
}

fn diff_phases(
    before: &BTreeMap<String, PhaseStats>,
    after: &BTreeMap<String, PhaseStats>,
) -> BTreeMap<String, PhaseStats> {
    let mut out = BTreeMap::new();
    for (k, a) in after {
        let b = before.get(k).copied().unwrap_or_default();
        if a.rounds != b.rounds || a.messages != b.messages {
            out.insert(
                k.clone(),
                PhaseStats {
                    rounds: a.rounds - b.rounds,
                    max_edge_congestion: a.max_edge_congestion,
                    messages: a.messages - b.messages,
                },
            );
        }
    }
    out
}

fn isqrt_ceil(x: u128) -> u64 {
    let mut s = (x as f64).sqrt() as u128;
    while s * s < x {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= x {
        s -= 1;
    }
    s as u64
}
