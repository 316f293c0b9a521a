//! First-passage delay computation over sampled per-link delay fields.
//!
//! The static delay field draws one delay per link from the on-off delay
//! law (equilibrium first-passage law for `tau = 0`, retransmission law
//! for `tau > 0`) and treats the minimum path delay as a shortest-path
//! problem with nonnegative weights. The event-driven broadcast
//! simulator is the physical counterpart for memoryless (exponential)
//! specs; both agree in distribution there.
//!
//! The delay-per-distance constant gamma is estimated from ratio curves:
//! source-target pairs inside the largest component, stratified by
//! distance band, with delays shared per replicate field and bootstrap
//! confidence intervals resampled at the replicate level.

use crate::components::label_components;
use crate::dynamics::{
    sample_fpp_delay_with, sample_propagation_delay_with, OnOffSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{sample_poisson, Region};
use crate::graph::{build_graph, GeoGraph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats;
use rand::RngExt;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// One delay draw per link of a graph.
#[derive(Debug, Clone)]
pub struct DelayField {
    delays: Vec<f64>,
    tau: f64,
    seed: u64,
    spec: OnOffSpec,
}

impl DelayField {
    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn delay(&self, link: usize) -> f64 {
        self.delays[link]
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &OnOffSpec {
        &self.spec
    }

    /// Build a field from explicit delays (for tests and perturbation
    /// studies).
    pub fn from_delays(delays: Vec<f64>, tau: f64, spec: OnOffSpec) -> Self {
        DelayField {
            delays,
            tau,
            seed: 0,
            spec,
        }
    }
}

/// Sample one independent delay per link: the first-passage law when
/// `tau == 0`, the retransmission law when `tau > 0`.
pub fn sample_delay_field(
    graph: &GeoGraph,
    spec: &OnOffSpec,
    tau: f64,
    seed: u64,
) -> Result<DelayField> {
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::InvalidTau(tau));
    }
    let mut rng = rng_from_seed(seed);
    let mut delays = Vec::with_capacity(graph.link_count());
    for link in graph.links() {
        if link.length > 1.0 {
            return Err(Error::LinkLengthOutOfRange(link.length));
        }
        let value = if tau == 0.0 {
            sample_fpp_delay_with(spec, link.length, &mut rng).value
        } else {
            sample_propagation_delay_with(spec, link.length, tau, &mut rng).value
        };
        delays.push(value);
    }
    Ok(DelayField {
        delays,
        tau,
        seed,
        spec: *spec,
    })
}

#[derive(PartialEq)]
struct HeapEntry {
    cost: f64,
    node: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap: reverse cost order, tie-break on node id for
        // deterministic pop order
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_node(graph: &GeoGraph, id: usize) -> Result<()> {
    if id >= graph.node_count() {
        return Err(Error::InvalidNode {
            id,
            node_count: graph.node_count(),
        });
    }
    Ok(())
}

/// Minimum path delay from `source` to every node (Dijkstra);
/// `f64::INFINITY` marks unreachable nodes.
pub fn min_delay_map(graph: &GeoGraph, field: &DelayField, source: usize) -> Result<Vec<f64>> {
    check_node(graph, source)?;
    if field.delays.len() != graph.link_count() {
        return Err(Error::MaskLengthMismatch {
            mask_len: field.delays.len(),
            link_count: graph.link_count(),
        });
    }
    Ok(dijkstra(graph, field, source, None))
}

/// Minimum path delay between two nodes; `None` when no path exists in
/// the underlying graph.
pub fn min_delay(
    graph: &GeoGraph,
    field: &DelayField,
    source: usize,
    target: usize,
) -> Result<Option<f64>> {
    check_node(graph, source)?;
    check_node(graph, target)?;
    if field.delays.len() != graph.link_count() {
        return Err(Error::MaskLengthMismatch {
            mask_len: field.delays.len(),
            link_count: graph.link_count(),
        });
    }
    let dist = dijkstra(graph, field, source, Some(target));
    let d = dist[target];
    Ok(if d.is_finite() { Some(d) } else { None })
}

fn dijkstra(graph: &GeoGraph, field: &DelayField, source: usize, target: Option<usize>) -> Vec<f64> {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        cost: 0.0,
        node: source as u32,
    });
    while let Some(HeapEntry { cost, node }) = heap.pop() {
        let u = node as usize;
        if done[u] {
            continue;
        }
        done[u] = true;
        if target == Some(u) {
            break;
        }
        for &k in graph.incident_links(u) {
            let v = graph.other_endpoint(k as usize, u);
            if done[v] {
                continue;
            }
            let next = cost + field.delays[k as usize];
            if next < dist[v] {
                dist[v] = next;
                heap.push(HeapEntry {
                    cost: next,
                    node: v as u32,
                });
            }
        }
    }
    dist
}

/// Discrete-event broadcast: every node, on first reception, attempts all
/// incident links; a link delivers after the on-off process next carries
/// a transmission (plus the retransmission rule when `tau > 0`). Returns
/// first-reception times, `f64::INFINITY` past the horizon.
///
/// Requires exponential laws: per-arrival residuals are only well-posed
/// under memorylessness.
pub fn broadcast_event_driven(
    graph: &GeoGraph,
    spec: &OnOffSpec,
    source: usize,
    horizon: f64,
    tau: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    check_node(graph, source)?;
    if !spec.is_exponential() {
        return Err(Error::NonExponentialSpec);
    }
    if horizon <= 0.0 || horizon.is_nan() {
        return Err(Error::InvalidHorizon(horizon));
    }
    if tau < 0.0 || !tau.is_finite() {
        return Err(Error::InvalidTau(tau));
    }
    let mut rng = rng_from_seed(seed);
    let n = graph.node_count();
    let mut reception = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        cost: 0.0,
        node: source as u32,
    });
    while let Some(HeapEntry { cost: t, node }) = heap.pop() {
        let u = node as usize;
        if reception[u].is_finite() {
            continue;
        }
        reception[u] = t;
        for &k in graph.incident_links(u) {
            let v = graph.other_endpoint(k as usize, u);
            if reception[v].is_finite() {
                continue;
            }
            let d = graph.links()[k as usize].length;
            let link_delay = if tau == 0.0 {
                sample_fpp_delay_with(spec, d, &mut rng).value
            } else {
                sample_propagation_delay_with(spec, d, tau, &mut rng).value
            };
            let arrival = t + link_delay;
            if arrival <= horizon {
                heap.push(HeapEntry {
                    cost: arrival,
                    node: v as u32,
                });
            }
        }
    }
    Ok(reception)
}

/// One source-target measurement of a ratio curve.
#[derive(Debug, Clone, Copy)]
pub struct RatioRow {
    pub replicate: u32,
    pub source: u32,
    pub target: u32,
    pub distance: f64,
    pub delay: f64,
    pub ratio: f64,
}

/// Collected delay/distance ratios across replicates.
#[derive(Debug, Clone)]
pub struct RatioCurve {
    pub rows: Vec<RatioRow>,
    pub seed: u64,
    pub window_side: f64,
    /// Replicates discarded because the largest component fell below 10%
    /// of the nodes.
    pub discarded_replicates: usize,
}

/// Parameters for `delay_ratio_curve`.
#[derive(Debug, Clone)]
pub struct RatioCurveParams {
    pub density: f64,
    pub spec: OnOffSpec,
    pub tau: f64,
    pub window_side: f64,
    pub pairs_per_band: usize,
    pub replicates: usize,
    pub seed: u64,
}

const BAND_WIDTH: f64 = 5.0;
const MIN_PAIR_DISTANCE: f64 = 5.0;
const TARGETS_PER_SOURCE: usize = 5;

/// Sample ratio curves: fresh cloud + graph per replicate, pairs drawn
/// from the largest component, stratified into distance bands over
/// `[5, 0.8 * window_side]`, kept at least `0.1 * window_side` from the
/// region boundary, one delay field shared per replicate.
pub fn delay_ratio_curve(params: &RatioCurveParams) -> Result<RatioCurve> {
    let p = params;
    if p.replicates == 0 || p.pairs_per_band == 0 {
        return Err(Error::InvalidParameter(
            "replicates and pairs_per_band must be >= 1".into(),
        ));
    }
    let upper = 0.8 * p.window_side;
    if upper <= MIN_PAIR_DISTANCE {
        return Err(Error::InvalidParameter(format!(
            "window_side {} too small for distance bands",
            p.window_side
        )));
    }
    let n_bands = ((upper - MIN_PAIR_DISTANCE) / BAND_WIDTH).ceil().max(1.0) as usize;
    let region = Region::square(p.window_side)?;
    let margin = 0.1 * p.window_side;

    let per_replicate: Result<Vec<(Vec<RatioRow>, bool)>> = (0..p.replicates)
        .into_par_iter()
        .map(|rep| {
            let cloud = sample_poisson(region, p.density, derive_seed(p.seed, &[rep as u64, 0]))?;
            let graph = build_graph(&cloud, 1.0)?;
            let labeling = label_components(&graph, None)?;
            if graph.node_count() == 0
                || labeling.largest_size() < graph.node_count() / 10
            {
                return Ok((Vec::new(), true));
            }
            let field =
                sample_delay_field(&graph, &p.spec, p.tau, derive_seed(p.seed, &[rep as u64, 1]))?;
            let pts = graph.cloud().points();
            let largest = labeling.largest_id();
            let eligible: Vec<u32> = (0..graph.node_count())
                .filter(|&i| {
                    labeling.component_of(i) == largest
                        && pts[i].x >= margin
                        && pts[i].x <= p.window_side - margin
                        && pts[i].y >= margin
                        && pts[i].y <= p.window_side - margin
                })
                .map(|i| i as u32)
                .collect();
            if eligible.len() < 2 {
                return Ok((Vec::new(), true));
            }
            let mut rng = rng_from_seed(derive_seed(p.seed, &[rep as u64, 2]));
            let mut rows = Vec::new();
            for band in 0..n_bands {
                let d_lo = MIN_PAIR_DISTANCE + band as f64 * (upper - MIN_PAIR_DISTANCE)
                    / n_bands as f64;
                let d_hi = MIN_PAIR_DISTANCE + (band + 1) as f64 * (upper - MIN_PAIR_DISTANCE)
                    / n_bands as f64;
                let mut collected = 0;
                let mut attempts = 0;
                while collected < p.pairs_per_band && attempts < 60 {
                    attempts += 1;
                    let source = eligible[rng.random_range(0..eligible.len())] as usize;
                    let candidates: Vec<u32> = eligible
                        .iter()
                        .copied()
                        .filter(|&j| {
                            let d = pts[source].distance(&pts[j as usize]);
                            j as usize != source && d >= d_lo && d < d_hi
                        })
                        .collect();
                    if candidates.is_empty() {
                        continue;
                    }
                    let dist = dijkstra(&graph, &field, source, None);
                    let take = (p.pairs_per_band - collected).min(TARGETS_PER_SOURCE);
                    for _ in 0..take {
                        let target = candidates[rng.random_range(0..candidates.len())] as usize;
                        let delay = dist[target];
                        if !delay.is_finite() {
                            continue; // same component by construction
                        }
                        let distance = pts[source].distance(&pts[target]);
                        rows.push(RatioRow {
                            replicate: rep as u32,
                            source: source as u32,
                            target: target as u32,
                            distance,
                            delay,
                            ratio: delay / distance,
                        });
                        collected += 1;
                    }
                }
            }
            Ok((rows, false))
        })
        .collect();

    let mut rows = Vec::new();
    let mut discarded = 0;
    for (mut r, skipped) in per_replicate? {
        rows.append(&mut r);
        discarded += usize::from(skipped);
    }
    Ok(RatioCurve {
        rows,
        seed: p.seed,
        window_side: p.window_side,
        discarded_replicates: discarded,
    })
}

/// A gamma estimate with its convergence diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct GammaEstimate {
    pub gamma_hat: f64,
    /// 95% bootstrap half-width (replicate-level resampling).
    pub ci: f64,
    /// Top-half and top-quarter estimates agree within combined CIs.
    pub converged: bool,
    pub rows_used: usize,
}

fn gamma_over_top(curve: &RatioCurve, top_fraction: f64, boot_seed: u64) -> (f64, f64, usize) {
    let mut distances: Vec<f64> = curve.rows.iter().map(|r| r.distance).collect();
    distances.sort_by(f64::total_cmp);
    let cutoff = stats::quantile_sorted(&distances, 1.0 - top_fraction);
    let top: Vec<&RatioRow> = curve.rows.iter().filter(|r| r.distance >= cutoff).collect();
    let ratios: Vec<f64> = top.iter().map(|r| r.ratio).collect();
    let estimate = stats::mean(&ratios);

    // replicate-level bootstrap
    let mut reps: Vec<u32> = curve.rows.iter().map(|r| r.replicate).collect();
    reps.sort_unstable();
    reps.dedup();
    if reps.len() < 2 || top.is_empty() {
        return (estimate, f64::INFINITY, top.len());
    }
    let mut by_rep: std::collections::HashMap<u32, Vec<f64>> = std::collections::HashMap::new();
    for r in &top {
        by_rep.entry(r.replicate).or_default().push(r.ratio);
    }
    let mut rng = rng_from_seed(derive_seed(boot_seed, &[(top_fraction * 1e6) as u64]));
    let b = 500;
    let mut means = Vec::with_capacity(b);
    for _ in 0..b {
        let mut sum = 0.0;
        let mut count = 0usize;
        for _ in 0..reps.len() {
            let pick = reps[rng.random_range(0..reps.len())];
            if let Some(v) = by_rep.get(&pick) {
                sum += v.iter().sum::<f64>();
                count += v.len();
            }
        }
        if count > 0 {
            means.push(sum / count as f64);
        }
    }
    means.sort_by(f64::total_cmp);
    let lo = stats::quantile_sorted(&means, 0.025);
    let hi = stats::quantile_sorted(&means, 0.975);
    (estimate, 0.5 * (hi - lo), top.len())
}

/// Estimate gamma as the mean ratio over the top distance quantile,
/// with a replicate-level bootstrap CI. The convergence flag compares
/// the top-half and top-quarter estimates.
pub fn estimate_gamma(curve: &RatioCurve, top_fraction: f64) -> Result<GammaEstimate> {
    if curve.rows.is_empty() {
        return Err(Error::InvalidParameter(
            "ratio curve is empty; cannot estimate gamma".into(),
        ));
    }
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "top_fraction must lie in (0, 1], got {top_fraction}"
        )));
    }
    let boot_seed = derive_seed(curve.seed, &[0xB007]);
    let (gamma_hat, ci, rows_used) = gamma_over_top(curve, top_fraction, boot_seed);
    let (e_half, ci_half, _) = gamma_over_top(curve, 0.5, boot_seed);
    let (e_quarter, ci_quarter, _) = gamma_over_top(curve, 0.25, boot_seed);
    let float_slack = 1e-9 * e_half.abs().max(e_quarter.abs()).max(1.0);
    let converged = (e_half - e_quarter).abs() <= ci_half + ci_quarter + float_slack;
    Ok(GammaEstimate {
        gamma_hat,
        ci,
        converged,
        rows_used,
    })
}

/// One row of a gamma(tau) table.
#[derive(Debug, Clone, Copy)]
pub struct GammaTauRow {
    pub tau: f64,
    pub gamma_hat: f64,
    pub ci: f64,
    pub converged: bool,
}

/// Run a ratio curve and gamma estimate per tau value (positive,
/// decreasing).
pub fn gamma_tau_study(
    density: f64,
    spec: &OnOffSpec,
    tau_values: &[f64],
    window_side: f64,
    pairs_per_band: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<GammaTauRow>> {
    if tau_values.is_empty() {
        return Err(Error::InvalidParameter("tau_values must be nonempty".into()));
    }
    for w in tau_values.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidParameter(
                "tau_values must be strictly decreasing".into(),
            ));
        }
    }
    if tau_values.iter().any(|&t| t <= 0.0 || t.is_nan()) {
        return Err(Error::InvalidParameter("tau_values must be positive".into()));
    }
    let mut out = Vec::with_capacity(tau_values.len());
    for (i, &tau) in tau_values.iter().enumerate() {
        let curve = delay_ratio_curve(&RatioCurveParams {
            density,
            spec: *spec,
            tau,
            window_side,
            pairs_per_band,
            replicates,
            seed: derive_seed(seed, &[i as u64]),
        })?;
        let est = estimate_gamma(&curve, 0.25)?;
        out.push(GammaTauRow {
            tau,
            gamma_hat: est.gamma_hat,
            ci: est.ci,
            converged: est.converged,
        });
    }
    Ok(out)
}
