//! Static random connection model: independent link thinning, critical
//! density estimation, and subcritical connection-decay profiles.
//!
//! `thin_links` retains link `k` with probability `p_e(d_k)` using one
//! uniform draw per link in link order. Estimators derive independent
//! per-replicate streams from their seed and merge results in replicate
//! order, so they are deterministic regardless of thread count.

use crate::components::{crossing_exists, label_components, CrossingSpec, Direction};
use crate::dynamics::OnOffSpec;
use crate::error::{Error, Result};
use crate::geometry::{add_origin_node, sample_poisson, Region};
use crate::graph::{build_graph, GeoGraph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::stats;
use rand::RngExt;
use rayon::prelude::*;

/// How a link mask was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskProvenance {
    /// Independent thinning of a static random connection model.
    Thinning,
    /// A stationary snapshot of an on-off process.
    Snapshot,
}

/// Per-link boolean activity vector for one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkMask {
    bits: Vec<bool>,
    provenance: MaskProvenance,
    seed: u64,
}

impl LinkMask {
    pub fn new(bits: Vec<bool>, provenance: MaskProvenance, seed: u64) -> Self {
        LinkMask {
            bits,
            provenance,
            seed,
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_active(&self, link: usize) -> bool {
        self.bits[link]
    }

    pub fn active_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn provenance(&self) -> MaskProvenance {
        self.provenance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Link activation probability as a function of link length `d` in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub enum LinkProbability {
    /// `p_e(d) = p`.
    Constant(f64),
    /// `p_e(d) = intercept + slope * d`, clipped to [0, 1].
    AffineInLength { intercept: f64, slope: f64 },
    /// Piecewise-linear interpolation through `(d, p)` knots sorted by d;
    /// constant extrapolation outside the knot range.
    Table(Vec<(f64, f64)>),
    /// The stationary active ratio `eta1(d)` of an on-off process.
    ActiveRatio(OnOffSpec),
}

impl LinkProbability {
    /// Validate that 0 <= p_e(d) <= 1 for all d in (0, 1].
    pub fn validate(&self) -> Result<()> {
        let ok_prob = |p: f64| (0.0..=1.0).contains(&p) && p.is_finite();
        match self {
            LinkProbability::Constant(p) => {
                if !ok_prob(*p) {
                    return Err(Error::InvalidLinkProbability(format!(
                        "constant p = {p} outside [0, 1]"
                    )));
                }
            }
            LinkProbability::AffineInLength { intercept, slope } => {
                if !intercept.is_finite() || !slope.is_finite() {
                    return Err(Error::InvalidLinkProbability(
                        "affine parameters must be finite".into(),
                    ));
                }
                // Clipping keeps values in range; nothing else to check.
            }
            LinkProbability::Table(knots) => {
                if knots.is_empty() {
                    return Err(Error::InvalidLinkProbability("empty table".into()));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidLinkProbability(
                            "table knots must have strictly increasing d".into(),
                        ));
                    }
                }
                if knots.iter().any(|&(_, p)| !ok_prob(p)) {
                    return Err(Error::InvalidLinkProbability(
                        "table probabilities outside [0, 1]".into(),
                    ));
                }
            }
            LinkProbability::ActiveRatio(_) => {
                // OnOffSpec validated at construction; eta1 is in (0, 1).
            }
        }
        Ok(())
    }

    /// Evaluate `p_e(d)`.
    pub fn prob(&self, d: f64) -> f64 {
        match self {
            LinkProbability::Constant(p) => *p,
            LinkProbability::AffineInLength { intercept, slope } => {
                (intercept + slope * d).clamp(0.0, 1.0)
            }
            LinkProbability::Table(knots) => {
                if d <= knots[0].0 {
                    return knots[0].1;
                }
                if d >= knots[knots.len() - 1].0 {
                    return knots[knots.len() - 1].1;
                }
                let idx = knots.partition_point(|&(x, _)| x < d);
                let (x0, p0) = knots[idx - 1];
                let (x1, p1) = knots[idx];
                p0 + (p1 - p0) * (d - x0) / (x1 - x0)
            }
            LinkProbability::ActiveRatio(spec) => spec.eta1_unchecked(d),
        }
    }
}

/// Thin the graph's links: link `k` stays active iff the k-th uniform
/// draw is below `p_e(d_k)`.
///
/// Using the same seed with pointwise-ordered probabilities yields nested
/// active sets (the coupling behind the monotonicity of the critical
/// density).
pub fn thin_links(graph: &GeoGraph, prob: &LinkProbability, seed: u64) -> Result<LinkMask> {
    prob.validate()?;
    let mut rng = rng_from_seed(seed);
    let bits = graph
        .links()
        .iter()
        .map(|l| rng.random::<f64>() < prob.prob(l.length))
        .collect();
    Ok(LinkMask::new(bits, MaskProvenance::Thinning, seed))
}

/// Result of a critical-density search.
#[derive(Debug, Clone, Copy)]
pub struct CriticalDensityEstimate {
    pub lambda_hat: f64,
    /// Half-width combining the final bisection bracket and the Monte
    /// Carlo uncertainty of the crossing probability at the estimate.
    pub ci: f64,
    pub window_side: f64,
    pub replicates: usize,
}

/// One bisection probe: estimated crossing probability at a density.
#[derive(Debug, Clone, Copy)]
pub struct CrossingProbe {
    pub lambda: f64,
    pub p_cross: f64,
    pub ci: f64,
}

fn crossing_fraction(
    prob: &LinkProbability,
    lambda: f64,
    window_side: f64,
    replicates: usize,
    seed: u64,
) -> Result<f64> {
    let region = Region::square(window_side)?;
    let spec = CrossingSpec::new(region, Direction::LeftRight)?;
    let hits: Result<Vec<bool>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let cloud_seed = derive_seed(seed, &[rep as u64, 0]);
            let thin_seed = derive_seed(seed, &[rep as u64, 1]);
            let cloud = sample_poisson(region, lambda, cloud_seed)?;
            let graph = build_graph(&cloud, 1.0)?;
            let mask = thin_links(&graph, prob, thin_seed)?;
            crossing_exists(&graph, Some(&mask), &spec)
        })
        .collect();
    let hits = hits?;
    Ok(hits.iter().filter(|h| **h).count() as f64 / replicates as f64)
}

/// Locate the density at which the left-right crossing probability of a
/// square window crosses 1/2, by bisection over [0.1, 10].
///
/// Also returns the probe history for CSV export.
pub fn estimate_critical_density(
    prob: &LinkProbability,
    window_side: f64,
    replicates: usize,
    tolerance: f64,
    seed: u64,
) -> Result<(CriticalDensityEstimate, Vec<CrossingProbe>)> {
    prob.validate()?;
    if window_side < 20.0 {
        return Err(Error::InvalidParameter(format!(
            "window_side must be >= 20 radii, got {window_side}"
        )));
    }
    if tolerance <= 0.0 || tolerance.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be > 0, got {tolerance}"
        )));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }

    let (mut lo, mut hi) = (0.1, 10.0);
    let mut probes = Vec::new();
    let mut probe = |lambda: f64, idx: u64| -> Result<f64> {
        let p = crossing_fraction(
            prob,
            lambda,
            window_side,
            replicates,
            derive_seed(seed, &[idx]),
        )?;
        probes.push(CrossingProbe {
            lambda,
            p_cross: p,
            ci: stats::binomial_ci_halfwidth(p, replicates),
        });
        Ok(p)
    };

    let p_lo = probe(lo, 0)?;
    let p_hi = probe(hi, 1)?;
    if !(p_lo < 0.5 && p_hi >= 0.5) {
        return Err(Error::BracketNotFound {
            lo,
            hi,
            p_lo,
            p_hi,
        });
    }

    let mut idx = 2u64;
    let mut p_at_lo = p_lo;
    let mut p_at_hi = p_hi;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        let p_mid = probe(mid, idx)?;
        idx += 1;
        if p_mid >= 0.5 {
            hi = mid;
            p_at_hi = p_mid;
        } else {
            lo = mid;
            p_at_lo = p_mid;
        }
    }

    let lambda_hat = 0.5 * (lo + hi);
    // Translate the Monte Carlo uncertainty of p into a density
    // uncertainty through the local slope of the crossing curve.
    let slope = ((p_at_hi - p_at_lo) / (hi - lo)).max(1e-9);
    let mc_sigma = (0.25 / replicates as f64).sqrt();
    let ci = 0.5 * (hi - lo) + 1.96 * mc_sigma / slope;
    Ok((
        CriticalDensityEstimate {
            lambda_hat,
            ci,
            window_side,
            replicates,
        },
        probes,
    ))
}

/// One point of a connection-decay profile.
#[derive(Debug, Clone, Copy)]
pub struct DecayPoint {
    pub h: f64,
    pub p_conn: f64,
    pub ci: f64,
    pub successes: usize,
    pub replicates: usize,
}

/// Estimated decay profile of `Pr(origin connects beyond B(h))`.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub points: Vec<DecayPoint>,
    /// Set when the requested density is at or above the supplied
    /// critical-density estimate.
    pub supercritical_warning: bool,
}

/// Estimate `Pr(origin ~ outside B(h))` for each `h`, sampling fresh
/// clouds with an origin node added. The cloud is sampled on the padded
/// window `[-(h+1.25), h+1.25]^2`, which contains every node that can be
/// the first witness outside `B(h) = [-h, h]^2`.
pub fn connection_decay_profile(
    density: f64,
    prob: &LinkProbability,
    h_values: &[f64],
    replicates: usize,
    seed: u64,
    lambda_c_hint: Option<f64>,
) -> Result<DecayProfile> {
    prob.validate()?;
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    if h_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "h_values must be strictly increasing".into(),
        ));
    }
    let supercritical_warning = lambda_c_hint.is_some_and(|lc| density >= lc);

    let mut points = Vec::with_capacity(h_values.len());
    for (hi, &h) in h_values.iter().enumerate() {
        if h < 0.0 {
            return Err(Error::InvalidParameter(format!("h must be >= 0, got {h}")));
        }
        let pad = h + 1.25;
        let region = Region::centered_square(pad)?;
        let hits: Result<Vec<bool>> = (0..replicates)
            .into_par_iter()
            .map(|rep| {
                let cloud_seed = derive_seed(seed, &[hi as u64, rep as u64, 0]);
                let thin_seed = derive_seed(seed, &[hi as u64, rep as u64, 1]);
                let cloud = sample_poisson(region, density, cloud_seed)?;
                let with_origin = add_origin_node(&cloud, (0.0, 0.0))?;
                let graph = build_graph(&with_origin, 1.0)?;
                let mask = thin_links(&graph, prob, thin_seed)?;
                let labeling = label_components(&graph, Some(&mask))?;
                let origin_comp = labeling.component_of(0);
                let pts = with_origin.points();
                let connected = (1..with_origin.len()).any(|i| {
                    labeling.component_of(i) == origin_comp
                        && pts[i].x.abs().max(pts[i].y.abs()) > h
                });
                Ok(connected)
            })
            .collect();
        let hits = hits?;
        let successes = hits.iter().filter(|h| **h).count();
        let p = successes as f64 / replicates as f64;
        points.push(DecayPoint {
            h,
            p_conn: p,
            ci: stats::binomial_ci_halfwidth(p, replicates),
            successes,
            replicates,
        });
    }
    Ok(DecayProfile {
        points,
        supercritical_warning,
    })
}

/// Weighted log-linear fit `log p = log c1 - c2 h` of a decay profile.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    pub r_squared: f64,
}

/// Fit the exponential decay law to a profile. Points with zero observed
/// successes carry no information about `log p` and get zero weight;
/// the remaining points are weighted by the delta-method inverse variance
/// `n p / (1 - p)`.
pub fn fit_exponential_decay(profile: &DecayProfile) -> Option<DecayFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for pt in &profile.points {
        if pt.successes == 0 || pt.p_conn >= 1.0 {
            ws.push(0.0);
            xs.push(pt.h);
            ys.push(0.0);
            continue;
        }
        xs.push(pt.h);
        ys.push(pt.p_conn.ln());
        ws.push(pt.replicates as f64 * pt.p_conn / (1.0 - pt.p_conn));
    }
    let (intercept, slope, r2) = stats::weighted_linear_fit(&xs, &ys, &ws)?;
    Some(DecayFit {
        c1: intercept.exp(),
        c2: -slope,
        r_squared: r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_poisson;

    fn test_graph(side: f64, density: f64, seed: u64) -> GeoGraph {
        let region = Region::square(side).unwrap();
        let cloud = sample_poisson(region, density, seed).unwrap();
        build_graph(&cloud, 1.0).unwrap()
    }

    #[test]
    fn constant_one_keeps_all_links() {
        let g = test_graph(15.0, 2.0, 1);
        let mask = thin_links(&g, &LinkProbability::Constant(1.0), 5).unwrap();
        assert_eq!(mask.active_count(), g.link_count());
    }

    #[test]
    fn constant_zero_drops_all_links() {
        let g = test_graph(15.0, 2.0, 1);
        let mask = thin_links(&g, &LinkProbability::Constant(0.0), 5).unwrap();
        assert_eq!(mask.active_count(), 0);
    }

    #[test]
    fn half_probability_concentrates_around_half() {
        // Binomial concentration: on >= 10^4 links the active fraction
        // must lie within 3 sqrt(0.25 / m) of 0.5.
        let g = test_graph(60.0, 2.0, 2);
        assert!(g.link_count() >= 10_000, "links: {}", g.link_count());
        let mask = thin_links(&g, &LinkProbability::Constant(0.5), 7).unwrap();
        let frac = mask.active_count() as f64 / g.link_count() as f64;
        let tol = 3.0 * (0.25 / g.link_count() as f64).sqrt();
        assert!((frac - 0.5).abs() < tol, "{frac} vs 0.5 +- {tol}");
    }

    #[test]
    fn coupled_thinning_gives_nested_active_sets() {
        // With identical seeds, p' <= p pointwise implies the p' active
        // set is a subset of the p active set, per realization.
        let g = test_graph(30.0, 1.75, 3);
        for seed in [0u64, 1, 2, 3, 4] {
            let strong = thin_links(&g, &LinkProbability::Constant(0.8), seed).unwrap();
            let weak = thin_links(&g, &LinkProbability::Constant(0.3), seed).unwrap();
            for k in 0..g.link_count() {
                assert!(
                    !weak.is_active(k) || strong.is_active(k),
                    "subset violated at link {k}"
                );
            }
        }
    }

    #[test]
    fn affine_and_table_probabilities_evaluate() {
        let aff = LinkProbability::AffineInLength {
            intercept: 0.2,
            slope: 0.5,
        };
        aff.validate().unwrap();
        assert!((aff.prob(0.4) - 0.4).abs() < 1e-15);
        assert_eq!(aff.prob(10.0), 1.0, "clipped to 1");

        let table = LinkProbability::Table(vec![(0.0, 1.0), (1.0, 0.5)]);
        table.validate().unwrap();
        assert!((table.prob(0.5) - 0.75).abs() < 1e-15);
        assert_eq!(table.prob(2.0), 0.5);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        assert!(LinkProbability::Constant(1.5).validate().is_err());
        assert!(LinkProbability::Constant(-0.1).validate().is_err());
        assert!(LinkProbability::Table(vec![]).validate().is_err());
        assert!(LinkProbability::Table(vec![(0.5, 0.1), (0.5, 0.2)])
            .validate()
            .is_err());
    }

    #[test]
    fn active_ratio_probability_equals_eta1() {
        let spec = OnOffSpec::exponential_const(0.5, 2.0).unwrap();
        let p = LinkProbability::ActiveRatio(spec);
        assert!((p.prob(0.7) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn degenerate_probability_has_no_critical_bracket() {
        let err = estimate_critical_density(&LinkProbability::Constant(0.0), 20.0, 20, 0.5, 3);
        assert!(matches!(err, Err(Error::BracketNotFound { .. })));
    }

    #[test]
    fn decay_profile_is_monotone_and_fits_line() {
        // Subcritical static model: p_conn non-increasing in h up to CI
        // noise, and the weighted log-linear fit has negative slope.
        let h_values = [2.0, 4.0, 6.0];
        let profile = connection_decay_profile(
            0.4,
            &LinkProbability::Constant(1.0),
            &h_values,
            400,
            9,
            Some(1.44),
        )
        .unwrap();
        assert!(!profile.supercritical_warning);
        for w in profile.points.windows(2) {
            assert!(
                w[1].p_conn <= w[0].p_conn + w[0].ci + w[1].ci,
                "p_conn must be non-increasing within noise"
            );
        }
        let fit = fit_exponential_decay(&profile).unwrap();
        assert!(fit.c2 > 0.0, "decay rate must be positive, got {}", fit.c2);
    }

    #[test]
    fn decay_profile_flags_supercritical_density() {
        let profile = connection_decay_profile(
            2.0,
            &LinkProbability::Constant(1.0),
            &[1.0, 2.0],
            10,
            11,
            Some(1.44),
        )
        .unwrap();
        assert!(profile.supercritical_warning);
    }

    #[test]
    fn decay_at_h_zero_is_neighbor_probability() {
        // B(0) is a point: the event reduces to "origin connects to some
        // node", which is strictly below 1 at finite density.
        let profile = connection_decay_profile(
            0.4,
            &LinkProbability::Constant(1.0),
            &[0.0],
            600,
            13,
            None,
        )
        .unwrap();
        let p = profile.points[0].p_conn;
        // P(no active neighbor) = exp(-lambda pi) at p == 1.
        let expect = 1.0 - (-0.4 * std::f64::consts::PI).exp();
        assert!((p - expect).abs() < 0.06, "{p} vs {expect}");
        assert!(p < 1.0);
    }
}
