//! Markov on-off link-state processes and the induced delay laws.
//!
//! A link of length `d` alternates between inactive periods `Y(d)` and
//! active periods `Z(d)`, i.i.d. within each family. The stationary
//! probability of finding the link active is the active ratio
//! `eta1(d) = E[Z(d)] / (E[Z(d)] + E[Y(d)])`.
//!
//! Two per-link delay laws are provided:
//!
//! * first-passage delay (no propagation delay): zero with probability
//!   `eta1(d)`, otherwise the equilibrium residual of the inactive
//!   period — the time until the stationary process next turns on;
//! * propagation delay `tau > 0`: alternating periods are consumed until
//!   the first active period of length >= `tau`, which carries the
//!   transmission; the retransmission count `K` is geometric with
//!   `E[K] = 1 / (1 - F_Z(tau))`.

use crate::bond::{LinkMask, MaskProvenance};
use crate::error::{Error, Result};
use crate::graph::GeoGraph;
use crate::rng::rng_from_seed;
use rand::{Rng, RngExt};

/// Distribution family for a period length with a given mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodFamily {
    /// Exponential with the given mean (memoryless).
    Exponential,
    /// Always exactly the mean.
    Deterministic,
    /// Uniform on `[0, 2 * mean]`.
    Uniform,
}

impl PeriodFamily {
    pub fn name(&self) -> &'static str {
        match self {
            PeriodFamily::Exponential => "exponential",
            PeriodFamily::Deterministic => "deterministic",
            PeriodFamily::Uniform => "uniform",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exponential" => Some(PeriodFamily::Exponential),
            "deterministic" => Some(PeriodFamily::Deterministic),
            "uniform" => Some(PeriodFamily::Uniform),
            _ => None,
        }
    }
}

/// Mean period length as an affine function of link length:
/// `mean(d) = intercept + slope * d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFn {
    pub intercept: f64,
    pub slope: f64,
}

impl MeanFn {
    pub fn constant(value: f64) -> Self {
        MeanFn {
            intercept: value,
            slope: 0.0,
        }
    }

    pub fn affine(intercept: f64, slope: f64) -> Self {
        MeanFn { intercept, slope }
    }

    pub fn value(&self, d: f64) -> f64 {
        self.intercept + self.slope * d
    }

    /// Positive on all of (0, 1]? An affine function is positive there
    /// iff it is positive at both endpoints.
    fn positive_on_unit_interval(&self) -> bool {
        self.intercept > 0.0 && self.intercept + self.slope > 0.0
    }
}

/// A period-length law: a family plus a mean function of link length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodLaw {
    pub family: PeriodFamily,
    pub mean: MeanFn,
}

impl PeriodLaw {
    pub fn exponential(mean: MeanFn) -> Self {
        PeriodLaw {
            family: PeriodFamily::Exponential,
            mean,
        }
    }

    /// Draw an ordinary (full) period for a link of length `d`.
    pub fn sample<R: Rng + ?Sized>(&self, d: f64, rng: &mut R) -> f64 {
        let m = self.mean.value(d);
        match self.family {
            PeriodFamily::Exponential => -m * (1.0 - rng.random::<f64>()).ln(),
            PeriodFamily::Deterministic => m,
            PeriodFamily::Uniform => 2.0 * m * rng.random::<f64>(),
        }
    }

    /// Draw from the equilibrium (length-biased residual) distribution:
    /// the remaining period length seen by a stationary observer, with
    /// density `(1 - F(t)) / mean`.
    pub fn sample_equilibrium_residual<R: Rng + ?Sized>(&self, d: f64, rng: &mut R) -> f64 {
        let m = self.mean.value(d);
        let u = rng.random::<f64>();
        match self.family {
            // Memoryless: the residual is again exponential.
            PeriodFamily::Exponential => -m * (1.0 - u).ln(),
            PeriodFamily::Deterministic => m * u,
            // Inverse CDF of t/m - t^2/(4 m^2) on [0, 2m].
            PeriodFamily::Uniform => 2.0 * m * (1.0 - (1.0 - u).sqrt()),
        }
    }

    /// CDF of a full period at `t`.
    pub fn cdf(&self, d: f64, t: f64) -> f64 {
        let m = self.mean.value(d);
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            PeriodFamily::Exponential => 1.0 - (-t / m).exp(),
            PeriodFamily::Deterministic => {
                if t >= m {
                    1.0
                } else {
                    0.0
                }
            }
            PeriodFamily::Uniform => (t / (2.0 * m)).min(1.0),
        }
    }

    /// CDF of the equilibrium residual at `t`.
    pub fn equilibrium_residual_cdf(&self, d: f64, t: f64) -> f64 {
        let m = self.mean.value(d);
        if t <= 0.0 {
            return 0.0;
        }
        match self.family {
            PeriodFamily::Exponential => 1.0 - (-t / m).exp(),
            PeriodFamily::Deterministic => (t / m).min(1.0),
            PeriodFamily::Uniform => {
                let t = t.min(2.0 * m);
                t / m - t * t / (4.0 * m * m)
            }
        }
    }
}

/// On-off process specification: the inactive-period law `Y(d)` and the
/// active-period law `Z(d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffSpec {
    inactive: PeriodLaw,
    active: PeriodLaw,
}

impl OnOffSpec {
    /// Validates the stationarity assumptions: `E[Y(d)]` bounded away
    /// from 0 and finite on (0, 1], and `E[Z(d)] > 0` on (0, 1].
    pub fn new(inactive: PeriodLaw, active: PeriodLaw) -> Result<Self> {
        if !inactive.mean.intercept.is_finite() || !inactive.mean.slope.is_finite() {
            return Err(Error::InvalidOnOffSpec(
                "inactive mean must be finite".into(),
            ));
        }
        if !active.mean.intercept.is_finite() || !active.mean.slope.is_finite() {
            return Err(Error::InvalidOnOffSpec("active mean must be finite".into()));
        }
        if !inactive.mean.positive_on_unit_interval() {
            return Err(Error::InvalidOnOffSpec(
                "inactive mean E[Y(d)] must be positive on (0, 1]".into(),
            ));
        }
        if !active.mean.positive_on_unit_interval() {
            return Err(Error::InvalidOnOffSpec(
                "active mean E[Z(d)] must be positive on (0, 1]".into(),
            ));
        }
        Ok(OnOffSpec { inactive, active })
    }

    /// Exponential periods with means independent of link length.
    pub fn exponential_const(active_mean: f64, inactive_mean: f64) -> Result<Self> {
        OnOffSpec::new(
            PeriodLaw::exponential(MeanFn::constant(inactive_mean)),
            PeriodLaw::exponential(MeanFn::constant(active_mean)),
        )
    }

    pub fn inactive(&self) -> &PeriodLaw {
        &self.inactive
    }

    pub fn active(&self) -> &PeriodLaw {
        &self.active
    }

    pub fn is_exponential(&self) -> bool {
        self.inactive.family == PeriodFamily::Exponential
            && self.active.family == PeriodFamily::Exponential
    }

    /// Active ratio without the (0, 1] range check; used internally on
    /// link lengths, which are <= 1 by construction for radius-1 graphs.
    pub(crate) fn eta1_unchecked(&self, d: f64) -> f64 {
        let z = self.active.mean.value(d);
        let y = self.inactive.mean.value(d);
        z / (z + y)
    }

    pub(crate) fn eta0_unchecked(&self, d: f64) -> f64 {
        1.0 - self.eta1_unchecked(d)
    }

    /// CDF of the first-passage link delay (no propagation delay):
    /// an atom of mass `eta1(d)` at 0 plus `eta0(d)` times the
    /// equilibrium residual law of the inactive period.
    pub fn fpp_delay_cdf(&self, d: f64, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let eta1 = self.eta1_unchecked(d);
        eta1 + (1.0 - eta1) * self.inactive.equilibrium_residual_cdf(d, t)
    }
}

fn check_link_length(d: f64) -> Result<()> {
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::LinkLengthOutOfRange(d));
    }
    Ok(())
}

/// Stationary probability that a link of length `d` is active (eta1).
pub fn stationary_active_ratio(spec: &OnOffSpec, d: f64) -> Result<f64> {
    check_link_length(d)?;
    Ok(spec.eta1_unchecked(d))
}

/// Stationary probability that a link of length `d` is inactive (eta0).
pub fn stationary_inactive_ratio(spec: &OnOffSpec, d: f64) -> Result<f64> {
    check_link_length(d)?;
    Ok(spec.eta0_unchecked(d))
}

/// One per-link delay draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaySample {
    /// Delay in time units.
    pub value: f64,
    /// Whether the link was active at the query instant.
    pub active_at_query: bool,
}

/// Draw the first-passage delay of Eq.-(12) form for a link of length `d`.
pub fn sample_fpp_delay(spec: &OnOffSpec, d: f64, seed: u64) -> Result<DelaySample> {
    check_link_length(d)?;
    let mut rng = rng_from_seed(seed);
    Ok(sample_fpp_delay_with(spec, d, &mut rng))
}

pub(crate) fn sample_fpp_delay_with<R: Rng + ?Sized>(
    spec: &OnOffSpec,
    d: f64,
    rng: &mut R,
) -> DelaySample {
    let eta1 = spec.eta1_unchecked(d);
    if rng.random::<f64>() < eta1 {
        DelaySample {
            value: 0.0,
            active_at_query: true,
        }
    } else {
        DelaySample {
            value: spec.inactive.sample_equilibrium_residual(d, rng),
            active_at_query: false,
        }
    }
}

/// Draw the link delay with propagation delay `tau > 0`: alternating
/// periods are consumed until the first active period of length >= tau,
/// which then carries the transmission.
pub fn sample_propagation_delay(
    spec: &OnOffSpec,
    d: f64,
    tau: f64,
    seed: u64,
) -> Result<DelaySample> {
    check_link_length(d)?;
    check_tau(tau)?;
    let mut rng = rng_from_seed(seed);
    Ok(sample_propagation_delay_with(spec, d, tau, &mut rng))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::InvalidTau(tau));
    }
    Ok(())
}

pub(crate) fn sample_propagation_delay_with<R: Rng + ?Sized>(
    spec: &OnOffSpec,
    d: f64,
    tau: f64,
    rng: &mut R,
) -> DelaySample {
    let eta1 = spec.eta1_unchecked(d);
    let active_at_query = rng.random::<f64>() < eta1;
    let mut total = 0.0;
    if active_at_query {
        loop {
            let z = spec.active.sample(d, rng);
            if z >= tau {
                return DelaySample {
                    value: total + tau,
                    active_at_query,
                };
            }
            total += z + spec.inactive.sample(d, rng);
        }
    } else {
        loop {
            total += spec.inactive.sample(d, rng);
            let z = spec.active.sample(d, rng);
            if z >= tau {
                return DelaySample {
                    value: total + tau,
                    active_at_query,
                };
            }
            total += z;
        }
    }
}

/// Number of active periods consumed until one of length >= tau.
pub fn sample_retransmission_count(spec: &OnOffSpec, d: f64, tau: f64, seed: u64) -> Result<u64> {
    check_link_length(d)?;
    check_tau(tau)?;
    let mut rng = rng_from_seed(seed);
    Ok(sample_retransmission_count_with(spec, d, tau, &mut rng))
}

pub(crate) fn sample_retransmission_count_with<R: Rng + ?Sized>(
    spec: &OnOffSpec,
    d: f64,
    tau: f64,
    rng: &mut R,
) -> u64 {
    let mut k = 1;
    while spec.active.sample(d, rng) < tau {
        k += 1;
    }
    k
}

/// Sample a stationary snapshot of all link states: each link is active
/// independently with probability `eta1(length)`.
///
/// The k-th link consumes the k-th uniform draw, the same discipline as
/// `thin_links`, so a snapshot with seed `s` is bit-identical to thinning
/// with `p_e = eta1` and seed `s`.
pub fn sample_snapshot(graph: &GeoGraph, spec: &OnOffSpec, seed: u64) -> Result<LinkMask> {
    let mut rng = rng_from_seed(seed);
    let mut bits = Vec::with_capacity(graph.link_count());
    for link in graph.links() {
        if link.length > 1.0 {
            return Err(Error::LinkLengthOutOfRange(link.length));
        }
        let eta1 = spec.eta1_unchecked(link.length);
        bits.push(rng.random::<f64>() < eta1);
    }
    Ok(LinkMask::new(bits, MaskProvenance::Snapshot, seed))
}

/// Simulate the stationary on-off trajectory of one link out to `horizon`.
///
/// Starts in the stationary state (state by `(eta1, eta0)`, initial
/// duration from the equilibrium residual law), then alternates ordinary
/// draws. The final duration is truncated at the horizon. Entries are
/// `(active, duration)`.
pub fn simulate_trajectory(
    spec: &OnOffSpec,
    d: f64,
    horizon: f64,
    seed: u64,
) -> Result<Vec<(bool, f64)>> {
    check_link_length(d)?;
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(Error::InvalidHorizon(horizon));
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    let mut t = 0.0;
    let mut active = rng.random::<f64>() < spec.eta1_unchecked(d);
    let mut duration = if active {
        spec.active.sample_equilibrium_residual(d, &mut rng)
    } else {
        spec.inactive.sample_equilibrium_residual(d, &mut rng)
    };
    loop {
        if t + duration >= horizon {
            out.push((active, horizon - t));
            return Ok(out);
        }
        out.push((active, duration));
        t += duration;
        active = !active;
        duration = if active {
            spec.active.sample(d, &mut rng)
        } else {
            spec.inactive.sample(d, &mut rng)
        };
    }
}
