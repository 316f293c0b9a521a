//! Simulation toolkit for continuum percolation and first-passage
//! information-dissemination delay on random geometric graphs with
//! Markov on-off links.
//!
//! The crate is organized around a pipeline of immutable values:
//!
//! * [`geometry`] samples Poisson point clouds in rectangular regions,
//! * [`graph`] builds the random geometric graph `G(cloud, radius)`,
//! * [`bond`] thins links independently (random connection model) and
//!   estimates critical densities and subcritical decay profiles,
//! * [`dynamics`] models per-link Markov on-off processes and the
//!   induced first-passage and propagation delay laws,
//! * [`components`] labels connected components and detects rectangle
//!   crossings,
//! * [`fpp`] computes minimum-delay paths over sampled delay fields and
//!   estimates the delay-per-distance constant gamma,
//! * [`lattice`] exactly enumerates origin-surrounding lattice circuits,
//! * [`experiment`] wires everything into reproducible batch runs.
//!
//! Everything is deterministic per seed: replicate-level parallelism uses
//! per-replicate ChaCha streams derived from the master seed and merges
//! results in replicate order, so outputs do not depend on thread count.

pub mod bond;
pub mod components;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fpp;
pub mod geometry;
pub mod graph;
pub mod lattice;
pub mod rng;
pub mod stats;

pub use bond::{thin_links, CriticalDensityEstimate, LinkMask, LinkProbability, MaskProvenance};
pub use components::{crossing_exists, label_components, ComponentLabeling, CrossingSpec};
pub use dynamics::{DelaySample, MeanFn, OnOffSpec, PeriodFamily, PeriodLaw};
pub use error::{Error, Result};
pub use fpp::{min_delay, sample_delay_field, DelayField, GammaEstimate, RatioCurve};
pub use geometry::{sample_poisson, Point, PointCloud, Region};
pub use graph::{build_graph, GeoGraph};
pub use lattice::{enumerate_surrounding_circuits, CircuitCount};
