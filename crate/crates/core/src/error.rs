//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid region: require x_max > x_min and y_max > y_min, got [{x_min}, {x_max}] x [{y_min}, {y_max}]")]
    InvalidRegion {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },

    #[error("density must be >= 0 and finite, got {0}")]
    InvalidDensity(f64),

    #[error("position ({x}, {y}) lies outside the region")]
    PositionOutsideRegion { x: f64, y: f64 },

    #[error("radius must be > 0 and finite, got {0}")]
    InvalidRadius(f64),

    #[error("link mask has {mask_len} bits but the graph has {link_count} links")]
    MaskLengthMismatch { mask_len: usize, link_count: usize },

    #[error("unknown component id {0}")]
    UnknownComponent(usize),

    #[error("node id {id} out of range (graph has {node_count} nodes)")]
    InvalidNode { id: usize, node_count: usize },

    #[error("link probability invalid: {0}")]
    InvalidLinkProbability(String),

    #[error("on-off spec invalid: {0}")]
    InvalidOnOffSpec(String),

    #[error("link length must lie in (0, 1], got {0}")]
    LinkLengthOutOfRange(f64),

    #[error("propagation delay tau must lie in (0, inf), got {0}")]
    InvalidTau(f64),

    #[error("horizon must be > 0, got {0}")]
    InvalidHorizon(f64),

    #[error("event-driven broadcast requires exponential active and inactive laws")]
    NonExponentialSpec,

    #[error("no percolation bracket in lambda range [{lo}, {hi}]: crossing probability is {p_lo:.3} at {lo} and {p_hi:.3} at {hi}; link probability may be degenerate")]
    BracketNotFound { lo: f64, hi: f64, p_lo: f64, p_hi: f64 },

    #[error("circuit half-length m must lie in [2, 8], got {0}")]
    CircuitSizeOutOfRange(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error(s):\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
