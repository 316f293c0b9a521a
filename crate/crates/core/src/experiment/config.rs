//! Line-oriented experiment configuration.
//!
//! The format is `key = value` lines under `[section]` headers, with `#`
//! comments. Sections: `[experiment]` (always), `[on_off]` (on-off
//! process), `[link_prob]` (static link probability). Unknown sections or
//! keys are errors — there is no silent typo acceptance — and validation
//! reports every problem, not just the first.

use crate::bond::LinkProbability;
use crate::dynamics::{MeanFn, OnOffSpec, PeriodFamily, PeriodLaw};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::PathBuf;

/// Which named experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SweepCritical,
    Decay,
    RatioCurve,
    GammaTau,
    Circuits,
    SnapshotEquiv,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SweepCritical => "sweep_critical",
            ExperimentKind::Decay => "decay",
            ExperimentKind::RatioCurve => "ratio_curve",
            ExperimentKind::GammaTau => "gamma_tau",
            ExperimentKind::Circuits => "circuits",
            ExperimentKind::SnapshotEquiv => "snapshot_equiv",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "sweep_critical" => Some(ExperimentKind::SweepCritical),
            "decay" => Some(ExperimentKind::Decay),
            "ratio_curve" => Some(ExperimentKind::RatioCurve),
            "gamma_tau" => Some(ExperimentKind::GammaTau),
            "circuits" => Some(ExperimentKind::Circuits),
            "snapshot_equiv" => Some(ExperimentKind::SnapshotEquiv),
            _ => None,
        }
    }
}

/// A validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub density: Option<f64>,
    pub densities: Option<Vec<f64>>,
    pub window_side: Option<f64>,
    pub window_sides: Option<Vec<f64>>,
    pub replicates: Option<usize>,
    pub pairs_per_band: Option<usize>,
    pub tau: Option<f64>,
    pub tau_values: Option<Vec<f64>>,
    pub h_values: Option<Vec<f64>>,
    pub m_max: Option<u32>,
    pub tolerance: Option<f64>,
    pub lambda_c_hint: Option<f64>,
    pub top_fraction: f64,
    pub svg: bool,
    pub on_off: Option<OnOffSpec>,
    pub link_prob: Option<LinkProbability>,
}

#[derive(Default)]
struct RawOnOff {
    inactive_family: Option<String>,
    inactive_mean_intercept: Option<f64>,
    inactive_mean_slope: f64,
    active_family: Option<String>,
    active_mean_intercept: Option<f64>,
    active_mean_slope: f64,
    present: bool,
}

#[derive(Default)]
struct RawLinkProb {
    kind: Option<String>,
    p: Option<f64>,
    intercept: Option<f64>,
    slope: Option<f64>,
    table: Option<String>,
    present: bool,
}

fn parse_f64(key: &str, value: &str, errors: &mut Vec<String>) -> Option<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        _ => {
            errors.push(format!("{key}: expected a finite number, got '{value}'"));
            None
        }
    }
}

fn parse_list(key: &str, value: &str, errors: &mut Vec<String>) -> Option<Vec<f64>> {
    let mut out = Vec::new();
    for item in value.split(',') {
        match item.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => {
                errors.push(format!("{key}: bad list element '{}'", item.trim()));
                return None;
            }
        }
    }
    if out.is_empty() {
        errors.push(format!("{key}: empty list"));
        return None;
    }
    Some(out)
}

/// Parse and validate a config text. On failure returns the exhaustive
/// error list wrapped in `Error::Config`.
pub fn validate_config(text: &str) -> Result<ExperimentConfig> {
    let mut errors: Vec<String> = Vec::new();

    let mut kind: Option<ExperimentKind> = None;
    let mut master_seed: Option<u64> = None;
    let mut output_dir: Option<PathBuf> = None;
    let mut density = None;
    let mut densities = None;
    let mut window_side = None;
    let mut window_sides = None;
    let mut replicates: Option<usize> = None;
    let mut pairs_per_band: Option<usize> = None;
    let mut tau = None;
    let mut tau_values = None;
    let mut h_values = None;
    let mut m_max: Option<u32> = None;
    let mut tolerance = None;
    let mut lambda_c_hint = None;
    let mut top_fraction = 0.25;
    let mut svg = false;
    let mut raw_on_off = RawOnOff::default();
    let mut raw_link_prob = RawLinkProb::default();

    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Experiment,
        OnOff,
        LinkProb,
    }
    let mut section = Section::None;

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "experiment" => Section::Experiment,
                "on_off" => {
                    raw_on_off.present = true;
                    Section::OnOff
                }
                "link_prob" => {
                    raw_link_prob.present = true;
                    Section::LinkProb
                }
                other => {
                    errors.push(format!("line {}: unknown section [{other}]", lineno + 1));
                    Section::None
                }
            };
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {}: expected 'key = value'", lineno + 1));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        match section {
            Section::None => {
                errors.push(format!(
                    "line {}: key '{key}' outside any [section]",
                    lineno + 1
                ));
            }
            Section::Experiment => match key {
                "kind" => match ExperimentKind::parse(value) {
                    Some(k) => kind = Some(k),
                    None => errors.push(format!("kind: unknown experiment '{value}'")),
                },
                "master_seed" => match value.parse::<u64>() {
                    Ok(v) => master_seed = Some(v),
                    Err(_) => errors.push(format!("master_seed: expected u64, got '{value}'")),
                },
                "output_dir" => output_dir = Some(PathBuf::from(value)),
                "density" => density = parse_f64(key, value, &mut errors),
                "densities" => densities = parse_list(key, value, &mut errors),
                "window_side" => window_side = parse_f64(key, value, &mut errors),
                "window_sides" => window_sides = parse_list(key, value, &mut errors),
                "replicates" => match value.parse::<usize>() {
                    Ok(v) if v >= 1 => replicates = Some(v),
                    _ => errors.push(format!("replicates: expected integer >= 1, got '{value}'")),
                },
                "pairs_per_band" => match value.parse::<usize>() {
                    Ok(v) if v >= 1 => pairs_per_band = Some(v),
                    _ => {
                        errors.push(format!("pairs_per_band: expected integer >= 1, got '{value}'"))
                    }
                },
                "tau" => {
                    if let Some(v) = parse_f64(key, value, &mut errors) {
                        if v < 0.0 {
                            errors.push(format!("tau: must be >= 0, got {v}"));
                        } else {
                            tau = Some(v);
                        }
                    }
                }
                "tau_values" => tau_values = parse_list(key, value, &mut errors),
                "h_values" => h_values = parse_list(key, value, &mut errors),
                "m_max" => match value.parse::<u32>() {
                    Ok(v) => m_max = Some(v),
                    Err(_) => errors.push(format!("m_max: expected integer, got '{value}'")),
                },
                "tolerance" => {
                    if let Some(v) = parse_f64(key, value, &mut errors) {
                        if v <= 0.0 {
                            errors.push(format!("tolerance: must be > 0, got {v}"));
                        } else {
                            tolerance = Some(v);
                        }
                    }
                }
                "lambda_c_hint" => lambda_c_hint = parse_f64(key, value, &mut errors),
                "top_fraction" => {
                    if let Some(v) = parse_f64(key, value, &mut errors) {
                        if v <= 0.0 || v > 1.0 {
                            errors.push(format!("top_fraction: must lie in (0, 1], got {v}"));
                        } else {
                            top_fraction = v;
                        }
                    }
                }
                "svg" => match value {
                    "true" => svg = true,
                    "false" => svg = false,
                    _ => errors.push(format!("svg: expected true or false, got '{value}'")),
                },
                other => errors.push(format!("[experiment]: unknown key '{other}'")),
            },
            Section::OnOff => match key {
                "inactive_family" => raw_on_off.inactive_family = Some(value.to_string()),
                "inactive_mean_intercept" => {
                    raw_on_off.inactive_mean_intercept = parse_f64(key, value, &mut errors)
                }
                "inactive_mean_slope" => {
                    raw_on_off.inactive_mean_slope =
                        parse_f64(key, value, &mut errors).unwrap_or(0.0)
                }
                "active_family" => raw_on_off.active_family = Some(value.to_string()),
                "active_mean_intercept" => {
                    raw_on_off.active_mean_intercept = parse_f64(key, value, &mut errors)
                }
                "active_mean_slope" => {
                    raw_on_off.active_mean_slope =
                        parse_f64(key, value, &mut errors).unwrap_or(0.0)
                }
                other => errors.push(format!("[on_off]: unknown key '{other}'")),
            },
            Section::LinkProb => match key {
                "kind" => raw_link_prob.kind = Some(value.to_string()),
                "p" => raw_link_prob.p = parse_f64(key, value, &mut errors),
                "intercept" => raw_link_prob.intercept = parse_f64(key, value, &mut errors),
                "slope" => raw_link_prob.slope = parse_f64(key, value, &mut errors),
                "table" => raw_link_prob.table = Some(value.to_string()),
                other => errors.push(format!("[link_prob]: unknown key '{other}'")),
            },
        }
    }

    // assemble the on-off spec
    let on_off = if raw_on_off.present {
        let family = |name: &Option<String>, which: &str, errors: &mut Vec<String>| {
            name.as_deref()
                .map(|s| {
                    PeriodFamily::parse(s).ok_or_else(|| {
                        format!("[on_off] {which}_family: unknown family '{s}'")
                    })
                })
                .unwrap_or_else(|| Err(format!("[on_off]: missing {which}_family")))
                .map_err(|e| errors.push(e))
                .ok()
        };
        let inactive_family = family(&raw_on_off.inactive_family, "inactive", &mut errors);
        let active_family = family(&raw_on_off.active_family, "active", &mut errors);
        let inactive_mean = raw_on_off.inactive_mean_intercept.or_else(|| {
            errors.push("[on_off]: missing inactive_mean_intercept".into());
            None
        });
        let active_mean = raw_on_off.active_mean_intercept.or_else(|| {
            errors.push("[on_off]: missing active_mean_intercept".into());
            None
        });
        match (inactive_family, active_family, inactive_mean, active_mean) {
            (Some(inf), Some(af), Some(im), Some(am)) => {
                match OnOffSpec::new(
                    PeriodLaw {
                        family: inf,
                        mean: MeanFn::affine(im, raw_on_off.inactive_mean_slope),
                    },
                    PeriodLaw {
                        family: af,
                        mean: MeanFn::affine(am, raw_on_off.active_mean_slope),
                    },
                ) {
                    Ok(spec) => Some(spec),
                    Err(e) => {
                        errors.push(format!("[on_off]: {e}"));
                        None
                    }
                }
            }
            _ => None,
        }
    } else {
        None
    };

    // assemble the link probability
    let link_prob = if raw_link_prob.present {
        match raw_link_prob.kind.as_deref() {
            Some("constant") => match raw_link_prob.p {
                Some(p) => Some(LinkProbability::Constant(p)),
                None => {
                    errors.push("[link_prob]: constant kind requires key 'p'".into());
                    None
                }
            },
            Some("affine_in_d") => {
                match (raw_link_prob.intercept, raw_link_prob.slope) {
                    (Some(intercept), Some(slope)) => {
                        Some(LinkProbability::AffineInLength { intercept, slope })
                    }
                    _ => {
                        errors.push(
                            "[link_prob]: affine_in_d requires keys 'intercept' and 'slope'"
                                .into(),
                        );
                        None
                    }
                }
            }
            Some("table") => match &raw_link_prob.table {
                Some(spec) => {
                    let mut knots = Vec::new();
                    let mut ok = true;
                    for item in spec.split(',') {
                        match item.trim().split_once(':').map(|(d, p)| {
                            (d.trim().parse::<f64>(), p.trim().parse::<f64>())
                        }) {
                            Some((Ok(d), Ok(p))) => knots.push((d, p)),
                            _ => {
                                errors.push(format!(
                                    "[link_prob] table: bad knot '{}'; expected d:p",
                                    item.trim()
                                ));
                                ok = false;
                            }
                        }
                    }
                    if ok {
                        Some(LinkProbability::Table(knots))
                    } else {
                        None
                    }
                }
                None => {
                    errors.push("[link_prob]: table kind requires key 'table'".into());
                    None
                }
            },
            Some("active_ratio") => match on_off {
                Some(spec) => Some(LinkProbability::ActiveRatio(spec)),
                None => {
                    errors.push("[link_prob]: active_ratio requires an [on_off] section".into());
                    None
                }
            },
            Some(other) => {
                errors.push(format!("[link_prob]: unknown kind '{other}'"));
                None
            }
            None => {
                errors.push("[link_prob]: missing key 'kind'".into());
                None
            }
        }
    } else {
        None
    };
    if let Some(lp) = &link_prob {
        if let Err(e) = lp.validate() {
            errors.push(format!("[link_prob]: {e}"));
        }
    }

    // kind-specific requirements
    let require = |present: bool, what: &str, errors: &mut Vec<String>| {
        if !present {
            errors.push(format!("missing required key: {what}"));
        }
    };
    if let Some(kind) = kind {
        match kind {
            ExperimentKind::SweepCritical => {
                require(link_prob.is_some(), "[link_prob] section", &mut errors);
                require(
                    window_sides.is_some() || window_side.is_some(),
                    "window_sides (or window_side)",
                    &mut errors,
                );
                require(replicates.is_some(), "replicates", &mut errors);
                require(tolerance.is_some(), "tolerance", &mut errors);
            }
            ExperimentKind::Decay => {
                require(link_prob.is_some(), "[link_prob] section", &mut errors);
                require(density.is_some(), "density", &mut errors);
                require(h_values.is_some(), "h_values", &mut errors);
                require(replicates.is_some(), "replicates", &mut errors);
                if let Some(h) = &h_values {
                    if h.windows(2).any(|w| w[1] <= w[0]) {
                        errors.push("h_values: must be strictly increasing".into());
                    }
                }
            }
            ExperimentKind::RatioCurve => {
                require(on_off.is_some(), "[on_off] section", &mut errors);
                require(density.is_some(), "density", &mut errors);
                require(window_side.is_some(), "window_side", &mut errors);
                require(replicates.is_some(), "replicates", &mut errors);
                require(pairs_per_band.is_some(), "pairs_per_band", &mut errors);
                require(tau.is_some(), "tau", &mut errors);
            }
            ExperimentKind::GammaTau => {
                require(on_off.is_some(), "[on_off] section", &mut errors);
                require(density.is_some(), "density", &mut errors);
                require(window_side.is_some(), "window_side", &mut errors);
                require(replicates.is_some(), "replicates", &mut errors);
                require(pairs_per_band.is_some(), "pairs_per_band", &mut errors);
                require(tau_values.is_some(), "tau_values", &mut errors);
                if let Some(ts) = &tau_values {
                    if ts.iter().any(|&t| t <= 0.0) {
                        errors.push("tau_values: must be positive".into());
                    }
                    if ts.windows(2).any(|w| w[1] >= w[0]) {
                        errors.push("tau_values: must be strictly decreasing".into());
                    }
                }
            }
            ExperimentKind::Circuits => {
                require(m_max.is_some(), "m_max", &mut errors);
                if let Some(m) = m_max {
                    if !(2..=8).contains(&m) {
                        errors.push(format!("m_max: must lie in [2, 8], got {m}"));
                    }
                }
            }
            ExperimentKind::SnapshotEquiv => {
                require(on_off.is_some(), "[on_off] section", &mut errors);
                require(densities.is_some(), "densities", &mut errors);
                require(window_side.is_some(), "window_side", &mut errors);
                require(replicates.is_some(), "replicates", &mut errors);
            }
        }
    } else {
        errors.push("missing required key: kind (in [experiment])".into());
    }
    if master_seed.is_none() {
        errors.push("missing required key: master_seed".into());
    }
    if output_dir.is_none() {
        errors.push("missing required key: output_dir".into());
    }

    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    Ok(ExperimentConfig {
        kind: kind.unwrap(),
        master_seed: master_seed.unwrap(),
        output_dir: output_dir.unwrap(),
        density,
        densities,
        window_side,
        window_sides,
        replicates,
        pairs_per_band,
        tau,
        tau_values,
        h_values,
        m_max,
        tolerance,
        lambda_c_hint,
        top_fraction,
        svg,
        on_off,
        link_prob,
    })
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    /// Canonical serialization; `validate_config(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "kind = {}", self.kind.name());
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        if let Some(v) = self.density {
            let _ = writeln!(s, "density = {v}");
        }
        if let Some(v) = &self.densities {
            let _ = writeln!(s, "densities = {}", fmt_list(v));
        }
        if let Some(v) = self.window_side {
            let _ = writeln!(s, "window_side = {v}");
        }
        if let Some(v) = &self.window_sides {
            let _ = writeln!(s, "window_sides = {}", fmt_list(v));
        }
        if let Some(v) = self.replicates {
            let _ = writeln!(s, "replicates = {v}");
        }
        if let Some(v) = self.pairs_per_band {
            let _ = writeln!(s, "pairs_per_band = {v}");
        }
        if let Some(v) = self.tau {
            let _ = writeln!(s, "tau = {v}");
        }
        if let Some(v) = &self.tau_values {
            let _ = writeln!(s, "tau_values = {}", fmt_list(v));
        }
        if let Some(v) = &self.h_values {
            let _ = writeln!(s, "h_values = {}", fmt_list(v));
        }
        if let Some(v) = self.m_max {
            let _ = writeln!(s, "m_max = {v}");
        }
        if let Some(v) = self.tolerance {
            let _ = writeln!(s, "tolerance = {v}");
        }
        if let Some(v) = self.lambda_c_hint {
            let _ = writeln!(s, "lambda_c_hint = {v}");
        }
        if self.top_fraction != 0.25 {
            let _ = writeln!(s, "top_fraction = {}", self.top_fraction);
        }
        if self.svg {
            let _ = writeln!(s, "svg = true");
        }
        if let Some(spec) = &self.on_off {
            let _ = writeln!(s, "\n[on_off]");
            let _ = writeln!(s, "inactive_family = {}", spec.inactive().family.name());
            let _ = writeln!(
                s,
                "inactive_mean_intercept = {}",
                spec.inactive().mean.intercept
            );
            if spec.inactive().mean.slope != 0.0 {
                let _ = writeln!(s, "inactive_mean_slope = {}", spec.inactive().mean.slope);
            }
            let _ = writeln!(s, "active_family = {}", spec.active().family.name());
            let _ = writeln!(s, "active_mean_intercept = {}", spec.active().mean.intercept);
            if spec.active().mean.slope != 0.0 {
                let _ = writeln!(s, "active_mean_slope = {}", spec.active().mean.slope);
            }
        }
        if let Some(lp) = &self.link_prob {
            let _ = writeln!(s, "\n[link_prob]");
            match lp {
                LinkProbability::Constant(p) => {
                    let _ = writeln!(s, "kind = constant");
                    let _ = writeln!(s, "p = {p}");
                }
                LinkProbability::AffineInLength { intercept, slope } => {
                    let _ = writeln!(s, "kind = affine_in_d");
                    let _ = writeln!(s, "intercept = {intercept}");
                    let _ = writeln!(s, "slope = {slope}");
                }
                LinkProbability::Table(knots) => {
                    let _ = writeln!(s, "kind = table");
                    let knot_str = knots
                        .iter()
                        .map(|(d, p)| format!("{d}:{p}"))
                        .collect::<Vec<_>>()
                        .join(",");
                    let _ = writeln!(s, "table = {knot_str}");
                }
                LinkProbability::ActiveRatio(_) => {
                    let _ = writeln!(s, "kind = active_ratio");
                }
            }
        }
        s
    }
}
