//! Experiment dispatch: run a validated config, write CSVs and the
//! machine-readable summary.

use super::config::{ExperimentConfig, ExperimentKind};
use super::svg::write_ratio_scatter_svg;
use crate::bond::{
    connection_decay_profile, estimate_critical_density, fit_exponential_decay, thin_links,
    LinkProbability,
};
use crate::components::label_components;
use crate::dynamics::sample_snapshot;
use crate::error::Result;
use crate::fpp::{delay_ratio_curve, estimate_gamma, gamma_tau_study, RatioCurveParams};
use crate::geometry::{sample_poisson, Region};
use crate::graph::build_graph;
use crate::lattice::enumerate_surrounding_circuits;
use crate::rng::derive_seed;
use crate::stats;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

/// Everything an experiment run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Ordered `key = value` pairs, as written to the summary file.
    pub summary: Vec<(String, String)>,
    pub summary_path: PathBuf,
    pub csv_paths: Vec<PathBuf>,
}

impl RunOutcome {
    /// Look up a summary value by key.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

struct Emitter {
    dir: PathBuf,
    summary: Vec<(String, String)>,
    csv_paths: Vec<PathBuf>,
}

impl Emitter {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn write_csv(&mut self, name: &str, comments: &[String], header: &str, rows: &[String]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        for c in comments {
            writeln!(f, "# {c}")?;
        }
        writeln!(f, "{header}")?;
        for row in rows {
            writeln!(f, "{row}")?;
        }
        f.flush()?;
        self.csv_paths.push(path.clone());
        Ok(path)
    }
}

/// Run one experiment. Creates the output directory, writes the CSV
/// outputs named by the experiment kind, an optional SVG, and
/// `summary.txt` with every estimate, the config echo, the toolkit
/// version, and the wall-clock time.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    std::fs::create_dir_all(&config.output_dir)?;
    let mut em = Emitter {
        dir: config.output_dir.clone(),
        summary: Vec::new(),
        csv_paths: Vec::new(),
    };
    em.put("toolkit_version", env!("CARGO_PKG_VERSION"));
    em.put("experiment", config.kind.name());
    em.put("master_seed", config.master_seed);

    match config.kind {
        ExperimentKind::SweepCritical => run_sweep_critical(config, &mut em)?,
        ExperimentKind::Decay => run_decay(config, &mut em)?,
        ExperimentKind::RatioCurve => run_ratio_curve(config, &mut em)?,
        ExperimentKind::GammaTau => run_gamma_tau(config, &mut em)?,
        ExperimentKind::Circuits => run_circuits(config, &mut em)?,
        ExperimentKind::SnapshotEquiv => run_snapshot_equiv(config, &mut em)?,
    }

    em.put("wall_clock_seconds", format!("{:.3}", start.elapsed().as_secs_f64()));

    let summary_path = config.output_dir.join("summary.txt");
    let mut text = String::new();
    for (k, v) in &em.summary {
        let _ = writeln!(text, "{k} = {v}");
    }
    let _ = writeln!(text, "\n# config echo");
    for line in config.serialize().lines() {
        if line.is_empty() || line.starts_with('[') {
            let _ = writeln!(text, "# {line}");
        } else {
            let _ = writeln!(text, "config.{line}");
        }
    }
    std::fs::write(&summary_path, text)?;

    Ok(RunOutcome {
        summary: em.summary,
        summary_path,
        csv_paths: em.csv_paths,
    })
}

fn run_sweep_critical(config: &ExperimentConfig, em: &mut Emitter) -> Result<()> {
    let prob = config.link_prob.as_ref().expect("validated");
    let replicates = config.replicates.expect("validated");
    let tolerance = config.tolerance.expect("validated");
    let sides: Vec<f64> = config
        .window_sides
        .clone()
        .unwrap_or_else(|| vec![config.window_side.expect("validated")]);

    let mut estimates = Vec::new();
    for (i, &side) in sides.iter().enumerate() {
        let (est, probes) = estimate_critical_density(
            prob,
            side,
            replicates,
            tolerance,
            derive_seed(config.master_seed, &[10, i as u64]),
        )?;
        let rows: Vec<String> = probes
            .iter()
            .map(|p| format!("{},{},{}", p.lambda, p.p_cross, p.ci))
            .collect();
        em.write_csv(&format!("sweep_w{side}.csv"), &[], "lambda,p_cross,ci", &rows)?;
        em.put(&format!("lambda_hat_w{side}"), est.lambda_hat);
        em.put(&format!("lambda_ci_w{side}"), est.ci);
        estimates.push(est);
    }
    let last = estimates.last().expect("at least one side");
    em.put("lambda_hat", last.lambda_hat);
    if estimates.len() >= 2 {
        let drift = (last.lambda_hat - estimates[0].lambda_hat).abs();
        em.put("finite_size_drift", drift);
        em.put("lambda_ci_total", last.ci + drift);
    } else {
        em.put("lambda_ci_total", last.ci);
    }
    Ok(())
}

fn run_decay(config: &ExperimentConfig, em: &mut Emitter) -> Result<()> {
    let prob = config.link_prob.as_ref().expect("validated");
    let density = config.density.expect("validated");
    let h_values = config.h_values.as_ref().expect("validated");
    let replicates = config.replicates.expect("validated");

    let hint = match config.lambda_c_hint {
        Some(h) => Some(h),
        None => {
            // coarse reference estimate so the supercritical warning can fire
            let (est, _) = estimate_critical_density(
                prob,
                20.0,
                60,
                0.2,
                derive_seed(config.master_seed, &[20]),
            )?;
            em.put("lambda_c_coarse_estimate", est.lambda_hat);
            Some(est.lambda_hat)
        }
    };

    let profile = connection_decay_profile(
        density,
        prob,
        h_values,
        replicates,
        derive_seed(config.master_seed, &[21]),
        hint,
    )?;
    let fit = fit_exponential_decay(&profile);
    let mut comments = Vec::new();
    if let Some(f) = &fit {
        comments.push(format!(
            "fitted_c1 = {}, fitted_c2 = {}, r_squared = {}",
            f.c1, f.c2, f.r_squared
        ));
    }
    let rows: Vec<String> = profile
        .points
        .iter()
        .map(|p| format!("{},{},{}", p.h, p.p_conn, p.ci))
        .collect();
    em.write_csv("decay.csv", &comments, "h,p_conn,ci", &rows)?;
    em.put("supercritical_warning", profile.supercritical_warning);
    if let Some(f) = fit {
        em.put("fitted_c1", f.c1);
        em.put("fitted_c2", f.c2);
        em.put("r_squared", f.r_squared);
        em.put("slope_negative", f.c2 > 0.0);
    }
    Ok(())
}

fn run_ratio_curve(config: &ExperimentConfig, em: &mut Emitter) -> Result<()> {
    let curve = delay_ratio_curve(&RatioCurveParams {
        density: config.density.expect("validated"),
        spec: *config.on_off.as_ref().expect("validated"),
        tau: config.tau.expect("validated"),
        window_side: config.window_side.expect("validated"),
        pairs_per_band: config.pairs_per_band.expect("validated"),
        replicates: config.replicates.expect("validated"),
        seed: derive_seed(config.master_seed, &[30]),
    })?;
    let est = estimate_gamma(&curve, config.top_fraction)?;
    let rows: Vec<String> = curve
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.replicate, r.source, r.target, r.distance, r.delay, r.ratio
            )
        })
        .collect();
    em.write_csv(
        "ratio_curve.csv",
        &[],
        "replicate,source,target,distance,delay,ratio",
        &rows,
    )?;
    if config.svg {
        let path = config.output_dir.join("ratio_curve.svg");
        write_ratio_scatter_svg(&curve, est.gamma_hat, &path)?;
    }
    em.put("gamma_hat", est.gamma_hat);
    em.put("gamma_ci", est.ci);
    em.put("converged_flag", est.converged);
    em.put("rows_used", est.rows_used);
    em.put("rows_total", curve.rows.len());
    em.put("discarded_replicates", curve.discarded_replicates);
    Ok(())
}

fn run_gamma_tau(config: &ExperimentConfig, em: &mut Emitter) -> Result<()> {
    let table = gamma_tau_study(
        config.density.expect("validated"),
        config.on_off.as_ref().expect("validated"),
        config.tau_values.as_ref().expect("validated"),
        config.window_side.expect("validated"),
        config.pairs_per_band.expect("validated"),
        config.replicates.expect("validated"),
        derive_seed(config.master_seed, &[40]),
    )?;
    let rows: Vec<String> = table
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.tau,
                r.gamma_hat,
                r.gamma_hat - r.ci,
                r.gamma_hat + r.ci,
                r.converged
            )
        })
        .collect();
    em.write_csv(
        "gamma_tau.csv",
        &[],
        "tau,gamma_hat,ci_lo,ci_hi,converged_flag",
        &rows,
    )?;
    for r in &table {
        em.put(&format!("gamma_hat[{}]", r.tau), r.gamma_hat);
        em.put(&format!("gamma_ci[{}]", r.tau), r.ci);
        em.put(&format!("converged[{}]", r.tau), r.converged);
    }
    Ok(())
}

fn run_circuits(config: &ExperimentConfig, em: &mut Emitter) -> Result<()> {
    let m_max = config.m_max.expect("validated");
    let mut rows = Vec::new();
    let mut all_within = true;
    for m in 2..=m_max {
        let c = enumerate_surrounding_circuits(m)?;
        all_within &= c.count <= c.bound;
        rows.push(format!(
            "{},{},{},{}",
            c.m,
            c.count,
            c.bound,
            c.count as f64 / c.bound as f64
        ));
        em.put(&format!("count[{m}]"), c.count);
    }
    em.write_csv("circuits.csv", &[], "m,count,bound,ratio", &rows)?;
    em.put("all_within_bound", all_within);
    Ok(())
}

fn run_snapshot_equiv(config: &ExperimentConfig, em: &mut Emitter) -> Result<()> {
    let spec = config.on_off.as_ref().expect("validated");
    let densities = config.densities.as_ref().expect("validated");
    let window_side = config.window_side.expect("validated");
    let replicates = config.replicates.expect("validated");
    let region = Region::square(window_side)?;
    let prob = LinkProbability::ActiveRatio(*spec);

    let mut rows = Vec::new();
    let mut all_agree = true;
    for (li, &lambda) in densities.iter().enumerate() {
        let fractions: Result<Vec<(f64, f64)>> = (0..replicates)
            .into_par_iter()
            .map(|rep| {
                let base = derive_seed(config.master_seed, &[50, li as u64, rep as u64]);
                let cloud = sample_poisson(region, lambda, derive_seed(base, &[0]))?;
                let graph = build_graph(&cloud, 1.0)?;
                let snap = sample_snapshot(&graph, spec, derive_seed(base, &[1]))?;
                let thin = thin_links(&graph, &prob, derive_seed(base, &[2]))?;
                let f_snap = label_components(&graph, Some(&snap))?.largest_fraction();
                let f_thin = label_components(&graph, Some(&thin))?.largest_fraction();
                Ok((f_snap, f_thin))
            })
            .collect();
        let fractions = fractions?;
        let snap: Vec<f64> = fractions.iter().map(|f| f.0).collect();
        let thin: Vec<f64> = fractions.iter().map(|f| f.1).collect();
        let (ms, cs) = (stats::mean(&snap), stats::mean_ci_halfwidth(&snap));
        let (mt, ct) = (stats::mean(&thin), stats::mean_ci_halfwidth(&thin));
        let agree = (ms - mt).abs() <= cs + ct;
        all_agree &= agree;
        rows.push(format!("{lambda},{ms},{cs},{mt},{ct},{agree}"));
        em.put(&format!("frac_snapshot[{lambda}]"), ms);
        em.put(&format!("frac_thinned[{lambda}]"), mt);
        em.put(&format!("agree[{lambda}]"), agree);
    }
    em.write_csv(
        "snapshot_equiv.csv",
        &[],
        "lambda,frac_snapshot,ci_snapshot,frac_thinned,ci_thinned,agree",
        &rows,
    )?;
    em.put("all_agree", all_agree);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::validate_config;

    #[test]
    fn circuits_experiment_writes_csv_and_summary() {
        let dir = std::env::temp_dir().join("perc_fpp_runner_circuits");
        let _ = std::fs::remove_dir_all(&dir);
        let text = format!(
            "[experiment]\nkind = circuits\nmaster_seed = 1\noutput_dir = {}\nm_max = 5\n",
            dir.display()
        );
        let cfg = validate_config(&text).unwrap();
        let outcome = run_experiment(&cfg).unwrap();
        assert_eq!(outcome.get("all_within_bound"), Some("true"));
        let csv = std::fs::read_to_string(dir.join("circuits.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,count,bound,ratio");
        assert_eq!(lines.len(), 5, "4 rows for m = 2..=5");
        assert!(lines[1].starts_with("2,1,12,"));
        assert!(lines[2].starts_with("3,4,216,"));
        let summary = std::fs::read_to_string(outcome.summary_path).unwrap();
        assert!(summary.contains("toolkit_version = "));
        assert!(summary.contains("wall_clock_seconds = "));
        assert!(summary.contains("config.kind = circuits"));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn ratio_curve_experiment_is_deterministic() {
        let dir1 = std::env::temp_dir().join("perc_fpp_runner_rc1");
        let dir2 = std::env::temp_dir().join("perc_fpp_runner_rc2");
        for d in [&dir1, &dir2] {
            let _ = std::fs::remove_dir_all(d);
        }
        let make = |dir: &std::path::Path| {
            format!(
                "[experiment]\nkind = ratio_curve\nmaster_seed = 9\noutput_dir = {}\n\
                 density = 1.75\nwindow_side = 25\nreplicates = 3\npairs_per_band = 4\ntau = 0\nsvg = true\n\n\
                 [on_off]\ninactive_family = exponential\ninactive_mean_intercept = 2\n\
                 active_family = exponential\nactive_mean_intercept = 0.5\n",
                dir.display()
            )
        };
        let o1 = run_experiment(&validate_config(&make(&dir1)).unwrap()).unwrap();
        let o2 = run_experiment(&validate_config(&make(&dir2)).unwrap()).unwrap();
        let c1 = std::fs::read(dir1.join("ratio_curve.csv")).unwrap();
        let c2 = std::fs::read(dir2.join("ratio_curve.csv")).unwrap();
        assert_eq!(c1, c2, "same seed must give byte-identical CSVs");
        assert!(dir1.join("ratio_curve.svg").exists());
        assert_eq!(o1.get("gamma_hat"), o2.get("gamma_hat"));
        for d in [&dir1, &dir2] {
            let _ = std::fs::remove_dir_all(d);
        }
    }
}
