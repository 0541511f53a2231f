//! Configured Monte Carlo runs: configuration, replication management,
//! threshold checks and CSV/JSON output.

pub mod config;
pub mod record;
pub mod runners;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use config::{ExperimentConfig, ExperimentKind, Thresholds};
pub use record::{mean_of, write_csv, ExperimentRecord, CSV_HEADER, CSV_SCHEMA};
pub use runners::Collected;

use crate::error::Result;
use crate::stats::median;
use crate::structure::w;

/// Outcome of one threshold check over the records of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Aggregates that can be recomputed from the CSV rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub records: usize,
    pub failed_replications: usize,
    pub distance_samples: usize,
    pub unreachable_pairs: usize,
    pub giant_size_sum: u64,
    pub surviving_vertices_sum: u64,
    pub distance_sum: u64,
    pub mean_distance: Option<f64>,
    pub mean_giant_fraction: Option<f64>,
}

impl Totals {
    pub fn from_records(records: &[ExperimentRecord], failed_replications: usize) -> Self {
        let distance_samples = records.iter().map(|r| r.distance_samples.len()).sum();
        let distance_sum: u64 = records
            .iter()
            .flat_map(|r| r.distance_samples.iter())
            .map(|&d| d as u64)
            .sum();
        let fractions: f64 = records.iter().map(|r| r.giant_fraction).sum();
        Totals {
            records: records.len(),
            failed_replications,
            distance_samples,
            unreachable_pairs: records.iter().map(|r| r.unreachable_pairs).sum(),
            giant_size_sum: records.iter().map(|r| r.giant_size as u64).sum(),
            surviving_vertices_sum: records.iter().map(|r| r.surviving_vertices as u64).sum(),
            distance_sum,
            mean_distance: (distance_samples > 0).then(|| distance_sum as f64 / distance_samples as f64),
            mean_giant_fraction: (!records.is_empty()).then(|| fractions / records.len() as f64),
        }
    }
}

/// JSON companion of the CSV file.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary<'a> {
    pub crate_version: &'static str,
    pub csv_schema: &'static str,
    pub config: &'a ExperimentConfig,
    pub totals: Totals,
    pub failures: &'a [String],
    pub checks: &'a [Check],
    pub all_passed: bool,
    pub wall_time_ms: f64,
    pub replication_wall_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<String>,
    pub checks: Vec<Check>,
    pub wall_time_ms: f64,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn totals(&self) -> Totals {
        Totals::from_records(&self.records, self.failures.len())
    }

    pub fn summary(&self) -> RunSummary<'_> {
        RunSummary {
            crate_version: env!("CARGO_PKG_VERSION"),
            csv_schema: CSV_SCHEMA,
            config: &self.config,
            totals: self.totals(),
            failures: &self.failures,
            checks: &self.checks,
            all_passed: self.passed(),
            wall_time_ms: self.wall_time_ms,
            replication_wall_time_ms: self.records.iter().map(|r| r.wall_time_ms).sum(),
        }
    }

    pub fn write_csv_to(&self, path: &Path) -> Result<()> {
        write_csv(&self.records, BufWriter::new(File::create(path)?))
    }

    pub fn write_summary_to(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(file, &self.summary())?;
        Ok(())
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`; returns both paths.
    pub fn write_outputs(&self, prefix: &str) -> Result<(PathBuf, PathBuf)> {
        let csv = PathBuf::from(format!("{prefix}.csv"));
        let json = PathBuf::from(format!("{prefix}.json"));
        if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        self.write_csv_to(&csv)?;
        self.write_summary_to(&json)?;
        Ok((csv, json))
    }
}

/// Validates `config`, runs its experiment family and evaluates the checks.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    let collected = match config.experiment {
        ExperimentKind::Scaling => runners::run_scaling(config)?,
        ExperimentKind::Robustness => runners::run_robustness(config)?,
        ExperimentKind::CoreRemoval => runners::run_core_removal(config)?,
        ExperimentKind::Coupling => runners::run_coupling(config)?,
        ExperimentKind::Tiers => runners::run_tiers(config)?,
        ExperimentKind::Concentration => runners::run_concentration(config)?,
    };
    let checks = evaluate_checks(config, &collected.records, &collected.failures)?;
    Ok(RunOutput {
        config: config.clone(),
        records: collected.records,
        failures: collected.failures,
        checks,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs `config` and writes its outputs when `output_path` is set.
pub fn run_and_write(config: &ExperimentConfig) -> Result<RunOutput> {
    let out = run(config)?;
    if let Some(prefix) = &config.output_path {
        out.write_outputs(prefix)?;
    }
    Ok(out)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into())
}

fn share_at_most(samples: &[u32], bound: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    Some(samples.iter().filter(|&&d| d as f64 <= bound).count() as f64 / samples.len() as f64)
}

fn distinct_n(records: &[ExperimentRecord]) -> Vec<u64> {
    let mut ns: Vec<u64> = records.iter().map(|r| r.n).collect();
    ns.dedup();
    ns
}

fn pooled<'a>(records: impl Iterator<Item = &'a ExperimentRecord>) -> Vec<u32> {
    records.flat_map(|r| r.distance_samples.iter().copied()).collect()
}

/// Threshold checks for the records of one run. A run also fails when any
/// replication failed.
pub fn evaluate_checks(config: &ExperimentConfig, records: &[ExperimentRecord], failures: &[String]) -> Result<Vec<Check>> {
    let t = &config.thresholds;
    let mut checks = vec![Check::new(
        "replications_completed",
        failures.is_empty() && !records.is_empty(),
        format!("{} records, {} failed replications", records.len(), failures.len()),
    )];
    match config.experiment {
        ExperimentKind::Scaling => {
            for n in distinct_n(records) {
                let rows: Vec<_> = records.iter().filter(|r| r.n == n).collect();
                let predicted = rows[0].predicted_giant_fraction.unwrap_or(f64::NAN);
                let worst = rows
                    .iter()
                    .map(|r| (r.giant_fraction - predicted).abs())
                    .fold(0.0, f64::max);
                checks.push(Check::new(
                    format!("giant_fraction n={n}"),
                    worst <= t.giant_tolerance,
                    format!("max |empirical - {predicted:.4}| = {worst:.4}, tolerance {}", t.giant_tolerance),
                ));
                let bound = rows[0].predicted_bound.unwrap_or(f64::NAN);
                let share = share_at_most(&pooled(rows.iter().copied()), bound);
                checks.push(Check::new(
                    format!("ultra_small_distances n={n}"),
                    share.is_some_and(|s| s >= t.ultra_small_share),
                    format!("share <= {bound} is {}, required {}", fmt_opt(share), t.ultra_small_share),
                ));
            }
            let ns = distinct_n(records);
            if ns.len() >= 2 {
                let ratios: Vec<f64> = ns
                    .iter()
                    .filter_map(|&n| {
                        let d = pooled(records.iter().filter(|r| r.n == n));
                        mean_of(&d).map(|m| m / (n as f64).ln().ln())
                    })
                    .collect();
                let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().copied().fold(0.0, f64::max);
                let spread = (hi - lo) / lo;
                checks.push(Check::new(
                    "distance_loglog_scaling",
                    ratios.len() == ns.len() && spread < 0.5,
                    format!("mean distance / loglog n in [{lo:.3}, {hi:.3}], relative spread {spread:.3}"),
                ));
            }
        }
        ExperimentKind::Robustness => {
            for (n, gamma) in n_gamma_groups(records) {
                let rows: Vec<_> = records.iter().filter(|r| r.n == n && r.gamma == Some(gamma)).collect();
                let worst = rows
                    .iter()
                    .filter_map(|r| r.retention())
                    .fold(f64::INFINITY, f64::min);
                checks.push(Check::new(
                    format!("retention n={n} gamma={gamma}"),
                    worst >= t.retention_min,
                    format!("min retention {worst:.4}, required {}", t.retention_min),
                ));
                let bound = rows[0].predicted_bound.unwrap_or(f64::NAN) * t.robust_slack;
                let share = share_at_most(&pooled(rows.iter().copied()), bound);
                checks.push(Check::new(
                    format!("robust_distances n={n} gamma={gamma}"),
                    share.is_some_and(|s| s >= t.robust_share),
                    format!("share <= {bound:.3} is {}, required {}", fmt_opt(share), t.robust_share),
                ));
            }
        }
        ExperimentKind::CoreRemoval => {
            for r in records {
                let tag = format!("n={} replication={}", r.n, r.replication);
                let retention = r.retention().unwrap_or(0.0);
                checks.push(Check::new(
                    format!("core_removal_retention {tag}"),
                    retention >= t.core_removal_retention_min,
                    format!("retention {retention:.4}, required {}", t.core_removal_retention_min),
                ));
                let after = r.mean_distance();
                let before = r.baseline_mean_distance;
                let stretched = matches!((after, before), (Some(a), Some(b)) if a >= t.core_removal_stretch_min * b);
                checks.push(Check::new(
                    format!("core_removal_stretch {tag}"),
                    stretched,
                    format!(
                        "mean distance {} after vs {} before, required factor {}",
                        fmt_opt(after),
                        fmt_opt(before),
                        t.core_removal_stretch_min
                    ),
                ));
                let cap = r.predicted_scale.unwrap_or(f64::NAN) * t.core_removal_scale_slack;
                checks.push(Check::new(
                    format!("core_removal_scale {tag}"),
                    after.is_some_and(|a| a <= cap),
                    format!("mean distance {} vs cap {cap:.3}", fmt_opt(after)),
                ));
            }
        }
        ExperimentKind::Coupling => {
            for r in records {
                let tv = r.statistic.unwrap_or(f64::NAN);
                checks.push(Check::new(
                    format!("coupling_tv n={}", r.n),
                    tv <= t.coupling_tv_max,
                    format!(
                        "tv {tv:.4} (split-half noise {}), max {}",
                        fmt_opt(r.statistic_aux),
                        t.coupling_tv_max
                    ),
                ));
            }
        }
        ExperimentKind::Tiers => {
            for (n, gamma) in n_gamma_groups(records) {
                let rows: Vec<_> = records.iter().filter(|r| r.n == n && r.gamma == Some(gamma)).collect();
                let width = w(gamma, config.tau)?;
                let close = rows
                    .iter()
                    .filter(|r| r.tier_diameter.is_some_and(|d| d.abs_diff(width) <= t.tier_diameter_tolerance))
                    .count();
                let connected = rows.iter().filter(|r| r.tier_components == Some(1)).count();
                let total = rows.len() as f64;
                let diameters: Vec<String> = rows
                    .iter()
                    .map(|r| r.tier_diameter.map(|d| d.to_string()).unwrap_or_default())
                    .collect();
                checks.push(Check::new(
                    format!("tier_diameter n={n} gamma={gamma}"),
                    close as f64 >= t.tier_diameter_rate * total,
                    format!(
                        "{close}/{} within {} of w={width}; diameters [{}]",
                        rows.len(),
                        t.tier_diameter_tolerance,
                        diameters.join(", ")
                    ),
                ));
                let components: Vec<String> = rows
                    .iter()
                    .map(|r| r.tier_components.map(|c| c.to_string()).unwrap_or_default())
                    .collect();
                checks.push(Check::new(
                    format!("tier_connected n={n} gamma={gamma}"),
                    connected as f64 >= t.tier_connected_rate * total,
                    format!(
                        "{connected}/{} connected; component counts [{}]",
                        rows.len(),
                        components.join(", ")
                    ),
                ));
            }
        }
        ExperimentKind::Concentration => {
            for n in distinct_n(records) {
                let rows: Vec<_> = records.iter().filter(|r| r.n == n).collect();
                let hits = rows
                    .iter()
                    .filter(|r| r.statistic.is_some_and(|x| x > 0.25 && x < 4.0))
                    .count();
                checks.push(Check::new(
                    format!("concentration_band n={n}"),
                    hits as f64 >= t.concentration_rate * rows.len() as f64,
                    format!("{hits}/{} ratios in (1/4, 4), required rate {}", rows.len(), t.concentration_rate),
                ));
                let low: Vec<f64> = rows.iter().filter_map(|r| r.statistic_aux).collect();
                let med = (!low.is_empty()).then(|| median(&low));
                checks.push(Check::new(
                    format!("low_tier_ratio n={n}"),
                    med.is_some_and(|m| m <= t.low_tier_median_max),
                    format!("median {}, max {}", fmt_opt(med), t.low_tier_median_max),
                ));
            }
        }
    }
    Ok(checks)
}

fn n_gamma_groups(records: &[ExperimentRecord]) -> Vec<(u64, f64)> {
    let mut groups: Vec<(u64, f64)> = Vec::new();
    for r in records {
        if let Some(g) = r.gamma {
            if !groups.contains(&(r.n, g)) {
                groups.push((r.n, g));
            }
        }
    }
    groups
}
