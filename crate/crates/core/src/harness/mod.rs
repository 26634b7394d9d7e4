//! Experiment driver: configs, seeded runs, CSV traces, rate fits and verification suites.

mod brute;
mod config;
mod csv;
mod lemmas;
mod slope;

pub use brute::{brute_force_game, GameSolution};
pub use config::{ExperimentConfig, NoiseKind, CONFIG_KEYS};
pub use csv::{emit_csv, parse_csv, to_csv, CSV_HEADER, MISSING};
pub use lemmas::{
    geometry_suite, lemma_suite, prefix_sums, sequence_bounds, test_geometries, LemmaCheck, LemmaReport,
};
pub use slope::{estimate_slope, fit_power_law, SlopeEstimate, DEFAULT_WINDOW, MIN_TRACE_LEN};

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::BregmanGeometry;
use crate::problems::{catalog, CatalogEntry};
use crate::solver::{run, RunReport, StepSizePolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    /// `(t, mean gap over seeds)` on the shared evaluation grid.
    pub mean_gap: Vec<(u64, f64)>,
    /// Fit over the last half of the mean trace; `Err` carries the reason when no fit exists.
    pub slope: std::result::Result<SlopeEstimate, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// One report per seed, in the order the seeds were given.
    pub reports: Vec<RunReport>,
    pub summary: ExperimentSummary,
    pub files: Vec<PathBuf>,
}

/// Resolves problem, geometry and policy for a validated config.
pub fn prepare(cfg: &ExperimentConfig) -> Result<(CatalogEntry, BregmanGeometry, StepSizePolicy)> {
    cfg.validate()?;
    let entry = catalog(&cfg.problem)?;
    let kind = cfg.geometry.unwrap_or(entry.default_geometry);
    if !entry.compatible.contains(&kind) {
        return Err(Error::IncompatibleGeometry { geometry: kind.to_string(), set: entry.problem.set().to_string() });
    }
    let mut geom = BregmanGeometry::new(kind, entry.problem.set().clone())?;
    if let Some(d) = cfg.d_override {
        geom = geom.with_diameter(d)?;
    }
    let policy_kind = cfg.resolved_policy();
    let c = cfg.c.unwrap_or(policy_kind.default_c());
    let policy = StepSizePolicy::with_c(policy_kind, geom.diameter(), cfg.g0, c)?;
    Ok((entry, geom, policy))
}

/// Runs every seed (concurrently), averages the gap traces and writes CSV
/// files when an output path is set. A single seed writes to the path itself;
/// several seeds write `<stem>.seed<S>.<ext>` each plus `<stem>.mean.<ext>`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let (entry, geom, policy) = prepare(cfg)?;
    let noise = cfg.noise_model();
    let reports = cfg
        .seeds
        .par_iter()
        .map(|&seed| run(&entry.problem, &geom, policy.clone(), cfg.iters, seed, noise))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&reports);
    let mut files = Vec::new();
    if let Some(path) = &cfg.output_path {
        if reports.len() == 1 {
            emit_csv(&reports[0], path)?;
            files.push(path.clone());
        } else {
            for r in &reports {
                let p = sibling(path, &format!("seed{}", r.meta.seed));
                emit_csv(r, &p)?;
                files.push(p);
            }
            let p = sibling(path, "mean");
            std::fs::write(&p, mean_csv(&summary))?;
            files.push(p);
        }
    }
    Ok(ExperimentResult { reports, summary, files })
}

/// Seed-averaged gap trace and its rate fit.
pub fn summarize(reports: &[RunReport]) -> ExperimentSummary {
    let n = reports.len() as f64;
    let mean_gap: Vec<(u64, f64)> = match reports.first() {
        None => Vec::new(),
        Some(first) => first
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| (row.t, reports.iter().map(|r| r.rows[i].gap).sum::<f64>() / n))
            .collect(),
    };
    let slope = estimate_slope(&mean_gap, DEFAULT_WINDOW).map_err(|e| e.to_string());
    ExperimentSummary { mean_gap, slope }
}

fn mean_csv(s: &ExperimentSummary) -> String {
    let mut out = String::new();
    match &s.slope {
        Ok(e) => out.push_str(&format!(
            "# slope={:.16e}\n# intercept={:.16e}\n# r_squared={:.16e}\n# window={}..{}\n",
            e.slope, e.intercept, e.r_squared, e.window.0, e.window.1
        )),
        Err(msg) => out.push_str(&format!("# slope=NA ({msg})\n")),
    }
    out.push_str("t,mean_gap\n");
    for (t, g) in &s.mean_gap {
        out.push_str(&format!("{t},{g:.16e}\n"));
    }
    out
}

fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    path.with_file_name(name)
}
