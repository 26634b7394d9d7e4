//! Trace serialisation: `#`-prefixed metadata, a fixed header, 17-digit values.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::{RunMeta, RunReport, TraceRow};

pub const CSV_HEADER: &str = "t,eta,Z,gap,cum_regret";
pub const MISSING: &str = "NA";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a report as CSV text.
pub fn to_csv(report: &RunReport) -> String {
    let m = &report.meta;
    let avg: Vec<String> = m.final_average.iter().map(|v| num(*v)).collect();
    let mut out = String::new();
    let meta: [(&str, String); 18] = [
        ("problem", m.problem.clone()),
        ("geometry", m.geometry.to_string()),
        ("policy", m.policy.clone()),
        ("seed", m.seed.to_string()),
        ("iters", m.iters.to_string()),
        ("diameter", num(m.diameter)),
        ("g0", num(m.g0)),
        ("c", num(m.c)),
        ("noise", m.noise.clone()),
        ("sigma", num(m.sigma)),
        ("gap_stride", m.gap_stride.to_string()),
        ("eta_first", num(m.eta_first)),
        ("eta_monotone", m.eta_monotone.to_string()),
        ("eta_exceeds_one", m.eta_exceeds_one.to_string()),
        ("max_z", num(m.max_z)),
        ("max_dual_norm", num(m.max_dual_norm)),
        ("final_average", avg.join(" ")),
        ("rows", report.rows.len().to_string()),
    ];
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let regret = r.cum_regret.map(num).unwrap_or_else(|| MISSING.to_string());
        let _ = writeln!(out, "{},{},{},{},{}", r.t, num(r.eta), num(r.z), num(r.gap), regret);
    }
    out
}

/// Writes [`to_csv`] to `path`.
pub fn emit_csv(report: &RunReport, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(report))?;
    Ok(())
}

/// Inverse of [`to_csv`].
pub fn parse_csv(text: &str) -> Result<RunReport> {
    let mut kv = std::collections::HashMap::new();
    let mut lines = text.lines();
    let mut saw_header = false;
    for line in lines.by_ref() {
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.trim_start().split_once('=').ok_or_else(|| Error::Parse(format!("bad metadata line '{line}'")))?;
            kv.insert(k.to_string(), v.to_string());
        } else if line == CSV_HEADER {
            saw_header = true;
            break;
        } else {
            return Err(Error::Parse(format!("expected header, found '{line}'")));
        }
    }
    if !saw_header {
        return Err(Error::Parse("missing header".into()));
    }
    let get = |k: &str| kv.get(k).map(String::as_str).ok_or_else(|| Error::Parse(format!("missing metadata '{k}'")));
    let f = |k: &str| -> Result<f64> { parse_f64(get(k)?) };
    let u = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad integer for '{k}'"))) };
    let b = |k: &str| -> Result<bool> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad boolean for '{k}'"))) };
    let avg = get("final_average")?;
    let meta = RunMeta {
        problem: get("problem")?.to_string(),
        geometry: get("geometry")?.parse()?,
        policy: get("policy")?.to_string(),
        seed: u("seed")?,
        iters: u("iters")?,
        diameter: f("diameter")?,
        g0: f("g0")?,
        c: f("c")?,
        noise: get("noise")?.to_string(),
        sigma: f("sigma")?,
        gap_stride: u("gap_stride")?,
        eta_first: f("eta_first")?,
        eta_monotone: b("eta_monotone")?,
        eta_exceeds_one: b("eta_exceeds_one")?,
        max_z: f("max_z")?,
        max_dual_norm: f("max_dual_norm")?,
        final_average: avg.split_whitespace().map(parse_f64).collect::<Result<_>>()?,
    };
    let mut rows = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Parse(format!("expected 5 columns, found {} in '{line}'", cols.len())));
        }
        rows.push(TraceRow {
            t: cols[0].parse().map_err(|_| Error::Parse(format!("bad t '{}'", cols[0])))?,
            eta: parse_f64(cols[1])?,
            z: parse_f64(cols[2])?,
            gap: parse_f64(cols[3])?,
            cum_regret: if cols[4] == MISSING { None } else { Some(parse_f64(cols[4])?) },
        });
    }
    if u("rows")? as usize != rows.len() {
        return Err(Error::Parse("row count does not match metadata".into()));
    }
    Ok(RunReport { meta, rows })
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse(format!("bad number '{s}'")))
}
