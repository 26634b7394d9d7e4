//! Log-log least-squares rate estimates.

use crate::error::{Error, Result};

pub const MIN_TRACE_LEN: usize = 10;
pub const DEFAULT_WINDOW: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (u64, u64),
}

/// OLS of `ln gap` on `ln t` over the last `window_fraction` of the trace.
pub fn estimate_slope(trace: &[(u64, f64)], window_fraction: f64) -> Result<SlopeEstimate> {
    if trace.len() < MIN_TRACE_LEN {
        return Err(Error::TooShort(trace.len()));
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!("window fraction {window_fraction} not in (0, 1]")));
    }
    let keep = ((trace.len() as f64 * window_fraction).ceil() as usize).clamp(2, trace.len());
    fit_power_law(&trace[trace.len() - keep..])
}

/// OLS of `ln gap` on `ln t` over all points (at least two).
pub fn fit_power_law(points: &[(u64, f64)]) -> Result<SlopeEstimate> {
    if points.len() < 2 {
        return Err(Error::TooShort(points.len()));
    }
    if let Some(&(t, _)) = points.iter().find(|(t, g)| !(*g > 0.0) || *t == 0) {
        return Err(Error::NonPositiveGap(t));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(t, _)| (*t as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, g)| g.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::TooShort(1));
    }
    let window = (points[0].0, points[points.len() - 1].0);
    // A flat trace explains nothing and has nothing to explain.
    if ys.iter().all(|y| *y == ys[0]) {
        return Ok(SlopeEstimate { slope: 0.0, intercept: ys[0], r_squared: 0.0, window });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 0.0 };
    Ok(SlopeEstimate { slope, intercept, r_squared, window })
}
