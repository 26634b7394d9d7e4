//! Empirical certification of regularity constants and monotonicity by sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MonotoneProblem, Operator, RegularityClass, INTERIOR_SAMPLE_FLOOR};
use crate::error::Result;
use crate::geometry::sample::sample_pair;
use crate::geometry::BregmanGeometry;

/// Declared constants are accepted up to this relative slack.
pub const CERTIFY_SLACK: f64 = 1.01;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityCheck {
    pub class: RegularityClass,
    pub empirical: f64,
    pub pass: bool,
    pub note: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub samples: usize,
    pub checks: Vec<RegularityCheck>,
}

impl RegularityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Checks every declared regularity tag of `p` against sampled point pairs.
pub fn certify_regularity(p: &MonotoneProblem, g: &BregmanGeometry, samples: usize, seed: u64) -> Result<RegularityReport> {
    let checks = p
        .regularity()
        .iter()
        .map(|&class| certify_class(p, g, class, samples, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegularityReport { samples, checks })
}

/// Checks one (possibly hypothetical) regularity tag.
pub fn certify_class(
    p: &MonotoneProblem,
    g: &BregmanGeometry,
    class: RegularityClass,
    samples: usize,
    seed: u64,
) -> Result<RegularityCheck> {
    let empirical = sampled_max_ratio(p, g, class, samples, seed)?;
    let note = match class {
        RegularityClass::BregmanSmooth(_) => "global dual norm used as proxy for the local norm",
        _ => "",
    };
    Ok(RegularityCheck { class, empirical, pass: empirical <= class.constant() * CERTIFY_SLACK, note })
}

/// Largest sampled ratio in the defining inequality of `class`:
///
/// * Lipschitz smooth: `‖F(x) − F(y)‖_* / ‖x − y‖`
/// * Lipschitz bounded: `‖F(x)‖_*`
/// * Bregman smooth: `‖F(y) − F(x)‖_* / √(2 D(y, x))`
/// * Bregman bounded: `‖F(x)‖_* ‖x − y‖ / √D(y, x)`
pub(crate) fn sampled_max_ratio(
    p: &MonotoneProblem,
    g: &BregmanGeometry,
    class: RegularityClass,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = sample_floor(p);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (x, y) = sample_pair(p.set(), floor, &mut rng);
        let fx = p.evaluate(&x)?;
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let dist = g.norm(&diff);
        let ratio = match class {
            RegularityClass::LipschitzBounded(_) => g.dual_norm(&fx),
            // Pairs separated only by rounding make the quotients meaningless.
            _ if !resolvable(&x, &y) => continue,
            RegularityClass::LipschitzSmooth(_) => {
                let fy = p.evaluate(&y)?;
                g.dual_norm(&sub(&fx, &fy)) / dist
            }
            RegularityClass::BregmanSmooth(_) => {
                let div = g.divergence(&y, &x)?;
                if div <= 0.0 {
                    continue;
                }
                let fy = p.evaluate(&y)?;
                g.dual_norm(&sub(&fy, &fx)) / (2.0 * div).sqrt()
            }
            RegularityClass::BregmanBounded(_) => {
                let div = g.divergence(&y, &x)?;
                if div <= 0.0 {
                    continue;
                }
                g.dual_norm(&fx) * dist / div.sqrt()
            }
        };
        if ratio.is_finite() {
            worst = worst.max(ratio);
        }
    }
    Ok(worst)
}

/// Smallest sampled `⟨x − y, F(x) − F(y)⟩`; nonnegative for monotone operators.
pub fn monotonicity_residual(p: &MonotoneProblem, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floor = sample_floor(p);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let (x, y) = sample_pair(p.set(), floor, &mut rng);
        let fx = p.evaluate(&x)?;
        let fy = p.evaluate(&y)?;
        let r: f64 = x.iter().zip(&y).zip(fx.iter().zip(&fy)).map(|((a, b), (c, d))| (a - b) * (c - d)).sum();
        worst = worst.min(r);
    }
    Ok(worst)
}

fn sample_floor(p: &MonotoneProblem) -> f64 {
    match p.operator() {
        Operator::Entropic { .. } => INTERIOR_SAMPLE_FLOOR,
        _ => 0.0,
    }
}

fn resolvable(x: &[f64], y: &[f64]) -> bool {
    x.iter().zip(y).any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(b.abs()))
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
