//! Randomised checks of the analytical inequalities behind the step-size
//! analysis, plus geometry property checks used by `mpx verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::geometry::sample::sample_point;
use crate::geometry::{BregmanGeometry, FeasibleSet, GeometryKind, FEASIBILITY_TOL};
use crate::stochastic::martingale_scenarios;

pub const SEQUENCES: usize = 1000;
pub const TRIPLES: usize = 1000;
pub const MARTINGALE_TRIALS: usize = 2000;
pub const MARTINGALE_LENGTH: usize = 20;
const THREE_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// Largest observed `lhs − rhs` (negative when every case holds with room).
    pub worst_margin: f64,
}

impl LemmaCheck {
    fn new(name: impl Into<String>) -> Self {
        LemmaCheck { name: name.into(), cases: 0, failures: 0, worst_margin: f64::NEG_INFINITY }
    }

    fn record(&mut self, lhs: f64, rhs: f64) {
        self.cases += 1;
        let margin = lhs - rhs;
        self.worst_margin = self.worst_margin.max(margin);
        if !(margin <= 0.0) {
            self.failures += 1;
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub seed: u64,
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(LemmaCheck::pass)
    }
}

/// Sums appearing in the two sequence lemmas for `a₀` and `a₁..aₙ`:
/// `(Σ aᵢ/√(a₀ + Σ_{j<i} aⱼ), Σ aᵢ/(a₀ + Σ_{j<i} aⱼ))`.
pub fn prefix_sums(a0: f64, a: &[f64]) -> (f64, f64) {
    let mut prefix = a0;
    let (mut s, mut l) = (0.0, 0.0);
    for &ai in a {
        s += ai / prefix.sqrt();
        l += ai / prefix;
        prefix += ai;
    }
    (s, l)
}

/// Bounds `(lower, upper)` of the square-root lemma and the upper bound of the
/// logarithmic lemma, for terms bounded by `amax`.
pub fn sequence_bounds(a0: f64, amax: f64, a: &[f64]) -> (f64, f64, f64) {
    let total: f64 = a.iter().sum();
    let lower = (a0 + total).sqrt() - a0.sqrt();
    let upper = 2.0 * amax / a0.sqrt() + 3.0 * amax.sqrt() + 3.0 * (a0 + total).sqrt();
    let head: f64 = a[..a.len().saturating_sub(1)].iter().sum();
    let log_upper = 2.0 + 4.0 * amax / a0 + 2.0 * (1.0 + head / a0).ln();
    (lower, upper, log_upper)
}

/// Geometries exercised by the three-point and property checks.
pub fn test_geometries() -> Result<Vec<(&'static str, BregmanGeometry)>> {
    Ok(vec![
        ("entropy-simplex4", BregmanGeometry::entropy(FeasibleSet::Simplex(4))?),
        ("euclidean-ball3", BregmanGeometry::euclidean(FeasibleSet::ball(vec![0.5, -1.0, 0.0], 1.5))?),
        ("cube-ball2-offcentre", BregmanGeometry::cube(FeasibleSet::ball(vec![3.0, 0.0], 2.0))?),
        ("cube-ball2-centred", BregmanGeometry::cube(FeasibleSet::centered_ball(2, 1.0))?),
    ])
}

/// Inverse-sum lemmas, the three-point inequality per geometry and the
/// martingale Monte-Carlo check, all driven by `seed`.
pub fn lemma_suite(seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = LemmaCheck::new("inverse-sqrt-sum lower");
    let mut upper = LemmaCheck::new("inverse-sqrt-sum upper");
    let mut log = LemmaCheck::new("inverse-sum logarithmic");
    for k in 0..SEQUENCES {
        let n = rng.gen_range(1..=200);
        let amax = 10f64.powf(rng.gen_range(-3.0..3.0));
        let a0 = 1.0 + 10f64.powf(rng.gen_range(-3.0..3.0));
        let a: Vec<f64> = match k % 4 {
            0 => vec![amax; n],
            1 => vec![0.0; n],
            2 => (0..n).map(|_| if rng.gen_bool(0.2) { amax } else { 0.0 }).collect(),
            _ => (0..n).map(|_| rng.gen_range(0.0..=amax)).collect(),
        };
        let (s, l) = prefix_sums(a0, &a);
        let (lo, hi, log_hi) = sequence_bounds(a0, amax, &a);
        lower.record(lo, s * (1.0 + 1e-12));
        upper.record(s, hi);
        log.record(l, log_hi);
    }

    let mut checks = vec![lower, upper, log];
    for (name, geom) in test_geometries()? {
        let mut c = LemmaCheck::new(format!("three-point {name}"));
        let floor = if geom.kind() == GeometryKind::NegativeEntropy { 1e-6 } else { 0.0 };
        for _ in 0..TRIPLES {
            let x = sample_point(geom.set(), floor, &mut rng);
            let p = sample_point(geom.set(), 0.0, &mut rng);
            let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
            let d: Vec<f64> = (0..geom.dim()).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let xp = geom.prox_step(&x, &d, 1.0)?;
            let lhs: f64 = xp.iter().zip(&p).zip(&d).map(|((a, b), g)| (a - b) * g).sum();
            let rhs = geom.divergence(&p, &x)? - geom.divergence(&p, &xp)? - geom.divergence(&xp, &x)?;
            c.record(lhs, rhs + THREE_POINT_TOL);
        }
        checks.push(c);
    }

    let mut m = LemmaCheck::new("martingale difference");
    for s in martingale_scenarios(2.0, MARTINGALE_TRIALS, MARTINGALE_LENGTH, seed) {
        m.record(s.estimate, s.bound + 3.0 * s.std_error);
    }
    checks.push(m);
    Ok(LemmaReport { seed, checks })
}

/// Divergence nonnegativity, vanishing on the diagonal, prox feasibility, the
/// diameter bound `D(y, y₀) ≤ D²`, and strong convexity where it holds
/// (entropy, Euclidean, cube-norm balls at distance ≥ 1 from the origin).
pub fn geometry_suite(seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut checks = Vec::new();
    for (name, geom) in test_geometries()? {
        let mut nonneg = LemmaCheck::new(format!("divergence nonnegative {name}"));
        let mut diag = LemmaCheck::new(format!("divergence vanishes on diagonal {name}"));
        let mut feas = LemmaCheck::new(format!("prox feasible {name}"));
        let mut diam = LemmaCheck::new(format!("diameter bound {name}"));
        let mut strong = LemmaCheck::new(format!("strong convexity {name}"));
        let strongly_convex = name != "cube-ball2-centred";
        let y0 = geom.initial_point();
        let d2 = geom.diameter().powi(2);
        for _ in 0..TRIPLES {
            let x = sample_point(geom.set(), 0.0, &mut rng);
            let y = sample_point(geom.set(), 0.0, &mut rng);
            let div = geom.divergence(&y, &x)?;
            nonneg.record(-div, 0.0);
            diag.record(geom.divergence(&x, &x)?.abs(), 1e-14 * (1.0 + geom.generating_value(&x)?.abs()));
            diam.record(geom.divergence(&y, &y0)?, d2 * (1.0 + 1e-12));
            let scale = 10f64.powf(rng.gen_range(-3.0..2.0));
            let d: Vec<f64> = (0..geom.dim()).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let xp = geom.prox_step(&x, &d, 1.0)?;
            feas.record(if geom.set().contains(&xp, FEASIBILITY_TOL) { 0.0 } else { 1.0 }, 0.0);
            if strongly_convex {
                strong.record(-geom.strong_convexity_residual(&y, &x)?, 1e-12);
            }
        }
        checks.extend([nonneg, diag, feas, diam]);
        if strongly_convex {
            checks.push(strong);
        }
    }
    Ok(LemmaReport { seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hand_evaluated_sequence() {
        let a = [1.0, 1.0, 1.0];
        let (s, l) = prefix_sums(1.0, &a);
        assert_abs_diff_eq!(s, 1.0 + 0.5f64.sqrt() + (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s, 2.2845, epsilon = 1e-4);
        assert_abs_diff_eq!(l, 1.0 + 0.5 + 1.0 / 3.0, epsilon = 1e-15);
        let (lo, hi, log_hi) = sequence_bounds(1.0, 1.0, &a);
        assert_abs_diff_eq!(lo, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(log_hi, 6.0 + 2.0 * 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(log_hi, 8.197, epsilon = 1e-3);
    }

    #[test]
    fn zero_sequence() {
        let (s, l) = prefix_sums(2.0, &[0.0; 5]);
        assert_eq!((s, l), (0.0, 0.0));
        let (lo, hi, log_hi) = sequence_bounds(2.0, 0.0, &[0.0; 5]);
        assert_eq!(lo, 0.0);
        assert!(hi >= 0.0 && log_hi >= 0.0);
    }

    #[test]
    fn suites_pass_at_seed_zero() {
        let r = lemma_suite(0).unwrap();
        assert!(r.all_pass(), "{r:#?}");
        let g = geometry_suite(0).unwrap();
        assert!(g.all_pass(), "{g:#?}");
    }
}
