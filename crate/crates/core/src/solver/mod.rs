//! Mirror-prox with pluggable step-size policies.

mod policy;

pub use policy::{PolicyKind, StepSizePolicy, ADAPTIVE_DIVERGENCE_FLOOR, DEFAULT_G0, DEFAULT_THETA};

use crate::error::{Error, Result};
use crate::geometry::{BregmanGeometry, GeometryKind, FEASIBILITY_TOL};
use crate::problems::MonotoneProblem;
use crate::stochastic::{NoiseModel, NoisyOracle};

/// Traces longer than this are thinned to about this many gap evaluations.
pub const MAX_GAP_EVALUATIONS: u64 = 10_000;
/// Relative inflation applied to the theoretical Z bounds.
pub const Z_BOUND_SLACK: f64 = 1.05;

/// Source of operator values.
pub trait Oracle {
    fn query(&mut self, x: &[f64]) -> Result<Vec<f64>>;
}

/// Noise-free oracle.
pub struct Exact<'a>(pub &'a MonotoneProblem);

impl Oracle for Exact<'_> {
    fn query(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.evaluate(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub y_prev: Vec<f64>,
    pub x_curr: Vec<f64>,
    pub t: u64,
    pub ergodic_sum: Vec<f64>,
    pub policy: StepSizePolicy,
}

impl SolverState {
    /// Starts at `y₀ = argmin R`.
    pub fn new(g: &BregmanGeometry, policy: StepSizePolicy) -> Self {
        let y0 = g.initial_point();
        SolverState { x_curr: y0.clone(), ergodic_sum: vec![0.0; y0.len()], y_prev: y0, t: 0, policy }
    }

    /// `x̄_t`; the start point before any step.
    pub fn ergodic_average(&self) -> Vec<f64> {
        if self.t == 0 {
            return self.y_prev.clone();
        }
        let n = self.t as f64;
        self.ergodic_sum.iter().map(|s| s / n).collect()
    }
}

/// Quantities produced by one mirror-prox step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub eta: f64,
    pub z: f64,
    pub m: Vec<f64>,
    pub g: Vec<f64>,
    /// `x_t`; the new `y_t` lives in the state.
    pub x: Vec<f64>,
}

/// One step: `m = F(y_{t−1})`, `x_t = prox(y_{t−1}, m)`, `g = F(x_t)`, `y_t = prox(y_{t−1}, g)`.
pub fn mp_iterate(state: &mut SolverState, oracle: &mut dyn Oracle, geom: &BregmanGeometry) -> Result<StepRecord> {
    let eta = state.policy.step_size();
    let m = oracle.query(&state.y_prev)?;
    let x = geom.prox_step(&state.y_prev, &m, eta)?;
    let g = oracle.query(&x)?;
    let y = geom.prox_step(&state.y_prev, &g, eta)?;
    let z = state.policy.z_statistic(geom, &state.y_prev, &x, &y, eta, &m, &g)?;
    state.ergodic_sum.iter_mut().zip(&x).for_each(|(s, v)| *s += v);
    state.t += 1;
    state.x_curr = x.clone();
    state.y_prev = y;
    Ok(StepRecord { eta, z, m, g, x })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub eta: f64,
    pub z: f64,
    pub gap: f64,
    /// `Σ ⟨g_s, x_s − x*⟩`; absent when no solution is known.
    pub cum_regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub problem: String,
    pub geometry: GeometryKind,
    pub policy: String,
    pub seed: u64,
    pub iters: u64,
    pub diameter: f64,
    pub g0: f64,
    pub c: f64,
    pub noise: String,
    pub sigma: f64,
    pub gap_stride: u64,
    /// `η₁`.
    pub eta_first: f64,
    /// `η_{t+1} ≤ η_t` held at every step, including unrecorded ones.
    pub eta_monotone: bool,
    /// The convergence proofs assume `η_t ≤ 1`; flagged rather than clipped.
    pub eta_exceeds_one: bool,
    pub max_z: f64,
    /// Largest dual norm among all operator values queried.
    pub max_dual_norm: f64,
    pub final_average: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub meta: RunMeta,
    pub rows: Vec<TraceRow>,
}

impl RunReport {
    pub fn final_gap(&self) -> Option<f64> {
        self.rows.last().map(|r| r.gap)
    }

    /// Row at iteration `t`, if it was recorded.
    pub fn row_at(&self, t: u64) -> Option<&TraceRow> {
        self.rows.binary_search_by_key(&t, |r| r.t).ok().map(|i| &self.rows[i])
    }
}

/// Gap evaluation stride: every iteration up to 10⁴, then `⌈T/10⁴⌉`.
pub fn gap_stride(iters: u64) -> u64 {
    iters.div_ceil(MAX_GAP_EVALUATIONS).max(1)
}

/// Runs `iters` mirror-prox steps. With [`NoiseModel::None`] (or σ = 0) the
/// seed has no effect on the trace.
pub fn run(
    p: &MonotoneProblem,
    geom: &BregmanGeometry,
    policy: StepSizePolicy,
    iters: u64,
    seed: u64,
    noise: NoiseModel,
) -> Result<RunReport> {
    if iters == 0 {
        return Err(Error::IterationBudgetZero);
    }
    if geom.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: geom.dim() });
    }
    if geom.set() != p.set() {
        return Err(Error::InvalidConfig("geometry and problem are defined on different sets".into()));
    }
    let mut oracle = NoisyOracle::new(p, noise, seed);
    let xstar = p.known_solution().map(<[f64]>::to_vec);
    let stride = gap_stride(iters);

    let mut meta = RunMeta {
        problem: p.name().to_string(),
        geometry: geom.kind(),
        policy: policy.kind().as_str().to_string(),
        seed,
        iters,
        diameter: policy.diameter(),
        g0: policy.g0(),
        c: policy.c(),
        noise: noise.name().to_string(),
        sigma: noise.sigma(),
        gap_stride: stride,
        eta_first: policy.step_size(),
        eta_monotone: true,
        eta_exceeds_one: policy.step_size() > 1.0,
        max_z: 0.0,
        max_dual_norm: 0.0,
        final_average: Vec::new(),
    };
    let mut state = SolverState::new(geom, policy);
    let mut rows = Vec::with_capacity((iters / stride + 1) as usize);
    let mut regret = xstar.as_ref().map(|_| 0.0);
    let mut last_eta = f64::INFINITY;

    for t in 1..=iters {
        let step = mp_iterate(&mut state, &mut oracle, geom)?;
        if step.eta > last_eta {
            meta.eta_monotone = false;
        }
        last_eta = step.eta;
        meta.max_z = meta.max_z.max(step.z);
        meta.max_dual_norm = meta.max_dual_norm.max(geom.dual_norm(&step.m)).max(geom.dual_norm(&step.g));
        if let (Some(r), Some(xs)) = (regret.as_mut(), xstar.as_ref()) {
            *r += step.g.iter().zip(step.x.iter().zip(xs)).map(|(g, (a, b))| g * (a - b)).sum::<f64>();
        }
        if t % stride == 0 || t == iters {
            let avg = state.ergodic_average();
            debug_assert!(geom.set().contains(&avg, FEASIBILITY_TOL));
            rows.push(TraceRow { t, eta: step.eta, z: step.z, gap: p.gap(&avg)?, cum_regret: regret });
        }
    }
    meta.final_average = state.ergodic_average();
    Ok(RunReport { meta, rows })
}

/// Theoretical ceiling on `max_t Z_t` for the run's regime, inflated by 5%.
///
/// `G′` is the declared Lipschitz-bounded constant when present, otherwise the
/// largest operator dual norm observed during the run. Smooth: `G′/c`;
/// bounded with a Lipschitz bound: `√3·G′/c`; bounded with a Bregman bound `M`:
/// `(M + √(6M + 3M√M + 4M²))/c`. Norm-based: `G′`. Noisy runs add σ to `G′`.
pub fn z_bound(report: &RunReport, p: &MonotoneProblem) -> Result<f64> {
    let meta = &report.meta;
    let gprime = p.lipschitz_bound().unwrap_or(meta.max_dual_norm) + meta.sigma;
    let c = meta.c;
    let kind: PolicyKind = meta.policy.parse()?;
    let bound = match kind {
        PolicyKind::BregmanSmooth => gprime / c,
        PolicyKind::UniversalNorm => gprime,
        PolicyKind::BregmanBounded | PolicyKind::StochasticUniversal => {
            // A Bregman bound refers to the problem's own geometry.
            match p.bregman_bound().filter(|_| meta.geometry == p.natural_geometry()) {
                Some(m) => (m + (6.0 * m + 3.0 * m * m.sqrt() + 4.0 * m * m).sqrt()) / c,
                None => 3f64.sqrt() * gprime / c,
            }
        }
        PolicyKind::Fixed(_) | PolicyKind::AdaptiveLbeta(_) => {
            return Err(Error::MissingConstant(format!("no Z bound is defined for policy '{}'", meta.policy)))
        }
    };
    Ok(bound * Z_BOUND_SLACK)
}

/// `max_t Z_t ≤ z_bound`.
pub fn z_bound_check(report: &RunReport, p: &MonotoneProblem) -> Result<bool> {
    Ok(report.meta.max_z <= z_bound(report, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FeasibleSet;
    use crate::problems::{make_matrix_game, make_zero};
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    fn smooth(g: &BregmanGeometry) -> StepSizePolicy {
        StepSizePolicy::new(PolicyKind::BregmanSmooth, g.diameter(), 1.0).unwrap()
    }

    #[test]
    fn zero_operator_is_a_fixed_point() {
        let set = FeasibleSet::Simplex(3);
        let p = make_zero(set.clone(), GeometryKind::NegativeEntropy);
        let g = BregmanGeometry::entropy(set).unwrap();
        let mut s = SolverState::new(&g, smooth(&g));
        let y0 = s.y_prev.clone();
        for _ in 0..5 {
            let r = mp_iterate(&mut s, &mut Exact(&p), &g).unwrap();
            assert_eq!(r.x, y0);
            assert_eq!(s.y_prev, y0);
            assert_eq!(r.z, 0.0);
            assert_eq!(r.eta, g.diameter());
        }
        let rep = run(&p, &g, smooth(&g), 1, 0, NoiseModel::None).unwrap();
        assert_eq!(rep.rows[0].gap, p.gap(&y0).unwrap());
        assert!(z_bound_check(&rep, &p).unwrap());
    }

    #[test]
    fn one_step_matches_multiplicative_weights() {
        // Hand computation: y₀ uniform, m = F(y₀) = (Ay, −Aᵀz) = (0, 0, 0, 0) for
        // the symmetric 2×2 game, so take an asymmetric one.
        let a = dmatrix![2.0, -1.0; 0.0, 1.0];
        let p = make_matrix_game(a).unwrap();
        let g = BregmanGeometry::entropy(p.set().clone()).unwrap();
        let eta = g.diameter();
        let mut s = SolverState::new(&g, smooth(&g));
        let r = mp_iterate(&mut s, &mut Exact(&p), &g).unwrap();
        // Ay = (0.5, 0.5), −Aᵀz = (−1, 0)
        let w = |u: f64, v: f64| ((-eta * u).exp(), (-eta * v).exp());
        let (a1, a2) = w(0.5, 0.5);
        let (b1, b2) = w(-1.0, 0.0);
        let expect = [a1 / (a1 + a2), a2 / (a1 + a2), b1 / (b1 + b2), b2 / (b1 + b2)];
        for (u, v) in r.x.iter().zip(expect) {
            assert_abs_diff_eq!(*u, v, epsilon = 1e-14);
        }
        assert_eq!(r.m, vec![0.5, 0.5, -1.0, 0.0]);
    }

    #[test]
    fn run_rejects_empty_budget() {
        let set = FeasibleSet::Simplex(2);
        let p = make_zero(set.clone(), GeometryKind::Euclidean);
        let g = BregmanGeometry::euclidean(set).unwrap();
        assert!(matches!(run(&p, &g, smooth(&g), 0, 0, NoiseModel::None), Err(Error::IterationBudgetZero)));
    }

    #[test]
    fn stride_thins_long_runs() {
        assert_eq!(gap_stride(1), 1);
        assert_eq!(gap_stride(10_000), 1);
        assert_eq!(gap_stride(10_001), 2);
        assert_eq!(gap_stride(100_000), 10);
    }

    #[test]
    fn fixed_policy_has_no_z_bound() {
        let p = make_matrix_game(dmatrix![1.0, -1.0; -1.0, 1.0]).unwrap();
        let g = BregmanGeometry::euclidean(p.set().clone()).unwrap();
        let pol = StepSizePolicy::new(PolicyKind::Fixed(0.1), g.diameter(), 1.0).unwrap();
        let rep = run(&p, &g, pol, 10, 0, NoiseModel::None).unwrap();
        assert!(matches!(z_bound_check(&rep, &p), Err(Error::MissingConstant(_))));
        assert_eq!(rep.rows.len(), 10);
        assert!(rep.rows.iter().all(|r| r.eta == 0.1));
    }
}
