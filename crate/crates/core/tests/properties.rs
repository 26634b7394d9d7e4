use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mpx::geometry::sample::sample_point;
use mpx::geometry::{BregmanGeometry, FeasibleSet, GeometryKind, FEASIBILITY_TOL};
use mpx::harness::{estimate_slope, parse_csv, prefix_sums, sequence_bounds, to_csv};
use mpx::problems::{make_matrix_game, monotonicity_residual};
use mpx::solver::{mp_iterate, run, Exact, PolicyKind, RunMeta, RunReport, SolverState, StepSizePolicy, TraceRow};
use mpx::stochastic::{NoiseModel, NoisyOracle};

fn game(m: usize, n: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, n, &entries[..m * n])
}

fn geometries() -> Vec<BregmanGeometry> {
    vec![
        BregmanGeometry::entropy(FeasibleSet::Simplex(5)).unwrap(),
        BregmanGeometry::euclidean(FeasibleSet::Product(vec![FeasibleSet::Simplex(3), FeasibleSet::ball(vec![1.0, -2.0], 0.5)])).unwrap(),
        BregmanGeometry::euclidean(FeasibleSet::cube(3, -1.0, 2.0)).unwrap(),
        BregmanGeometry::cube(FeasibleSet::ball(vec![2.0, 1.0], 1.5)).unwrap(),
        BregmanGeometry::cube(FeasibleSet::centered_ball(3, 2.0)).unwrap(),
    ]
}

const UNIVERSAL: [PolicyKind; 4] =
    [PolicyKind::UniversalNorm, PolicyKind::BregmanSmooth, PolicyKind::BregmanBounded, PolicyKind::StochasticUniversal];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_sizes_never_increase(
        m in 1usize..=3, n in 1usize..=3,
        entries in prop::collection::vec(-3.0f64..3.0, 9),
        g0 in prop_oneof![0.1f64..10.0, -10.0f64..-0.1],
        policy in 0usize..4,
        sigma in prop_oneof![Just(0.0), 0.01f64..1.0],
        seed in any::<u64>(),
        entropy in any::<bool>(),
    ) {
        // A 1×1 game lives on a single point.
        prop_assume!(m + n > 2);
        let p = make_matrix_game(game(m, n, &entries)).unwrap();
        let kind = if entropy { GeometryKind::NegativeEntropy } else { GeometryKind::Euclidean };
        let g = BregmanGeometry::new(kind, p.set().clone()).unwrap();
        let pol = StepSizePolicy::new(UNIVERSAL[policy], g.diameter(), g0).unwrap();
        let r = run(&p, &g, pol, 60, seed, NoiseModel::SphereUniform(sigma)).unwrap();
        prop_assert_eq!(r.rows[0].eta, g.diameter() / g0.abs());
        prop_assert!(r.meta.eta_monotone);
        prop_assert!(r.rows.windows(2).all(|w| w[1].eta <= w[0].eta));
        prop_assert_eq!(r.rows.len(), 60);
    }

    #[test]
    fn accumulator_is_nondecreasing(
        entries in prop::collection::vec(-3.0f64..3.0, 9),
        policy in 0usize..4,
    ) {
        let p = make_matrix_game(game(3, 3, &entries)).unwrap();
        let g = BregmanGeometry::entropy(p.set().clone()).unwrap();
        let mut s = SolverState::new(&g, StepSizePolicy::new(UNIVERSAL[policy], g.diameter(), 1.0).unwrap());
        let mut last = s.policy.accumulator();
        prop_assert_eq!(last, 1.0);
        for _ in 0..40 {
            mp_iterate(&mut s, &mut Exact(&p), &g).unwrap();
            prop_assert!(s.policy.accumulator() >= last);
            last = s.policy.accumulator();
        }
    }

    #[test]
    fn ergodic_average_is_feasible_and_exact(
        m in 1usize..=3, n in 1usize..=3,
        entries in prop::collection::vec(-3.0f64..3.0, 9),
        entropy in any::<bool>(),
    ) {
        // A 1×1 game lives on a single point.
        prop_assume!(m + n > 2);
        let p = make_matrix_game(game(m, n, &entries)).unwrap();
        let kind = if entropy { GeometryKind::NegativeEntropy } else { GeometryKind::Euclidean };
        let g = BregmanGeometry::new(kind, p.set().clone()).unwrap();
        let mut s = SolverState::new(&g, StepSizePolicy::new(PolicyKind::BregmanSmooth, g.diameter(), 1.0).unwrap());
        let mut xs = Vec::new();
        for _ in 0..30 {
            let step = mp_iterate(&mut s, &mut Exact(&p), &g).unwrap();
            prop_assert!(g.set().contains(&step.x, FEASIBILITY_TOL));
            prop_assert!(g.set().contains(&s.y_prev, FEASIBILITY_TOL));
            xs.push(step.x);
            let avg = s.ergodic_average();
            prop_assert!(g.set().contains(&avg, FEASIBILITY_TOL));
            for (i, a) in avg.iter().enumerate() {
                let mean = xs.iter().map(|x| x[i]).sum::<f64>() / xs.len() as f64;
                prop_assert!((a - mean).abs() <= 1e-15);
            }
        }
    }

    /// For bilinear games `Σ⟨g_t, x_t − u⟩/T = ⟨F(x̄), x̄ − u⟩`, so the best-response
    /// regret equals the duality gap and regret against `x*` sits below it.
    #[test]
    fn regret_brackets_the_duality_gap(
        entries in prop::collection::vec(-3.0f64..3.0, 4),
        t in 1usize..200,
    ) {
        let a = game(2, 2, &entries);
        let p = make_matrix_game(a).unwrap();
        let g = BregmanGeometry::entropy(p.set().clone()).unwrap();
        let mut s = SolverState::new(&g, StepSizePolicy::new(PolicyKind::BregmanSmooth, g.diameter(), 1.0).unwrap());
        let mut gsum = [0.0; 4];
        let mut inner = 0.0;
        for _ in 0..t {
            let step = mp_iterate(&mut s, &mut Exact(&p), &g).unwrap();
            inner += step.g.iter().zip(&step.x).map(|(u, v)| u * v).sum::<f64>();
            gsum.iter_mut().zip(&step.g).for_each(|(acc, v)| *acc += v);
        }
        let tf = t as f64;
        let block_min = |b: &[f64]| b.iter().copied().fold(f64::INFINITY, f64::min);
        let best_response = (inner - block_min(&gsum[..2]) - block_min(&gsum[2..])) / tf;
        let gap = p.gap(&s.ergodic_average()).unwrap();
        prop_assert!((gap - best_response).abs() <= 1e-9 * (1.0 + gap.abs()));
        let xbar = s.ergodic_average();
        let eq = mpx::harness::brute_force_game(&game(2, 2, &entries), 400).unwrap();
        let xstar: Vec<f64> = eq.z.iter().chain(&eq.y).copied().collect();
        let against_xstar = (inner - gsum.iter().zip(&xstar).map(|(u, v)| u * v).sum::<f64>()) / tf;
        prop_assert!(against_xstar <= gap + 1e-9);
        prop_assert!(g.set().contains(&xbar, FEASIBILITY_TOL));
    }

    #[test]
    fn divergences_are_nonnegative_and_prox_is_feasible(seed in any::<u64>(), which in 0usize..5, scale in -4.0f64..2.0) {
        let geoms = geometries();
        let g = &geoms[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_point(g.set(), 0.0, &mut rng);
        let y = sample_point(g.set(), 0.0, &mut rng);
        prop_assert!(g.divergence(&y, &x).unwrap() >= 0.0);
        let d: Vec<f64> = sample_point(&FeasibleSet::centered_ball(g.dim(), 10f64.powf(scale)), 0.0, &mut rng);
        let xp = g.prox_step(&x, &d, 0.7).unwrap();
        prop_assert!(g.set().contains(&xp, FEASIBILITY_TOL));
        prop_assert!(g.divergence(&y, &g.initial_point()).unwrap() <= g.diameter().powi(2) * (1.0 + 1e-12));
    }

    /// Three-point inequality `η⟨d, x⁺ − p⟩ ≤ D(p,x) − D(p,x⁺) − D(x⁺,x)`.
    #[test]
    fn prox_satisfies_three_point(seed in any::<u64>(), which in 0usize..5, eta in 0.01f64..5.0) {
        let geoms = geometries();
        let g = &geoms[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let floor = if g.kind() == GeometryKind::NegativeEntropy { 1e-6 } else { 0.0 };
        let x = sample_point(g.set(), floor, &mut rng);
        let p = sample_point(g.set(), 0.0, &mut rng);
        let d = sample_point(&FeasibleSet::centered_ball(g.dim(), 2.0), 0.0, &mut rng);
        let xp = g.prox_step(&x, &d, eta).unwrap();
        let lhs: f64 = eta * xp.iter().zip(&p).zip(&d).map(|((a, b), v)| (a - b) * v).sum::<f64>();
        let rhs = g.divergence(&p, &x).unwrap() - g.divergence(&p, &xp).unwrap() - g.divergence(&xp, &x).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn games_are_monotone(m in 1usize..=3, n in 1usize..=3, entries in prop::collection::vec(-5.0f64..5.0, 9)) {
        let p = make_matrix_game(game(m, n, &entries)).unwrap();
        prop_assert!(monotonicity_residual(&p, 200, 1).unwrap() >= -1e-12);
    }

    #[test]
    fn noise_is_bounded(sigma in 0.0f64..3.0, seed in any::<u64>(), sphere in any::<bool>()) {
        let p = make_matrix_game(game(2, 3, &[1.0, 0.0, -1.0, 2.0, 0.5, 0.0])).unwrap();
        let model = if sphere { NoiseModel::SphereUniform(sigma) } else { NoiseModel::ComponentBounded(sigma) };
        let mut o = NoisyOracle::new(&p, model, seed);
        let x = [0.5, 0.5, 0.2, 0.3, 0.5];
        let f = p.evaluate(&x).unwrap();
        for _ in 0..50 {
            let s = o.sample(&x).unwrap();
            let dev = s.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(dev <= sigma * (1.0 + 1e-12));
        }
    }

    #[test]
    fn inverse_sum_lemmas_hold(
        a0 in 1.0f64..1e3,
        amax in 1e-3f64..1e3,
        fractions in prop::collection::vec(0.0f64..=1.0, 1..300),
    ) {
        let a: Vec<f64> = fractions.iter().map(|f| f * amax).collect();
        let (s, l) = prefix_sums(a0, &a);
        let (lo, hi, log_hi) = sequence_bounds(a0, amax, &a);
        prop_assert!(lo <= s * (1.0 + 1e-12));
        prop_assert!(s <= hi);
        prop_assert!(l <= log_hi);
    }

    #[test]
    fn slope_is_exact_on_power_laws(exponent in -3.0f64..3.0, c in 1e-6f64..1e6, len in 10usize..2000) {
        let trace: Vec<(u64, f64)> = (1..=len as u64).map(|t| (t, c * (t as f64).powf(exponent))).collect();
        let e = estimate_slope(&trace, 0.5).unwrap();
        prop_assert!((e.slope - exponent).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&e.r_squared));
    }

    #[test]
    fn csv_round_trips(
        rows in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>(), prop::option::of(any::<f64>())), 0..40),
        avg in prop::collection::vec(-1e3f64..1e3, 0..6),
        seed in any::<u64>(),
    ) {
        let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
        let report = RunReport {
            meta: RunMeta {
                problem: "matgame-rps".into(),
                geometry: GeometryKind::CubeNorm,
                policy: "stoch".into(),
                seed,
                iters: rows.len() as u64,
                diameter: 1.25,
                g0: -2.0,
                c: 5.0,
                noise: "component".into(),
                sigma: 0.125,
                gap_stride: 1,
                eta_first: 0.625,
                eta_monotone: false,
                eta_exceeds_one: false,
                max_z: 3.0,
                max_dual_norm: 1e-300,
                final_average: avg,
            },
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, (a, b, c, d))| TraceRow { t: i as u64 + 1, eta: finite(*a), z: finite(*b), gap: finite(*c), cum_regret: d.map(finite) })
                .collect(),
        };
        let back = parse_csv(&to_csv(&report)).unwrap();
        prop_assert_eq!(back, report);
    }
}
