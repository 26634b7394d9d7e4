use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mpx::geometry::sample::sample_point;
use mpx::geometry::BregmanGeometry;
use mpx::problems::{catalog, catalog_names};
use mpx::solver::{mp_iterate, run, Exact, PolicyKind, SolverState, StepSizePolicy};
use mpx::stochastic::{NoiseModel, NoisyOracle};

const DRAWS: usize = 20_000;

fn models(sigma: f64) -> [NoiseModel; 2] {
    [NoiseModel::SphereUniform(sigma), NoiseModel::ComponentBounded(sigma)]
}

#[test]
fn noisy_oracle_is_unbiased_with_bounded_variance() {
    for name in catalog_names() {
        let entry = catalog(name).unwrap();
        let p = &entry.problem;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = sample_point(p.set(), 1e-3, &mut rng);
        let f = p.evaluate(&x).unwrap();
        let d = f.len() as f64;
        for sigma in [0.1, 1.0] {
            for noise in models(sigma) {
                let mut o = NoisyOracle::new(p, noise, 5);
                let mut mean = vec![0.0; f.len()];
                let mut second = 0.0;
                for _ in 0..DRAWS {
                    let s = o.sample(&x).unwrap();
                    let xi: Vec<f64> = s.iter().zip(&f).map(|(a, b)| a - b).collect();
                    second += xi.iter().map(|v| v * v).sum::<f64>();
                    mean.iter_mut().zip(&xi).for_each(|(m, v)| *m += v / DRAWS as f64);
                }
                // each coordinate has variance ≤ σ²/d; allow five standard errors
                let tol = 5.0 * sigma / (d * DRAWS as f64).sqrt();
                for m in &mean {
                    assert!(m.abs() <= tol, "{name} {noise:?}: mean {m} > {tol}");
                }
                let var = second / DRAWS as f64;
                assert!(var <= sigma * sigma * (1.0 + 1e-12), "{name} {noise:?}: E‖ξ‖² = {var}");
                if matches!(noise, NoiseModel::SphereUniform(_)) {
                    assert!((var - sigma * sigma).abs() <= 1e-12 * sigma * sigma);
                } else {
                    // uniform coordinates: E‖ξ‖² = σ²/3
                    assert!((var / (sigma * sigma) - 1.0 / 3.0).abs() < 0.02, "{var}");
                }
            }
        }
    }
}

#[test]
fn noisy_dual_norm_stays_within_g_plus_sigma() {
    for name in catalog_names() {
        let entry = catalog(name).unwrap();
        let p = &entry.problem;
        for &kind in entry.compatible {
            let g = BregmanGeometry::new(kind, p.set().clone()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for sigma in [0.1, 1.0] {
                for noise in models(sigma) {
                    let mut o = NoisyOracle::new(p, noise, 9);
                    for _ in 0..500 {
                        let x = sample_point(p.set(), 1e-6, &mut rng);
                        let exact = g.dual_norm(&p.evaluate(&x).unwrap());
                        let noisy = g.dual_norm(&o.sample(&x).unwrap());
                        assert!(noisy <= exact + sigma * (1.0 + 1e-12), "{name} {kind:?}");
                        if let (Some(gb), true) = (p.lipschitz_bound(), kind == p.natural_geometry()) {
                            assert!(noisy <= gb + sigma + 1e-12, "{name}: {noisy} > {gb} + {sigma}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn silent_noise_reproduces_the_exact_path() {
    for name in catalog_names() {
        let entry = catalog(name).unwrap();
        let p = &entry.problem;
        let g = BregmanGeometry::new(entry.default_geometry, p.set().clone()).unwrap();
        let policy = || StepSizePolicy::new(PolicyKind::StochasticUniversal, g.diameter(), 1.0).unwrap();
        let reference = run(p, &g, policy(), 300, 0, NoiseModel::None).unwrap();
        for noise in models(0.0) {
            for seed in [0, 1, 99] {
                let r = run(p, &g, policy(), 300, seed, noise).unwrap();
                assert_eq!(r.rows, reference.rows, "{name} {noise:?} seed {seed}");
                assert_eq!(r.meta.final_average, reference.meta.final_average);
            }
        }
        let mut s = SolverState::new(&g, policy());
        for _ in 0..300 {
            mp_iterate(&mut s, &mut Exact(p), &g).unwrap();
        }
        assert_eq!(s.ergodic_average(), reference.meta.final_average, "{name}");
    }
}

#[test]
fn seeds_give_independent_reproducible_streams() {
    let entry = catalog("matgame-2x2").unwrap();
    let p = &entry.problem;
    let x = vec![0.5; 4];
    let noise = NoiseModel::SphereUniform(1.0);
    let mut a = NoisyOracle::new(p, noise, 1);
    let mut b = a.reseeded(1);
    let mut c = NoisyOracle::new(p, noise, 2);
    for _ in 0..10 {
        let (va, vb, vc) = (a.sample(&x).unwrap(), b.sample(&x).unwrap(), c.sample(&x).unwrap());
        assert_eq!(va, vb);
        assert_ne!(va, vc);
    }
}
