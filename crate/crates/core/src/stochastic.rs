//! Unbiased, bounded-support noise oracles and the martingale-difference check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::problems::MonotoneProblem;
use crate::solver::Oracle;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// Uniform on the Euclidean sphere of radius σ.
    SphereUniform(f64),
    /// Independent coordinates, uniform in `[−σ/√d, σ/√d]`.
    ComponentBounded(f64),
}

impl NoiseModel {
    pub fn sigma(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::SphereUniform(s) | NoiseModel::ComponentBounded(s) => s,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::None => "none",
            NoiseModel::SphereUniform(_) => "sphere",
            NoiseModel::ComponentBounded(_) => "component",
        }
    }

    pub fn is_silent(&self) -> bool {
        self.sigma() == 0.0
    }

    /// One draw of ξ ∈ ℝ^d; `‖ξ‖₂ ≤ σ` by construction.
    pub fn draw<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Vec<f64> {
        match *self {
            NoiseModel::None => vec![0.0; d],
            NoiseModel::SphereUniform(s) => loop {
                let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n > 0.0 {
                    break g.into_iter().map(|v| s * v / n).collect();
                }
            },
            NoiseModel::ComponentBounded(s) => {
                let h = s / (d as f64).sqrt();
                (0..d).map(|_| if h > 0.0 { rng.gen_range(-h..=h) } else { 0.0 }).collect()
            }
        }
    }
}

/// 64-bit FNV-1a, used to decorrelate streams of different problems sharing a seed.
pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// `F̃(x) = F(x) + ξ` with a private generator per run.
#[derive(Debug, Clone)]
pub struct NoisyOracle<'a> {
    base: &'a MonotoneProblem,
    noise: NoiseModel,
    rng: ChaCha8Rng,
}

impl<'a> NoisyOracle<'a> {
    pub fn new(base: &'a MonotoneProblem, noise: NoiseModel, seed: u64) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(base.name()));
        NoisyOracle { base, noise, rng }
    }

    /// Same problem and noise, fresh generator.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self::new(self.base, self.noise, seed)
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    /// Fresh draw of `F̃(x)`; with σ = 0 this is `F(x)` exactly and consumes no randomness.
    pub fn sample(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        let mut f = self.base.evaluate(x)?;
        if !self.noise.is_silent() {
            let xi = self.noise.draw(f.len(), &mut self.rng);
            f.iter_mut().zip(xi).for_each(|(a, b)| *a += b);
        }
        Ok(f)
    }
}

impl Oracle for NoisyOracle<'_> {
    fn query(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.sample(x)
    }
}

/// Outcome of one martingale scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleScenario {
    pub name: &'static str,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Monte-Carlo check of `E⟨Σ Zᵢ, X⟩ ≤ (D/2)·√(Σ E‖Zᵢ‖²)`.
///
/// `X` ranges over the Euclidean ball of diameter `D` in ℝ³. Scenarios: the zero
/// sequence; history-dependent bounded differences with the adversarial
/// `X = (D/2)·S/‖S‖`; i.i.d. sphere-uniform differences against a fixed `X`; and a
/// single Rademacher step along `e₁`.
pub fn martingale_scenarios(d: f64, trials: usize, n: usize, seed: u64) -> Vec<MartingaleScenario> {
    const DIM: usize = 3;
    let r = d / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut run = |name: &'static str, steps: usize, rng: &mut ChaCha8Rng, draw: &dyn Fn(&[f64], &mut ChaCha8Rng) -> Vec<f64>, x_of: &dyn Fn(&[f64]) -> Vec<f64>| {
        let mut lhs = Vec::with_capacity(trials);
        let mut sq = 0.0;
        for _ in 0..trials {
            let mut s = vec![0.0; DIM];
            for _ in 0..steps {
                let z = draw(&s, rng);
                sq += z.iter().map(|v| v * v).sum::<f64>();
                s.iter_mut().zip(&z).for_each(|(a, b)| *a += b);
            }
            let x = x_of(&s);
            lhs.push(s.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>());
        }
        let m = trials as f64;
        let mean = lhs.iter().sum::<f64>() / m;
        let var = lhs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        let se = (var / m).sqrt();
        let bound = r * (sq / m).sqrt();
        out.push(MartingaleScenario { name, estimate: mean, std_error: se, bound, pass: mean <= bound + 3.0 * se });
    };

    let adversarial = move |s: &[f64]| {
        let n = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.0 { s.iter().map(|v| r * v / n).collect() } else { vec![0.0; DIM] }
    };

    run("zero", n, &mut rng, &|_, _| vec![0.0; DIM], &adversarial);
    run(
        "history-dependent",
        n,
        &mut rng,
        &|s, rng| {
            // Direction and scale depend on the past; the fair sign keeps the conditional mean zero.
            let ns = s.iter().map(|v| v * v).sum::<f64>().sqrt();
            let scale = 1.0 / (1.0 + ns);
            let dir: Vec<f64> = if ns > 0.0 { s.iter().map(|v| v / ns).collect() } else { vec![1.0, 0.0, 0.0] };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            dir.into_iter().map(|v| sign * scale * v).collect()
        },
        &adversarial,
    );
    run(
        "iid-sphere-fixed-x",
        n,
        &mut rng,
        &|_, rng| NoiseModel::SphereUniform(1.0).draw(DIM, rng),
        &|_| vec![r, 0.0, 0.0],
    );
    run(
        "single-rademacher",
        1,
        &mut rng,
        &|_, rng| vec![if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0, 0.0],
        &adversarial,
    );
    out
}

/// True iff every scenario of [`martingale_scenarios`] passes within three standard errors.
pub fn martingale_lemma_check(d: f64, trials: usize, n: usize, seed: u64) -> bool {
    martingale_scenarios(d, trials, n, seed).iter().all(|s| s.pass)
}
