//! Experiment configuration: flat `key=value` files plus overriding flags.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::geometry::GeometryKind;
use crate::solver::{PolicyKind, DEFAULT_G0};
use crate::stochastic::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Sphere,
    Component,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    /// Catalog default when absent.
    pub geometry: Option<GeometryKind>,
    pub policy: PolicyKind,
    pub iters: u64,
    pub seeds: Vec<u64>,
    pub sigma: f64,
    pub noise: NoiseKind,
    pub d_override: Option<f64>,
    pub g0: f64,
    /// Overrides the policy's default constant.
    pub c: Option<f64>,
    pub theta: Option<f64>,
    /// Step of the fixed policy.
    pub eta: Option<f64>,
    pub output_path: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: String::new(),
            geometry: None,
            policy: PolicyKind::BregmanSmooth,
            iters: 1000,
            seeds: vec![0],
            sigma: 0.0,
            noise: NoiseKind::Sphere,
            d_override: None,
            g0: DEFAULT_G0,
            c: None,
            theta: None,
            eta: None,
            output_path: None,
        }
    }
}

pub const CONFIG_KEYS: &[&str] =
    &["problem", "geometry", "policy", "iters", "seed", "seeds", "sigma", "noise", "diameter", "g0", "c", "theta", "eta", "out"];

impl ExperimentConfig {
    /// Parses a config file body: `key=value` lines, `#` comments, blank lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key=value", no + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Applies one setting; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidConfig(format!("invalid {what} '{value}'"));
        let real = |what: &str| value.parse::<f64>().map_err(|_| bad(what));
        match key {
            "problem" => self.problem = value.to_string(),
            "geometry" => self.geometry = Some(value.parse()?),
            "policy" => self.policy = value.parse()?,
            "iters" => self.iters = value.parse().map_err(|_| bad("iteration count"))?,
            "seed" | "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|s| s.trim().parse::<u64>().map_err(|_| bad("seed list")))
                    .collect::<Result<_>>()?
            }
            "sigma" => self.sigma = real("sigma")?,
            "noise" => {
                self.noise = match value {
                    "sphere" => NoiseKind::Sphere,
                    "component" => NoiseKind::Component,
                    _ => return Err(bad("noise kind")),
                }
            }
            "diameter" => self.d_override = Some(real("diameter")?),
            "g0" => self.g0 = real("g0")?,
            "c" => self.c = Some(real("c")?),
            "theta" => self.theta = Some(real("theta")?),
            "eta" => self.eta = Some(real("eta")?),
            "out" => self.output_path = Some(PathBuf::from(value)),
            other => return Err(Error::InvalidConfig(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Policy with its step parameter (`eta` / `theta`) folded in.
    pub fn resolved_policy(&self) -> PolicyKind {
        match self.policy {
            PolicyKind::Fixed(eta) => PolicyKind::Fixed(self.eta.unwrap_or(eta)),
            PolicyKind::AdaptiveLbeta(theta) => PolicyKind::AdaptiveLbeta(self.theta.unwrap_or(theta)),
            k => k,
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        match (self.sigma == 0.0, self.noise) {
            (true, _) => NoiseModel::None,
            (false, NoiseKind::Sphere) => NoiseModel::SphereUniform(self.sigma),
            (false, NoiseKind::Component) => NoiseModel::ComponentBounded(self.sigma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.problem.is_empty() {
            return Err(Error::InvalidConfig("no problem given".into()));
        }
        if self.iters == 0 {
            return Err(Error::IterationBudgetZero);
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("seed list is empty".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        if self.eta.is_some() && !matches!(self.policy, PolicyKind::Fixed(_)) {
            return Err(Error::InvalidConfig("eta only applies to the fixed policy".into()));
        }
        if self.theta.is_some() && !matches!(self.policy, PolicyKind::AdaptiveLbeta(_)) {
            return Err(Error::InvalidConfig("theta only applies to the adaptlb policy".into()));
        }
        Ok(())
    }
}
