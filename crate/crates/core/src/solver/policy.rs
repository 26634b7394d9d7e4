//! Step-size policies: fixed, norm-based universal, and the Bregman variants.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::BregmanGeometry;

/// Divergences below this are treated as `x_t = y_{t−1}` by the adaptive-Lβ rule.
pub const ADAPTIVE_DIVERGENCE_FLOOR: f64 = 1e-14;
pub const DEFAULT_THETA: f64 = 0.9;
pub const DEFAULT_G0: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    Fixed(f64),
    UniversalNorm,
    BregmanSmooth,
    BregmanBounded,
    StochasticUniversal,
    AdaptiveLbeta(f64),
}

impl PolicyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyKind::Fixed(_) => "fixed",
            PolicyKind::UniversalNorm => "unorm",
            PolicyKind::BregmanSmooth => "bsmooth",
            PolicyKind::BregmanBounded => "bbounded",
            PolicyKind::StochasticUniversal => "stoch",
            PolicyKind::AdaptiveLbeta(_) => "adaptlb",
        }
    }

    /// Policies whose step is `D/√S`.
    pub fn is_universal(&self) -> bool {
        matches!(
            self,
            PolicyKind::UniversalNorm | PolicyKind::BregmanSmooth | PolicyKind::BregmanBounded | PolicyKind::StochasticUniversal
        )
    }

    /// Constant `c` the convergence proofs pair with the policy. The stochastic
    /// default is the smooth-regime value; bounded-regime runs pass `c = 1`.
    pub fn default_c(&self) -> f64 {
        match self {
            PolicyKind::BregmanSmooth => 2f64.sqrt(),
            PolicyKind::BregmanBounded => 1.0,
            PolicyKind::StochasticUniversal => 5.0,
            PolicyKind::UniversalNorm => 5f64.sqrt(),
            // Not used by the step; the Z column reports the smooth statistic.
            PolicyKind::Fixed(_) | PolicyKind::AdaptiveLbeta(_) => 2f64.sqrt(),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    /// Parses the CLI names; `fixed` gets η = 0.1 and `adaptlb` θ = 0.9 until overridden.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fixed" => PolicyKind::Fixed(0.1),
            "unorm" => PolicyKind::UniversalNorm,
            "bsmooth" => PolicyKind::BregmanSmooth,
            "bbounded" => PolicyKind::BregmanBounded,
            "stoch" => PolicyKind::StochasticUniversal,
            "adaptlb" => PolicyKind::AdaptiveLbeta(DEFAULT_THETA),
            other => return Err(Error::InvalidConfig(format!("unknown policy '{other}'"))),
        })
    }
}

/// Step-size state: `η_t = D/√(G₀² + Σ_{i<t} Zᵢ²)` for the universal kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSizePolicy {
    kind: PolicyKind,
    d: f64,
    g0: f64,
    c: f64,
    /// `Σ Zᵢ²`, kept apart from `G₀²` so that `η₁ = D/|G₀|` holds exactly.
    z_sq_sum: f64,
    /// Current step of the adaptive-Lβ rule.
    adaptive_eta: f64,
}

impl StepSizePolicy {
    pub fn new(kind: PolicyKind, d: f64, g0: f64) -> Result<Self> {
        Self::with_c(kind, d, g0, kind.default_c())
    }

    pub fn with_c(kind: PolicyKind, d: f64, g0: f64, c: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::InvalidConfig(format!("diameter must be positive, got {d}")));
        }
        if g0 == 0.0 || !g0.is_finite() {
            return Err(Error::InvalidConfig(format!("G0 must be nonzero and finite, got {g0}")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidConfig(format!("c must be positive, got {c}")));
        }
        match kind {
            PolicyKind::Fixed(eta) if !(eta > 0.0) || !eta.is_finite() => return Err(Error::NonPositiveStep(eta)),
            PolicyKind::AdaptiveLbeta(theta) if !(theta > 0.0) || !theta.is_finite() => {
                return Err(Error::InvalidConfig(format!("theta must be positive, got {theta}")))
            }
            _ => {}
        }
        Ok(StepSizePolicy { kind, d, g0, c, z_sq_sum: 0.0, adaptive_eta: d / g0.abs() })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn diameter(&self) -> f64 {
        self.d
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `S = G₀² + Σ Zᵢ²`.
    pub fn accumulator(&self) -> f64 {
        self.g0 * self.g0 + self.z_sq_sum
    }

    /// Step for the upcoming iteration.
    pub fn step_size(&self) -> f64 {
        match self.kind {
            PolicyKind::Fixed(eta) => eta,
            PolicyKind::AdaptiveLbeta(_) => self.adaptive_eta,
            _ if self.z_sq_sum == 0.0 => self.d / self.g0.abs(),
            _ => self.d / self.accumulator().sqrt(),
        }
    }

    /// Computes `Z_t` from the iterates of step `t` and folds `Z_t²` into `S`.
    ///
    /// `m` and `g` are the operator values used at `y_{t−1}` and `x_t`; only the
    /// adaptive-Lβ rule reads them.
    #[allow(clippy::too_many_arguments)]
    pub fn z_statistic(
        &mut self,
        geom: &BregmanGeometry,
        y_prev: &[f64],
        x_t: &[f64],
        y_t: &[f64],
        eta: f64,
        m: &[f64],
        g: &[f64],
    ) -> Result<f64> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::NonPositiveStep(eta));
        }
        let c2 = self.c * self.c;
        let eta2 = eta * eta;
        let z2 = match self.kind {
            PolicyKind::UniversalNorm => {
                let a: Vec<f64> = x_t.iter().zip(y_prev).map(|(a, b)| a - b).collect();
                let b: Vec<f64> = x_t.iter().zip(y_t).map(|(a, b)| a - b).collect();
                (geom.norm(&a).powi(2) + geom.norm(&b).powi(2)) / (c2 * eta2)
            }
            PolicyKind::BregmanBounded | PolicyKind::StochasticUniversal => {
                (geom.divergence(x_t, y_prev)? + geom.divergence(y_t, x_t)?) / (c2 * eta2)
            }
            PolicyKind::BregmanSmooth | PolicyKind::Fixed(_) | PolicyKind::AdaptiveLbeta(_) => {
                geom.divergence(x_t, y_prev)? / (c2 * eta2)
            }
        };
        if self.kind.is_universal() {
            self.z_sq_sum += z2;
        }
        if let PolicyKind::AdaptiveLbeta(theta) = self.kind {
            let div = geom.divergence(x_t, y_prev)?;
            if div >= ADAPTIVE_DIVERGENCE_FLOOR {
                let diff: Vec<f64> = g.iter().zip(m).map(|(a, b)| a - b).collect();
                let lbeta = geom.dual_norm(&diff) / div.sqrt();
                if lbeta > 0.0 {
                    self.adaptive_eta = self.adaptive_eta.min(theta / lbeta);
                }
            }
        }
        Ok(z2.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FeasibleSet;
    use approx::assert_relative_eq;

    fn simplex2() -> BregmanGeometry {
        BregmanGeometry::euclidean(FeasibleSet::Simplex(2)).unwrap()
    }

    #[test]
    fn first_step_is_d_over_g0() {
        for kind in [PolicyKind::UniversalNorm, PolicyKind::BregmanSmooth, PolicyKind::BregmanBounded, PolicyKind::StochasticUniversal] {
            let p = StepSizePolicy::new(kind, 0.7, -3.0).unwrap();
            assert_eq!(p.step_size(), 0.7 / 3.0);
        }
    }

    #[test]
    fn accumulator_example() {
        // D = 1, G₀ = 1, Z₁² = 3 → η₂ = 1/2
        let mut p = StepSizePolicy::new(PolicyKind::BregmanSmooth, 1.0, 1.0).unwrap();
        p.z_sq_sum += 3.0;
        assert_eq!(p.step_size(), 0.5);
    }

    #[test]
    fn smooth_z_example() {
        // ½‖x − y‖² = 0.08 with ‖x − y‖ = 0.4; η = 0.2 → Z² = 0.08/(2·0.04) = 1
        let g = simplex2();
        let mut p = StepSizePolicy::new(PolicyKind::BregmanSmooth, 1.0, 1.0).unwrap();
        let (y, x) = ([0.3, 0.7], [0.3 + 0.4 / 2f64.sqrt(), 0.7 - 0.4 / 2f64.sqrt()]);
        let z = p.z_statistic(&g, &y, &x, &x, 0.2, &[0.0; 2], &[0.0; 2]).unwrap();
        assert_relative_eq!(z, 1.0, epsilon = 1e-12);
        assert_relative_eq!(p.accumulator(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bounded_z_example() {
        // Two divergences of 0.02 each, η = 0.2 → Z² = 0.04/0.04 = 1
        let g = simplex2();
        let mut p = StepSizePolicy::new(PolicyKind::BregmanBounded, 1.0, 1.0).unwrap();
        let h = 0.2 / 2f64.sqrt();
        let (y, x, yt) = ([0.5, 0.5], [0.5 + h, 0.5 - h], [0.5, 0.5]);
        let z = p.z_statistic(&g, &y, &x, &yt, 0.2, &[0.0; 2], &[0.0; 2]).unwrap();
        assert_relative_eq!(z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stationary_iterates_give_zero() {
        let g = simplex2();
        let y = [0.4, 0.6];
        for kind in [PolicyKind::UniversalNorm, PolicyKind::BregmanSmooth, PolicyKind::BregmanBounded, PolicyKind::StochasticUniversal, PolicyKind::AdaptiveLbeta(0.9)] {
            let mut p = StepSizePolicy::new(kind, 1.0, 1.0).unwrap();
            assert_eq!(p.z_statistic(&g, &y, &y, &y, 0.5, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
            assert_eq!(p.step_size(), 1.0);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let g = simplex2();
        let mut p = StepSizePolicy::new(PolicyKind::BregmanSmooth, 1.0, 1.0).unwrap();
        assert!(matches!(p.z_statistic(&g, &[0.5; 2], &[0.5; 2], &[0.5; 2], 0.0, &[0.0; 2], &[0.0; 2]), Err(Error::NonPositiveStep(_))));
        assert!(StepSizePolicy::new(PolicyKind::Fixed(-1.0), 1.0, 1.0).is_err());
        assert!(StepSizePolicy::new(PolicyKind::BregmanSmooth, 1.0, 0.0).is_err());
    }

    #[test]
    fn default_constants() {
        assert_eq!(PolicyKind::BregmanSmooth.default_c().powi(2).round(), 2.0);
        assert_eq!(PolicyKind::BregmanBounded.default_c(), 1.0);
        assert_eq!(PolicyKind::StochasticUniversal.default_c(), 5.0);
        for name in ["fixed", "unorm", "bsmooth", "bbounded", "stoch", "adaptlb"] {
            assert_eq!(name.parse::<PolicyKind>().unwrap().as_str(), name);
        }
    }
}
