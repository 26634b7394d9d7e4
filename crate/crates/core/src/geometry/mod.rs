//! Divergence-generating functions, Bregman divergences and mirror (prox) steps.
//!
//! A [`BregmanGeometry`] pairs a [`FeasibleSet`] with one generating function `R`:
//!
//! * `Euclidean`: `R(x) = ½‖x − c‖²` with `c` the natural centre of the set,
//!   paired with the ℓ₂ norm;
//! * `NegativeEntropy`: `R(x) = Σ xᵢ ln xᵢ` on simplices, paired with ℓ₁ (Pinsker);
//! * `CubeNorm`: `R(x) = ⅓‖x‖₂³` on Euclidean balls.
//!
//! Product sets use the sum of the per-block generating functions, and the
//! product norm `√(Σ ‖v_b‖²)` over blocks.

pub mod sample;
mod set;

pub use set::{FeasibleSet, FEASIBILITY_TOL};

pub(crate) use set::{dist2, norm2};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Coordinates are clamped to this floor before entropy evaluations.
pub const ENTROPY_FLOOR: f64 = 1e-12;

const ROOT_MAX_ITER: usize = 200;
const ROOT_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    Euclidean,
    NegativeEntropy,
    CubeNorm,
}

impl GeometryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeometryKind::Euclidean => "euclidean",
            GeometryKind::NegativeEntropy => "entropy",
            GeometryKind::CubeNorm => "cube",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(GeometryKind::Euclidean),
            "entropy" => Ok(GeometryKind::NegativeEntropy),
            "cube" => Ok(GeometryKind::CubeNorm),
            other => Err(Error::InvalidConfig(format!("unknown geometry '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BregmanGeometry {
    set: FeasibleSet,
    kind: GeometryKind,
    diameter: f64,
    floor: f64,
}

impl BregmanGeometry {
    /// Builds the geometry and computes its analytic Bregman diameter.
    pub fn new(kind: GeometryKind, set: FeasibleSet) -> Result<Self> {
        for (_, leaf) in set.leaves() {
            let ok = match kind {
                GeometryKind::Euclidean => true,
                GeometryKind::NegativeEntropy => matches!(leaf, FeasibleSet::Simplex(_)),
                GeometryKind::CubeNorm => matches!(leaf, FeasibleSet::Ball { .. }),
            };
            if !ok {
                return Err(Error::IncompatibleGeometry {
                    geometry: kind.to_string(),
                    set: leaf.to_string(),
                });
            }
            if leaf.dim() == 0 {
                return Err(Error::InvalidProblem("empty feasible block".into()));
            }
        }
        let diameter = diameter(kind, &set)?;
        Ok(BregmanGeometry { set, kind, diameter, floor: ENTROPY_FLOOR })
    }

    pub fn euclidean(set: FeasibleSet) -> Result<Self> {
        Self::new(GeometryKind::Euclidean, set)
    }

    pub fn entropy(set: FeasibleSet) -> Result<Self> {
        Self::new(GeometryKind::NegativeEntropy, set)
    }

    pub fn cube(set: FeasibleSet) -> Result<Self> {
        Self::new(GeometryKind::CubeNorm, set)
    }

    /// Replaces the analytic diameter with a larger user value.
    pub fn with_diameter(mut self, d: f64) -> Result<Self> {
        if !d.is_finite() || d < self.diameter {
            return Err(Error::DiameterTooSmall { given: d, analytic: self.diameter });
        }
        self.diameter = d;
        Ok(self)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn boundary_floor(&self) -> f64 {
        self.floor
    }

    /// `argmin_{x ∈ X} R(x)`, the mirror-prox starting point.
    pub fn initial_point(&self) -> Vec<f64> {
        let mut out = self.set.center();
        if self.kind == GeometryKind::CubeNorm {
            for (off, leaf) in self.set.leaves() {
                if let FeasibleSet::Ball { center, radius } = leaf {
                    let block = &mut out[off..off + leaf.dim()];
                    let nc = norm2(center);
                    if nc <= *radius {
                        block.fill(0.0);
                    } else {
                        let s = 1.0 - radius / nc;
                        for (v, &c) in block.iter_mut().zip(center) {
                            *v = c * s;
                        }
                    }
                }
            }
        }
        out
    }

    /// Value of the generating function `R(x)`.
    pub fn generating_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut total = 0.0;
        for (off, leaf) in self.set.leaves() {
            let xs = &x[off..off + leaf.dim()];
            total += match self.kind {
                GeometryKind::Euclidean => {
                    let c = leaf.center();
                    0.5 * dist2(xs, &c).powi(2)
                }
                GeometryKind::NegativeEntropy => {
                    let p = self.entropy_point(xs, off)?;
                    p.iter().map(|&v| v * v.ln()).sum()
                }
                GeometryKind::CubeNorm => norm2(xs).powi(3) / 3.0,
            };
        }
        Ok(total)
    }

    /// `D_R(y, x) = R(y) − R(x) − ⟨∇R(x), y − x⟩`.
    pub fn divergence(&self, y: &[f64], x: &[f64]) -> Result<f64> {
        self.check_dim(y)?;
        self.check_dim(x)?;
        let mut total = 0.0;
        for (off, leaf) in self.set.leaves() {
            let r = off..off + leaf.dim();
            total += self.leaf_divergence(&y[r.clone()], &x[r], off)?;
        }
        Ok(total.max(0.0))
    }

    fn leaf_divergence(&self, y: &[f64], x: &[f64], off: usize) -> Result<f64> {
        Ok(match self.kind {
            GeometryKind::Euclidean => 0.5 * dist2(y, x).powi(2),
            GeometryKind::NegativeEntropy => {
                let yp = self.entropy_point(y, off)?;
                let xp = self.entropy_point(x, off)?;
                yp.iter().zip(&xp).map(|(&a, &b)| b * kl_term((a - b) / b)).sum()
            }
            GeometryKind::CubeNorm => {
                let ny = norm2(y);
                let nx = norm2(x);
                let dot: f64 = y.iter().zip(x).map(|(a, b)| a * b).sum();
                ny.powi(3) / 3.0 + 2.0 * nx.powi(3) / 3.0 - nx * dot
            }
        })
    }

    /// Exact minimiser of `η⟨d, z⟩ + D_R(z, x)` over the feasible set.
    pub fn prox_step(&self, x: &[f64], d: &[f64], eta: f64) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        self.check_dim(d)?;
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::NonPositiveStep(eta));
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut out = Vec::with_capacity(x.len());
        for (off, leaf) in self.set.leaves() {
            let r = off..off + leaf.dim();
            let (xs, ds) = (&x[r.clone()], &d[r]);
            match self.kind {
                GeometryKind::Euclidean => {
                    let step: Vec<f64> = xs.iter().zip(ds).map(|(a, b)| a - eta * b).collect();
                    out.extend(leaf.project(&step));
                }
                GeometryKind::NegativeEntropy => {
                    out.extend(self.entropy_prox(xs, ds, eta, off)?);
                }
                GeometryKind::CubeNorm => {
                    let FeasibleSet::Ball { center, radius } = leaf else {
                        unreachable!("checked at construction")
                    };
                    out.extend(cube_prox(xs, ds, eta, center, *radius)?);
                }
            }
        }
        Ok(out)
    }

    fn entropy_prox(&self, x: &[f64], d: &[f64], eta: f64, off: usize) -> Result<Vec<f64>> {
        let xp = self.entropy_point(x, off)?;
        let logits: Vec<f64> = xp.iter().zip(d).map(|(&a, &g)| a.ln() - eta * g).collect();
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
        let s: f64 = z.iter().sum();
        z.iter_mut().for_each(|v| *v /= s);
        Ok(self.clamp_renormalize(z))
    }

    /// `D_R(y, x) − ½‖y − x‖²` in the geometry's norm.
    pub fn strong_convexity_residual(&self, y: &[f64], x: &[f64]) -> Result<f64> {
        let div = self.divergence(y, x)?;
        let diff: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        Ok(div - 0.5 * self.norm(&diff).powi(2))
    }

    /// Primal norm: ℓ₁ blocks for entropy, ℓ₂ otherwise, combined in ℓ₂ across blocks.
    pub fn norm(&self, v: &[f64]) -> f64 {
        self.blockwise(v, |b| match self.kind {
            GeometryKind::NegativeEntropy => b.iter().map(|x| x.abs()).sum(),
            _ => norm2(b),
        })
    }

    /// Dual of [`Self::norm`].
    pub fn dual_norm(&self, v: &[f64]) -> f64 {
        self.blockwise(v, |b| match self.kind {
            GeometryKind::NegativeEntropy => b.iter().fold(0.0, |m, x| f64::max(m, x.abs())),
            _ => norm2(b),
        })
    }

    fn blockwise(&self, v: &[f64], block_norm: impl Fn(&[f64]) -> f64) -> f64 {
        let leaves = self.set.leaves();
        if leaves.len() == 1 {
            return block_norm(v);
        }
        leaves
            .iter()
            .map(|(off, leaf)| block_norm(&v[*off..*off + leaf.dim()]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// Floors a simplex block at ε and renormalises; negative mass is a violation.
    fn entropy_point(&self, x: &[f64], off: usize) -> Result<Vec<f64>> {
        if let Some((i, &v)) = x.iter().enumerate().find(|(_, &v)| v < -FEASIBILITY_TOL) {
            return Err(Error::BoundaryViolation { index: off + i, value: v });
        }
        Ok(self.clamp_renormalize(x.to_vec()))
    }

    fn clamp_renormalize(&self, mut x: Vec<f64>) -> Vec<f64> {
        let mut s = 0.0;
        for v in x.iter_mut() {
            *v = v.max(self.floor);
            s += *v;
        }
        x.iter_mut().for_each(|v| *v /= s);
        x
    }
}

/// Analytic `D` with `D²` bounding the variation of `R` over the set (summed over blocks).
pub fn diameter(kind: GeometryKind, set: &FeasibleSet) -> Result<f64> {
    if !set.is_bounded() {
        return Err(Error::UnboundedSet);
    }
    let mut d2 = 0.0;
    for (_, leaf) in set.leaves() {
        d2 += match (kind, leaf) {
            (GeometryKind::NegativeEntropy, FeasibleSet::Simplex(n)) => (*n as f64).ln(),
            (GeometryKind::Euclidean, FeasibleSet::Simplex(n)) => {
                if *n > 1 {
                    1.0
                } else {
                    0.0
                }
            }
            (GeometryKind::Euclidean, FeasibleSet::Ball { radius, .. }) => 2.0 * radius * radius,
            (GeometryKind::Euclidean, FeasibleSet::Box { lower, upper }) => {
                0.5 * lower.iter().zip(upper).map(|(l, u)| (u - l).powi(2)).sum::<f64>()
            }
            (GeometryKind::CubeNorm, FeasibleSet::Ball { center, radius }) => {
                let nc = norm2(center);
                if nc == 0.0 {
                    (2.0 / 3.0 + 1.0) * radius.powi(3)
                } else {
                    let near = (nc - radius).max(0.0);
                    ((nc + radius).powi(3) - near.powi(3)) / 3.0
                }
            }
            (k, l) => {
                return Err(Error::IncompatibleGeometry { geometry: k.to_string(), set: l.to_string() })
            }
        };
    }
    Ok(d2.sqrt())
}

/// `(1 + r) ln(1 + r) − r`, evaluated without cancellation for small `r`.
fn kl_term(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        r * r * (0.5 - r * (1.0 / 6.0 - r * (1.0 / 12.0 - r / 20.0)))
    } else {
        (1.0 + r) * r.ln_1p() - r
    }
}

/// Mirror step for `R = ⅓‖·‖³` on a ball: solve `∇R(z) + λ(z − c) = ∇R(x) − ηd`
/// with `λ ≥ 0` complementary to the ball constraint.
fn cube_prox(x: &[f64], d: &[f64], eta: f64, center: &[f64], radius: f64) -> Result<Vec<f64>> {
    let nx = norm2(x);
    let w: Vec<f64> = x.iter().zip(d).map(|(a, g)| nx * a - eta * g).collect();

    // For fixed λ the stationarity condition has z parallel to v = w + λc with
    // ‖z‖ the positive root of s² + λs = ‖v‖.
    let point_at = |lambda: f64| -> Vec<f64> {
        let v: Vec<f64> = w.iter().zip(center).map(|(a, c)| a + lambda * c).collect();
        let nv = norm2(&v);
        if nv == 0.0 {
            return vec![0.0; v.len()];
        }
        let s = 2.0 * nv / (lambda + (lambda * lambda + 4.0 * nv).sqrt());
        v.iter().map(|a| a * s / nv).collect()
    };
    let excess = |z: &[f64]| dist2(z, center) - radius;

    let free = point_at(0.0);
    if excess(&free) <= 0.0 {
        return Ok(free);
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut iters = 0;
    while excess(&point_at(hi)) > 0.0 {
        lo = hi;
        hi *= 2.0;
        iters += 1;
        if iters >= ROOT_MAX_ITER || !hi.is_finite() {
            return Err(Error::RootFindFailure { iterations: iters });
        }
    }
    // ‖z(λ) − c‖ is nonincreasing in λ, so bisection on the bracket converges.
    while hi - lo > ROOT_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if excess(&point_at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
        if iters >= ROOT_MAX_ITER {
            return Err(Error::RootFindFailure { iterations: iters });
        }
    }
    let mut z = point_at(hi);
    set::project_ball(&mut z, center, radius);
    Ok(z)
}
