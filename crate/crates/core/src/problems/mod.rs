//! Monotone variational-inequality instances, their operators and gap evaluators.

mod catalog;
mod certify;
mod minimize;

pub use catalog::{catalog, catalog_names, CatalogEntry};
pub use certify::{certify_class, certify_regularity, monotonicity_residual, RegularityCheck, RegularityReport};
pub use minimize::minimize_on_ball;

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{dist2, norm2, FeasibleSet, GeometryKind, FEASIBILITY_TOL};

/// Sample floor used when certifying operators that are singular at the simplex boundary.
pub const INTERIOR_SAMPLE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularityClass {
    LipschitzSmooth(f64),
    LipschitzBounded(f64),
    BregmanSmooth(f64),
    BregmanBounded(f64),
}

impl RegularityClass {
    pub fn constant(&self) -> f64 {
        match *self {
            RegularityClass::LipschitzSmooth(c)
            | RegularityClass::LipschitzBounded(c)
            | RegularityClass::BregmanSmooth(c)
            | RegularityClass::BregmanBounded(c) => c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegularityClass::LipschitzSmooth(_) => "lipschitz-smooth",
            RegularityClass::LipschitzBounded(_) => "lipschitz-bounded",
            RegularityClass::BregmanSmooth(_) => "bregman-smooth",
            RegularityClass::BregmanBounded(_) => "bregman-bounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    /// `f(x) − f*`.
    ConvexGap,
    /// `max_j (Aᵀz)_j − min_i (Ay)_i`.
    SaddleGap,
    /// `⟨F(x), x − x*⟩`, a residual rather than a sup-based gap.
    ResidualGap,
}

impl fmt::Display for GapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapKind::ConvexGap => "convex-gap",
            GapKind::SaddleGap => "saddle-gap",
            GapKind::ResidualGap => "residual",
        })
    }
}

/// One piece `½xᵀQx + bᵀx` of a max-of-quadratics objective.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadPiece {
    pub q: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl QuadPiece {
    pub fn new(q: DMatrix<f64>, b: DVector<f64>) -> Self {
        QuadPiece { q, b }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut total = 0.0;
        for i in 0..n {
            let mut qx = 0.0;
            for j in 0..n {
                qx += self.q[(i, j)] * x[j];
            }
            total += x[i] * (0.5 * qx + self.b[i]);
        }
        total
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n).map(|i| (0..n).map(|j| self.q[(i, j)] * x[j]).sum::<f64>() + self.b[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Zero,
    /// `F(z, y) = (Ay, −Aᵀz)`.
    MatrixGame(DMatrix<f64>),
    /// Gradient of `½‖x − target‖²`.
    Quadratic { target: Vec<f64> },
    /// Subgradient of the lowest-index active piece.
    MaxQuadratics(Vec<QuadPiece>),
    /// Gradient of `Σ xᵢ ln xᵢ − ⟨w, x⟩`: `F(x)ᵢ = ln xᵢ + 1 − wᵢ`.
    Entropic { tilt: Vec<f64> },
    /// `F(x)ᵢ = xᵢ + κ·mean_{j≠i} xⱼ`.
    NPlayer { kappa: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneProblem {
    name: String,
    set: FeasibleSet,
    operator: Operator,
    regularity: Vec<RegularityClass>,
    known_solution: Option<Vec<f64>>,
    gap_kind: GapKind,
    optimal_value: Option<f64>,
    natural_geometry: GeometryKind,
}

impl MonotoneProblem {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn regularity(&self) -> &[RegularityClass] {
        &self.regularity
    }

    pub fn known_solution(&self) -> Option<&[f64]> {
        self.known_solution.as_deref()
    }

    pub fn gap_kind(&self) -> GapKind {
        self.gap_kind
    }

    pub fn optimal_value(&self) -> Option<f64> {
        self.optimal_value
    }

    /// Geometry the declared regularity constants refer to.
    pub fn natural_geometry(&self) -> GeometryKind {
        self.natural_geometry
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.regularity.iter().find_map(|r| match r {
            RegularityClass::LipschitzBounded(g) => Some(*g),
            _ => None,
        })
    }

    pub fn bregman_bound(&self) -> Option<f64> {
        self.regularity.iter().find_map(|r| match r {
            RegularityClass::BregmanBounded(m) => Some(*m),
            _ => None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches a solution; it must be feasible with gap at most 1e-6.
    pub fn with_known_solution(mut self, x: Vec<f64>) -> Result<Self> {
        if !self.set.contains(&x, FEASIBILITY_TOL) {
            return Err(Error::InvalidProblem("known solution is infeasible".into()));
        }
        // A residual measured against x* itself is zero by construction.
        let gap = match self.gap_kind {
            GapKind::ResidualGap => 0.0,
            _ => self.gap(&x)?,
        };
        if gap > 1e-6 {
            return Err(Error::InvalidProblem(format!("known solution has gap {gap:e}")));
        }
        self.known_solution = Some(x);
        Ok(self)
    }

    pub fn with_regularity(mut self, class: RegularityClass) -> Self {
        self.regularity.push(class);
        self
    }

    /// `F(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(match &self.operator {
            Operator::Zero => vec![0.0; x.len()],
            Operator::MatrixGame(a) => {
                let (m, _) = a.shape();
                let (z, y) = x.split_at(m);
                let mut out = mat_vec(a, y);
                out.extend(mat_t_vec(a, z).into_iter().map(|v| -v));
                out
            }
            Operator::Quadratic { target } => x.iter().zip(target).map(|(a, t)| a - t).collect(),
            Operator::MaxQuadratics(pieces) => pieces[active_piece(pieces, x)].gradient(x),
            Operator::Entropic { tilt } => {
                if let Some((i, &v)) = x.iter().enumerate().find(|(_, &v)| v <= 0.0) {
                    return Err(Error::BoundaryViolation { index: i, value: v });
                }
                x.iter().zip(tilt).map(|(v, w)| v.ln() + 1.0 - w).collect()
            }
            Operator::NPlayer { kappa } => {
                let n = x.len() as f64;
                let total: f64 = x.iter().sum();
                x.iter().map(|&v| v + kappa * (total - v) / (n - 1.0)).collect()
            }
        })
    }

    /// Convex objective `f(x)` for problems that have one.
    pub fn objective(&self, x: &[f64]) -> Option<f64> {
        match &self.operator {
            Operator::Quadratic { target } => Some(0.5 * dist2(x, target).powi(2)),
            Operator::MaxQuadratics(pieces) => {
                Some(pieces.iter().map(|p| p.value(x)).fold(f64::NEG_INFINITY, f64::max))
            }
            Operator::Entropic { tilt } => Some(
                x.iter()
                    .zip(tilt)
                    .map(|(&v, &w)| if v > 0.0 { v * v.ln() } else { 0.0 } - w * v)
                    .sum(),
            ),
            _ => None,
        }
    }

    /// Nonnegative gap (or residual) at `x`.
    pub fn gap(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        match self.gap_kind {
            GapKind::SaddleGap => {
                let Operator::MatrixGame(a) = &self.operator else {
                    unreachable!("saddle gap is only attached to matrix games")
                };
                let (z, y) = x.split_at(a.nrows());
                saddle_gap(a, z, y)
            }
            GapKind::ConvexGap => {
                let f = self.objective(x).expect("convex gap requires an objective");
                let fstar = self.optimal_value.expect("convex gap requires f*");
                Ok(f - fstar)
            }
            GapKind::ResidualGap => {
                let f = self.evaluate(x)?;
                let xstar = self.known_solution.clone().unwrap_or_else(|| self.set.center());
                Ok(f.iter().zip(x.iter().zip(&xstar)).map(|(g, (a, b))| g * (a - b)).sum())
            }
        }
    }
}

fn mat_vec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

fn mat_t_vec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a[(i, j)] * v[i]).sum()).collect()
}

/// Lowest-index piece within 1e-12 of the maximum.
fn active_piece(pieces: &[QuadPiece], x: &[f64]) -> usize {
    let values: Vec<f64> = pieces.iter().map(|p| p.value(x)).collect();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= top - 1e-12).unwrap_or(0)
}

/// Exact duality gap `max_j (Aᵀz)_j − min_i (Ay)_i` of the matrix game.
pub fn saddle_gap(a: &DMatrix<f64>, z: &[f64], y: &[f64]) -> Result<f64> {
    if z.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: z.len() });
    }
    if y.len() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.ncols(), got: y.len() });
    }
    let best_response_y = mat_t_vec(a, z).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let best_response_z = mat_vec(a, y).into_iter().fold(f64::INFINITY, f64::min);
    Ok(best_response_y - best_response_z)
}

pub fn make_zero(set: FeasibleSet, geometry: GeometryKind) -> MonotoneProblem {
    MonotoneProblem {
        name: "zero".into(),
        known_solution: Some(set.center()),
        set,
        operator: Operator::Zero,
        regularity: Vec::new(),
        gap_kind: GapKind::ResidualGap,
        optimal_value: None,
        natural_geometry: geometry,
    }
}

/// Bilinear game `min_z max_y zᵀAy` over two simplices.
///
/// Constants refer to the entropy pairing (ℓ₁ blocks, ℓ∞ duals, combined in ℓ₂):
/// `L = max|Aᵢⱼ|` and `G′ = √2·max|Aᵢⱼ|`.
pub fn make_matrix_game(a: DMatrix<f64>) -> Result<MonotoneProblem> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let amax = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut regularity = Vec::new();
    if amax > 0.0 {
        regularity.push(RegularityClass::LipschitzSmooth(amax));
        regularity.push(RegularityClass::LipschitzBounded(2f64.sqrt() * amax));
    }
    Ok(MonotoneProblem {
        name: format!("matgame-{m}x{n}"),
        set: FeasibleSet::Product(vec![FeasibleSet::Simplex(m), FeasibleSet::Simplex(n)]),
        operator: Operator::MatrixGame(a),
        regularity,
        known_solution: None,
        gap_kind: GapKind::SaddleGap,
        optimal_value: None,
        natural_geometry: GeometryKind::NegativeEntropy,
    })
}

/// `f(x) = ½‖x − target‖²` on a ball.
pub fn make_quadratic(target: Vec<f64>, center: Vec<f64>, radius: f64) -> Result<MonotoneProblem> {
    if target.len() != center.len() {
        return Err(Error::DimensionMismatch { expected: center.len(), got: target.len() });
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidProblem("radius must be positive".into()));
    }
    let set = FeasibleSet::ball(center.clone(), radius);
    let mut xstar = target.clone();
    let d = dist2(&target, &center);
    if d > radius {
        xstar = set.project(&target);
    }
    let fstar = 0.5 * dist2(&xstar, &target).powi(2);
    Ok(MonotoneProblem {
        name: "quadratic".into(),
        set,
        operator: Operator::Quadratic { target },
        regularity: vec![
            RegularityClass::LipschitzSmooth(1.0),
            RegularityClass::LipschitzBounded(d + radius),
        ],
        known_solution: Some(xstar),
        gap_kind: GapKind::ConvexGap,
        optimal_value: Some(fstar),
        natural_geometry: GeometryKind::Euclidean,
    })
}

/// `f(x) = maxᵢ {½xᵀQᵢx + bᵢᵀx}` on the ball of `radius` centred at the origin.
pub fn make_max_quadratics(pieces: Vec<QuadPiece>, radius: f64) -> Result<MonotoneProblem> {
    let dim = pieces.first().map(|p| p.b.len()).unwrap_or(0);
    make_max_quadratics_on(pieces, vec![0.0; dim], radius)
}

/// Max-of-quadratics on an arbitrary ball. `f*` and `x*` come from the
/// grid-plus-refinement oracle in [`minimize_on_ball`] (dimension ≤ 3).
///
/// The Bregman-boundedness constant is taken w.r.t. `R = ⅓‖x‖³`. When the ball
/// stays at distance `ρ > 0` from the origin, `D_R(y,x) ≥ (ρ/2)‖y − x‖²` gives
/// `M = G′·√(2/ρ)`; otherwise `M` is the sampled maximum ratio inflated by 25%.
pub fn make_max_quadratics_on(pieces: Vec<QuadPiece>, center: Vec<f64>, radius: f64) -> Result<MonotoneProblem> {
    let dim = center.len();
    if pieces.is_empty() || dim == 0 {
        return Err(Error::InvalidProblem("need at least one piece of positive dimension".into()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidProblem("radius must be positive and finite".into()));
    }
    let mut gprime = 0.0f64;
    for (i, p) in pieces.iter().enumerate() {
        if p.q.shape() != (dim, dim) || p.b.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.b.len() });
        }
        let asym = (&p.q - p.q.transpose()).amax();
        if asym > 1e-12 * p.q.amax().max(1.0) {
            return Err(Error::NotPsd(i));
        }
        let eig = SymmetricEigen::new(p.q.clone()).eigenvalues;
        let lo = eig.min();
        let hi = eig.max();
        if lo < -1e-10 * hi.abs().max(1.0) {
            return Err(Error::NotPsd(i));
        }
        let at_center = p.gradient(&center);
        gprime = gprime.max(norm2(&at_center) + hi.max(0.0) * radius);
    }
    let set = FeasibleSet::ball(center.clone(), radius);
    let mut problem = MonotoneProblem {
        name: "maxquad".into(),
        set,
        operator: Operator::MaxQuadratics(pieces),
        regularity: vec![RegularityClass::LipschitzBounded(gprime)],
        known_solution: None,
        gap_kind: GapKind::ConvexGap,
        optimal_value: None,
        natural_geometry: GeometryKind::CubeNorm,
    };
    if dim > 3 {
        return Err(Error::InvalidProblem("f* oracle supports dimension ≤ 3; use with_optimum".into()));
    }
    let f = |x: &[f64]| problem.objective(x).expect("max-quadratics has an objective");
    let (xstar, fstar) = minimize_on_ball(&f, &center, radius);
    problem.optimal_value = Some(fstar);
    problem.known_solution = Some(xstar);

    let rho = (norm2(&center) - radius).max(0.0);
    let m = if rho > 0.0 {
        gprime * (2.0 / rho).sqrt()
    } else {
        let geom = crate::geometry::BregmanGeometry::cube(problem.set.clone())?;
        1.25 * certify::sampled_max_ratio(&problem, &geom, RegularityClass::BregmanBounded(1.0), 10_000, 0x5eed)?
    };
    problem.regularity.push(RegularityClass::BregmanBounded(m));
    Ok(problem)
}

/// `f(x) = Σ xᵢ ln xᵢ` on the `n`-simplex: `x*` uniform, `f* = −ln n`.
pub fn make_entropic_toy(n: usize) -> Result<MonotoneProblem> {
    make_entropic_tilted(vec![0.0; n])
}

/// `f(x) = Σ xᵢ ln xᵢ − ⟨w, x⟩` on the simplex: `x* = softmax(w)`, `f* = −ln Σ e^{wᵢ}`.
///
/// The operator is singular at the boundary, so no Lipschitz tag is declared.
/// The Bregman-smooth constant is the ℓ∞ proxy on the `δ`-floored simplex
/// (δ = [`INTERIOR_SAMPLE_FLOOR`]): `|ln yᵢ − ln xᵢ|² ≤ 2 KL(y‖x)/δ`, so `Lβ = 1/√δ`.
pub fn make_entropic_tilted(tilt: Vec<f64>) -> Result<MonotoneProblem> {
    let n = tilt.len();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    if tilt.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let top = tilt.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = tilt.iter().map(|w| (w - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let xstar: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let fstar = -(top + total.ln());
    Ok(MonotoneProblem {
        name: "entropic".into(),
        set: FeasibleSet::Simplex(n),
        operator: Operator::Entropic { tilt },
        regularity: vec![RegularityClass::BregmanSmooth(1.0 / INTERIOR_SAMPLE_FLOOR.sqrt())],
        known_solution: Some(xstar),
        gap_kind: GapKind::ConvexGap,
        optimal_value: Some(fstar),
        natural_geometry: GeometryKind::NegativeEntropy,
    })
}

/// `N`-player game on `[−1, 1]^N` with `fᵢ = ½xᵢ² + κ·xᵢ·mean_{j≠i} xⱼ`; Nash at 0.
pub fn make_nplayer_quadratic(players: usize, kappa: f64) -> Result<MonotoneProblem> {
    if players < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: players });
    }
    if !(kappa.abs() < 1.0) {
        return Err(Error::CouplingTooLarge(kappa));
    }
    // Eigenvalues of I + κ(J − I)/(N − 1): 1 + κ and 1 − κ/(N − 1).
    let lip = (1.0 + kappa).abs().max((1.0 - kappa / (players as f64 - 1.0)).abs());
    Ok(MonotoneProblem {
        name: "nplayer".into(),
        set: FeasibleSet::cube(players, -1.0, 1.0),
        operator: Operator::NPlayer { kappa },
        regularity: vec![
            RegularityClass::LipschitzSmooth(lip),
            RegularityClass::LipschitzBounded(lip * (players as f64).sqrt()),
        ],
        known_solution: Some(vec![0.0; players]),
        gap_kind: GapKind::ResidualGap,
        optimal_value: None,
        natural_geometry: GeometryKind::Euclidean,
    })
}
