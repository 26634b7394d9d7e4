//! Named problem instances addressable from the command line.

use nalgebra::{dmatrix, DMatrix, DVector};

use super::{
    make_entropic_tilted, make_matrix_game, make_max_quadratics_on, make_nplayer_quadratic, make_quadratic,
    MonotoneProblem, QuadPiece,
};
use crate::error::{Error, Result};
use crate::geometry::GeometryKind;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub problem: MonotoneProblem,
    /// Geometry used when none is requested; the declared constants refer to it.
    pub default_geometry: GeometryKind,
    pub compatible: &'static [GeometryKind],
}

const SIMPLEX_GEOMETRIES: &[GeometryKind] = &[GeometryKind::NegativeEntropy, GeometryKind::Euclidean];
const BALL_GEOMETRIES: &[GeometryKind] = &[GeometryKind::Euclidean, GeometryKind::CubeNorm];
const BOX_GEOMETRIES: &[GeometryKind] = &[GeometryKind::Euclidean];

pub fn catalog_names() -> &'static [&'static str] {
    &["matgame-rps", "matgame-wrps", "matgame-2x2", "quadratic", "maxquad", "entropic", "nplayer"]
}

pub fn catalog(name: &str) -> Result<CatalogEntry> {
    let simplex = |problem| CatalogEntry {
        problem,
        default_geometry: GeometryKind::NegativeEntropy,
        compatible: SIMPLEX_GEOMETRIES,
    };
    Ok(match name {
        "matgame-rps" => {
            let a = dmatrix![0.0, -1.0, 1.0; 1.0, 0.0, -1.0; -1.0, 1.0, 0.0];
            simplex(game(name, a, vec![1.0 / 3.0; 6])?)
        }
        // Cyclic game with unequal payoffs; its equilibrium (¼, ½, ¼) is not
        // the entropy minimiser, so runs start away from the solution.
        "matgame-wrps" => {
            let a = dmatrix![0.0, -1.0, 2.0; 1.0, 0.0, -1.0; -2.0, 1.0, 0.0];
            simplex(game(name, a, vec![0.25, 0.5, 0.25, 0.25, 0.5, 0.25])?)
        }
        "matgame-2x2" => {
            let a = dmatrix![1.0, -1.0; -1.0, 1.0];
            simplex(game(name, a, vec![0.5; 4])?)
        }
        "quadratic" => CatalogEntry {
            problem: make_quadratic(vec![0.5, -0.25], vec![0.0, 0.0], 1.0)?,
            default_geometry: GeometryKind::Euclidean,
            compatible: &[GeometryKind::Euclidean],
        },
        "maxquad" => CatalogEntry {
            problem: maxquad()?,
            default_geometry: GeometryKind::CubeNorm,
            compatible: BALL_GEOMETRIES,
        },
        "entropic" => {
            let tilt = (1..=10).map(|i| (i as f64).ln()).collect();
            simplex(make_entropic_tilted(tilt)?)
        }
        "nplayer" => CatalogEntry {
            problem: make_nplayer_quadratic(5, 0.5)?,
            default_geometry: GeometryKind::Euclidean,
            compatible: BOX_GEOMETRIES,
        },
        other => return Err(Error::UnknownProblem(other.to_string())),
    })
}

fn game(name: &str, a: DMatrix<f64>, xstar: Vec<f64>) -> Result<MonotoneProblem> {
    make_matrix_game(a)?.with_name(name).with_known_solution(xstar)
}

/// Two-dimensional max of nearly linear quadratics on the radius-2 ball centred
/// at (3, 0). The ball stays at distance 1 from the origin, which keeps the
/// operator Bregman bounded for `R = ⅓‖x‖³`; the minimiser sits on a kink at the
/// sphere.
fn maxquad() -> Result<MonotoneProblem> {
    let q: DMatrix<f64> = DMatrix::identity(2, 2) * 0.1;
    let pieces = vec![
        QuadPiece::new(q.clone(), DVector::from_vec(vec![1.0, -1.0])),
        QuadPiece::new(q.clone(), DVector::from_vec(vec![1.0, 2.0])),
        QuadPiece::new(q, DVector::from_vec(vec![-2.0, 0.0])),
    ];
    Ok(make_max_quadratics_on(pieces, vec![3.0, 0.0], 2.0)?.with_name("maxquad"))
}
