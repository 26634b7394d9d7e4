//! Brute-force equilibria of small matrix games.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const REFINE_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: f64,
    /// Minimising (row) strategy.
    pub z: Vec<f64>,
    /// Maximising (column) strategy.
    pub y: Vec<f64>,
}

/// Value and equilibrium of `min_z max_y zᵀAy` for games up to 3×3.
///
/// Each side is found by a grid over its simplex with exact inner best
/// response (vertex enumeration), then refined by nested ternary search in a
/// window of two grid cells around the incumbent. The objective is convex and
/// piecewise linear, so ternary search is valid on every nested level.
pub fn brute_force_game(a: &DMatrix<f64>, grid: usize) -> Result<GameSolution> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if m > 3 || n > 3 {
        return Err(Error::TooLarge { m, n });
    }
    if grid < 100 {
        return Err(Error::InvalidConfig(format!("grid resolution {grid} below 100")));
    }
    // z minimises max_j (Aᵀz)_j
    let (value, z) = min_max(a, grid);
    // y maximises min_i (Ay)_i = −max_i (−Ay)_i
    let neg_t = -a.transpose();
    let (_, y) = min_max(&neg_t, grid);
    Ok(GameSolution { value, z, y })
}

/// `min_{u ∈ Δ} max_j (Bᵀu)_j` and a minimiser.
fn min_max(b: &DMatrix<f64>, grid: usize) -> (f64, Vec<f64>) {
    let m = b.nrows();
    let phi = |u: &[f64]| (0..b.ncols()).map(|j| (0..m).map(|i| b[(i, j)] * u[i]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
    match m {
        1 => (phi(&[1.0]), vec![1.0]),
        2 => {
            let f = |s: f64| phi(&[s, 1.0 - s]);
            let h = 1.0 / grid as f64;
            let best = (0..=grid).map(|k| k as f64 * h).min_by(|a, b| f(*a).total_cmp(&f(*b))).unwrap();
            let s = ternary(&f, (best - 2.0 * h).max(0.0), (best + 2.0 * h).min(1.0));
            let s = if f(best) < f(s) { best } else { s };
            (f(s), vec![s, 1.0 - s])
        }
        _ => {
            let f = |s: f64, r: f64| phi(&[s, r, (1.0 - s - r).max(0.0)]);
            let h = 1.0 / grid as f64;
            let mut best = (0.0, 0.0, f(0.0, 0.0));
            for i in 0..=grid {
                for j in 0..=grid - i {
                    let (s, r) = (i as f64 * h, j as f64 * h);
                    let v = f(s, r);
                    if v < best.2 {
                        best = (s, r, v);
                    }
                }
            }
            let inner = |s: f64| -> (f64, f64) {
                let hi = (1.0 - s).max(0.0);
                let r = ternary(&|r| f(s, r), (best.1 - 2.0 * h).clamp(0.0, hi), (best.1 + 2.0 * h).clamp(0.0, hi));
                (r, f(s, r))
            };
            let s = ternary(&|s| inner(s).1, (best.0 - 2.0 * h).max(0.0), (best.0 + 2.0 * h).min(1.0));
            let (r, v) = inner(s);
            if v < best.2 {
                (v, vec![s, r, (1.0 - s - r).max(0.0)])
            } else {
                (best.2, vec![best.0, best.1, (1.0 - best.0 - best.1).max(0.0)])
            }
        }
    }
}

fn ternary(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..REFINE_ITERS {
        if hi - lo <= 1e-15 {
            break;
        }
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    #[test]
    fn rock_paper_scissors() {
        let s = brute_force_game(&dmatrix![0.0, -1.0, 1.0; 1.0, 0.0, -1.0; -1.0, 1.0, 0.0], 100).unwrap();
        assert_abs_diff_eq!(s.value, 0.0, epsilon = 1e-9);
        for v in s.z.iter().chain(&s.y) {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn matching_pennies() {
        let s = brute_force_game(&dmatrix![1.0, -1.0; -1.0, 1.0], 100).unwrap();
        assert_abs_diff_eq!(s.value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.z[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(s.y[0], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn singleton() {
        let s = brute_force_game(&dmatrix![1.0], 100).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn weighted_cycle_off_grid() {
        // Closed form: z* = y* = (1/4, 1/2, 1/4), value 0.
        let a = dmatrix![0.0, -1.0, 2.0; 1.0, 0.0, -1.0; -2.0, 1.0, 0.0];
        let s = brute_force_game(&a, 101).unwrap();
        assert_abs_diff_eq!(s.value, 0.0, epsilon = 1e-9);
        for (u, v) in s.z.iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*u, v, epsilon = 1e-6);
        }
    }

    #[test]
    fn limits() {
        assert!(matches!(brute_force_game(&DMatrix::zeros(4, 2), 100), Err(Error::TooLarge { .. })));
        assert!(brute_force_game(&dmatrix![1.0], 10).is_err());
    }
}
