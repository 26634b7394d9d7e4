//! Brute-force minimisation of a convex function over a low-dimensional ball.

const GRID_STEPS_LOW_DIM: usize = 2000;
const GRID_STEPS_3D: usize = 100;
const GOLDEN_MAX_ITER: usize = 200;

/// Minimises a convex `f` over the ball `‖x − center‖ ≤ radius` for dimension ≤ 3.
///
/// A dense grid (spacing `radius/2000` per axis up to 2-D, `radius/100` in 3-D)
/// provides an incumbent; nested golden-section search over coordinate chords
/// then refines it. Partial minimisation of a convex function over a convex set
/// is convex, so each nested level is unimodal.
pub fn minimize_on_ball(f: &dyn Fn(&[f64]) -> f64, center: &[f64], radius: f64) -> (Vec<f64>, f64) {
    let dim = center.len();
    assert!((1..=3).contains(&dim), "oracle supports dimension 1..=3");

    let (mut best_x, mut best_f) = grid_search(f, center, radius);
    let mut x = center.to_vec();
    let refined = nested(f, center, radius, 0, &mut x);
    if refined.1 < best_f {
        best_x = refined.0;
        best_f = refined.1;
    }
    (best_x, best_f)
}

fn grid_search(f: &dyn Fn(&[f64]) -> f64, center: &[f64], radius: f64) -> (Vec<f64>, f64) {
    let dim = center.len();
    let steps = if dim <= 2 { GRID_STEPS_LOW_DIM } else { GRID_STEPS_3D };
    let h = radius / steps as f64;
    let k = 2 * steps + 1;
    let total = k.pow(dim as u32);
    let mut best = (center.to_vec(), f(center));
    let mut x = vec![0.0; dim];
    for idx in 0..total {
        let mut rem = idx;
        let mut r2 = 0.0;
        for (i, xi) in x.iter_mut().enumerate() {
            let off = (rem % k) as f64 * h - radius;
            rem /= k;
            *xi = center[i] + off;
            r2 += off * off;
        }
        if r2 > radius * radius {
            continue;
        }
        let v = f(&x);
        if v < best.1 {
            best = (x.clone(), v);
        }
    }
    best
}

/// Minimises over coordinate `level` on the chord through the current prefix,
/// recursing into the remaining coordinates.
fn nested(f: &dyn Fn(&[f64]) -> f64, center: &[f64], radius: f64, level: usize, x: &mut Vec<f64>) -> (Vec<f64>, f64) {
    let dim = center.len();
    let used: f64 = (0..level).map(|i| (x[i] - center[i]).powi(2)).sum();
    let half = (radius * radius - used).max(0.0).sqrt();
    let lo = center[level] - half;
    let hi = center[level] + half;

    let eval = |t: f64, x: &mut Vec<f64>| -> (Vec<f64>, f64) {
        x[level] = t;
        if level + 1 == dim {
            (x.clone(), f(x))
        } else {
            nested(f, center, radius, level + 1, x)
        }
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c, x);
    let mut fd = eval(d, x);
    let tol = 1e-13 * (1.0 + center[level].abs() + radius);
    for _ in 0..GOLDEN_MAX_ITER {
        if b - a <= tol {
            break;
        }
        if fc.1 <= fd.1 {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c, x);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d, x);
        }
    }
    let mut best = if fc.1 <= fd.1 { fc } else { fd };
    for t in [lo, hi] {
        let cand = eval(t, x);
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}
