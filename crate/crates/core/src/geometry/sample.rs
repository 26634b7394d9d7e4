//! Random feasible points and point pairs, used by certification and property suites.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::set::{norm2, FeasibleSet};

/// Draws a feasible point. Simplex blocks are floored at `floor` and renormalised;
/// half of the simplex draws sit close to a vertex.
pub fn sample_point<R: Rng + ?Sized>(set: &FeasibleSet, floor: f64, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; set.dim()];
    for (off, leaf) in set.leaves() {
        let block = &mut out[off..off + leaf.dim()];
        match leaf {
            FeasibleSet::Simplex(n) => {
                let n = *n;
                if n == 1 {
                    block[0] = 1.0;
                    continue;
                }
                let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
                let s: f64 = e.iter().sum();
                if rng.gen_bool(0.5) {
                    block.iter_mut().zip(&e).for_each(|(b, v)| *b = v / s);
                } else {
                    // (1 − δ)·vertex + δ·uniform-ish, δ log-uniform in [1e-8, 1]
                    let delta = 10f64.powf(rng.gen_range(-8.0..0.0));
                    let k = rng.gen_range(0..n);
                    for (i, b) in block.iter_mut().enumerate() {
                        *b = delta * e[i] / s + if i == k { 1.0 - delta } else { 0.0 };
                    }
                }
                if floor > 0.0 {
                    block.iter_mut().for_each(|b| *b = b.max(floor));
                    let s: f64 = block.iter().sum();
                    block.iter_mut().for_each(|b| *b /= s);
                }
            }
            FeasibleSet::Ball { center, radius } => {
                let d = center.len();
                let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let ng = norm2(&g).max(f64::MIN_POSITIVE);
                let r = radius * rng.gen::<f64>().powf(1.0 / d as f64);
                for ((b, &c), &gi) in block.iter_mut().zip(center).zip(&g) {
                    *b = c + r * gi / ng;
                }
            }
            FeasibleSet::Box { lower, upper } => {
                for ((b, &l), &u) in block.iter_mut().zip(lower).zip(upper) {
                    *b = if l < u { rng.gen_range(l..=u) } else { l };
                }
            }
            FeasibleSet::Product(_) => unreachable!("leaves are never products"),
        }
    }
    out
}

/// A pair of feasible points; half of the pairs are local perturbations at a
/// log-uniform scale so that difference quotients probe small separations.
pub fn sample_pair<R: Rng + ?Sized>(set: &FeasibleSet, floor: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let x = sample_point(set, floor, rng);
    if rng.gen_bool(0.5) {
        return (x, sample_point(set, floor, rng));
    }
    let other = sample_point(set, floor, rng);
    let t = 10f64.powf(rng.gen_range(-6.0..0.0));
    // Convex combination stays feasible.
    let y = x.iter().zip(&other).map(|(a, b)| (1.0 - t) * a + t * b).collect();
    (x, y)
}
