//! Convex feasible sets and their Euclidean projections.

use std::fmt;

/// Membership tolerance used throughout the crate.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    /// Probability simplex in `n` dimensions.
    Simplex(usize),
    /// Closed Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned box; bounds may be infinite.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Cartesian product, coordinates concatenated in member order.
    Product(Vec<FeasibleSet>),
}

impl FeasibleSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        FeasibleSet::Ball { center, radius }
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Self {
        FeasibleSet::Ball { center: vec![0.0; dim], radius }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        FeasibleSet::Box { lower: vec![lo; dim], upper: vec![hi; dim] }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Simplex(n) => *n,
            FeasibleSet::Ball { center, .. } => center.len(),
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Product(parts) => parts.iter().map(FeasibleSet::dim).sum(),
        }
    }

    /// Non-product leaves with their coordinate offsets, nested products flattened.
    pub fn leaves(&self) -> Vec<(usize, &FeasibleSet)> {
        let mut out = Vec::new();
        self.collect_leaves(0, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, offset: usize, out: &mut Vec<(usize, &'a FeasibleSet)>) -> usize {
        match self {
            FeasibleSet::Product(parts) => {
                let mut off = offset;
                for p in parts {
                    off = p.collect_leaves(off, out);
                }
                off
            }
            leaf => {
                out.push((offset, leaf));
                offset + leaf.dim()
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            FeasibleSet::Simplex(_) => true,
            FeasibleSet::Ball { radius, .. } => radius.is_finite(),
            FeasibleSet::Box { lower, upper } => {
                lower.iter().chain(upper).all(|v| v.is_finite())
            }
            FeasibleSet::Product(parts) => parts.iter().all(FeasibleSet::is_bounded),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        self.leaves().into_iter().all(|(off, leaf)| {
            let xs = &x[off..off + leaf.dim()];
            match leaf {
                FeasibleSet::Simplex(_) => {
                    xs.iter().all(|&v| v >= -tol) && (xs.iter().sum::<f64>() - 1.0).abs() <= tol
                }
                FeasibleSet::Ball { center, radius } => dist2(xs, center) <= radius + tol,
                FeasibleSet::Box { lower, upper } => xs
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
                FeasibleSet::Product(_) => unreachable!("leaves are never products"),
            }
        })
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (off, leaf) in self.leaves() {
            let block = &mut out[off..off + leaf.dim()];
            match leaf {
                FeasibleSet::Simplex(_) => project_simplex(block),
                FeasibleSet::Ball { center, radius } => project_ball(block, center, *radius),
                FeasibleSet::Box { lower, upper } => {
                    for ((v, &l), &u) in block.iter_mut().zip(lower).zip(upper) {
                        *v = v.clamp(l, u);
                    }
                }
                FeasibleSet::Product(_) => unreachable!("leaves are never products"),
            }
        }
        out
    }

    /// Natural centre: uniform point, ball centre, box midpoint.
    pub fn center(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (off, leaf) in self.leaves() {
            let block = &mut out[off..off + leaf.dim()];
            match leaf {
                FeasibleSet::Simplex(n) => block.fill(1.0 / *n as f64),
                FeasibleSet::Ball { center, .. } => block.copy_from_slice(center),
                FeasibleSet::Box { lower, upper } => {
                    for ((v, &l), &u) in block.iter_mut().zip(lower).zip(upper) {
                        *v = match (l.is_finite(), u.is_finite()) {
                            (true, true) => 0.5 * (l + u),
                            (true, false) => l,
                            (false, true) => u,
                            (false, false) => 0.0,
                        };
                    }
                }
                FeasibleSet::Product(_) => unreachable!("leaves are never products"),
            }
        }
        out
    }
}

impl fmt::Display for FeasibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibleSet::Simplex(n) => write!(f, "simplex({n})"),
            FeasibleSet::Ball { center, radius } => write!(f, "ball(dim {}, r {radius})", center.len()),
            FeasibleSet::Box { lower, .. } => write!(f, "box(dim {})", lower.len()),
            FeasibleSet::Product(parts) => {
                write!(f, "product(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sort-based projection onto the probability simplex.
pub(crate) fn project_simplex(v: &mut [f64]) {
    let n = v.len();
    if n == 0 {
        return;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

pub(crate) fn project_ball(v: &mut [f64], center: &[f64], radius: f64) {
    let d = dist2(v, center);
    if d > radius {
        let s = radius / d;
        for (x, &c) in v.iter_mut().zip(center) {
            *x = c + (*x - c) * s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_projection_of_feasible_point_is_identity() {
        let mut v = vec![0.2, 0.3, 0.5];
        project_simplex(&mut v);
        assert!((v[0] - 0.2).abs() < 1e-15 && (v[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn simplex_projection_clips_to_vertex() {
        let mut v = vec![5.0, 0.0, -1.0];
        project_simplex(&mut v);
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn nested_products_flatten() {
        let s = FeasibleSet::Product(vec![
            FeasibleSet::Simplex(2),
            FeasibleSet::Product(vec![FeasibleSet::Simplex(3), FeasibleSet::centered_ball(2, 1.0)]),
        ]);
        let offs: Vec<usize> = s.leaves().iter().map(|(o, _)| *o).collect();
        assert_eq!(offs, vec![0, 2, 5]);
        assert_eq!(s.dim(), 7);
    }

    #[test]
    fn infinite_box_is_unbounded() {
        let s = FeasibleSet::Box { lower: vec![0.0], upper: vec![f64::INFINITY] };
        assert!(!s.is_bounded());
        assert!(s.contains(&[1e9], 0.0));
    }
}
