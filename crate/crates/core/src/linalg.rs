//! Small dense helpers shared by the solvers.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::{DMatrix, Dyn, LU};

use crate::{CMat2, Error, Result, C64};

/// Spectral condition number of a 2x2 matrix after row and column
/// equilibration.
pub fn condition2(m: &CMat2) -> f64 {
    let mut a = *m;
    for r in 0..2 {
        let s = a[(r, 0)].norm().max(a[(r, 1)].norm());
        if s > 0.0 {
            a[(r, 0)] /= s;
            a[(r, 1)] /= s;
        }
    }
    for c in 0..2 {
        let s = a[(0, c)].norm().max(a[(1, c)].norm());
        if s > 0.0 {
            a[(0, c)] /= s;
            a[(1, c)] /= s;
        }
    }
    let t = a.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let det = (a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]).norm();
    let disc = (t * t - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((t + disc) / 2.0).sqrt();
    let smin2 = 2.0 * det * det / (t + disc);
    if smin2 <= 0.0 {
        return f64::INFINITY;
    }
    smax / smin2.sqrt()
}

/// `D^{-1} E` via the adjugate, rejecting `D` above the condition threshold.
pub fn solve2(d: &CMat2, e: &CMat2, max_condition: f64, what: &'static str) -> Result<CMat2> {
    let condition = condition2(d);
    if condition.is_nan() || condition >= max_condition {
        return Err(Error::IllConditioned { what, condition });
    }
    let det = d[(0, 0)] * d[(1, 1)] - d[(0, 1)] * d[(1, 0)];
    let adj = CMat2::new(d[(1, 1)], -d[(0, 1)], -d[(1, 0)], d[(0, 0)]);
    Ok(adj * e / det)
}

/// Eigenvalues of a 2x2 matrix, larger modulus first. The small one is
/// `det / l1` so it keeps relative accuracy when `|l2| << |l1|`.
pub fn eigenvalues2(m: &CMat2) -> (C64, C64) {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let mut root = (tr * tr - det * 4.0).sqrt();
    if (tr.conj() * root).re < 0.0 {
        root = -root;
    }
    let l1 = (tr + root) * 0.5;
    if l1.norm() == 0.0 {
        return (l1, l1);
    }
    (l1, det / l1)
}

fn norm1(a: &DMatrix<C64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Lower-bound estimate of the 1-norm condition number from a few solves.
pub fn condition_estimate(a: &DMatrix<C64>, lu: &LU<C64, Dyn, Dyn>) -> f64 {
    let n = a.nrows();
    let mut best: f64 = 0.0;
    for probe in 0..3u64 {
        let mut state = 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(probe + 1);
        let v = nalgebra::DVector::from_fn(n, |_, _| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            C64::new(if state & 1 == 0 { 1.0 } else { -1.0 }, if state & 2 == 0 { 0.5 } else { -0.5 })
        });
        let Some(x) = lu.solve(&v) else {
            return f64::INFINITY;
        };
        let r = x.iter().map(|z| z.norm()).sum::<f64>() / v.iter().map(|z| z.norm()).sum::<f64>();
        best = best.max(r);
    }
    norm1(a) * best
}
