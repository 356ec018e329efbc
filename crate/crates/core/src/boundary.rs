//! Star-shaped analytic boundaries `x(t) = c + s r(t) (cos t, sin t)` with a
//! trigonometric radial function, sampled at equispaced parameters.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::elastic::unit;
use crate::{Error, Result, Vec2, TAU};

/// `r(t) = a0 + sum_k (cos_k cos kt + sin_k sin kt)`, k starting at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialShape {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl RadialShape {
    pub fn disk() -> Self {
        Self { a0: 1.0, cos: Vec::new(), sin: Vec::new() }
    }

    /// `r(t) = 2 + sin 2t`.
    pub fn peanuthull() -> Self {
        Self { a0: 2.0, cos: alloc::vec![0.0, 0.0], sin: alloc::vec![0.0, 1.0] }
    }

    pub fn fourier(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        let s = Self { a0, cos, sin };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let finite = self.a0.is_finite() && self.cos.iter().chain(&self.sin).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Parameter("radial coefficients must be finite"));
        }
        let m = 64 * (1 + self.cos.len().max(self.sin.len()));
        if (0..m).any(|j| self.radius(TAU * j as f64 / m as f64).0 <= 0.0) {
            return Err(Error::Parameter("radial function must stay positive"));
        }
        Ok(())
    }

    /// `r, r', r''` at `t`.
    pub fn radius(&self, t: f64) -> (f64, f64, f64) {
        let (mut r, mut r1, mut r2) = (self.a0, 0.0, 0.0);
        for k in 0..self.cos.len().max(self.sin.len()) {
            let a = self.cos.get(k).copied().unwrap_or(0.0);
            let b = self.sin.get(k).copied().unwrap_or(0.0);
            let kf = (k + 1) as f64;
            let (s, c) = (kf * t).sin_cos();
            r += a * c + b * s;
            r1 += kf * (b * c - a * s);
            r2 -= kf * kf * (a * c + b * s);
        }
        (r, r1, r2)
    }

    /// Point and first two derivatives at unit scale around the origin.
    pub fn point(&self, t: f64) -> (Vec2, Vec2, Vec2) {
        let (r, r1, r2) = self.radius(t);
        let e = unit(t);
        let ep = Vec2::new(-e.y, e.x);
        (e * r, e * r1 + ep * r, e * (r2 - r) + ep * (2.0 * r1))
    }

    /// Enclosed area at unit scale, `(1/2) int r^2 dt`.
    pub fn area(&self) -> f64 {
        let sq: f64 = self.cos.iter().chain(&self.sin).map(|v| v * v).sum();
        core::f64::consts::PI * (2.0 * self.a0 * self.a0 + sq) / 2.0
    }
}

/// Nyström discretization of one closed curve.
#[derive(Debug, Clone)]
pub struct SmoothBoundary {
    pub shape: RadialShape,
    pub center: Vec2,
    pub scale: f64,
    pub n_points: usize,
    /// Node positions relative to `center`.
    pub local: Vec<Vec2>,
    pub d1: Vec<Vec2>,
    pub d2: Vec<Vec2>,
    /// `|x'(t_j)|`.
    pub speed: Vec<f64>,
    pub normals: Vec<Vec2>,
    pub tangents: Vec<Vec2>,
    pub curvature: Vec<f64>,
}

impl SmoothBoundary {
    pub fn new(shape: RadialShape, center: Vec2, scale: f64, n_points: usize) -> Result<Self> {
        shape.validate()?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Parameter("boundary scale must be positive"));
        }
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(Error::Parameter("boundary needs an even number of at least 8 nodes"));
        }
        let h = TAU / n_points as f64;
        let mut b = Self {
            shape,
            center,
            scale,
            n_points,
            local: Vec::with_capacity(n_points),
            d1: Vec::with_capacity(n_points),
            d2: Vec::with_capacity(n_points),
            speed: Vec::with_capacity(n_points),
            normals: Vec::with_capacity(n_points),
            tangents: Vec::with_capacity(n_points),
            curvature: Vec::with_capacity(n_points),
        };
        for j in 0..n_points {
            let (x, x1, x2) = b.shape.point(j as f64 * h);
            let (x, x1, x2) = (x * scale, x1 * scale, x2 * scale);
            let sp = x1.norm();
            let tau = x1 / sp;
            b.local.push(x);
            b.d1.push(x1);
            b.d2.push(x2);
            b.speed.push(sp);
            b.tangents.push(tau);
            b.normals.push(Vec2::new(tau.y, -tau.x));
            b.curvature.push((x1.x * x2.y - x1.y * x2.x) / (sp * sp * sp));
        }
        Ok(b)
    }

    pub fn disk(center: Vec2, radius: f64, n_points: usize) -> Result<Self> {
        Self::new(RadialShape::disk(), center, radius, n_points)
    }

    pub fn node(&self, j: usize) -> Vec2 {
        self.center + self.local[j]
    }

    pub fn step(&self) -> f64 {
        TAU / self.n_points as f64
    }

    pub fn area(&self) -> f64 {
        self.shape.area() * self.scale * self.scale
    }

    /// Same shape at unit scale centred at the origin.
    pub fn reference(&self) -> Result<Self> {
        Self::new(self.shape.clone(), Vec2::zeros(), 1.0, self.n_points)
    }

    /// Signed area from the discrete nodes (positive for counterclockwise).
    pub fn signed_area(&self) -> f64 {
        let h = self.step();
        0.5 * h * self.local.iter().zip(&self.d1).map(|(x, d)| x.x * d.y - x.y * d.x).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peanuthull_matches_parametrization() {
        let b = SmoothBoundary::new(RadialShape::peanuthull(), Vec2::new(5.0, 0.0), 0.002, 64).unwrap();
        for j in 0..64 {
            let t = b.step() * j as f64;
            let want = Vec2::new(5.0 + 0.002 * (2.0 + (2.0 * t).sin()) * t.cos(), 0.002 * (2.0 + (2.0 * t).sin()) * t.sin());
            assert!((b.node(j) - want).norm() < 1e-15);
        }
        assert!(b.signed_area() > 0.0);
        assert!((b.signed_area() - b.area()).abs() < 1e-14 * b.area());
    }

    #[test]
    fn normals_point_outward() {
        let shape = RadialShape::fourier(1.0, alloc::vec![0.1, 0.0, 0.05], alloc::vec![0.0, 0.2]).unwrap();
        let b = SmoothBoundary::new(shape, Vec2::zeros(), 1.0, 128).unwrap();
        for j in 0..b.n_points {
            assert!((b.normals[j].norm() - 1.0).abs() < 1e-14);
            assert!(b.normals[j].dot(&b.local[j]) > 0.0);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let shape = RadialShape::fourier(1.0, alloc::vec![0.1, 0.0, 0.05], alloc::vec![0.0, 0.2]).unwrap();
        let h = 1e-5;
        for &t in &[0.0, 1.0, 4.0] {
            let (_, d1, d2) = shape.point(t);
            let (xp, d1p, _) = shape.point(t + h);
            let (xm, d1m, _) = shape.point(t - h);
            assert!(((xp - xm) / (2.0 * h) - d1).norm() < 1e-8);
            assert!(((d1p - d1m) / (2.0 * h) - d2).norm() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RadialShape::fourier(0.1, alloc::vec![0.5], alloc::vec![]).is_err());
        assert!(SmoothBoundary::new(RadialShape::disk(), Vec2::zeros(), 1.0, 33).is_err());
        assert!(SmoothBoundary::new(RadialShape::disk(), Vec2::zeros(), -1.0, 32).is_err());
    }
}
