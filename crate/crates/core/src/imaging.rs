//! Herglotz-wave images on rectangular lattices.
//!
//! The plane-wave phase factorizes over the lattice axes, so each field
//! component is `P_x diag(q) P_y^T` with `P_x[i, j] = e^{i k alpha_j.x x_i}`.

use alloc::vec::Vec;
use nalgebra::DMatrix;

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;

use crate::elastic::{perp, ElasticMedium, HerglotzKernel, Mode};
use crate::{CVec2, Error, Result, C64, I, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn square(half_width: f64, step: f64) -> Self {
        Self { x_min: -half_width, x_max: half_width, y_min: -half_width, y_max: half_width, step }
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
        if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Parameter("imaging grid needs step > 0 and min <= max"));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|k| lo + k as f64 * step).collect())
    }

    pub fn axes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((Self::axis(self.x_min, self.x_max, self.step)?, Self::axis(self.y_min, self.y_max, self.step)?))
    }
}

/// Field samples, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<CVec2>,
    pub magnitude: Vec<f64>,
}

impl FieldMap {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    pub fn argmax(&self) -> (f64, f64) {
        let k = self.magnitude.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|p| p.0).unwrap_or(0);
        (self.xs[k % self.xs.len()], self.ys[k / self.xs.len()])
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }

    /// Largest magnitude within `radius` of `(x, y)`.
    pub fn max_near(&self, x: f64, y: f64, radius: f64) -> f64 {
        let mut best: f64 = 0.0;
        for (iy, &py) in self.ys.iter().enumerate() {
            for (ix, &px) in self.xs.iter().enumerate() {
                if (px - x).hypot(py - y) <= radius {
                    best = best.max(self.magnitude[self.index(ix, iy)]);
                }
            }
        }
        best
    }
}

/// Evaluates the Herglotz wave of `kernel` on the lattice.
pub fn herglotz_image(medium: &ElasticMedium, kernel: &HerglotzKernel, grid: &GridSpec) -> Result<FieldMap> {
    let (xs, ys) = grid.axes()?;
    let nd = kernel.grid.len();
    let (nx, ny) = (xs.len(), ys.len());
    let mut px = DMatrix::<C64>::zeros(nx, 2 * nd);
    let mut py = DMatrix::<C64>::zeros(2 * nd, ny);
    let mut q = [Vec::with_capacity(2 * nd), Vec::with_capacity(2 * nd)];
    let ph = C64::from_polar(1.0, -PI / 4.0);
    for mode in Mode::BOTH {
        let k = medium.kappa(mode);
        let amp = ph * (k / medium.omega).sqrt();
        let f = if mode == Mode::Compressional { &kernel.fp } else { &kernel.fs };
        for (j, a) in kernel.grid.directions().enumerate() {
            let col = mode.index() * nd + j;
            for (ix, &x) in xs.iter().enumerate() {
                px[(ix, col)] = (I * k * a.x * x).exp();
            }
            for (iy, &y) in ys.iter().enumerate() {
                py[(col, iy)] = (I * k * a.y * y).exp();
            }
            let pol = if mode == Mode::Compressional { a } else { perp(a) };
            let c = amp * f[j] * kernel.grid.weights[j];
            q[0].push(c * pol.x);
            q[1].push(c * pol.y);
        }
    }
    let mut comps = Vec::with_capacity(2);
    for qc in &q {
        let mut scaled = px.clone();
        for (col, s) in qc.iter().enumerate() {
            let mut c = scaled.column_mut(col);
            c *= *s;
        }
        comps.push(scaled * &py);
    }
    let mut values = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            values.push(CVec2::new(comps[0][(ix, iy)], comps[1][(ix, iy)]));
        }
    }
    let magnitude = values.iter().map(|v| v.norm()).collect();
    Ok(FieldMap { xs, ys, values, magnitude })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Power-law exponent of the Herglotz-wave magnitude along the ray
/// `origin + r * direction`, `r` in `[r_min, r_max]`. Each sample is the
/// maximum over one p-wavelength so the fit sees the envelope.
pub fn radial_decay_exponent(medium: &ElasticMedium, kernel: &HerglotzKernel, origin: crate::Vec2, direction: crate::Vec2, r_min: f64, r_max: f64) -> f64 {
    let window = 2.0 * PI / medium.kappa_p;
    let samples = 24;
    let per_window = 48;
    let mut lx = Vec::with_capacity(samples);
    let mut ly = Vec::with_capacity(samples);
    let top = (r_max - window).max(r_min);
    for k in 0..samples {
        let r = r_min * (top / r_min).powf(k as f64 / (samples - 1) as f64);
        let mut peak: f64 = 0.0;
        for j in 0..per_window {
            let s = r + window * j as f64 / per_window as f64;
            peak = peak.max(crate::elastic::herglotz_field(medium, kernel, origin + direction * s).norm());
        }
        lx.push((r + window / 2.0).ln());
        ly.push(peak.ln());
    }
    fit_slope(&lx, &ly)
}
