//! Nyström solver for the traction-free exterior problem with a single-layer
//! ansatz `v = S phi`, `(I - K') phi = 2 T u^i`, and the static counterpart
//! that yields the polarization tensor.
//!
//! The traction kernel splits into the Kelvin part (Cauchy and smooth
//! pieces), a logarithmic part handled by Kress weights and a smooth
//! remainder. The Cauchy piece `k(t, tau) = (x - y).tau_x |x'(tau)| / r^2`
//! behaves like `cot((t - tau)/2)/2` and is integrated with the odd-offset
//! cotangent rule.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::boundary::SmoothBoundary;
use crate::elastic::{outer, perp, plane_wave_field, traction, DirectionGrid, ElasticMedium, IncidentPlaneWave, Mode};
use crate::linalg::condition_estimate;
use crate::radial::{traction_tensor, RadialKernel};
use crate::{CMat2, CVec2, Error, Result, Vec2, C64, I, PI};

/// Systems whose estimated condition exceeds this are reported.
pub const MAX_CONDITION: f64 = 1e12;

/// Density values per node, concatenated over bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDensity {
    pub values: Vec<CVec2>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationTensor {
    pub matrix: nalgebra::Matrix2<f64>,
}

/// `gamma = e^{i pi/4} / (sqrt(8 pi) omega^2)`.
pub fn far_field_gamma(medium: &ElasticMedium) -> C64 {
    C64::from_polar(1.0, PI / 4.0) / ((8.0 * PI).sqrt() * medium.omega * medium.omega)
}

/// Kress weights `R(t_i - t_j)` for the logarithm `ln(4 sin^2((t-tau)/2))`,
/// indexed by offset `(i - j) mod n`.
pub fn kress_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let nf = n as f64;
    (0..n)
        .map(|d| {
            let t = crate::TAU * d as f64 / nf;
            let mut s = 0.0;
            for m in 1..half {
                s += (m as f64 * t).cos() / m as f64;
            }
            -4.0 * PI / nf * s - 4.0 * PI / (nf * nf) * (half as f64 * t).cos()
        })
        .collect()
}

/// Weights of the cotangent rule for `PV int cot((t - tau)/2)/2 phi(tau) dtau`,
/// indexed by offset `(i - j) mod n`.
pub fn cotangent_weights(n: usize) -> Vec<f64> {
    let h = crate::TAU / n as f64;
    (0..n).map(|d| if d % 2 == 1 { h / (0.5 * d as f64 * h).tan() } else { 0.0 }).collect()
}

fn jmat() -> nalgebra::Matrix2<f64> {
    nalgebra::Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn real_to_c(m: nalgebra::Matrix2<f64>) -> CMat2 {
    m.map(|v| C64::new(v, 0.0))
}

fn set_block(a: &mut DMatrix<C64>, i: usize, j: usize, m: &CMat2) {
    for r in 0..2 {
        for c in 0..2 {
            a[(2 * i + r, 2 * j + c)] += m[(r, c)];
        }
    }
}

struct StaticParts {
    q: f64,
    mu_b4: f64,
    p: f64,
}

fn static_parts(medium: &ElasticMedium) -> StaticParts {
    let (l, m) = (medium.lambda, medium.mu);
    let q = -m / (2.0 * PI * (l + 2.0 * m));
    let b = (l + m) / (4.0 * PI * m * (l + 2.0 * m));
    StaticParts { q, mu_b4: 4.0 * m * b, p: -q }
}

/// Adds `2 int M(x_i, y) phi(y) ds_y` for a single body (target = source).
fn self_block(a: &mut DMatrix<C64>, offset: usize, b: &SmoothBoundary, kernel: Option<&RadialKernel>, st: &StaticParts) {
    let n = b.n_points;
    let h = b.step();
    let cot = cotangent_weights(n);
    let kress = kress_weights(n);
    let jm = jmat();
    for i in 0..n {
        let xi = b.local[i];
        let nu = b.normals[i];
        let tau = b.tangents[i];
        for j in 0..n {
            let off = (i + n - j) % n;
            let mut m = CMat2::zeros();
            if i == j {
                let sp2 = b.speed[i] * b.speed[i];
                let ktilde = -b.d1[i].dot(&b.d2[i]) / (2.0 * sp2);
                let sdiag = -b.d2[i].dot(&nu) / (2.0 * sp2);
                let smooth = (nalgebra::Matrix2::identity() * st.q - outer(tau, tau) * st.mu_b4) * sdiag;
                m += real_to_c(jm * (st.p * h * ktilde) + smooth * (h * b.speed[j]));
            } else {
                let d = xi - b.local[j];
                let r = d.norm();
                let rh = d / r;
                let c = rh.dot(&nu);
                let tdiff = h * off as f64;
                let k = d.dot(&tau) * b.speed[j] / (r * r);
                let ktilde = k - 0.5 / (0.5 * tdiff).tan();
                let smooth = (nalgebra::Matrix2::identity() * st.q - outer(rh, rh) * st.mu_b4) * (c / r);
                m += real_to_c(jm * (st.p * (h * ktilde + cot[off])) + smooth * (h * b.speed[j]));
                if let Some(kernel) = kernel {
                    let split = kernel.traction_split(r);
                    let mlog = traction_tensor(&split.log, rh, nu);
                    let mrem = traction_tensor(&split.smooth, rh, nu);
                    let s2 = (0.5 * tdiff).sin();
                    let lfix = (r * r / (4.0 * s2 * s2)).ln();
                    m += (mlog * re(0.5 * kress[off]) + (mrem + mlog * re(0.5 * lfix)) * re(h)) * re(b.speed[j]);
                }
            }
            set_block(a, offset + i, offset + j, &(m * re(2.0)));
        }
    }
}

/// Adds the smooth interaction of source body `src` on target body `tgt`.
fn cross_block(a: &mut DMatrix<C64>, toff: usize, tgt: &SmoothBoundary, soff: usize, src: &SmoothBoundary, kernel: &RadialKernel) {
    let h = src.step();
    for i in 0..tgt.n_points {
        let xi = tgt.node(i);
        let nu = tgt.normals[i];
        for j in 0..src.n_points {
            let d = xi - src.node(j);
            let r = d.norm();
            let f = kernel.traction_coefficients(r);
            let m = traction_tensor(&f, d / r, nu) * re(2.0 * h * src.speed[j]);
            set_block(a, toff + i, soff + j, &m);
        }
    }
}

/// Factored `(I - K')` for one or more mutually coupled bodies.
pub struct BemSystem {
    medium: ElasticMedium,
    bodies: Vec<SmoothBoundary>,
    offsets: Vec<usize>,
    lu: LU<C64, Dyn, Dyn>,
    pub condition: f64,
}

fn identity_minus(a: DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    DMatrix::identity(n, n) - a
}

impl BemSystem {
    pub fn new(medium: &ElasticMedium, bodies: Vec<SmoothBoundary>) -> Result<Self> {
        if bodies.is_empty() {
            return Err(Error::Parameter("boundary system needs at least one body"));
        }
        let kernel = RadialKernel::new(medium);
        let st = static_parts(medium);
        let mut offsets = Vec::with_capacity(bodies.len());
        let mut total = 0;
        for b in &bodies {
            offsets.push(total);
            total += b.n_points;
        }
        let mut k = DMatrix::zeros(2 * total, 2 * total);
        for (t, bt) in bodies.iter().enumerate() {
            self_block(&mut k, offsets[t], bt, Some(&kernel), &st);
            for (s, bs) in bodies.iter().enumerate() {
                if s != t {
                    cross_block(&mut k, offsets[t], bt, offsets[s], bs, &kernel);
                }
            }
        }
        let a = identity_minus(k);
        let lu = a.clone().lu();
        let condition = condition_estimate(&a, &lu);
        if condition.is_nan() || condition >= MAX_CONDITION {
            return Err(Error::IllConditioned { what: "boundary system (interior eigenvalue?)", condition });
        }
        Ok(Self { medium: *medium, bodies, offsets, lu, condition })
    }

    pub fn bodies(&self) -> &[SmoothBoundary] {
        &self.bodies
    }

    pub fn n_nodes(&self) -> usize {
        self.bodies.iter().map(|b| b.n_points).sum()
    }

    /// Solves for every column of stacked traction data `[t1_0, t2_0, t1_1, ...]`.
    pub fn solve_columns(&self, rhs: &DMatrix<C64>) -> DMatrix<C64> {
        let mut x = rhs * C64::new(2.0, 0.0);
        self.lu.solve_mut(&mut x);
        x
    }

    pub fn solve_density(&self, incident_traction: &[CVec2]) -> Result<BoundaryDensity> {
        if incident_traction.len() != self.n_nodes() {
            return Err(Error::Parameter("traction data length differs from node count"));
        }
        let rhs = DVector::from_iterator(2 * incident_traction.len(), incident_traction.iter().flat_map(|t| [t.x, t.y]));
        let mut x = rhs * C64::new(2.0, 0.0);
        self.lu.solve_mut(&mut x);
        Ok(BoundaryDensity { values: x.as_slice().chunks(2).map(|c| CVec2::new(c[0], c[1])).collect() })
    }

    /// Traction of a plane wave at every node, in system order.
    pub fn plane_wave_traction(&self, wave: &IncidentPlaneWave) -> Vec<CVec2> {
        let mut out = Vec::with_capacity(self.n_nodes());
        for b in &self.bodies {
            for j in 0..b.n_points {
                let (_, jac) = plane_wave_field(&self.medium, wave, b.node(j));
                out.push(traction(&self.medium, b.normals[j], &jac));
            }
        }
        out
    }

    /// `(ds weight, absolute node)` per node in system order.
    fn quadrature(&self) -> Vec<(f64, Vec2)> {
        let mut q = Vec::with_capacity(self.n_nodes());
        for b in &self.bodies {
            for j in 0..b.n_points {
                q.push((b.step() * b.speed[j], b.node(j)));
            }
        }
        q
    }

    /// Far-field patterns `(v_p, v_s)` of the single layer with `density`.
    pub fn far_field(&self, density: &BoundaryDensity, grid: &DirectionGrid) -> (Vec<C64>, Vec<C64>) {
        far_field_from_nodes(&self.medium, &self.quadrature(), &density.values, grid)
    }

    /// Far-field matrix block `[vp; vs]` (rows) for density columns.
    pub fn far_field_matrix(&self, densities: &DMatrix<C64>, grid: &DirectionGrid) -> DMatrix<C64> {
        let q = self.quadrature();
        let nd = grid.len();
        let g = far_field_gamma(&self.medium);
        let mut e = DMatrix::zeros(2 * nd, 2 * q.len());
        for (mode, row0) in [(Mode::Compressional, 0), (Mode::Shear, nd)] {
            let k = self.medium.kappa(mode);
            let pre = g * k.powf(1.5);
            for (i, xh) in grid.directions().enumerate() {
                let pol = if mode == Mode::Compressional { xh } else { perp(xh) };
                for (j, (w, y)) in q.iter().enumerate() {
                    let ph = (-I * k * xh.dot(y)).exp() * pre * *w;
                    e[(row0 + i, 2 * j)] = ph * pol.x;
                    e[(row0 + i, 2 * j + 1)] = ph * pol.y;
                }
            }
        }
        e * densities
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

fn far_field_from_nodes(medium: &ElasticMedium, q: &[(f64, Vec2)], phi: &[CVec2], grid: &DirectionGrid) -> (Vec<C64>, Vec<C64>) {
    let g = far_field_gamma(medium);
    let mut vp = vec![C64::new(0.0, 0.0); grid.len()];
    let mut vs = vec![C64::new(0.0, 0.0); grid.len()];
    for (i, xh) in grid.directions().enumerate() {
        let xp = perp(xh);
        let (mut ap, mut as_) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for ((w, y), f) in q.iter().zip(phi) {
            let t = xh.dot(y);
            ap += (-I * medium.kappa_p * t).exp() * (f.x * xh.x + f.y * xh.y) * *w;
            as_ += (-I * medium.kappa_s * t).exp() * (f.x * xp.x + f.y * xp.y) * *w;
        }
        vp[i] = ap * g * medium.kappa_p.powf(1.5);
        vs[i] = as_ * g * medium.kappa_s.powf(1.5);
    }
    (vp, vs)
}

/// Density for a single body.
pub fn solve_density(medium: &ElasticMedium, boundary: &SmoothBoundary, incident_traction: &[CVec2]) -> Result<BoundaryDensity> {
    BemSystem::new(medium, vec![boundary.clone()])?.solve_density(incident_traction)
}

pub fn far_field(medium: &ElasticMedium, boundary: &SmoothBoundary, density: &BoundaryDensity, grid: &DirectionGrid) -> (Vec<C64>, Vec<C64>) {
    let q: Vec<(f64, Vec2)> = (0..boundary.n_points).map(|j| (boundary.step() * boundary.speed[j], boundary.node(j))).collect();
    far_field_from_nodes(medium, &q, &density.values, grid)
}

/// `P = -int xi (x) w ds` with `(I - K~') w = nu`, `K~'` the Kelvin traction
/// operator, computed on the unit-scale shape centred at the origin.
pub fn polarization_tensor(medium: &ElasticMedium, boundary: &SmoothBoundary) -> Result<PolarizationTensor> {
    let b = boundary.reference()?;
    let n = b.n_points;
    let mut k = DMatrix::zeros(2 * n, 2 * n);
    self_block(&mut k, 0, &b, None, &static_parts(medium));
    let a = identity_minus(k);
    let lu = a.clone().lu();
    let condition = condition_estimate(&a, &lu);
    if condition.is_nan() || condition >= MAX_CONDITION {
        return Err(Error::IllConditioned { what: "static boundary system", condition });
    }
    let mut rhs = DVector::from_iterator(2 * n, b.normals.iter().flat_map(|v| [C64::new(v.x, 0.0), C64::new(v.y, 0.0)]));
    lu.solve_mut(&mut rhs);
    let mut p = nalgebra::Matrix2::zeros();
    for j in 0..n {
        let w = Vec2::new(rhs[2 * j].re, rhs[2 * j + 1].re);
        p -= outer(b.local[j], w) * (b.step() * b.speed[j]);
    }
    Ok(PolarizationTensor { matrix: p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cotangent_rule_on_fourier_modes() {
        let n = 32;
        let w = cotangent_weights(n);
        let h = crate::TAU / n as f64;
        for k in [-5i32, -1, 1, 3, 15] {
            let i = 3;
            let ti = h * i as f64;
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += (I * (k as f64) * h * j as f64).exp() * w[(i + n - j) % n];
            }
            let want = -I * PI * (k.signum() as f64) * (I * k as f64 * ti).exp();
            assert!((acc - want).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn kress_rule_on_cosines() {
        // int ln(4 sin^2((t - tau)/2)) cos(m tau) dtau = -2 pi cos(m t)/m
        let n = 32;
        let w = kress_weights(n);
        let h = crate::TAU / n as f64;
        for m in [1usize, 4, 9] {
            let i = 5;
            let acc: f64 = (0..n).map(|j| w[(i + n - j) % n] * (m as f64 * h * j as f64).cos()).sum();
            let want = -crate::TAU * (m as f64 * h * i as f64).cos() / m as f64;
            assert!((acc - want).abs() < 1e-12);
        }
    }
}
