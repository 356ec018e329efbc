//! Isotropic elastic medium, plane and Herglotz waves, traction, Green
//! tensors and the back-propagation kernels E and H.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::radial::RadialKernel;
use crate::special::bessel_j_seq;
use crate::{CMat2, CVec2, Error, Result, Vec2, C64, I, PI, TAU};

/// Unit-density isotropic medium. `kappa_p < kappa_s` always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticMedium {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Compressional,
    Shear,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::Compressional, Mode::Shear];

    /// Block index in `[p; s]` ordering.
    pub fn index(self) -> usize {
        match self {
            Mode::Compressional => 0,
            Mode::Shear => 1,
        }
    }
}

impl ElasticMedium {
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite() && omega.is_finite()) {
            return Err(Error::Parameter("medium parameters must be finite"));
        }
        if mu <= 0.0 {
            return Err(Error::Parameter("mu must be positive"));
        }
        if lambda + mu <= 0.0 {
            return Err(Error::Parameter("lambda + mu must be positive"));
        }
        if omega <= 0.0 {
            return Err(Error::Parameter("omega must be positive"));
        }
        Ok(Self {
            lambda,
            mu,
            omega,
            kappa_p: omega / (lambda + 2.0 * mu).sqrt(),
            kappa_s: omega / mu.sqrt(),
        })
    }

    pub fn kappa(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Compressional => self.kappa_p,
            Mode::Shear => self.kappa_s,
        }
    }

    /// Channel factor omega/kappa of the weighted far-field inner product.
    pub fn channel_weight(&self, mode: Mode) -> f64 {
        self.omega / self.kappa(mode)
    }
}

pub fn make_medium(lambda: f64, mu: f64, omega: f64) -> Result<ElasticMedium> {
    ElasticMedium::new(lambda, mu, omega)
}

/// Counterclockwise rotation by a right angle. Every perpendicular in the
/// crate goes through here.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

#[inline]
pub fn unit(angle: f64) -> Vec2 {
    Vec2::new(angle.cos(), angle.sin())
}

pub(crate) fn to_c(v: Vec2) -> CVec2 {
    CVec2::new(C64::new(v.x, 0.0), C64::new(v.y, 0.0))
}

pub(crate) fn outer(a: Vec2, b: Vec2) -> nalgebra::Matrix2<f64> {
    a * b.transpose()
}

/// Quadrature directions on the unit circle. Weights sum to 2*pi on the full
/// circle and to the arc measure after an aperture restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DirectionGrid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("direction grid needs at least one point"));
        }
        let h = TAU / n as f64;
        Ok(Self { angles: (0..n).map(|j| j as f64 * h).collect(), weights: alloc::vec![h; n] })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn direction(&self, j: usize) -> Vec2 {
        unit(self.angles[j])
    }

    pub fn directions(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.angles.iter().map(|&a| unit(a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentPlaneWave {
    pub direction: Vec2,
    pub mode: Mode,
    pub amplitude: C64,
}

impl IncidentPlaneWave {
    pub fn new(direction: Vec2, mode: Mode, amplitude: C64) -> Result<Self> {
        if (direction.norm() - 1.0).abs() > 1e-14 {
            return Err(Error::Parameter("plane-wave direction must be a unit vector"));
        }
        Ok(Self { direction, mode, amplitude })
    }
}

/// Displacement and its Jacobian `J[a][b] = du_a/dx_b`.
pub fn plane_wave_field(medium: &ElasticMedium, wave: &IncidentPlaneWave, x: Vec2) -> (CVec2, CMat2) {
    let d = wave.direction;
    let k = medium.kappa(wave.mode);
    let pol = match wave.mode {
        Mode::Compressional => d,
        Mode::Shear => perp(d),
    };
    let e = wave.amplitude * (I * k * d.dot(&x)).exp();
    let value = to_c(pol) * e;
    let jac = outer(pol, d).map(|v| I * k * v * e);
    (value, jac)
}

/// Surface traction `2 mu (J nu) + lambda (div u) nu - mu (curl u) nu_perp`.
pub fn traction(medium: &ElasticMedium, normal: Vec2, jacobian: &CMat2) -> CVec2 {
    let j = jacobian;
    let nu = to_c(normal);
    let div = j[(0, 0)] + j[(1, 1)];
    let curl = j[(1, 0)] - j[(0, 1)];
    j * nu * C64::new(2.0 * medium.mu, 0.0) + nu * (div * medium.lambda) - to_c(perp(normal)) * (curl * medium.mu)
}

/// Density of a Herglotz wave on a direction grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzKernel {
    pub grid: DirectionGrid,
    pub fp: Vec<C64>,
    pub fs: Vec<C64>,
}

impl HerglotzKernel {
    pub fn zeros(grid: DirectionGrid) -> Self {
        let n = grid.len();
        Self { grid, fp: alloc::vec![C64::new(0.0, 0.0); n], fs: alloc::vec![C64::new(0.0, 0.0); n] }
    }

    /// Stacked `[fp; fs]`.
    pub fn stacked(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_iterator(2 * self.fp.len(), self.fp.iter().chain(&self.fs).copied())
    }

    pub fn from_stacked(grid: DirectionGrid, v: &nalgebra::DVector<C64>) -> Self {
        let n = grid.len();
        Self { fp: v.rows(0, n).iter().copied().collect(), fs: v.rows(n, n).iter().copied().collect(), grid }
    }

    /// Weighted inner product `(f, g) = sum_c (omega/kappa_c) sum_j w_j f_c conj(g_c)`.
    pub fn inner(&self, other: &Self, medium: &ElasticMedium) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (mode, (a, b)) in [(Mode::Compressional, (&self.fp, &other.fp)), (Mode::Shear, (&self.fs, &other.fs))] {
            let cw = medium.channel_weight(mode);
            for ((x, y), w) in a.iter().zip(b.iter()).zip(&self.grid.weights) {
                acc += x * y.conj() * (w * cw);
            }
        }
        acc
    }

    pub fn norm(&self, medium: &ElasticMedium) -> f64 {
        self.inner(self, medium).re.max(0.0).sqrt()
    }
}

fn herglotz_phase() -> C64 {
    C64::from_polar(1.0, -PI / 4.0)
}

/// Herglotz wave value and Jacobian at `x`.
pub fn herglotz_field_jacobian(medium: &ElasticMedium, kernel: &HerglotzKernel, x: Vec2) -> (CVec2, CMat2) {
    let mut u = CVec2::zeros();
    let mut jac = CMat2::zeros();
    let cp = (medium.kappa_p / medium.omega).sqrt();
    let cs = (medium.kappa_s / medium.omega).sqrt();
    for (j, alpha) in kernel.grid.directions().enumerate() {
        let w = kernel.grid.weights[j];
        for (mode, amp) in [(Mode::Compressional, kernel.fp[j] * cp), (Mode::Shear, kernel.fs[j] * cs)] {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let wave = IncidentPlaneWave { direction: alpha, mode, amplitude: amp * w };
            let (v, jv) = plane_wave_field(medium, &wave, x);
            u += v;
            jac += jv;
        }
    }
    let ph = herglotz_phase();
    (u * ph, jac * ph)
}

pub fn herglotz_field(medium: &ElasticMedium, kernel: &HerglotzKernel, x: Vec2) -> CVec2 {
    herglotz_field_jacobian(medium, kernel, x).0
}

/// Dynamic Green tensor `A(r) I + B(r) rhat rhat^T`.
pub fn fundamental_solution(medium: &ElasticMedium, x: Vec2, y: Vec2) -> Result<CMat2> {
    RadialKernel::new(medium).green_tensor(x, y)
}

fn kelvin_constants(medium: &ElasticMedium) -> (f64, f64) {
    let (l, m) = (medium.lambda, medium.mu);
    let den = 4.0 * PI * m * (l + 2.0 * m);
    (-(l + 3.0 * m) / den, (l + m) / den)
}

/// Kelvin solution `a ln|x-y| I + b rhat rhat^T`.
pub fn static_fundamental_solution(medium: &ElasticMedium, x: Vec2, y: Vec2) -> Result<nalgebra::Matrix2<f64>> {
    let d = x - y;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::Singular);
    }
    let (a, b) = kelvin_constants(medium);
    let rh = d / r;
    Ok(nalgebra::Matrix2::identity() * (a * r.ln()) + outer(rh, rh) * b)
}

/// `pi Q^T diag(J0 - J2, J0 + J2) Q` at wavenumber `kappa`.
pub fn e_kernel(kappa: f64, x: Vec2, y: Vec2) -> CMat2 {
    let d = x - y;
    let r = d.norm();
    let j = bessel_j_seq(2, kappa * r);
    let (rh, rp) = if r == 0.0 { (Vec2::x(), Vec2::y()) } else { (d / r, perp(d / r)) };
    let m = outer(rh, rh) * (j[0] - j[2]) + outer(rp, rp) * (j[0] + j[2]);
    m.map(|v| C64::new(PI * v, 0.0))
}

/// `(E(kappa_p), H(kappa_s))`, the closed forms of the plane-wave integrals
/// of `alpha alpha^T` and `alpha_perp alpha_perp^T`.
pub fn eh_kernels(medium: &ElasticMedium, x: Vec2, y: Vec2) -> (CMat2, CMat2) {
    let e = e_kernel(medium.kappa_p, x, y);
    let j0 = bessel_j_seq(0, medium.kappa_s * (x - y).norm())[0];
    let h = CMat2::identity() * C64::new(TAU * j0, 0.0) - e_kernel(medium.kappa_s, x, y);
    (e, h)
}
