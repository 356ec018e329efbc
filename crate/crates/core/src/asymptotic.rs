//! Small-cavity asymptotics: leading-order far fields, the limit operator
//! `F0`, its analytic eigenfunctions and the 4x4 matrix `MF` describing `F0`
//! on the quadratic templates.

use alloc::vec::Vec;
use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};

use crate::bem::far_field_gamma;
use crate::elastic::{outer, perp, DirectionGrid, ElasticMedium, HerglotzKernel, Mode};
use crate::{Error, Result, Vec2, C64, I, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallCavityDescriptor {
    pub center: Vec2,
    /// Area of the unit-scale shape.
    pub area: f64,
    /// Polarization tensor of the unit-scale shape.
    pub polarization: Matrix2<f64>,
    pub scale: f64,
}

impl SmallCavityDescriptor {
    pub fn new(center: Vec2, area: f64, polarization: Matrix2<f64>, scale: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::Parameter("cavity area must be positive"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Parameter("cavity scale must be positive"));
        }
        Ok(Self { center, area, polarization, scale })
    }
}

/// Minimum pairwise centre distance, infinite for fewer than two cavities.
pub fn separation(descriptors: &[SmallCavityDescriptor]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in descriptors.iter().enumerate() {
        for b in &descriptors[i + 1..] {
            best = best.min((a.center - b.center).norm());
        }
    }
    best
}

/// `(lambda I + 2 mu d d^T) / (lambda + 2 mu)`.
pub fn l_tensor(medium: &ElasticMedium, d: Vec2) -> Matrix2<f64> {
    (Matrix2::identity() * medium.lambda + outer(d, d) * (2.0 * medium.mu)) / (medium.lambda + 2.0 * medium.mu)
}

/// `d_perp d^T + d d_perp^T`.
pub fn h_tensor(d: Vec2) -> Matrix2<f64> {
    let dp = perp(d);
    outer(dp, d) + outer(d, dp)
}

/// Leading-order far-field components `(x.v_p, x_perp.v_s)` for a unit
/// plane wave of `mode` and direction `d`, summed over cavities, without
/// the `-rho^2 gamma` prefactor.
pub fn asymptotic_far_field(medium: &ElasticMedium, cavities: &[SmallCavityDescriptor], mode: Mode, d: Vec2, xhat: Vec2) -> (C64, C64) {
    far_field_sum(medium, cavities, mode, d, xhat, false)
}

/// As [`asymptotic_far_field`] with `-rho_l^2 gamma` applied per cavity.
pub fn asymptotic_far_field_scaled(medium: &ElasticMedium, cavities: &[SmallCavityDescriptor], mode: Mode, d: Vec2, xhat: Vec2) -> (C64, C64) {
    far_field_sum(medium, cavities, mode, d, xhat, true)
}

fn far_field_sum(medium: &ElasticMedium, cavities: &[SmallCavityDescriptor], mode: Mode, d: Vec2, xhat: Vec2, scaled: bool) -> (C64, C64) {
    let (kp, ks, w2) = (medium.kappa_p, medium.kappa_s, medium.omega * medium.omega);
    let (lam, mu) = (medium.lambda, medium.mu);
    let xp = perp(xhat);
    let kin = medium.kappa(mode);
    let g = if scaled { -far_field_gamma(medium) } else { C64::new(1.0, 0.0) };
    let (mut vp, mut vs) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for c in cavities {
        let pt = c.polarization.transpose() * xhat;
        let (pol, tensor, coef_p, coef_s) = match mode {
            Mode::Compressional => (d, l_tensor(medium, d), 2.0 * w2, 2.0 * kp * ks * (lam + 2.0 * mu)),
            Mode::Shear => (perp(d), h_tensor(d), 2.0 * kp * ks * mu, 2.0 * w2),
        };
        let tp = tensor * pt;
        let bp = xhat.dot(&pol) * w2 * c.area + coef_p * xhat.dot(&tp);
        let bs = xp.dot(&pol) * w2 * c.area + coef_s * xp.dot(&tp);
        let rho2 = if scaled { c.scale * c.scale } else { 1.0 };
        let ph_p = (I * c.center.dot(&(d * kin - xhat * kp))).exp();
        let ph_s = (I * c.center.dot(&(d * kin - xhat * ks))).exp();
        vp += g * rho2 * kp.powf(1.5) * ph_p * bp;
        vs += g * rho2 * ks.powf(1.5) * ph_s * bs;
    }
    (vp, vs)
}

/// Applies `F0` to a density on its own grid.
pub fn limit_operator_apply(medium: &ElasticMedium, descriptors: &[SmallCavityDescriptor], f: &HerglotzKernel) -> HerglotzKernel {
    let (kp, ks, w2) = (medium.kappa_p, medium.kappa_s, medium.omega * medium.omega);
    let (lam, mu) = (medium.lambda, medium.mu);
    let grid = &f.grid;
    let mut out = HerglotzKernel::zeros(grid.clone());
    let cz = C64::new(0.0, 0.0);
    for c in descriptors {
        // integrals over incidence directions
        let (mut ip_a, mut ip_1, mut ip_aa) = ([cz; 2], cz, [[cz; 2]; 2]);
        let (mut is_a, mut is_pa) = ([cz; 2], [[cz; 2]; 2]);
        for (j, a) in grid.directions().enumerate() {
            let w = grid.weights[j];
            let fp = (I * kp * a.dot(&c.center)).exp() * f.fp[j] * w;
            let fs = (I * ks * a.dot(&c.center)).exp() * f.fs[j] * w;
            let ap = perp(a);
            ip_1 += fp;
            for r in 0..2 {
                ip_a[r] += fp * a[r];
                is_a[r] += fs * ap[r];
                for s in 0..2 {
                    ip_aa[r][s] += fp * a[r] * a[s];
                    // alpha_perp alpha^T + alpha alpha_perp^T
                    is_pa[r][s] += fs * (ap[r] * a[s] + a[r] * ap[s]);
                }
            }
        }
        for (i, xh) in grid.directions().enumerate() {
            let q = c.polarization.transpose() * xh;
            let mv = |m: &[[C64; 2]; 2], r: usize| m[r][0] * q.x + m[r][1] * q.y;
            let xp = perp(xh);
            let mut bp = [cz; 2];
            let mut bs = [cz; 2];
            for r in 0..2 {
                let dipole = (ip_a[r] + is_a[r]) * (w2 * c.area);
                bp[r] = dipole
                    + ip_1 * q[r] * (2.0 * lam * w2 / (lam + 2.0 * mu))
                    + mv(&ip_aa, r) * (4.0 * mu * w2 / (lam + 2.0 * mu))
                    + mv(&is_pa, r) * (2.0 * kp * ks * mu);
                bs[r] = dipole
                    + ip_1 * q[r] * (2.0 * lam * kp * ks)
                    + mv(&ip_aa, r) * (4.0 * mu * kp * ks)
                    + mv(&is_pa, r) * (2.0 * w2);
            }
            out.fp[i] += (-I * kp * xh.dot(&c.center)).exp() * kp.powf(1.5) * (bp[0] * xh.x + bp[1] * xh.y);
            out.fs[i] += (-I * ks * xh.dot(&c.center)).exp() * ks.powf(1.5) * (bs[0] * xp.x + bs[1] * xp.y);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixF {
    pub matrix: Matrix4<C64>,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Basis `A_1..A_4` of 2x2 matrices.
pub fn template_basis() -> [Matrix2<f64>; 4] {
    [
        Matrix2::new(1.0, 0.0, 0.0, 0.0),
        Matrix2::new(0.0, 0.0, 0.0, 1.0),
        Matrix2::new(0.0, 1.0, 1.0, 0.0),
        Matrix2::new(0.0, 1.0, -1.0, 0.0),
    ]
}

pub fn matrix_f(medium: &ElasticMedium, p: &Matrix2<f64>) -> MatrixF {
    let (kp, ks) = (medium.kappa_p.powf(3.5), medium.kappa_s.powf(3.5));
    let c1 = 2.0 * medium.lambda * kp * PI;
    let c2 = medium.mu * kp * PI;
    let c3 = medium.mu * ks * PI;
    let (p11, p12, p21, p22) = (p[(0, 0)], p[(0, 1)], p[(1, 0)], p[(1, 1)]);
    let a = c1 + 3.0 * c2 + c3;
    let b = c1 + c2 - c3;
    let e = c2 + c3;
    let m = Matrix4::new(
        a * p11,
        b * p11,
        2.0 * e * p12,
        0.0,
        b * p22,
        a * p22,
        2.0 * e * p21,
        0.0,
        (a * p21 + b * p12) / 2.0,
        (b * p21 + a * p12) / 2.0,
        e * (p11 + p22),
        0.0,
        (a * p21 - b * p12) / 2.0,
        (b * p21 - a * p12) / 2.0,
        e * (p22 - p11),
        0.0,
    );
    MatrixF { matrix: m.map(|v| C64::new(v, 0.0)), c1, c2, c3 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Dipole-type pair, index 1 or 2.
    A(usize),
    /// Quadratic-type pair, index 1..=3.
    B(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoreticalEigenpair {
    pub kind: PairKind,
    pub eigenvalue: C64,
    pub kernel: HerglotzKernel,
    /// Template matrix `sum_j v_j A_j` (quadratic pairs only).
    pub matrix: Option<Matrix2<C64>>,
    /// Set when a repeated eigenvalue had no full eigenspace and an
    /// invariant-subspace basis vector was used instead.
    pub degenerate: bool,
}

/// `(kp^{3/2} x.c e^{-i kp x.s}, ks^{3/2} x_perp.c e^{-i ks x.s})`.
pub fn dipole_template(medium: &ElasticMedium, grid: &DirectionGrid, center: Vec2, c: nalgebra::Vector2<C64>) -> HerglotzKernel {
    let mut k = HerglotzKernel::zeros(grid.clone());
    for (i, x) in grid.directions().enumerate() {
        let xp = perp(x);
        k.fp[i] = medium.kappa_p.powf(1.5) * (-I * medium.kappa_p * x.dot(&center)).exp() * (c.x * x.x + c.y * x.y);
        k.fs[i] = medium.kappa_s.powf(1.5) * (-I * medium.kappa_s * x.dot(&center)).exp() * (c.x * xp.x + c.y * xp.y);
    }
    k
}

/// `(kp^{5/2} x.A x e^{-i kp x.s}, ks^{5/2} x_perp.A x e^{-i ks x.s})`.
pub fn quadratic_template(medium: &ElasticMedium, grid: &DirectionGrid, center: Vec2, a: &Matrix2<C64>) -> HerglotzKernel {
    let mut k = HerglotzKernel::zeros(grid.clone());
    for (i, x) in grid.directions().enumerate() {
        let xc = crate::elastic::to_c(x);
        let ax = a * xc;
        let xp = perp(x);
        k.fp[i] = medium.kappa_p.powf(2.5) * (-I * medium.kappa_p * x.dot(&center)).exp() * (ax.x * x.x + ax.y * x.y);
        k.fs[i] = medium.kappa_s.powf(2.5) * (-I * medium.kappa_s * x.dot(&center)).exp() * (ax.x * xp.x + ax.y * xp.y);
    }
    k
}

/// The `6` analytic templates of one cavity: two dipoles and four quadratics.
pub fn template_space(medium: &ElasticMedium, grid: &DirectionGrid, c: &SmallCavityDescriptor) -> Vec<HerglotzKernel> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut out = alloc::vec![
        dipole_template(medium, grid, c.center, nalgebra::Vector2::new(one, zero)),
        dipole_template(medium, grid, c.center, nalgebra::Vector2::new(zero, one)),
    ];
    for a in template_basis() {
        out.push(quadratic_template(medium, grid, c.center, &a.map(|v| C64::new(v, 0.0))));
    }
    out
}

/// Eigenpairs of the leading 3x3 block of `MF`, with the fourth component
/// recovered from row four.
fn f_eigenvectors(f: &Matrix4<C64>) -> Vec<(C64, Vector4<C64>, bool)> {
    let b = f.fixed_view::<3, 3>(0, 0).into_owned();
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let vals = nalgebra::Schur::new(b).eigenvalues().unwrap_or_else(|| nalgebra::Vector3::from_element(C64::new(0.0, 0.0)));
    let mut vals: Vec<C64> = vals.iter().copied().collect();
    vals.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(core::cmp::Ordering::Equal));
    let tol = 1e-9 * scale;
    let mut out = Vec::new();
    let mut i = 0;
    while i < 3 {
        let z = vals[i];
        let mut mult = 1;
        while i + mult < 3 && (vals[i + mult] - z).norm() <= tol {
            mult += 1;
        }
        let shifted: Matrix3<C64> = b - Matrix3::identity() * z;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &c| svd.singular_values[a].partial_cmp(&svd.singular_values[c]).unwrap_or(core::cmp::Ordering::Equal));
        let full = svd.singular_values[order[mult - 1]] <= 1e-7 * scale;
        let basis: Vec<Vector3<C64>> = if full {
            order[..mult].iter().map(|&k| vt.row(k).adjoint()).collect()
        } else {
            // invariant subspace of the cluster: null space of shifted^mult
            let mut p = shifted;
            for _ in 1..mult {
                p *= shifted;
            }
            let s2 = p.svd(false, true);
            let v2 = s2.v_t.expect("requested");
            let mut o2: Vec<usize> = (0..3).collect();
            o2.sort_by(|&a, &c| s2.singular_values[a].partial_cmp(&s2.singular_values[c]).unwrap_or(core::cmp::Ordering::Equal));
            o2[..mult].iter().map(|&k| v2.row(k).adjoint()).collect()
        };
        for v in basis {
            let row4 = f[(3, 0)] * v[0] + f[(3, 1)] * v[1] + f[(3, 2)] * v[2];
            let v4 = if z.norm() > tol { row4 / z } else { C64::new(0.0, 0.0) };
            out.push((z, Vector4::new(v[0], v[1], v[2], v4), !full));
        }
        i += mult;
    }
    out
}

/// Five analytic eigenpairs of `F0` for one cavity.
pub fn theoretical_eigensystem(medium: &ElasticMedium, grid: &DirectionGrid, c: &SmallCavityDescriptor) -> Vec<TheoreticalEigenpair> {
    let lam_a = PI * medium.omega * medium.omega * c.area * (medium.kappa_p.powf(1.5) + medium.kappa_s.powf(1.5));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut out = alloc::vec![
        TheoreticalEigenpair {
            kind: PairKind::A(1),
            eigenvalue: C64::new(lam_a, 0.0),
            kernel: dipole_template(medium, grid, c.center, nalgebra::Vector2::new(one, zero)),
            matrix: None,
            degenerate: false,
        },
        TheoreticalEigenpair {
            kind: PairKind::A(2),
            eigenvalue: C64::new(lam_a, 0.0),
            kernel: dipole_template(medium, grid, c.center, nalgebra::Vector2::new(zero, one)),
            matrix: None,
            degenerate: false,
        },
    ];
    let mf = matrix_f(medium, &c.polarization);
    let basis = template_basis();
    for (q, (z, v, degenerate)) in f_eigenvectors(&mf.matrix).into_iter().enumerate() {
        let mut a = Matrix2::<C64>::zeros();
        for j in 0..4 {
            a += basis[j].map(|x| C64::new(x, 0.0)) * v[j];
        }
        out.push(TheoreticalEigenpair {
            kind: PairKind::B(q + 1),
            eigenvalue: z,
            kernel: quadratic_template(medium, grid, c.center, &a),
            matrix: Some(a),
            degenerate,
        });
    }
    out
}

/// `||F0 g - lambda g|| / ||lambda g||` in the weighted norm.
pub fn residual_check(medium: &ElasticMedium, descriptors: &[SmallCavityDescriptor], pair: &TheoreticalEigenpair) -> f64 {
    let fg = limit_operator_apply(medium, descriptors, &pair.kernel);
    let mut diff = fg.clone();
    for j in 0..diff.fp.len() {
        diff.fp[j] -= pair.eigenvalue * pair.kernel.fp[j];
        diff.fs[j] -= pair.eigenvalue * pair.kernel.fs[j];
    }
    diff.norm(medium) / (pair.eigenvalue.norm() * pair.kernel.norm(medium))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::make_medium;

    #[test]
    fn tensor_helpers() {
        let h = h_tensor(Vec2::x());
        assert_eq!(h, Matrix2::new(0.0, 1.0, 1.0, 0.0));
        let m = make_medium(1.0, 2.0, 2.0).unwrap();
        let d = Vec2::new(0.6, 0.8);
        let l = l_tensor(&m, d);
        assert!((l.trace() - (2.0 * m.lambda + 2.0 * m.mu) / (m.lambda + 2.0 * m.mu)).abs() < 1e-15);
    }

    #[test]
    fn matrix_f_structure() {
        let m = make_medium(1.0, 2.0, 2.0).unwrap();
        assert_eq!(matrix_f(&m, &Matrix2::zeros()).matrix, Matrix4::zeros());
        let p = Matrix2::new(-2.0, 0.4, 0.3, -1.0);
        let f = matrix_f(&m, &p);
        for r in 0..4 {
            assert_eq!(f.matrix[(r, 3)], C64::new(0.0, 0.0));
        }
    }
}
