//! Separation-of-variables solution for a traction-free disk.
//!
//! Fields are expanded in `grad(C_n(kp r) e^{in theta})` and
//! `grad_perp(C_n(ks r) e^{in theta})` with `C = J` for incoming and
//! `C = H^(1)` for outgoing waves. The scattering matrix maps incoming
//! `(a_n, b_n)` to outgoing `(alpha_n, beta_n)`.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::elastic::{perp, traction, unit, DirectionGrid, ElasticMedium, Mode};
use crate::linalg::solve2;
use crate::special::{cylinder_table, BesselEval};
use crate::{CMat2, CVec2, Error, Result, Vec2, C64, I, PI};

/// Condition threshold for the 2x2 boundary systems.
pub const MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskCavity {
    pub center: Vec2,
    pub radius: f64,
}

impl DiskCavity {
    pub fn new(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Parameter("disk radius must be positive"));
        }
        Ok(Self { center, radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringBlock {
    pub order: i32,
    pub matrix: CMat2,
}

/// Modal coefficients for orders `-N..=N`, stored at index `n + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    pub truncation: usize,
    pub incoming: Vec<(C64, C64)>,
    pub outgoing: Vec<(C64, C64)>,
}

impl ModalCoefficients {
    pub fn order(&self, k: usize) -> i32 {
        k as i32 - self.truncation as i32
    }

    /// `|alpha_{+-N}| / max |alpha_n|` over both channels.
    pub fn tail_ratio(&self) -> f64 {
        let mag = |c: &(C64, C64)| c.0.norm().max(c.1.norm());
        let peak = self.outgoing.iter().map(mag).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let last = self.outgoing.len() - 1;
        mag(&self.outgoing[0]).max(mag(&self.outgoing[last])) / peak
    }
}

/// Default truncation `max(20, ceil(ks R) + 15)`.
pub fn truncation(medium: &ElasticMedium, radius: f64) -> usize {
    20usize.max((medium.kappa_s * radius).ceil() as usize + 15)
}

fn signed_eval(e: &BesselEval, n: i32) -> (C64, C64, C64) {
    let s = if n < 0 && n % 2 != 0 { -1.0 } else { 1.0 };
    (e.value * s, e.first_derivative * s, e.second_derivative * s)
}

fn boundary_matrix(medium: &ElasticMedium, r: f64, n: i32, cp: (C64, C64, C64), cs: (C64, C64, C64)) -> CMat2 {
    let (l, m) = (medium.lambda, medium.mu);
    let (kp, ks) = (medium.kappa_p, medium.kappa_s);
    let nf = n as f64;
    let d11 = cp.2 * (2.0 * m * kp * kp) - cp.0 * (l * kp * kp);
    let d12 = -I * (2.0 * m * nf) * (cs.1 * (ks * r) - cs.0) / (r * r);
    let d21 = I * (2.0 * m * nf) * (cp.1 * (kp * r) - cp.0) / (r * r);
    let d22 = cs.2 * (2.0 * m * ks * ks) + cs.0 * (m * ks * ks);
    CMat2::new(d11, d12, d21, d22)
}

/// Per-order Bessel data at `kp R` and `ks R`.
struct DiskTables {
    p: crate::special::CylinderTable,
    s: crate::special::CylinderTable,
}

fn tables(medium: &ElasticMedium, radius: f64, nmax: usize) -> Result<DiskTables> {
    Ok(DiskTables { p: cylinder_table(nmax, medium.kappa_p * radius)?, s: cylinder_table(nmax, medium.kappa_s * radius)? })
}

fn block_from_tables(medium: &ElasticMedium, radius: f64, n: i32, t: &DiskTables) -> Result<ScatteringBlock> {
    let k = n.unsigned_abs() as usize;
    let d = boundary_matrix(medium, radius, n, signed_eval(&t.p.h[k], n), signed_eval(&t.s.h[k], n));
    let e = boundary_matrix(medium, radius, n, signed_eval(&t.p.j[k], n), signed_eval(&t.s.j[k], n));
    let x = solve2(&d, &e, MAX_CONDITION, "disk boundary system")?;
    Ok(ScatteringBlock { order: n, matrix: -x })
}

/// `S_n = -D^{-1} E`.
pub fn scattering_block(medium: &ElasticMedium, radius: f64, n: i32) -> Result<ScatteringBlock> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::Parameter("disk radius must be positive"));
    }
    let t = tables(medium, radius, n.unsigned_abs() as usize)?;
    block_from_tables(medium, radius, n, &t)
}

fn i_pow(n: i32) -> C64 {
    match n.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Incoming-coefficient factors `-2 pi i^{n+1} e^{-i pi/4} / sqrt(k w)` for p and s.
pub fn incoming_factors(medium: &ElasticMedium, n: i32) -> (C64, C64) {
    let base = -i_pow(n + 1) * C64::from_polar(2.0 * PI, -PI / 4.0);
    (base / (medium.kappa_p * medium.omega).sqrt(), base / (medium.kappa_s * medium.omega).sqrt())
}

/// Outgoing-to-far-field factors `(-i)^n sqrt(2k/pi) e^{i pi/4}` for p and s.
pub fn outgoing_factors(medium: &ElasticMedium, n: i32) -> (C64, C64) {
    let base = i_pow(-n) * C64::from_polar(1.0, PI / 4.0);
    (base * (2.0 * medium.kappa_p / PI).sqrt(), base * (2.0 * medium.kappa_s / PI).sqrt())
}

/// Incoming modal coefficients of a Herglotz wave from the Fourier
/// coefficients `f_n = (1/2pi) int f e^{-in phi}` of its density.
pub fn herglotz_to_incoming(medium: &ElasticMedium, n: i32, fa: C64, fb: C64) -> (C64, C64) {
    let (cp, cs) = incoming_factors(medium, n);
    (cp * fa, cs * fb)
}

/// `F_n = D_scat S_n D_inc`.
pub fn far_block(medium: &ElasticMedium, radius: f64, n: i32) -> Result<CMat2> {
    let s = scattering_block(medium, radius, n)?;
    Ok(far_from_scattering(medium, n, &s.matrix))
}

fn far_from_scattering(medium: &ElasticMedium, n: i32, s: &CMat2) -> CMat2 {
    let (ip, is) = incoming_factors(medium, n);
    let (op, os) = outgoing_factors(medium, n);
    CMat2::new(op * s[(0, 0)] * ip, op * s[(0, 1)] * is, os * s[(1, 0)] * ip, os * s[(1, 1)] * is)
}

/// Far blocks for `-N..=N`, index `n + N`.
pub fn far_blocks(medium: &ElasticMedium, radius: f64, nmax: usize) -> Result<Vec<CMat2>> {
    let t = tables(medium, radius, nmax)?;
    (-(nmax as i32)..=nmax as i32)
        .map(|n| Ok(far_from_scattering(medium, n, &block_from_tables(medium, radius, n, &t)?.matrix)))
        .collect()
}

/// Leading-order eigenvalues of `F_n` for `|n| >= 2`.
pub fn small_radius_eigs(medium: &ElasticMedium, radius: f64, n: i32) -> Result<(C64, C64)> {
    let n = n.abs();
    if n < 2 {
        return Err(Error::Parameter("leading-order eigenvalues need |n| >= 2"));
    }
    let (l, m, w) = (medium.lambda, medium.mu, medium.omega);
    let (kp, ks) = (medium.kappa_p.powi(n), medium.kappa_s.powi(n));
    let nf = n as f64;
    let gamma = |k: i32| -> f64 { (1..k).map(|v| v as f64).product() };
    let cn = PI * PI * kp * ks
        / (2f64.powi(2 * n + 1)
            * m
            * (medium.kappa_s.powi(2) * m * nf + medium.kappa_p.powi(2) * (l + m - l * nf))
            * gamma(n - 1)
            * gamma(n + 2));
    let dn = -I * (8.0 * PI / w).sqrt();
    let l1 = -8.0 * cn * dn * I * (nf * (nf + 1.0) * (nf - 1.0) * m * m * (kp + ks)) / (PI * kp * ks) * radius.powi(2 * n - 2);
    let l2 = 2.0 * cn * dn * I * (m * m * nf * nf * kp * ks) / PI * radius.powi(2 * n);
    Ok((l1, l2))
}

/// Plane-wave incoming coefficients for a unit-amplitude wave of direction
/// angle `phi`: `i^{n-1} e^{-i n phi} / k`.
pub fn plane_wave_coefficients(medium: &ElasticMedium, mode: Mode, phi: f64, n: i32) -> (C64, C64) {
    let c = i_pow(n - 1) * C64::from_polar(1.0, -(n as f64) * phi);
    match mode {
        Mode::Compressional => (c / medium.kappa_p, C64::new(0.0, 0.0)),
        Mode::Shear => (C64::new(0.0, 0.0), c / medium.kappa_s),
    }
}

/// Outgoing coefficients for given incoming ones, orders `-N..=N`.
pub fn scatter(medium: &ElasticMedium, radius: f64, incoming: Vec<(C64, C64)>) -> Result<ModalCoefficients> {
    let nmax = (incoming.len() - 1) / 2;
    let t = tables(medium, radius, nmax)?;
    let mut outgoing = Vec::with_capacity(incoming.len());
    for (k, &(a, b)) in incoming.iter().enumerate() {
        let n = k as i32 - nmax as i32;
        let s = block_from_tables(medium, radius, n, &t)?.matrix;
        outgoing.push((s[(0, 0)] * a + s[(0, 1)] * b, s[(1, 0)] * a + s[(1, 1)] * b));
    }
    Ok(ModalCoefficients { truncation: nmax, incoming, outgoing })
}

/// Far-field patterns of outgoing coefficients (disk at the origin).
pub fn modal_far_field(medium: &ElasticMedium, modes: &ModalCoefficients, grid: &DirectionGrid) -> (Vec<C64>, Vec<C64>) {
    let mut vp = alloc::vec![C64::new(0.0, 0.0); grid.len()];
    let mut vs = vp.clone();
    for (k, &(al, be)) in modes.outgoing.iter().enumerate() {
        let n = modes.order(k);
        let (op, os) = outgoing_factors(medium, n);
        for (i, &th) in grid.angles.iter().enumerate() {
            let e = C64::from_polar(1.0, n as f64 * th);
            vp[i] += op * al * e;
            vs[i] += os * be * e;
        }
    }
    (vp, vs)
}

/// Value and Jacobian of `grad psi` and `grad_perp psi` for
/// `psi = C_n(k r) e^{in theta}`.
fn mode_fields(k: f64, n: i32, x: Vec2, c: (C64, C64, C64)) -> [(CVec2, CMat2); 2] {
    let r = x.norm();
    let th = x.y.atan2(x.x);
    let e = C64::from_polar(1.0, n as f64 * th);
    let nf = n as f64;
    let rh = unit(th);
    let thh = perp(rh);
    let psi = c.0 * e;
    let pr = c.1 * k * e;
    let prr = c.2 * k * k * e;
    let pt = I * nf * psi;
    let ptt = -nf * nf * psi;
    let prt = I * nf * pr;
    let grad = crate::elastic::to_c(rh) * pr + crate::elastic::to_c(thh) * (pt / r);
    let rr = crate::elastic::outer(rh, rh).map(|v| C64::new(v, 0.0));
    let tt = crate::elastic::outer(thh, thh).map(|v| C64::new(v, 0.0));
    let rt = (crate::elastic::outer(rh, thh) + crate::elastic::outer(thh, rh)).map(|v| C64::new(v, 0.0));
    let hess = rr * prr + tt * (pr / r + ptt / (r * r)) + rt * (prt / r - pt / (r * r));
    let gp = CVec2::new(-grad.y, grad.x);
    let jp = CMat2::new(-hess[(1, 0)], -hess[(1, 1)], hess[(0, 0)], hess[(0, 1)]);
    [(grad, hess), (gp, jp)]
}

/// Total field (incoming + outgoing) and its Jacobian at `x` (disk at the origin).
pub fn modal_field(medium: &ElasticMedium, modes: &ModalCoefficients, x: Vec2) -> Result<(CVec2, CMat2)> {
    let r = x.norm();
    let nmax = modes.truncation;
    let tp = cylinder_table(nmax, medium.kappa_p * r)?;
    let ts = cylinder_table(nmax, medium.kappa_s * r)?;
    let mut u = CVec2::zeros();
    let mut jac = CMat2::zeros();
    for k in 0..modes.incoming.len() {
        let n = modes.order(k);
        let a = n.unsigned_abs() as usize;
        let (ai, bi) = modes.incoming[k];
        let (ao, bo) = modes.outgoing[k];
        for (coef, tab, kappa, which) in [
            (ai, &tp.j, medium.kappa_p, 0),
            (bi, &ts.j, medium.kappa_s, 1),
            (ao, &tp.h, medium.kappa_p, 0),
            (bo, &ts.h, medium.kappa_s, 1),
        ] {
            if coef == C64::new(0.0, 0.0) {
                continue;
            }
            let f = mode_fields(kappa, n, x, signed_eval(&tab[a], n));
            u += f[which].0 * coef;
            jac += f[which].1 * coef;
        }
    }
    Ok((u, jac))
}

/// Relative traction residual on the disk boundary, `||T u|| / ||T u^i||`.
pub fn boundary_residual(medium: &ElasticMedium, radius: f64, modes: &ModalCoefficients, n_points: usize) -> Result<f64> {
    let incoming_only = ModalCoefficients {
        outgoing: alloc::vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); modes.outgoing.len()],
        ..modes.clone()
    };
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..n_points {
        let nu = unit(crate::TAU * j as f64 / n_points as f64);
        let x = nu * radius;
        let (_, jt) = modal_field(medium, modes, x)?;
        let (_, ji) = modal_field(medium, &incoming_only, x)?;
        num += traction(medium, nu, &jt).norm_squared();
        den += traction(medium, nu, &ji).norm_squared();
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::make_medium;

    #[test]
    fn boundary_condition_holds() {
        let m = make_medium(1.0, 2.0, 2.0).unwrap();
        let nmax = 6;
        let mut incoming = alloc::vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); 2 * nmax + 1];
        incoming[nmax + 3] = (C64::new(0.3, -1.1), C64::new(0.7, 0.4));
        let modes = scatter(&m, 0.5, incoming).unwrap();
        let res = boundary_residual(&m, 0.5, &modes, 64).unwrap();
        assert!(res < 1e-10, "{res}");
    }

    #[test]
    fn incoming_factor_at_order_zero() {
        let m = make_medium(1.0, 2.0, 2.0).unwrap();
        let (a, _) = herglotz_to_incoming(&m, 0, C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let want = -2.0 * PI * I * C64::from_polar(1.0, -PI / 4.0) / (m.kappa_p * m.omega).sqrt();
        assert!((a - want).norm() < 1e-14);
        let (a, b) = herglotz_to_incoming(&m, 3, C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        assert_eq!((a, b), (C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }

    #[test]
    fn leading_eigenvalues_are_homogeneous() {
        let m = make_medium(1.0, 2.0, 2.0).unwrap();
        let (a, _) = small_radius_eigs(&m, 1e-3, 2).unwrap();
        let (b, _) = small_radius_eigs(&m, 0.5e-3, 2).unwrap();
        assert!(((a / b).norm() - 4.0).abs() < 1e-6);
        assert!(small_radius_eigs(&m, 1e-3, 1).is_err());
    }
}
