//! Radial profiles of the elastodynamic Green tensor and of its traction.
//!
//! With `g = H0(ks r) - H0(kp r)` the Green tensor is `A I + B rhat rhat^T`,
//! `A = i/(4 mu) H0(ks r) + i/(4 w^2) g'/r`, `B = i/(4 w^2)(g'' - g'/r)`.
//! Its traction at `x` with normal `nu` (column `j` for source direction
//! `e_j`) is
//! `f1 nu rhat^T + f2 (rhat nu^T + c I) + f3 c rhat rhat^T`, `c = rhat . nu`,
//! `f1 = lambda(A' + B' + B/r) + 2 mu B/r`, `f2 = mu(A' + B/r)`,
//! `f3 = 2 mu B' - 4 mu B/r`.
//!
//! Each `f_i` splits as `f0_i / r + alpha_i(r) ln r + beta_i(r)` with `f0_i`
//! the Kelvin (static) coefficient and `alpha_i, beta_i` smooth odd series
//! vanishing at the origin. `alpha_i` equals `2i/pi` times `f_i` with every
//! Hankel function replaced by J. For small `ks r` the split is computed
//! from the power series of H0 so the poles cancel exactly; beyond that the
//! Bessel functions are evaluated directly.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::elastic::{outer, ElasticMedium};
use crate::special::{bessel_j_seq, bessel_y_seq};
use crate::{CMat2, Error, Result, Vec2, C64, EULER_GAMMA, I, PI};

/// `ks r` below this uses the series representation.
const SERIES_RADIUS: f64 = 1.5;
const TERMS: usize = 30;

/// `sum_p r^p (u_p + v_p ln r)` for `p` from `lo` upward.
#[derive(Debug, Clone)]
struct LogSeries {
    lo: i32,
    u: Vec<C64>,
    v: Vec<C64>,
}

impl LogSeries {
    fn zero(lo: i32, len: usize) -> Self {
        Self { lo, u: vec![C64::new(0.0, 0.0); len], v: vec![C64::new(0.0, 0.0); len] }
    }

    fn hankel0(kappa: f64) -> Self {
        // H0(k r) = sum_k c_k r^{2k} [1 + (2i/pi)(ln(k/2) + gamma - H_k) + (2i/pi) ln r]
        let mut s = Self::zero(0, 2 * TERMS + 1);
        let lg = (kappa / 2.0).ln() + EULER_GAMMA;
        let mut c = 1.0;
        let mut hk = 0.0;
        for k in 0..=TERMS {
            if k > 0 {
                c *= -(kappa * kappa / 4.0) / ((k * k) as f64);
                hk += 1.0 / k as f64;
            }
            s.u[2 * k] = c * (C64::new(1.0, 0.0) + I * (2.0 / PI) * (lg - hk));
            s.v[2 * k] = I * (2.0 / PI) * c;
        }
        s
    }

    fn hi(&self) -> i32 {
        self.lo + self.u.len() as i32
    }

    fn get(&self, p: i32) -> (C64, C64) {
        if p < self.lo || p >= self.hi() {
            return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        }
        let i = (p - self.lo) as usize;
        (self.u[i], self.v[i])
    }

    fn deriv(&self) -> Self {
        let mut out = Self::zero(self.lo - 1, self.u.len());
        for i in 0..self.u.len() {
            let p = (self.lo + i as i32) as f64;
            out.u[i] = self.u[i] * p + self.v[i];
            out.v[i] = self.v[i] * p;
        }
        out
    }

    fn div_r(&self) -> Self {
        Self { lo: self.lo - 1, u: self.u.clone(), v: self.v.clone() }
    }

    fn combine(terms: &[(C64, &LogSeries)]) -> Self {
        let lo = terms.iter().map(|t| t.1.lo).min().unwrap_or(0);
        let hi = terms.iter().map(|t| t.1.hi()).max().unwrap_or(0);
        let mut out = Self::zero(lo, (hi - lo) as usize);
        for p in lo..hi {
            let i = (p - lo) as usize;
            for (c, s) in terms {
                let (u, v) = s.get(p);
                out.u[i] += c * u;
                out.v[i] += c * v;
            }
        }
        out
    }

    fn eval(&self, r: f64) -> C64 {
        let lr = r.ln();
        let mut acc = C64::new(0.0, 0.0);
        let mut rp = r.powi(self.lo);
        for i in 0..self.u.len() {
            acc += (self.u[i] + self.v[i] * lr) * rp;
            rp *= r;
        }
        acc
    }

    /// Log and smooth parts over nonnegative powers only.
    fn eval_split_nonneg(&self, r: f64) -> (C64, C64) {
        let (mut a, mut b) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let mut rp = 1.0;
        for p in 0..self.hi() {
            let (u, v) = self.get(p);
            a += v * rp;
            b += u * rp;
            rp *= r;
        }
        (a, b)
    }
}

/// Green-tensor profile and its first derivative in `r`.
#[derive(Debug, Clone, Copy)]
pub struct GreenProfile {
    pub a: C64,
    pub b: C64,
    pub da: C64,
    pub db: C64,
}

/// `f_i = f0_i / r + log_i ln r + smooth_i`.
#[derive(Debug, Clone, Copy)]
pub struct TractionSplit {
    pub log: [C64; 3],
    pub smooth: [C64; 3],
}

/// Precomputed radial kernels for one medium.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    medium: ElasticMedium,
    a: LogSeries,
    b: LogSeries,
    f: [LogSeries; 3],
    static_f: [f64; 3],
}

fn h01(kappa: f64, r: f64, hankel: bool) -> (C64, C64) {
    let z = kappa * r;
    let j = bessel_j_seq(1, z);
    if hankel {
        let y = bessel_y_seq(1, z);
        (C64::new(j[0], y[0]), C64::new(j[1], y[1]))
    } else {
        (C64::new(j[0], 0.0), C64::new(j[1], 0.0))
    }
}

impl RadialKernel {
    pub fn new(medium: &ElasticMedium) -> Self {
        let (l, m, w2) = (medium.lambda, medium.mu, medium.omega * medium.omega);
        let hs = LogSeries::hankel0(medium.kappa_s);
        let hp = LogSeries::hankel0(medium.kappa_p);
        let one = C64::new(1.0, 0.0);
        let g = LogSeries::combine(&[(one, &hs), (-one, &hp)]);
        let g1 = g.deriv();
        let g2 = g1.deriv();
        let g3 = g2.deriv();
        let hs1 = hs.deriv();
        let cs = I / (4.0 * m);
        let cg = I / (4.0 * w2);
        let a = LogSeries::combine(&[(cs, &hs), (cg, &g1.div_r())]);
        let da = LogSeries::combine(&[(cs, &hs1), (cg, &g2.div_r()), (-cg, &g1.div_r().div_r())]);
        let b = LogSeries::combine(&[(cg, &g2), (-cg, &g1.div_r())]);
        let db = LogSeries::combine(&[(cg, &g3), (-cg, &g2.div_r()), (cg, &g1.div_r().div_r())]);
        let br = b.div_r();
        let c = |x: f64| C64::new(x, 0.0);
        let f1 = LogSeries::combine(&[(c(l), &da), (c(l), &db), (c(l + 2.0 * m), &br)]);
        let f2 = LogSeries::combine(&[(c(m), &da), (c(m), &br)]);
        let f3 = LogSeries::combine(&[(c(2.0 * m), &db), (c(-4.0 * m), &br)]);
        let q = -m / (2.0 * PI * (l + 2.0 * m));
        let bk = (l + m) / (4.0 * PI * m * (l + 2.0 * m));
        let static_f = [-q, q, -4.0 * m * bk];
        Self { medium: *medium, a, b, f: [f1, f2, f3], static_f }
    }

    pub fn medium(&self) -> &ElasticMedium {
        &self.medium
    }

    /// Kelvin coefficients `r f_i` of the static traction kernel.
    pub fn static_coefficients(&self) -> [f64; 3] {
        self.static_f
    }

    /// Largest deviation of the series pole terms from the Kelvin values.
    /// Exact cancellation makes this round-off sized.
    pub fn pole_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, s) in self.f.iter().enumerate() {
            for p in s.lo..0 {
                let (u, v) = s.get(p);
                let want = if p == -1 { self.static_f[i] } else { 0.0 };
                worst = worst.max((u - want).norm()).max(v.norm());
            }
        }
        worst
    }

    fn series_ok(&self, r: f64) -> bool {
        self.medium.kappa_s * r < SERIES_RADIUS
    }

    fn direct(&self, r: f64, hankel: bool) -> GreenProfile {
        let med = &self.medium;
        let (ks, kp) = (med.kappa_s, med.kappa_p);
        let (s0, s1) = h01(ks, r, hankel);
        let (p0, p1) = h01(kp, r, hankel);
        let (zs, zp) = (ks * r, kp * r);
        let hs1 = -s1 * ks;
        let g1 = -s1 * ks + p1 * kp;
        let g2 = (-s0 + s1 / zs) * (ks * ks) - (-p0 + p1 / zp) * (kp * kp);
        let g3 = (s1 + s0 / zs - s1 * (2.0 / (zs * zs))) * ks.powi(3)
            - (p1 + p0 / zp - p1 * (2.0 / (zp * zp))) * kp.powi(3);
        let cs = I / (4.0 * med.mu);
        let cg = I / (4.0 * med.omega * med.omega);
        GreenProfile {
            a: cs * s0 + cg * g1 / r,
            b: cg * (g2 - g1 / r),
            da: cs * hs1 + cg * (g2 / r - g1 / (r * r)),
            db: cg * (g3 - g2 / r + g1 / (r * r)),
        }
    }

    fn f_from_profile(&self, p: &GreenProfile, r: f64) -> [C64; 3] {
        let (l, m) = (self.medium.lambda, self.medium.mu);
        let br = p.b / r;
        [(p.da + p.db + br) * l + br * (2.0 * m), (p.da + br) * m, p.db * (2.0 * m) - br * (4.0 * m)]
    }

    pub fn profile(&self, r: f64) -> GreenProfile {
        if self.series_ok(r) {
            GreenProfile { a: self.a.eval(r), b: self.b.eval(r), da: C64::new(0.0, 0.0), db: C64::new(0.0, 0.0) }
        } else {
            self.direct(r, true)
        }
    }

    pub fn green_tensor(&self, x: Vec2, y: Vec2) -> Result<CMat2> {
        let d = x - y;
        let r = d.norm();
        if r == 0.0 {
            return Err(Error::Singular);
        }
        let p = self.profile(r);
        let rh = d / r;
        Ok(CMat2::identity() * p.a + outer(rh, rh).map(|v| p.b * v))
    }

    /// Full coefficients `f_i(r)`.
    pub fn traction_coefficients(&self, r: f64) -> [C64; 3] {
        if self.series_ok(r) {
            let s = self.traction_split(r);
            let lr = r.ln();
            core::array::from_fn(|i| s.log[i] * lr + s.smooth[i] + self.static_f[i] / r)
        } else {
            self.f_from_profile(&self.direct(r, true), r)
        }
    }

    pub fn traction_split(&self, r: f64) -> TractionSplit {
        if self.series_ok(r) {
            let mut log = [C64::new(0.0, 0.0); 3];
            let mut smooth = [C64::new(0.0, 0.0); 3];
            for i in 0..3 {
                let (a, b) = self.f[i].eval_split_nonneg(r);
                log[i] = a;
                smooth[i] = b;
            }
            TractionSplit { log, smooth }
        } else {
            let full = self.f_from_profile(&self.direct(r, true), r);
            let fj = self.f_from_profile(&self.direct(r, false), r);
            let lr = r.ln();
            let log: [C64; 3] = core::array::from_fn(|i| fj[i] * (2.0 * I / PI));
            let smooth = core::array::from_fn(|i| full[i] - self.static_f[i] / r - log[i] * lr);
            TractionSplit { log, smooth }
        }
    }
}

/// Traction tensor `f1 nu rhat^T + f2 (rhat nu^T + c I) + f3 c rhat rhat^T`.
pub fn traction_tensor(f: &[C64; 3], rhat: Vec2, normal: Vec2) -> CMat2 {
    let c = rhat.dot(&normal);
    let t1 = outer(normal, rhat);
    let t2 = outer(rhat, normal) + nalgebra::Matrix2::identity() * c;
    let t3 = outer(rhat, rhat) * c;
    t1.map(|v| f[0] * v) + t2.map(|v| f[1] * v) + t3.map(|v| f[2] * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::make_medium;

    #[test]
    fn poles_cancel_to_kelvin() {
        let k = RadialKernel::new(&make_medium(1.0, 2.0, 2.0).unwrap());
        assert!(k.pole_defect() < 1e-12, "{}", k.pole_defect());
    }

    #[test]
    fn series_and_direct_agree_at_the_switch() {
        let m = make_medium(1.0, 2.0, 2.0).unwrap();
        let k = RadialKernel::new(&m);
        for &r in &[0.3, 0.7, 1.0] {
            let s = GreenProfile { a: k.a.eval(r), b: k.b.eval(r), ..k.direct(r, true) };
            let d = k.direct(r, true);
            assert!((s.a - d.a).norm() < 1e-12 * d.a.norm());
            assert!((s.b - d.b).norm() < 1e-12 * d.b.norm());
            let sp = k.traction_split(r);
            let lr = r.ln();
            let fd = k.f_from_profile(&d, r);
            let fj = k.f_from_profile(&k.direct(r, false), r);
            for i in 0..3 {
                let fs = sp.log[i] * lr + sp.smooth[i] + k.static_f[i] / r;
                assert!((fs - fd[i]).norm() < 1e-10 * fd[i].norm(), "f{i} r={r}");
                assert!((sp.log[i] - fj[i] * (2.0 * I / PI)).norm() < 1e-12);
            }
        }
    }
}
