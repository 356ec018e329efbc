//! Integer-order Bessel and Hankel functions of positive real argument.
//!
//! J_n comes from its power series for small arguments and from normalized
//! Miller backward recurrence otherwise. Y_0 and Y_1 follow from their
//! Neumann series in J_{2k}; higher orders use upward recurrence, which is
//! stable for Y.

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, C64, EULER_GAMMA, I, PI};

/// Arguments below this use power series for both J and Y.
const SERIES_LIMIT: f64 = 2.0;

/// A cylinder function value with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: i32,
    pub argument: f64,
    pub value: C64,
    pub first_derivative: C64,
    pub second_derivative: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    J,
    H1,
}

fn check_arg(z: f64) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::Domain("non-finite Bessel argument"));
    }
    if z < 0.0 {
        return Err(Error::Domain("negative Bessel argument"));
    }
    Ok(())
}

fn parity(n: i32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Builds value/derivatives from C_{n-1}, C_n, C_{n+1}. C'' uses the Bessel ODE.
fn assemble(n: i32, z: f64, prev: C64, cur: C64, next: C64) -> BesselEval {
    let d1 = (prev - next) * 0.5;
    let nf = n as f64;
    let d2 = if z == 0.0 {
        // C'' at the origin from the series: J_0'' = -1/2, J_{+-2}'' = 1/4, else 0
        match n.abs() {
            0 => C64::new(-0.5, 0.0),
            2 => C64::new(0.25, 0.0),
            _ => C64::new(0.0, 0.0),
        }
    } else {
        -d1 / z - cur * (1.0 - nf * nf / (z * z))
    };
    BesselEval { order: n, argument: z, value: cur, first_derivative: d1, second_derivative: d2 }
}

/// `J_0..=J_nmax` at `x`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < SERIES_LIMIT {
        let h = 0.5 * x;
        let q = -h * h;
        // lead = (x/2)^n / n!, may underflow harmlessly at high order
        let mut lead = 1.0;
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= h / n as f64;
            }
            if lead == 0.0 {
                break;
            }
            let mut term = lead;
            let mut sum = lead;
            let mut k = 1.0;
            loop {
                term *= q / (k * (n as f64 + k));
                sum += term;
                if term.abs() <= 1e-17 * sum.abs() {
                    break;
                }
                k += 1.0;
            }
            *slot = sum;
        }
        return out;
    }
    miller(nmax, x, &mut out);
    out
}

fn miller(nmax: usize, x: f64, out: &mut [f64]) {
    let top = (nmax as f64).max(x);
    let mut m = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    m += m % 2;
    let (mut jp, mut j) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let inv = 2.0 / x;
    let mut k = m;
    while k > 0 {
        let jm = k as f64 * inv * j - jp;
        jp = j;
        j = jm;
        k -= 1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
        if k <= nmax {
            out[k] = j;
        }
        if k.is_multiple_of(2) && k > 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    for v in out.iter_mut() {
        *v /= norm;
    }
}

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Y_0 and Y_1 at `x > 0`.
fn y01(x: f64) -> (f64, f64) {
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    if x < SERIES_LIMIT {
        let q = -0.25 * x * x;
        let (mut j0, mut s0) = (0.0, 0.0);
        let mut t = 1.0; // q^k/(k!)^2
        let mut hk = 0.0;
        for k in 0..40 {
            if k > 0 {
                t *= q / ((k * k) as f64);
                hk += 1.0 / k as f64;
            }
            j0 += t;
            s0 += hk * t;
        }
        let y0 = 2.0 / PI * (lg * j0 - s0);
        // Y_1 = -2/(pi x) + (2/pi) ln(x/2) J_1 - (x/2)/pi sum (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
        let (mut j1, mut s1) = (0.0, 0.0);
        let mut t = 1.0; // q^k/(k!(k+1)!)
        for k in 0..40usize {
            if k > 0 {
                t *= q / ((k * (k + 1)) as f64);
            }
            j1 += t;
            let psi = harmonic(k) + harmonic(k + 1) - 2.0 * EULER_GAMMA;
            s1 += psi * t;
        }
        j1 *= 0.5 * x;
        let y1 = -2.0 / (PI * x) + 2.0 / PI * (0.5 * x).ln() * j1 - 0.5 * x / PI * s1;
        return (y0, y1);
    }
    let kmax = ((x + 40.0 + 8.0 * x.sqrt()) / 2.0) as usize + 2;
    let j = bessel_j_seq(2 * kmax + 1, x);
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in 1..=kmax {
        let sg = parity(k as i32);
        s0 += sg * j[2 * k] / k as f64;
        s1 += sg * (j[2 * k - 1] - j[2 * k + 1]) / (2 * k) as f64;
    }
    let y0 = 2.0 / PI * lg * j[0] - 4.0 / PI * s0;
    let y1 = -2.0 / PI * (j[0] / x - lg * j[1]) + 4.0 / PI * s1;
    (y0, y1)
}

/// `Y_0..=Y_nmax` at `x > 0`.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Vec<f64> {
    let (y0, y1) = y01(x);
    let mut out = vec![0.0; nmax + 1];
    out[0] = y0;
    if nmax >= 1 {
        out[1] = y1;
    }
    for n in 1..nmax {
        out[n + 1] = 2.0 * n as f64 / x * out[n] - out[n - 1];
        if !out[n + 1].is_finite() {
            out[n + 1] = f64::NEG_INFINITY;
        }
    }
    out
}

/// `H^(1)_0..=H^(1)_nmax` at `x > 0`.
pub fn hankel1_seq(nmax: usize, x: f64) -> Vec<C64> {
    let j = bessel_j_seq(nmax, x);
    let y = bessel_y_seq(nmax, x);
    j.iter().zip(&y).map(|(&a, &b)| C64::new(a, b)).collect()
}

/// Looks up C_m for any integer m in a table of nonnegative orders.
fn signed(table: &[C64], m: i32) -> C64 {
    let v = table[m.unsigned_abs() as usize];
    if m < 0 {
        v * parity(m)
    } else {
        v
    }
}

fn eval_from_table(n: i32, z: f64, table: &[C64]) -> BesselEval {
    assemble(n, z, signed(table, n - 1), signed(table, n), signed(table, n + 1))
}

/// J_n(z) with two derivatives.
pub fn bessel_j(n: i32, z: f64) -> Result<BesselEval> {
    check_arg(z)?;
    let m = n.unsigned_abs() as usize + 1;
    let t: Vec<C64> = bessel_j_seq(m, z).into_iter().map(|v| C64::new(v, 0.0)).collect();
    Ok(eval_from_table(n, z, &t))
}

/// Y_n(z) with two derivatives.
pub fn bessel_y(n: i32, z: f64) -> Result<BesselEval> {
    check_arg(z)?;
    if z == 0.0 {
        return Err(Error::Domain("Y_n is singular at the origin"));
    }
    let m = n.unsigned_abs() as usize + 1;
    let t: Vec<C64> = bessel_y_seq(m, z).into_iter().map(|v| C64::new(v, 0.0)).collect();
    Ok(eval_from_table(n, z, &t))
}

/// H^(1)_n(z) with two derivatives.
pub fn hankel1(n: i32, z: f64) -> Result<BesselEval> {
    check_arg(z)?;
    if z == 0.0 {
        return Err(Error::Domain("Hankel functions are singular at the origin"));
    }
    let m = n.unsigned_abs() as usize + 1;
    Ok(eval_from_table(n, z, &hankel1_seq(m, z)))
}

/// Values and first/second derivatives of J_n and H_n for n = 0..=nmax, as
/// needed by modal solvers. Index by order.
pub struct CylinderTable {
    pub j: Vec<BesselEval>,
    pub h: Vec<BesselEval>,
}

pub fn cylinder_table(nmax: usize, z: f64) -> Result<CylinderTable> {
    check_arg(z)?;
    if z == 0.0 {
        return Err(Error::Domain("Hankel functions are singular at the origin"));
    }
    let jt: Vec<C64> = bessel_j_seq(nmax + 1, z).into_iter().map(|v| C64::new(v, 0.0)).collect();
    let ht = hankel1_seq(nmax + 1, z);
    let j = (0..=nmax as i32).map(|n| eval_from_table(n, z, &jt)).collect();
    let h = (0..=nmax as i32).map(|n| eval_from_table(n, z, &ht)).collect();
    Ok(CylinderTable { j, h })
}

fn gamma_int(n: u32) -> f64 {
    (1..n).map(|k| k as f64).product()
}

/// Two-term small-argument forms
/// J_n(z) ~ (z^n - z^{n+2}/(4n+4)) / (2^n n!) and
/// H_n(z) ~ -i 2^n (n-1)!/pi (z^{-n} + z^{2-n}/(4n-4)).
/// The Hankel form needs n >= 2.
pub fn small_z_series(n: i32, z: f64, kind: SeriesKind) -> Result<C64> {
    if n < 0 {
        return Err(Error::Parameter("negative order; map through parity first"));
    }
    check_arg(z)?;
    let nu = n as u32;
    let two_n = 2f64.powi(n);
    match kind {
        SeriesKind::J => {
            let v = (z.powi(n) - z.powi(n + 2) / (4.0 * n as f64 + 4.0)) / (two_n * gamma_int(nu + 1));
            Ok(C64::new(v, 0.0))
        }
        SeriesKind::H1 => {
            if n < 2 {
                return Err(Error::Parameter("Hankel small-argument form needs order >= 2"));
            }
            if z == 0.0 {
                return Err(Error::Domain("Hankel functions are singular at the origin"));
            }
            let v = z.powi(-n) + z.powi(2 - n) / (4.0 * n as f64 - 4.0);
            Ok(-I * (two_n * gamma_int(nu) / PI * v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // (n, x, J_n(x), Y_n(x)) from a 30-digit arbitrary-precision evaluation
    #[allow(clippy::excessive_precision)]
    const REF: &[(i32, f64, f64, f64)] = &[
        (0, 0.5, 0.938_469_807_240_812_9, -0.444_518_733_506_706_56),
        (1, 3.0, 0.339_058_958_525_936_46, 0.324_674_424_791_799_98),
        (0, 25.0, 0.096_266_783_275_958_12, -0.127_249_432_268_006_14),
        (5, 0.7, 4.288_240_705_888_548e-5, -1_499.998_317_251_486_3),
        (2, 1.7, 0.281_738_942_352_741_34, -0.786_999_053_198_185_7),
        (7, 30.0, 0.145_185_189_572_328_27, 0.027_202_118_395_205_592),
        (12, 4.0, 6.264_461_794_312_207e-6, -4_493.779_939_702_275),
        (1, 300.0, -0.031_887_431_377_499_95, 0.033_245_548_121_310_216),
        (0, 1.999, 0.224_467_536_118_083_2, 0.510_268_358_238_654_5),
        (1, 2.001, 0.576_660_135_992_954_2, -0.106_468_640_514_066_98),
    ];

    #[test]
    fn matches_reference_values() {
        for &(n, x, j, y) in REF {
            let bj = bessel_j(n, x).unwrap().value.re;
            let by = bessel_y(n, x).unwrap().value.re;
            assert!(((bj - j) / j).abs() < 1e-12, "J_{n}({x}) = {bj}, want {j}");
            assert!(((by - y) / y).abs() < 1e-12, "Y_{n}({x}) = {by}, want {y}");
        }
    }

    #[test]
    fn origin_values() {
        let b = bessel_j(0, 0.0).unwrap();
        assert_eq!(b.value, C64::new(1.0, 0.0));
        assert_eq!(b.first_derivative, C64::new(0.0, 0.0));
        assert_eq!(bessel_j(3, 0.0).unwrap().value, C64::new(0.0, 0.0));
    }

    #[test]
    fn small_argument_j3() {
        let z = 0.01;
        // four terms of the power series
        let mut s = 0.0;
        let mut t = (z / 2.0).powi(3) / 6.0;
        for k in 0..4 {
            if k > 0 {
                t *= -(z * z / 4.0) / (k as f64 * (3 + k) as f64);
            }
            s += t;
        }
        let v = bessel_j(3, z).unwrap().value.re;
        assert!(((v - s) / s).abs() < 1e-8);
    }

    #[test]
    fn integral_representation() {
        // J_n(z) = (-i)^n / pi * int_0^pi exp(i z cos t) cos(n t) dt
        let (n, z) = (2, 1.7);
        let m = 2000;
        let h = PI / m as f64;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..=m {
            let t = k as f64 * h;
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            acc += (I * z * t.cos()).exp() * (n as f64 * t).cos() * w;
        }
        let q = (-I).powi(n) * acc * h / PI;
        assert!(rel(bessel_j(n, z).unwrap().value, q) < 1e-9);
    }

    #[test]
    fn hankel_near_origin() {
        let z = 1e-4;
        let want = C64::new(1.0, 0.0) + I * (2.0 / PI) * ((z / 2.0).ln() + EULER_GAMMA);
        assert!(rel(hankel1(0, z).unwrap().value, want) < 1e-4);
    }

    #[test]
    fn wronskian_at_ten() {
        let j = bessel_j(1, 10.0).unwrap();
        let y = bessel_y(1, 10.0).unwrap();
        let w = j.value * y.first_derivative - j.first_derivative * y.value;
        let want = 2.0 / (10.0 * PI);
        assert!((w.re - want).abs() / want < 1e-12);
    }

    #[test]
    fn hankel_leading_term_dominates() {
        let z = 0.005;
        let h = hankel1(5, z).unwrap().value;
        let lead = -I * (32.0 * 24.0 / PI) * z.powi(-5);
        assert!(rel(h, lead) < 1e-4);
    }

    #[test]
    fn two_term_small_forms() {
        assert_eq!(small_z_series(0, 0.0, SeriesKind::J).unwrap(), C64::new(1.0, 0.0));
        let j = small_z_series(2, 0.1, SeriesKind::J).unwrap();
        let want = (0.01 - 1e-4 / 12.0) / (4.0 * 2.0);
        assert!((j.re - want).abs() < 1e-18);
        let h = small_z_series(2, 0.1, SeriesKind::H1).unwrap();
        let want = -I * (4.0 / PI) * (100.0 + 0.25);
        assert!(rel(h, want) < 1e-15);
        assert!(small_z_series(-1, 0.1, SeriesKind::J).is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(hankel1(0, 0.0).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(0, f64::INFINITY).is_err());
    }

    #[test]
    fn hankel_is_j_plus_iy() {
        for &(n, z) in &[(0, 0.3), (3, 2.5), (-4, 17.0), (9, 40.0)] {
            let h = hankel1(n, z).unwrap();
            let j = bessel_j(n, z).unwrap();
            let y = bessel_y(n, z).unwrap();
            assert!(rel(h.value, j.value + I * y.value) < 1e-12);
            assert!(rel(h.first_derivative, j.first_derivative + I * y.first_derivative) < 1e-12);
        }
    }
}
