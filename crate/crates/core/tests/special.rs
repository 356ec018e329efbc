use dort_core::special::*;
use dort_core::C64;
use proptest::prelude::*;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn three_term_recurrence(n in -10i32..=10, zi in 0usize..3) {
        let z = [0.1, 1.0, 10.0][zi];
        let nf = n as f64;
        let j = |k| C64::new(bessel_j(k, z).unwrap().value.re, 0.0);
        let lhs = j(n - 1) + j(n + 1);
        let rhs = j(n) * (2.0 * nf / z);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(rhs.norm()).max(j(n).norm()));
        let h = |k| hankel1(k, z).unwrap().value;
        let lhs = h(n - 1) + h(n + 1);
        let rhs = h(n) * (2.0 * nf / z);
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn second_derivative_solves_the_ode(n in 0i32..10, z in 0.01f64..50.0) {
        for e in [bessel_j(n, z).unwrap(), hankel1(n, z).unwrap()] {
            let terms = [e.second_derivative * z * z, e.first_derivative * z, e.value * (z * z - (n * n) as f64)];
            let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
            let res = terms[0] + terms[1] + terms[2];
            prop_assert!(res.norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn parity(n in 0i32..=12, z in 0.05f64..30.0) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let (jp, jm) = (bessel_j(n, z).unwrap().value, bessel_j(-n, z).unwrap().value);
        prop_assert!((jm - jp * sign).norm() <= 1e-14 * jp.norm().max(1e-300));
        let (hp, hm) = (hankel1(n, z).unwrap().value, hankel1(-n, z).unwrap().value);
        prop_assert!(rel(hm, hp * sign) < 1e-14);
    }

    #[test]
    fn two_term_series_error_is_next_term(n in 0i32..=8, z in 1e-3f64..0.1) {
        let exact = bessel_j(n, z).unwrap().value;
        let approx = small_z_series(n, z, SeriesKind::J).unwrap();
        // first omitted term of the power series, relative to the leading one
        let next = z.powi(4) / (32.0 * ((n + 1) * (n + 2)) as f64);
        prop_assert!(rel(approx, exact) <= 1.01 * next + 1e-14);
        prop_assert!(rel(approx, exact) <= z.powi(4) / 2f64.powi(n));
    }

    #[test]
    fn hankel_splits_into_j_and_y(n in -10i32..=10, z in 0.01f64..50.0) {
        let h = hankel1(n, z).unwrap().value;
        let j = bessel_j(n, z).unwrap().value;
        let y = bessel_y(n, z).unwrap().value;
        prop_assert!(rel(h, j + C64::new(0.0, 1.0) * y) < 1e-12);
    }

    #[test]
    fn sequences_agree_with_scalar_calls(x in 0.01f64..40.0) {
        let js = bessel_j_seq(12, x);
        let hs = hankel1_seq(12, x);
        for n in 0..=12 {
            let jn = bessel_j(n as i32, x).unwrap().value.re;
            prop_assert!((js[n] - jn).abs() <= 1e-14 * jn.abs().max(1e-300) + 1e-16);
            prop_assert!(rel(hs[n], hankel1(n as i32, x).unwrap().value) < 1e-15);
        }
    }
}

#[test]
fn y_wronskian_over_a_range() {
    for &z in &[0.01, 0.3, 1.9, 2.1, 7.5, 33.0] {
        for n in 0..6 {
            let j = bessel_j(n, z).unwrap();
            let y = bessel_y(n, z).unwrap();
            let w = j.value * y.first_derivative - j.first_derivative * y.value;
            let want = 2.0 / (std::f64::consts::PI * z);
            assert!((w.re - want).abs() < 1e-11 * want, "n={n} z={z}");
        }
    }
}
