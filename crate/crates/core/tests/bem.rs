use dort_core::bem::{far_field, polarization_tensor, solve_density, BemSystem};
use dort_core::boundary::{RadialShape, SmoothBoundary};
use dort_core::elastic::{make_medium, DirectionGrid, ElasticMedium, IncidentPlaneWave, Mode};
use dort_core::mie::{modal_far_field, plane_wave_coefficients, scatter, truncation};
use dort_core::{CVec2, Vec2, C64};
use nalgebra::Matrix2;
use proptest::prelude::*;

fn medium() -> ElasticMedium {
    make_medium(1.0, 2.0, 2.0).unwrap()
}

fn rel(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn mie_far(m: &ElasticMedium, radius: f64, mode: Mode, phi: f64, grid: &DirectionGrid) -> (Vec<C64>, Vec<C64>) {
    let nmax = truncation(m, radius) as i32;
    let inc = (-nmax..=nmax).map(|n| plane_wave_coefficients(m, mode, phi, n)).collect();
    modal_far_field(m, &scatter(m, radius, inc).unwrap(), grid)
}

fn bem_far(m: &ElasticMedium, b: &SmoothBoundary, mode: Mode, phi: f64, grid: &DirectionGrid) -> (Vec<C64>, Vec<C64>) {
    let sys = BemSystem::new(m, vec![b.clone()]).unwrap();
    let wave = IncidentPlaneWave::new(Vec2::new(phi.cos(), phi.sin()), mode, C64::new(1.0, 0.0)).unwrap();
    let phi = solve_density(m, b, &sys.plane_wave_traction(&wave)).unwrap();
    far_field(m, b, &phi, grid)
}

#[test]
fn unit_disk_matches_mie() {
    let m = medium();
    let grid = DirectionGrid::uniform(36).unwrap();
    let b = SmoothBoundary::disk(Vec2::zeros(), 1.0, 256).unwrap();
    for (mode, phi) in [(Mode::Compressional, 0.3), (Mode::Shear, 2.0)] {
        let (mp, ms) = mie_far(&m, 1.0, mode, phi, &grid);
        let (bp, bs) = bem_far(&m, &b, mode, phi, &grid);
        let e = rel(&[bp, bs].concat(), &[mp, ms].concat());
        println!("{mode:?} rel {e:e}");
        assert!(e < 1e-6, "{mode:?}: {e}");
    }
}

fn unit_scale_p(m: &ElasticMedium, shape: RadialShape, n: usize) -> Matrix2<f64> {
    let b = SmoothBoundary::new(shape, Vec2::zeros(), 1.0, n).unwrap();
    polarization_tensor(m, &b).unwrap().matrix
}

#[test]
fn disk_polarization_regression() {
    let m = medium();
    let p = unit_scale_p(&m, RadialShape::disk(), 512);
    let want = -5.0 * std::f64::consts::PI / 4.0;
    assert!((p - Matrix2::identity() * want).norm() < 1e-10 * want.abs(), "{p}");
    assert!((want + 3.9269908169872).abs() < 1e-12);
}

#[test]
fn peanuthull_polarization_regression() {
    let m = medium();
    let p = unit_scale_p(&m, RadialShape::peanuthull(), 256);
    let want = Matrix2::new(-23.47744, 9.01157, 9.01157, -23.47744);
    assert!((p - want).norm() < 1e-4, "{p}");
}

/// Radial coefficients of the shape rotated by `theta`; entry `k` is frequency `k + 1`.
fn rotated(shape: &RadialShape, theta: f64) -> RadialShape {
    let mut cos = shape.cos.clone();
    let mut sin = shape.sin.clone();
    for k in 0..cos.len().max(sin.len()) {
        let (a, b) = (shape.cos.get(k).copied().unwrap_or(0.0), shape.sin.get(k).copied().unwrap_or(0.0));
        let f = (k + 1) as f64;
        let (c, s) = ((f * theta).cos(), (f * theta).sin());
        if k >= cos.len() {
            cos.push(0.0);
        }
        if k >= sin.len() {
            sin.push(0.0);
        }
        cos[k] = a * c - b * s;
        sin[k] = a * s + b * c;
    }
    RadialShape::fourier(shape.a0, cos, sin).unwrap()
}

#[test]
fn polarization_rotates_and_scales() {
    let m = medium();
    let base = RadialShape::fourier(2.0, vec![0.0, 0.3, 0.0, 0.1], vec![0.0, 0.0, 0.4]).unwrap();
    let p = unit_scale_p(&m, base.clone(), 256);
    for theta in [0.4, 1.3, 2.9] {
        let q = nalgebra::Rotation2::new(theta).into_inner();
        let pr = unit_scale_p(&m, rotated(&base, theta), 256);
        let want = q * p * q.transpose();
        assert!((pr - want).norm() < 1e-8 * p.norm(), "theta={theta}");
    }
    let doubled = RadialShape::fourier(4.0, vec![0.0, 0.6, 0.0, 0.2], vec![0.0, 0.0, 0.8]).unwrap();
    let p2 = unit_scale_p(&m, doubled, 256);
    assert!((p2 - p * 4.0).norm() < 1e-8 * p2.norm());
}

#[test]
fn peanuthull_self_convergence() {
    let m = medium();
    let grid = DirectionGrid::uniform(36).unwrap();
    let far = |n| {
        let b = SmoothBoundary::new(RadialShape::peanuthull(), Vec2::zeros(), 0.5, n).unwrap();
        let (p, s) = bem_far(&m, &b, Mode::Shear, 0.7, &grid);
        [p, s].concat()
    };
    let reference = far(512);
    let (e32, e64, e128, e256) = (rel(&far(32), &reference), rel(&far(64), &reference), rel(&far(128), &reference), rel(&far(256), &reference));
    assert!(rel(&far(128), &far(256)) < 1e-6);
    // super-algebraic: one doubling gains three digits before the floor
    assert!(e64 < 1e-3 * e32, "{e32:e} {e64:e}");
    assert!(e128 < 1e-8 && e256 < 1e-10, "{e128:e} {e256:e}");
}

#[test]
fn zero_incidence_gives_zero_density() {
    let m = medium();
    let b = SmoothBoundary::new(RadialShape::peanuthull(), Vec2::new(1.0, 2.0), 0.3, 64).unwrap();
    let phi = solve_density(&m, &b, &vec![CVec2::zeros(); 64]).unwrap();
    assert!(phi.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn translation_multiplies_by_phase() {
    let m = medium();
    let grid = DirectionGrid::uniform(72).unwrap();
    let s = Vec2::new(5.0, 0.0);
    let d = Vec2::new(0.8, -0.6);
    let phi = d.y.atan2(d.x);
    for mode in Mode::BOTH {
        let origin = bem_far(&m, &SmoothBoundary::disk(Vec2::zeros(), 0.002, 64).unwrap(), mode, phi, &grid);
        let moved = bem_far(&m, &SmoothBoundary::disk(s, 0.002, 64).unwrap(), mode, phi, &grid);
        let kin = m.kappa(mode);
        let mut want = Vec::new();
        for (ch, k) in [(&origin.0, m.kappa_p), (&origin.1, m.kappa_s)] {
            for (i, x) in grid.directions().enumerate() {
                want.push(ch[i] * C64::from_polar(1.0, kin * d.dot(&s) - k * x.dot(&s)));
            }
        }
        assert!(rel(&[moved.0, moved.1].concat(), &want) < 1e-8);
    }
}

#[test]
fn boundary_integral_matches_gauss_identity() {
    // half the density integral over the unit-scale curve equals
    // -rho omega^2 d |Sigma| e^{i kp z.d} / 2 to leading order
    let m = medium();
    let z = Vec2::new(0.3, -0.4);
    let d = Vec2::new(0.6, 0.8);
    let rho = 1e-3;
    for shape in [RadialShape::disk(), RadialShape::peanuthull()] {
        let b = SmoothBoundary::new(shape.clone(), z, rho, 128).unwrap();
        let sys = BemSystem::new(&m, vec![b.clone()]).unwrap();
        let w = IncidentPlaneWave::new(d, Mode::Compressional, C64::new(1.0, 0.0)).unwrap();
        let phi = solve_density(&m, &b, &sys.plane_wave_traction(&w)).unwrap();
        let mut sum = CVec2::zeros();
        for j in 0..b.n_points {
            sum += phi.values[j] * C64::new(b.speed[j] * b.step() / rho * 0.5, 0.0);
        }
        let c = C64::from_polar(-rho * m.omega * m.omega * shape.area() / 2.0, m.kappa_p * d.dot(&z));
        let want = CVec2::new(c * d.x, c * d.y);
        assert!((sum - want).norm() < 1e-2 * want.norm(), "{}", (sum - want).norm() / want.norm());
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn coupling_defect_decays_like_inverse_square_root() {
    use dort_core::dort::{assemble_operator, BemEngine, Cavity};
    use dort_core::mie::DiskCavity;
    let m = medium();
    let grid = DirectionGrid::uniform(32).unwrap();
    let ls: Vec<f64> = (0..12).map(|k| 20.0 * 20f64.powf(k as f64 / 11.0)).collect();
    let mut defect = Vec::new();
    for &l in &ls {
        let (a, b) = (Vec2::new(-l / 2.0, 0.0), Vec2::new(l / 2.0, 0.3 * l));
        let single = [Cavity::Disk(DiskCavity::new(a, 0.5).unwrap()), Cavity::Disk(DiskCavity::new(b, 0.5).unwrap())];
        let sum = assemble_operator(&BemEngine { n_points: 64, coupled: false }, &m, &single, &grid).unwrap().matrix;
        let coupled = assemble_operator(&BemEngine { n_points: 64, coupled: true }, &m, &single, &grid).unwrap().matrix;
        defect.push((&coupled - &sum).norm() / coupled.norm());
    }
    let p = slope(&ls.iter().map(|l| l.ln()).collect::<Vec<_>>(), &defect.iter().map(|d| d.ln()).collect::<Vec<_>>());
    println!("defects {defect:?} slope {p}");
    assert!((p + 0.5).abs() < 0.15, "{p}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn disk_far_field_agrees_with_mie(r in 0.05f64..2.0, phi in 0.0f64..6.3, shear in any::<bool>()) {
        let m = medium();
        let grid = DirectionGrid::uniform(24).unwrap();
        let mode = if shear { Mode::Shear } else { Mode::Compressional };
        let b = SmoothBoundary::disk(Vec2::zeros(), r, 128).unwrap();
        let (mp, ms) = mie_far(&m, r, mode, phi, &grid);
        let (bp, bs) = bem_far(&m, &b, mode, phi, &grid);
        prop_assert!(rel(&[bp, bs].concat(), &[mp, ms].concat()) < 1e-6);
    }
}
