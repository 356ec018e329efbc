//! Discrete far-field operator, noise and aperture models, the time-reversal
//! eigensystem and the significant-eigenvalue rule.
//!
//! The operator acts on stacked densities `[f_p; f_s]` sampled on a
//! direction grid. Entry `((o, i), (c, j))` is the `o`-channel far field at
//! `x_i` of a unit plane wave of mode `c` and direction `alpha_j`, times
//! `e^{-i pi/4} sqrt(kappa_c/omega) w_j`. The weighted inner product has
//! Gram matrix `G = diag(w_j omega/kappa_c)`, so `F* = G^{-1} A^H G`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

// libm-backed f64 math under no_std
#[allow(unused_imports)]
use num_traits::Float;

use crate::asymptotic::{asymptotic_far_field_scaled, SmallCavityDescriptor};
use crate::bem::{polarization_tensor, BemSystem};
use crate::boundary::{RadialShape, SmoothBoundary};
use crate::elastic::{DirectionGrid, ElasticMedium, HerglotzKernel, IncidentPlaneWave, Mode};
use crate::mie::{far_blocks, truncation, DiskCavity};
use crate::{Error, Result, Vec2, C64, I, PI, TAU};

/// A scatterer as seen by the forward engines.
#[derive(Debug, Clone, PartialEq)]
pub enum Cavity {
    Disk(DiskCavity),
    Smooth { shape: RadialShape, center: Vec2, scale: f64 },
}

impl Cavity {
    pub fn center(&self) -> Vec2 {
        match self {
            Cavity::Disk(d) => d.center,
            Cavity::Smooth { center, .. } => *center,
        }
    }

    pub fn shape(&self) -> (RadialShape, f64) {
        match self {
            Cavity::Disk(d) => (RadialShape::disk(), d.radius),
            Cavity::Smooth { shape, scale, .. } => (shape.clone(), *scale),
        }
    }

    pub fn boundary(&self, n_points: usize) -> Result<SmoothBoundary> {
        let (shape, scale) = self.shape();
        SmoothBoundary::new(shape, self.center(), scale, n_points)
    }

    /// Asymptotic descriptor with the polarization tensor from the static solver.
    pub fn descriptor(&self, medium: &ElasticMedium, n_points: usize) -> Result<SmallCavityDescriptor> {
        let b = self.boundary(n_points)?;
        let p = polarization_tensor(medium, &b)?;
        SmallCavityDescriptor::new(self.center(), b.shape.area(), p.matrix, b.scale)
    }
}

/// Forward model producing one cavity's contribution to the operator.
pub trait ForwardEngine {
    fn name(&self) -> &'static str;

    /// `2n x 2n` block for a single cavity, quadrature weights included.
    fn cavity_operator(&self, medium: &ElasticMedium, cavity: &Cavity, grid: &DirectionGrid) -> Result<DMatrix<C64>>;

    /// True when cavities interact, so blocks cannot be summed.
    fn is_coupled(&self) -> bool {
        false
    }

    /// Operator of the whole scene.
    fn operator(&self, medium: &ElasticMedium, cavities: &[Cavity], grid: &DirectionGrid) -> Result<DMatrix<C64>> {
        let n = 2 * grid.len();
        let mut a = DMatrix::zeros(n, n);
        for c in cavities {
            a += self.cavity_operator(medium, c, grid)?;
        }
        Ok(a)
    }
}

/// Exact separation-of-variables solution, disks only.
#[derive(Debug, Clone, Copy, Default)]
pub struct MieEngine;

/// Nyström boundary-integral solution.
#[derive(Debug, Clone, Copy)]
pub struct BemEngine {
    pub n_points: usize,
    /// Solve all bodies in one system, keeping multiple scattering.
    pub coupled: bool,
}

impl Default for BemEngine {
    fn default() -> Self {
        Self { n_points: 128, coupled: false }
    }
}

/// Leading-order small-cavity far fields.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticEngine {
    /// Nodes used for the static polarization-tensor solve.
    pub n_points: usize,
}

impl Default for AsymptoticEngine {
    fn default() -> Self {
        Self { n_points: 256 }
    }
}

fn input_factor(medium: &ElasticMedium, mode: Mode) -> C64 {
    C64::from_polar((medium.kappa(mode) / medium.omega).sqrt(), -PI / 4.0)
}

impl ForwardEngine for MieEngine {
    fn name(&self) -> &'static str {
        "mie"
    }

    fn cavity_operator(&self, medium: &ElasticMedium, cavity: &Cavity, grid: &DirectionGrid) -> Result<DMatrix<C64>> {
        let Cavity::Disk(disk) = cavity else {
            return Err(Error::EngineMismatch("the Mie engine handles disks only"));
        };
        let nmax = truncation(medium, disk.radius);
        let blocks = far_blocks(medium, disk.radius, nmax)?;
        let nd = grid.len();
        let ks = [medium.kappa_p, medium.kappa_s];
        let s = disk.center;
        // e^{i n theta} per direction and order
        let modes: Vec<Vec<C64>> = grid
            .angles
            .iter()
            .map(|&t| (-(nmax as i32)..=nmax as i32).map(|n| C64::from_polar(1.0, n as f64 * t)).collect())
            .collect();
        let mut a = DMatrix::zeros(2 * nd, 2 * nd);
        for (i, xi) in grid.directions().enumerate() {
            for (j, aj) in grid.directions().enumerate() {
                let mut k = [[C64::new(0.0, 0.0); 2]; 2];
                for (m, f) in blocks.iter().enumerate() {
                    let e = modes[i][m] * modes[j][m].conj();
                    for o in 0..2 {
                        for c in 0..2 {
                            k[o][c] += f[(o, c)] * e;
                        }
                    }
                }
                for o in 0..2 {
                    let out = (-I * ks[o] * xi.dot(&s)).exp();
                    for c in 0..2 {
                        let inc = (I * ks[c] * aj.dot(&s)).exp();
                        a[(o * nd + i, c * nd + j)] = out * k[o][c] * inc * (grid.weights[j] / TAU);
                    }
                }
            }
        }
        Ok(a)
    }
}

impl BemEngine {
    fn solve(&self, medium: &ElasticMedium, bodies: Vec<SmoothBoundary>, grid: &DirectionGrid) -> Result<DMatrix<C64>> {
        let sys = BemSystem::new(medium, bodies)?;
        let nd = grid.len();
        let nb = sys.n_nodes();
        let mut rhs = DMatrix::zeros(2 * nb, 2 * nd);
        for mode in Mode::BOTH {
            for (j, a) in grid.directions().enumerate() {
                let wave = IncidentPlaneWave { direction: a, mode, amplitude: C64::new(1.0, 0.0) };
                for (k, t) in sys.plane_wave_traction(&wave).into_iter().enumerate() {
                    rhs[(2 * k, mode.index() * nd + j)] = t.x;
                    rhs[(2 * k + 1, mode.index() * nd + j)] = t.y;
                }
            }
        }
        let phi = sys.solve_columns(&rhs);
        let mut a = sys.far_field_matrix(&phi, grid);
        scale_columns(&mut a, medium, grid);
        Ok(a)
    }
}

impl ForwardEngine for BemEngine {
    fn name(&self) -> &'static str {
        "bem"
    }

    fn cavity_operator(&self, medium: &ElasticMedium, cavity: &Cavity, grid: &DirectionGrid) -> Result<DMatrix<C64>> {
        self.solve(medium, alloc::vec![cavity.boundary(self.n_points)?], grid)
    }

    fn is_coupled(&self) -> bool {
        self.coupled
    }

    fn operator(&self, medium: &ElasticMedium, cavities: &[Cavity], grid: &DirectionGrid) -> Result<DMatrix<C64>> {
        if !self.coupled || cavities.len() < 2 {
            let n = 2 * grid.len();
            let mut a = DMatrix::zeros(n, n);
            for c in cavities {
                a += self.cavity_operator(medium, c, grid)?;
            }
            return Ok(a);
        }
        let bodies = cavities.iter().map(|c| c.boundary(self.n_points)).collect::<Result<Vec<_>>>()?;
        self.solve(medium, bodies, grid)
    }
}

impl ForwardEngine for AsymptoticEngine {
    fn name(&self) -> &'static str {
        "asymptotic"
    }

    fn cavity_operator(&self, medium: &ElasticMedium, cavity: &Cavity, grid: &DirectionGrid) -> Result<DMatrix<C64>> {
        let desc = [cavity.descriptor(medium, self.n_points)?];
        let nd = grid.len();
        let mut a = DMatrix::zeros(2 * nd, 2 * nd);
        for mode in Mode::BOTH {
            for (j, d) in grid.directions().enumerate() {
                for (i, x) in grid.directions().enumerate() {
                    let (vp, vs) = asymptotic_far_field_scaled(medium, &desc, mode, d, x);
                    a[(i, mode.index() * nd + j)] = vp;
                    a[(nd + i, mode.index() * nd + j)] = vs;
                }
            }
        }
        scale_columns(&mut a, medium, grid);
        Ok(a)
    }
}

fn scale_columns(a: &mut DMatrix<C64>, medium: &ElasticMedium, grid: &DirectionGrid) {
    let nd = grid.len();
    for mode in Mode::BOTH {
        let f = input_factor(medium, mode);
        for j in 0..nd {
            let mut col = a.column_mut(mode.index() * nd + j);
            col *= f * grid.weights[j];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldMatrix {
    pub grid: DirectionGrid,
    pub matrix: DMatrix<C64>,
    /// `omega/kappa_p`, `omega/kappa_s`.
    pub channel_weights: [f64; 2],
}

/// Operator of a scene; independent engines superpose cavity blocks.
pub fn assemble_operator(engine: &dyn ForwardEngine, medium: &ElasticMedium, cavities: &[Cavity], grid: &DirectionGrid) -> Result<FarFieldMatrix> {
    let mut f = FarFieldMatrix::zeros(medium, grid.clone());
    f.matrix = engine.operator(medium, cavities, grid)?;
    Ok(f)
}

impl FarFieldMatrix {
    pub fn zeros(medium: &ElasticMedium, grid: DirectionGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            matrix: DMatrix::zeros(2 * n, 2 * n),
            channel_weights: [medium.channel_weight(Mode::Compressional), medium.channel_weight(Mode::Shear)],
        }
    }

    pub fn n_dir(&self) -> usize {
        self.grid.len()
    }

    /// Diagonal of the Gram matrix.
    pub fn gram(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(2 * self.n_dir());
        for cw in self.channel_weights {
            g.extend(self.grid.weights.iter().map(|w| w * cw));
        }
        g
    }

    /// `G^{1/2} A G^{-1/2}`, unitarily equivalent to `F` in the weighted space.
    pub fn symmetrized(&self) -> DMatrix<C64> {
        let g: Vec<f64> = self.gram().into_iter().map(|v| v.sqrt()).collect();
        let mut a = self.matrix.clone();
        for ((r, c), v) in a.iter_mut().enumerate().map(|(k, v)| ((k % g.len(), k / g.len()), v)) {
            *v *= g[r] / g[c];
        }
        a
    }

    /// Matrix of the weighted adjoint `G^{-1} A^H G`.
    pub fn adjoint(&self) -> DMatrix<C64> {
        let g = self.gram();
        let mut a = self.matrix.adjoint();
        for ((r, c), v) in a.iter_mut().enumerate().map(|(k, v)| ((k % g.len(), k / g.len()), v)) {
            *v *= g[c] / g[r];
        }
        a
    }

    /// `||F F* - F* F|| / ||F||^2` (Frobenius norms in the weighted space).
    pub fn normality_residual(&self) -> f64 {
        let a = self.symmetrized();
        let n2 = a.norm_squared();
        if n2 == 0.0 {
            return 0.0;
        }
        (&a * a.adjoint() - a.adjoint() * &a).norm() / n2
    }

    /// Index of `-x_j` on the grid, when the grid is closed under reflection.
    pub fn antipodes(&self) -> Option<Vec<usize>> {
        let dirs: Vec<Vec2> = self.grid.directions().collect();
        dirs.iter()
            .map(|d| dirs.iter().position(|e| (e + d).norm() < 1e-9))
            .collect()
    }

    /// `||F* - R conj(F) R|| / ||F||` with `R` the reflection `x -> -x`.
    pub fn reciprocity_residual(&self) -> Option<f64> {
        let anti = self.antipodes()?;
        let n = self.n_dir();
        let perm = |k: usize| if k < n { anti[k] } else { n + anti[k - n] };
        let adj = self.adjoint();
        let mut num = 0.0;
        for r in 0..2 * n {
            for c in 0..2 * n {
                num += (adj[(r, c)] - self.matrix[(perm(r), perm(c))].conj()).norm_sqr();
            }
        }
        let den = self.matrix.norm_squared();
        Some(if den == 0.0 { 0.0 } else { (num / den).sqrt() })
    }

    /// Eigenvalues of the operator itself, via a Schur decomposition.
    pub fn operator_eigenvalues(&self) -> Vec<C64> {
        let a = self.symmetrized();
        let mut v: Vec<C64> = match nalgebra::Schur::new(a).eigenvalues() {
            Some(e) => e.iter().copied().collect(),
            None => Vec::new(),
        };
        v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        v
    }

    /// Applies the operator to a density.
    pub fn apply(&self, f: &HerglotzKernel) -> HerglotzKernel {
        HerglotzKernel::from_stacked(self.grid.clone(), &(&self.matrix * f.stacked()))
    }
}

/// Adds complex Gaussian noise with per-entry standard deviation
/// `level ||A||_F / dim`, split evenly between real and imaginary parts.
pub fn add_noise(f: &FarFieldMatrix, level: f64, seed: u64) -> Result<FarFieldMatrix> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::Parameter("noise level must be nonnegative"));
    }
    let mut out = f.clone();
    if level == 0.0 {
        return Ok(out);
    }
    let dim = f.matrix.nrows() as f64;
    let sigma = level * f.matrix.norm() / dim / 2f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in out.matrix.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *v += C64::new(re, im) * sigma;
    }
    Ok(out)
}

/// Half-open angular arc `[start, end)` in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

const ARC_EPS: f64 = 1e-12;

impl Arc {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        let len = end - start;
        if !(start.is_finite() && end.is_finite()) || len <= 0.0 || len > TAU + ARC_EPS {
            return Err(Error::Parameter("arc needs start < end and length at most 2 pi"));
        }
        Ok(Self { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, angle: f64) -> bool {
        let rel = (angle - self.start + ARC_EPS).rem_euclid(TAU) - ARC_EPS;
        rel >= -ARC_EPS && rel < self.length() - ARC_EPS
    }
}

/// The two-sided aperture `[pi/4, 3pi/4) U [5pi/4, 7pi/4)`.
pub fn opposite_arcs() -> [Arc; 2] {
    [Arc { start: PI / 4.0, end: 3.0 * PI / 4.0 }, Arc { start: 5.0 * PI / 4.0, end: 7.0 * PI / 4.0 }]
}

/// Restricts emission and reception to directions inside the arcs; each
/// retained direction gets weight `arc length / directions in that arc`.
pub fn apply_aperture(f: &FarFieldMatrix, arcs: &[Arc]) -> Result<FarFieldMatrix> {
    let n = f.n_dir();
    let mut keep = Vec::new();
    let mut weight = Vec::new();
    for arc in arcs {
        let members: Vec<usize> = (0..n).filter(|&j| arc.contains(f.grid.angles[j]) && !keep.contains(&j)).collect();
        if members.is_empty() {
            continue;
        }
        let w = arc.length() / members.len() as f64;
        for j in members {
            keep.push(j);
            weight.push(w);
        }
    }
    if keep.is_empty() {
        return Err(Error::EmptyAperture);
    }
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by_key(|&k| keep[k]);
    let keep: Vec<usize> = order.iter().map(|&k| keep[k]).collect();
    let weight: Vec<f64> = order.iter().map(|&k| weight[k]).collect();
    let m = keep.len();
    let idx = |k: usize| if k < m { keep[k] } else { n + keep[k - m] };
    let matrix = DMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let j = if c < m { c } else { c - m };
        f.matrix[(idx(r), idx(c))] * (weight[j] / f.grid.weights[keep[j]])
    });
    let grid = DirectionGrid { angles: keep.iter().map(|&j| f.grid.angles[j]).collect(), weights: weight };
    Ok(FarFieldMatrix { grid, matrix, channel_weights: f.channel_weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumConvention {
    /// Hermitian problem in the weighted far-field space.
    Weighted,
    /// `A A^H` of the plain sample matrix.
    Plain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeReversalEigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<HerglotzKernel>,
    pub significant_count: usize,
    pub gap_ratio: f64,
    pub convention: SpectrumConvention,
}

fn hermitian_product(a: &DMatrix<C64>) -> DMatrix<C64> {
    let mut t = a * a.adjoint();
    // exact Hermitian symmetry for the solver
    let n = t.nrows();
    for r in 0..n {
        t[(r, r)] = C64::new(t[(r, r)].re, 0.0);
        for c in r + 1..n {
            let v = (t[(r, c)] + t[(c, r)].conj()) * 0.5;
            t[(r, c)] = v;
            t[(c, r)] = v.conj();
        }
    }
    t
}

/// Factor mapping plain-convention eigenvalues on an `n`-direction grid to
/// the reference table scale, `64 n^2 / pi`. With it the `R = 0.002` disk at
/// 360 directions gives `0.0050205, 0.00066975, 0.00047154`.
pub fn table_scale(n_dir: usize) -> f64 {
    64.0 * (n_dir as f64).powi(2) / PI
}

/// Nonincreasing eigenvalues of `T` without eigenvectors.
pub fn spectrum(f: &FarFieldMatrix, convention: SpectrumConvention) -> Vec<f64> {
    let a = match convention {
        SpectrumConvention::Weighted => f.symmetrized(),
        SpectrumConvention::Plain => f.matrix.clone(),
    };
    let mut v: Vec<f64> = hermitian_product(&a).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn eigensystem(f: &FarFieldMatrix) -> TimeReversalEigenSystem {
    eigensystem_with(f, SpectrumConvention::Weighted)
}

/// Eigen-decomposition of `T = F F*`. Eigenvectors are orthonormal in the
/// weighted inner product for the weighted convention and in the plain
/// Euclidean one otherwise.
pub fn eigensystem_with(f: &FarFieldMatrix, convention: SpectrumConvention) -> TimeReversalEigenSystem {
    let gsqrt: Vec<f64> = f.gram().into_iter().map(|v| v.sqrt()).collect();
    let a = match convention {
        SpectrumConvention::Weighted => f.symmetrized(),
        SpectrumConvention::Plain => f.matrix.clone(),
    };
    let eig = hermitian_product(&a).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| {
            let mut v: DVector<C64> = eig.eigenvectors.column(k).into_owned();
            if convention == SpectrumConvention::Weighted {
                for (x, g) in v.iter_mut().zip(&gsqrt) {
                    *x /= *g;
                }
            }
            HerglotzKernel::from_stacked(f.grid.clone(), &v)
        })
        .collect();
    let (significant_count, gap_ratio) = significance_gap(&eigenvalues);
    TimeReversalEigenSystem { eigenvalues, eigenvectors, significant_count, gap_ratio, convention }
}

/// Position of the largest consecutive ratio `l_k / l_{k+1}` (1-based count,
/// smallest `k` on ties). Values are floored at `len * eps * l_1`.
pub fn significance_gap(eigenvalues: &[f64]) -> (usize, f64) {
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    if top.is_nan() || top <= 0.0 || eigenvalues.len() < 2 {
        return (if top > 0.0 { 1 } else { 0 }, 1.0);
    }
    let floor = eigenvalues.len() as f64 * f64::EPSILON * top;
    let mut best = (0, 0.0);
    for k in 0..eigenvalues.len() - 1 {
        let r = eigenvalues[k].max(floor) / eigenvalues[k + 1].max(floor);
        if r > best.1 {
            best = (k + 1, r);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_rule() {
        let l = [1.0, 0.5, 0.25, 0.125, 0.0625];
        assert_eq!(significance_gap(&l), (1, 2.0));
        assert_eq!(significance_gap(&[0.0, 0.0]).0, 0);
        let table = [0.005021, 0.005021, 0.000670, 0.000670, 0.000472, 4.17e-15];
        let (k, r) = significance_gap(&table);
        assert_eq!(k, 5);
        assert!((r / 1.13e11 - 1.0).abs() < 0.01);
    }

    #[test]
    fn half_open_arcs() {
        let grid = DirectionGrid::uniform(360).unwrap();
        let arcs = opposite_arcs();
        let kept = grid.angles.iter().filter(|&&a| arcs.iter().any(|c| c.contains(a))).count();
        assert_eq!(kept, 180);
        let a = Arc::new(-0.5, 0.5).unwrap();
        assert!(a.contains(TAU - 0.1) && a.contains(0.0) && !a.contains(0.5));
        assert!(Arc::new(1.0, 1.0).is_err());
    }
}
