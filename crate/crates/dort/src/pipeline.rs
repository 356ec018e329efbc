//! Experiment orchestration: assemble, perturb, restrict, decompose, image.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dort_core::dort::{
    add_noise, apply_aperture, assemble_operator, eigensystem_with, table_scale, AsymptoticEngine, BemEngine, Cavity, FarFieldMatrix, ForwardEngine, MieEngine,
    SpectrumConvention,
};
use dort_core::elastic::{DirectionGrid, ElasticMedium};
use dort_core::imaging::herglotz_image;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, EngineKind, ExperimentConfig, SpectrumScale};
use crate::formats;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(dort_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<dort_core::Error> for RunError {
    fn from(e: dort_core::Error) -> Self {
        match e {
            dort_core::Error::EngineMismatch(m) => ConfigError::Semantic { field: "engine".into(), message: m.into() }.into(),
            dort_core::Error::EmptyAperture => ConfigError::Semantic { field: "aperture".into(), message: e.to_string() }.into(),
            other => RunError::Numerical(other),
        }
    }
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

pub fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Serialize)]
pub struct ImageArtifact {
    /// 1-based eigenvalue index.
    pub index: usize,
    pub csv: Option<PathBuf>,
    pub pgm: PathBuf,
    pub argmax: [f64; 2],
    pub max_magnitude: f64,
    /// Largest magnitude within half a p-wavelength of each cavity center.
    pub center_peaks: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantSummary {
    /// `||F*F - FF*|| / ||F||^2` of the noiseless full-aperture operator.
    pub normality: f64,
    /// Relative defect of the antipodal reciprocity relation, when the grid has antipodes.
    pub reciprocity: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub assemble_s: f64,
    pub perturb_s: f64,
    pub eigen_s: f64,
    pub images_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub name: String,
    pub engine: EngineKind,
    pub n_directions: usize,
    pub noise_level: f64,
    pub seed: u64,
    pub aperture_mode: bool,
    pub retained_directions: usize,
    pub spectrum: SpectrumScale,
    pub eigenvalues_path: PathBuf,
    /// Up to the first 30 eigenvalues, nonincreasing.
    pub leading_eigenvalues: Vec<f64>,
    pub significant_count: usize,
    pub gap_ratio: f64,
    pub images: Vec<ImageArtifact>,
    pub checks: InvariantSummary,
    pub timing: Timing,
    pub report_path: PathBuf,
}

fn sum_blocks<E: ForwardEngine + Sync>(engine: &E, medium: &ElasticMedium, cavities: &[Cavity], grid: &DirectionGrid) -> dort_core::Result<FarFieldMatrix> {
    let blocks: Vec<_> = cavities.par_iter().map(|c| engine.cavity_operator(medium, c, grid)).collect();
    let mut f = FarFieldMatrix::zeros(medium, grid.clone());
    for b in blocks {
        f.matrix += b?;
    }
    Ok(f)
}

/// Noiseless full-aperture operator of the scene.
pub fn assemble(cfg: &ExperimentConfig) -> Result<FarFieldMatrix, RunError> {
    cfg.validate()?;
    let grid = DirectionGrid::uniform(cfg.n_directions)?;
    let (m, cs) = (&cfg.medium, cfg.cavities.as_slice());
    let f = match cfg.engine {
        EngineKind::Mie => sum_blocks(&MieEngine, m, cs, &grid)?,
        EngineKind::Bem if cfg.coupled => assemble_operator(&BemEngine { n_points: cfg.bem_points, coupled: true }, m, cs, &grid)?,
        EngineKind::Bem => sum_blocks(&BemEngine { n_points: cfg.bem_points, coupled: false }, m, cs, &grid)?,
        EngineKind::Asymptotic => sum_blocks(&AsymptoticEngine { n_points: cfg.bem_points.max(256) }, m, cs, &grid)?,
    };
    Ok(f)
}

/// Measured operator: noise, then aperture restriction.
pub fn perturb(cfg: &ExperimentConfig, clean: &FarFieldMatrix) -> Result<FarFieldMatrix, RunError> {
    let noisy = if cfg.noise_level > 0.0 { add_noise(clean, cfg.noise_level, cfg.seed)? } else { clean.clone() };
    Ok(if cfg.aperture.is_empty() { noisy } else { apply_aperture(&noisy, &cfg.aperture)? })
}

/// Forward stage: the noiseless operator and the measured one.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(FarFieldMatrix, FarFieldMatrix), RunError> {
    let clean = assemble(cfg)?;
    let measured = perturb(cfg, &clean)?;
    Ok((clean, measured))
}

fn invariants(f: &FarFieldMatrix) -> InvariantSummary {
    InvariantSummary { normality: f.normality_residual(), reciprocity: f.reciprocity_residual() }
}

/// Inverse stage on a measured operator; writes eigenvalues, maps and the report.
pub fn invert(cfg: &ExperimentConfig, measured: &FarFieldMatrix, checks: InvariantSummary, mut timing: Timing) -> Result<RunReport, RunError> {
    let out = &cfg.outputs;
    let maps_dir = out.join("maps");
    fs::create_dir_all(&maps_dir).map_err(io_error(&maps_dir))?;

    let t = Instant::now();
    let (conv, scale) = match cfg.spectrum {
        SpectrumScale::Table => (SpectrumConvention::Plain, table_scale(cfg.n_directions)),
        SpectrumScale::Weighted => (SpectrumConvention::Weighted, 1.0),
    };
    let es = eigensystem_with(measured, conv);
    let eigenvalues: Vec<f64> = es.eigenvalues.iter().map(|v| v * scale).collect();
    timing.eigen_s = t.elapsed().as_secs_f64();

    let eigenvalues_path = out.join("eigenvalues.csv");
    formats::write_eigenvalues(&eigenvalues_path, &eigenvalues).map_err(io_error(&eigenvalues_path))?;

    let t = Instant::now();
    let radius = PI / cfg.medium.kappa_p;
    let centers: Vec<_> = cfg.cavities.iter().map(Cavity::center).collect();
    let images = es.eigenvectors[..es.significant_count]
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let map = herglotz_image(&cfg.medium, v, &cfg.imaging)?;
            let pgm = maps_dir.join(format!("map_{:03}.pgm", k + 1));
            let csv = if cfg.map_csv {
                let path = maps_dir.join(format!("map_{:03}.csv", k + 1));
                formats::write_map_csv(&path, &map).map_err(io_error(&path))?;
                Some(path)
            } else {
                None
            };
            formats::write_pgm(&pgm, &map).map_err(io_error(&pgm))?;
            let (x, y) = map.argmax();
            let center_peaks = centers.iter().map(|c| map.max_near(c.x, c.y, radius)).collect();
            Ok(ImageArtifact { index: k + 1, csv, pgm, argmax: [x, y], max_magnitude: map.max_magnitude(), center_peaks })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    timing.images_s = t.elapsed().as_secs_f64();
    timing.total_s += timing.eigen_s + timing.images_s;

    let report = RunReport {
        name: cfg.name.clone(),
        engine: cfg.engine,
        n_directions: cfg.n_directions,
        noise_level: cfg.noise_level,
        seed: cfg.seed,
        aperture_mode: !cfg.aperture.is_empty(),
        retained_directions: measured.n_dir(),
        spectrum: cfg.spectrum,
        eigenvalues_path,
        leading_eigenvalues: eigenvalues.iter().take(30).copied().collect(),
        significant_count: es.significant_count,
        gap_ratio: es.gap_ratio,
        images,
        checks,
        timing,
        report_path: out.join("report.toml"),
    };
    let text = toml::to_string(&report).map_err(|e| RunError::Io { path: report.report_path.clone(), source: std::io::Error::other(e) })?;
    fs::write(&report.report_path, text).map_err(io_error(&report.report_path))?;
    Ok(report)
}

/// Full pipeline: assemble, noise, aperture, eigensystem, images, report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.outputs).map_err(io_error(&cfg.outputs))?;
    let t = Instant::now();
    let clean = assemble(cfg)?;
    let assemble_s = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let measured = perturb(cfg, &clean)?;
    let perturb_s = t.elapsed().as_secs_f64();
    let checks = invariants(&clean);
    let timing = Timing { assemble_s, perturb_s, total_s: assemble_s + perturb_s, ..Timing::default() };
    invert(cfg, &measured, checks, timing)
}

/// Invariant summary of a stored operator (computed on the operator as given).
pub fn operator_checks(f: &FarFieldMatrix) -> InvariantSummary {
    invariants(f)
}
