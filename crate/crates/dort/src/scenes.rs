//! Builtin scenes: single cavities, disk pairs, nine disks and an open mirror.

use dort_core::boundary::RadialShape;
use dort_core::dort::{opposite_arcs, Cavity};
use dort_core::imaging::GridSpec;
use dort_core::mie::DiskCavity;
use dort_core::Vec2;

use crate::config::{EngineKind, ExperimentConfig};

pub const BUILTIN: [&str; 6] = [
    "example1-disk",
    "example1-peanuthull",
    "example2-asym",
    "example2-sym",
    "example3-nine-disks",
    "example4-open-trm",
];

/// Radii and centers of the nine-disk scene.
pub const NINE_DISKS: [(f64, [f64; 2]); 9] = [
    (0.01, [-12.0, 12.0]),
    (0.02, [0.0, 12.0]),
    (0.03, [12.0, 12.0]),
    (0.04, [-12.0, 0.0]),
    (0.05, [0.0, 0.0]),
    (0.06, [12.0, 0.0]),
    (0.07, [-12.0, -12.0]),
    (0.08, [0.0, -12.0]),
    (0.09, [12.0, -12.0]),
];

fn disk(x: f64, y: f64, r: f64) -> Cavity {
    Cavity::Disk(DiskCavity::new(Vec2::new(x, y), r).expect("preset radius"))
}

/// Configuration of a builtin scene, or `None` for an unknown name.
///
/// Presets use 360 directions, 5% noise, seed 0 and the `[-15, 15]^2`
/// imaging window with step 0.1 (`[-16, 16]^2` for the nine disks).
pub fn builtin(name: &str) -> Option<ExperimentConfig> {
    let cfg = match name {
        "example1-disk" => ExperimentConfig::new(name, vec![disk(5.0, 0.0, 0.002)]),
        "example1-peanuthull" => {
            let c = Cavity::Smooth { shape: RadialShape::peanuthull(), center: Vec2::new(5.0, 0.0), scale: 0.002 };
            ExperimentConfig { engine: EngineKind::Bem, ..ExperimentConfig::new(name, vec![c]) }
        }
        "example2-asym" => ExperimentConfig::new(name, vec![disk(5.0, 0.0, 0.002), disk(-5.0, 0.0, 0.004)]),
        "example2-sym" => ExperimentConfig::new(name, vec![disk(5.0, 0.0, 0.002), disk(-5.0, 0.0, 0.002)]),
        "example3-nine-disks" => {
            let cs = NINE_DISKS.iter().map(|&(r, [x, y])| disk(x, y, r)).collect();
            ExperimentConfig { imaging: GridSpec::square(16.0, 0.1), ..ExperimentConfig::new(name, cs) }
        }
        "example4-open-trm" => {
            let mut cfg = builtin("example2-asym")?;
            cfg.name = name.into();
            cfg.aperture = opposite_arcs().to_vec();
            cfg
        }
        _ => return None,
    };
    Some(cfg)
}

