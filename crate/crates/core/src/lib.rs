//! Time-harmonic elastic scattering by small cavities in the plane and
//! eigen-analysis of the time-reversal operator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and thread-level parallelism live in the companion `dort` crate.

#![no_std]

extern crate alloc;

pub mod asymptotic;
pub mod bem;
pub mod boundary;
pub mod dort;
pub mod elastic;
mod error;
pub mod imaging;
pub mod linalg;
pub mod mie;
pub mod radial;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

/// Points and directions in the plane.
pub type Vec2 = Vector2<f64>;
/// Complex displacement vectors.
pub type CVec2 = Vector2<C64>;
/// Complex 2x2 matrices (Jacobians, Green tensors).
pub type CMat2 = Matrix2<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;
/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
