//! Pseudo-spectral simulator and diagnostics engine for incompressible,
//! viscous, resistive Hall MHD on the periodic torus (3D and 2½D), together
//! with its electron MHD reductions.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] periodic grids, Fourier fields, vector calculus and norms;
//! * [`models`] right-hand sides of every evolution system;
//! * [`integrate`] integrating-factor Runge–Kutta stepping, runs and checkpoints;
//! * [`diagnostics`] energies, magneto-vorticity norms, theorem constants,
//!   identity residuals and inequality monitors;
//! * [`splitting`] a whole-space radial surrogate for Fourier-splitting decay;
//! * [`scenario`], [`config`], [`runner`] and [`verify`] back the command line.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
mod error;
pub mod integrate;
pub mod models;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod splitting;
pub mod verify;

pub use error::{Error, Result};

pub use diagnostics::DiagnosticsRecord;
pub use integrate::{Scheme, StepperConfig};
pub use models::{Fields, MhdState, ModelTag, PhysParams};
pub use spectral::{Grid, GridSpec, Norm, PeriodicGrid, SpectralScalar, SpectralVector};
