//! Periodic pseudo-spectral vector calculus on the torus `[0, L)^d`.
//!
//! Fields are stored as Fourier coefficients normalised so that
//! `f(x) = Σ_k f̂_k e^{ik·x}`. Real fields carry exactly Hermitian
//! coefficients and a zero Nyquist row/column; every transform in this
//! module preserves both.

mod field;
mod grid;
mod norms;
mod ops;

pub use field::{SpectralScalar, SpectralVector};
pub use grid::{signed_index, Grid, GridSpec, PeriodicGrid};
pub use norms::{inner, inner_vec, lp_norm_of, Norm, Normed, Sampling};
pub(crate) use ops::cross_physical;
pub use ops::{
    curl, dealias, derivative, divergence, field_to_stream, gradient, inverse_laplacian, laplacian,
    leray_project, leray_project_in_place, stream_to_field, vector_laplacian, vector_potential,
    Dealias,
};
