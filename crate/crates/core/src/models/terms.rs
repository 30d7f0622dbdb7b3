//! Shared nonlinear-term builders.

use num_complex::Complex64;

use crate::spectral::{cross_physical, curl, Dealias, Grid, SpectralScalar, SpectralVector};

/// Physical values of several spectral fields (one batched transform).
pub(crate) fn physical(fields: &[&SpectralScalar]) -> Vec<Vec<f64>> {
    let grid = fields[0].grid();
    let coeffs: Vec<&[Complex64]> = fields.iter().map(|f| f.coeffs()).collect();
    grid.to_physical_many(&coeffs)
}

/// Forward transforms of physical products, dealiased.
pub(crate) fn spectral_dealiased(grid: &Grid, values: &[&[f64]]) -> Vec<SpectralScalar> {
    grid.to_spectral_many(values)
        .into_iter()
        .map(|c| {
            let mut s = SpectralScalar::from_coeffs_unchecked(grid, c);
            s.dealias_in_place();
            s
        })
        .collect()
}

pub(crate) fn vector3(mut comps: Vec<SpectralScalar>) -> SpectralVector {
    debug_assert_eq!(comps.len(), 3);
    let c = comps.pop().unwrap();
    let b = comps.pop().unwrap();
    let a = comps.pop().unwrap();
    SpectralVector::from_parts([a, b, c])
}

/// Dealiased pointwise cross product of two spectral vectors.
pub(crate) fn cross_dealiased(a: &SpectralVector, b: &SpectralVector) -> SpectralVector {
    let grid = a.grid().clone();
    let refs: Vec<&SpectralScalar> = a.comps().iter().chain(b.comps().iter()).collect();
    let ph = physical(&refs);
    let c = cross_physical([&ph[0], &ph[1], &ph[2]], [&ph[3], &ph[4], &ph[5]]);
    vector3(spectral_dealiased(&grid, &[&c[0], &c[1], &c[2]]))
}

/// Dealiased `(∇×b)×b`.
pub fn lorentz_force(b: &SpectralVector) -> SpectralVector {
    cross_dealiased(&curl(b), b)
}

/// `∇×((∇×b)×b)`, dealiased.
pub fn hall_term(b: &SpectralVector) -> SpectralVector {
    curl(&lorentz_force(b))
}
