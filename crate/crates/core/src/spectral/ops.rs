//! Spectral vector calculus. Every operation is pure: inputs are borrowed and
//! a new field is returned.

use num_complex::Complex64;

use super::field::{SpectralScalar, SpectralVector};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance on the zero mode used by the mean-zero preconditions.
const MEAN_TOL: f64 = 1e-12;

/// `∂_axis f`. On a 2D grid `axis == 2` gives zero.
pub fn derivative(f: &SpectralScalar, axis: usize) -> SpectralScalar {
    let grid = f.grid().clone();
    if axis >= grid.dim() {
        return SpectralScalar::zeros(&grid);
    }
    let k = grid.k(axis);
    f.map_modes(|i, c| Complex64::new(-k[i] * c.im, k[i] * c.re))
}

pub fn gradient(f: &SpectralScalar) -> SpectralVector {
    SpectralVector::from_parts([derivative(f, 0), derivative(f, 1), derivative(f, 2)])
}

pub fn laplacian(f: &SpectralScalar) -> SpectralScalar {
    let k2 = f.grid().k2().to_vec();
    f.map_modes(|i, c| -k2[i] * c)
}

pub fn vector_laplacian(v: &SpectralVector) -> SpectralVector {
    SpectralVector::from_parts([
        laplacian(v.comp(0)),
        laplacian(v.comp(1)),
        laplacian(v.comp(2)),
    ])
}

/// Solves `Δg = f` for mean-zero `g`; the mean of `f` is discarded.
pub fn inverse_laplacian(f: &SpectralScalar) -> SpectralScalar {
    let k2 = f.grid().k2().to_vec();
    f.map_modes(|i, c| {
        if k2[i] == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -c / k2[i]
        }
    })
}

/// `∇×v = ik×v̂` per mode (third wavenumber zero on a 2D grid).
pub fn curl(v: &SpectralVector) -> SpectralVector {
    let grid = v.grid().clone();
    let (kx, ky, kz) = (grid.k(0), grid.k(1), grid.k(2));
    let (a, b, c) = (v.comp(0).coeffs(), v.comp(1).coeffs(), v.comp(2).coeffs());
    let len = grid.len();
    let mut out = [
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    ];
    for i in 0..len {
        out[0].push(I * (ky[i] * c[i] - kz[i] * b[i]));
        out[1].push(I * (kz[i] * a[i] - kx[i] * c[i]));
        out[2].push(I * (kx[i] * b[i] - ky[i] * a[i]));
    }
    let [x, y, z] = out;
    SpectralVector::from_parts([
        SpectralScalar::from_coeffs_unchecked(&grid, x),
        SpectralScalar::from_coeffs_unchecked(&grid, y),
        SpectralScalar::from_coeffs_unchecked(&grid, z),
    ])
}

pub fn divergence(v: &SpectralVector) -> SpectralScalar {
    let grid = v.grid().clone();
    let coeffs = (0..grid.len())
        .map(|i| {
            let mut d = Complex64::new(0.0, 0.0);
            for a in 0..grid.dim() {
                d += v.comp(a).coeffs()[i] * grid.k(a)[i];
            }
            I * d
        })
        .collect();
    SpectralScalar::from_coeffs_unchecked(&grid, coeffs)
}

/// L²-orthogonal projection onto divergence-free fields:
/// `v̂ ← v̂ − k(k·v̂)/|k|²` for `k ≠ 0`; the mean is unchanged.
pub fn leray_project(v: &SpectralVector) -> SpectralVector {
    let mut out = v.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(v: &mut SpectralVector) {
    let grid = v.grid().clone();
    let dim = grid.dim();
    let k2 = grid.k2();
    let [a, b, c] = v.comps_mut();
    let (a, b, c) = (a.coeffs_mut(), b.coeffs_mut(), c.coeffs_mut());
    for i in 0..grid.len() {
        if k2[i] == 0.0 {
            continue;
        }
        let k = [grid.k(0)[i], grid.k(1)[i], grid.k(2)[i]];
        let kv = if dim == 3 {
            k[0] * a[i] + k[1] * b[i] + k[2] * c[i]
        } else {
            k[0] * a[i] + k[1] * b[i]
        };
        let s = kv / k2[i];
        a[i] -= s * k[0];
        b[i] -= s * k[1];
        if dim == 3 {
            c[i] -= s * k[2];
        }
    }
}

fn mean_scale(v: &SpectralVector) -> f64 {
    v.max_abs_coeff().max(f64::MIN_POSITIVE)
}

/// Divergence-free vector potential `A` with `∇×A = b`, `Â(k) = ik×b̂/|k|²`.
pub fn vector_potential(b: &SpectralVector) -> Result<SpectralVector> {
    let m = b.mean();
    let scale = mean_scale(b);
    if m.iter().any(|x| x.abs() > MEAN_TOL * scale) {
        return Err(Error::precondition(
            "field has a nonzero mean; no periodic vector potential exists",
        ));
    }
    let c = curl(b);
    let k2 = b.grid().k2().to_vec();
    let inv = |i: usize, z: Complex64| {
        if k2[i] == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            z / k2[i]
        }
    };
    Ok(SpectralVector::from_parts([
        c.comp(0).map_modes(inv),
        c.comp(1).map_modes(inv),
        c.comp(2).map_modes(inv),
    ]))
}

/// `B = (∂₂ψ, −∂₁ψ, B³)` on a 2½D grid.
pub fn stream_to_field(psi: &SpectralScalar, b3: &SpectralScalar) -> Result<SpectralVector> {
    if psi.grid().dim() != 2 {
        return Err(Error::InvalidMode(
            "stream functions require a 2D grid".into(),
        ));
    }
    psi.check_grid(b3)?;
    SpectralVector::new([derivative(psi, 1), -&derivative(psi, 0), b3.clone()])
}

/// Inverse of [`stream_to_field`]: returns mean-zero `ψ` with `−Δψ = (∇×b)³`,
/// and `B³`.
pub fn field_to_stream(b: &SpectralVector) -> Result<(SpectralScalar, SpectralScalar)> {
    if b.grid().dim() != 2 {
        return Err(Error::InvalidMode(
            "stream functions require a 2D grid".into(),
        ));
    }
    let m = b.mean();
    let scale = mean_scale(b);
    if m[0].abs() > MEAN_TOL * scale || m[1].abs() > MEAN_TOL * scale {
        return Err(Error::precondition(
            "horizontal field has a nonzero mean; no periodic stream function exists",
        ));
    }
    let grid = b.grid().clone();
    let (kx, ky, k2) = (grid.k(0), grid.k(1), grid.k2());
    let (b1, b2) = (b.comp(0).coeffs(), b.comp(1).coeffs());
    let coeffs = (0..grid.len())
        .map(|i| {
            if k2[i] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                I * (kx[i] * b2[i] - ky[i] * b1[i]) / k2[i]
            }
        })
        .collect();
    Ok((
        SpectralScalar::from_coeffs_unchecked(&grid, coeffs),
        b.comp(2).clone(),
    ))
}

/// Zeroing of all modes outside the grid's dealias mask. Idempotent.
pub trait Dealias: Sized {
    fn dealias_in_place(&mut self);

    fn dealiased(&self) -> Self
    where
        Self: Clone,
    {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }
}

impl Dealias for SpectralScalar {
    fn dealias_in_place(&mut self) {
        let grid = self.grid().clone();
        let mask = grid.mask();
        for (c, keep) in self.coeffs_mut().iter_mut().zip(mask) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

impl Dealias for SpectralVector {
    fn dealias_in_place(&mut self) {
        for c in self.comps_mut() {
            c.dealias_in_place();
        }
    }
}

pub fn dealias<T: Dealias + Clone>(f: &T) -> T {
    f.dealiased()
}

/// Cross product of two physical vector fields, pointwise.
pub(crate) fn cross_physical(a: [&[f64]; 3], b: [&[f64]; 3]) -> [Vec<f64>; 3] {
    let len = a[0].len();
    let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for i in 0..len {
        out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
        out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
        out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
    }
    out
}
