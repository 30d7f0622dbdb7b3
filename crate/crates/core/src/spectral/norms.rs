//! Norms and inner products.
//!
//! Spectral norms use Parseval: with `f = Σ f̂_k e^{ik·x}` on a domain of
//! volume `V`, `‖f‖²_{L²} = V Σ |f̂_k|²`. Non-Hilbert norms (`L^p`, `L^∞`)
//! use collocation values, optionally on a 2× zero-padded grid.

use serde::{Deserialize, Serialize};

use super::field::{SpectralScalar, SpectralVector};
use crate::{Error, Result};

/// Norm selector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Norm {
    L2,
    /// `L^p` for finite `p >= 1` by collocation quadrature.
    Lp(f64),
    LInf,
    /// Homogeneous Sobolev `Ḣ^s`; the zero mode is excluded for `s > 0`.
    HDot(f64),
    /// Inhomogeneous `H^k`: `‖f‖² + Σ_{i≤k} ‖∇^i f‖²`.
    H(u32),
    /// `Ḣ^{d/2}`, an upper-bound proxy for the BMO norm.
    BmoProxy,
}

/// Whether non-Hilbert norms are evaluated on the collocation grid or on a
/// 2× zero-padded refinement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    #[default]
    Collocation,
    Refined2x,
}

/// Weighted spectral sum `V Σ_k w(|k|²) |f̂_k|²` over a set of components.
pub(crate) fn weighted_sum(comps: &[&SpectralScalar], w: impl Fn(f64) -> f64) -> f64 {
    let grid = comps[0].grid();
    let k2 = grid.k2();
    let mut total = 0.0;
    for c in comps {
        for (z, &kk) in c.coeffs().iter().zip(k2) {
            let a = z.norm_sqr();
            if a != 0.0 {
                total += w(kk) * a;
            }
        }
    }
    total * grid.volume()
}

fn hdot_sq(comps: &[&SpectralScalar], s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(weighted_sum(comps, |_| 1.0));
    }
    if s < 0.0 {
        let scale = comps.iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max);
        if comps.iter().any(|c| c.coeffs()[0].norm() > 1e-14 * scale) {
            return Err(Error::invalid(format!(
                "Ḣ^{s} is undefined for a field with nonzero mean"
            )));
        }
    }
    Ok(weighted_sum(comps, |k2| {
        if k2 == 0.0 {
            0.0
        } else {
            k2.powf(s)
        }
    }))
}

fn h_sq(comps: &[&SpectralScalar], k: u32) -> f64 {
    weighted_sum(comps, |k2| {
        let mut acc = 1.0;
        let mut p = 1.0;
        for _ in 0..k {
            p *= k2;
            acc += p;
        }
        acc
    })
}

/// Pointwise Euclidean magnitude of several physical component arrays.
pub(crate) fn magnitudes(values: &[Vec<f64>]) -> Vec<f64> {
    let len = values[0].len();
    (0..len)
        .map(|i| values.iter().map(|v| v[i] * v[i]).sum::<f64>().sqrt())
        .collect()
}

/// `L^p` norm of the pointwise magnitude, by equal-weight quadrature.
pub(crate) fn lp_from_magnitudes(mag: &[f64], p: f64, volume: f64) -> f64 {
    if p.is_infinite() {
        return mag.iter().copied().fold(0.0, f64::max);
    }
    let sum: f64 = mag.iter().map(|m| m.powf(p)).sum();
    (sum * volume / mag.len() as f64).powf(1.0 / p)
}

/// `L^p` (or `L^∞` for `p = ∞`) norm of the Euclidean magnitude of a set of
/// components, e.g. a gradient tensor.
pub fn lp_norm_of(comps: &[&SpectralScalar], p: f64, sampling: Sampling) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("L^p needs p >= 1, got {p}")));
    }
    let refined: Vec<SpectralScalar>;
    let comps: Vec<&SpectralScalar> = match sampling {
        Sampling::Collocation => comps.to_vec(),
        Sampling::Refined2x => {
            refined = comps.iter().map(|c| c.refined(2)).collect::<Result<_>>()?;
            refined.iter().collect()
        }
    };
    let grid = comps[0].grid();
    let coeffs: Vec<&[num_complex::Complex64]> = comps.iter().map(|c| c.coeffs()).collect();
    let phys = grid.to_physical_many(&coeffs);
    Ok(lp_from_magnitudes(&magnitudes(&phys), p, grid.volume()))
}

fn norm_of(comps: &[&SpectralScalar], kind: Norm, sampling: Sampling) -> Result<f64> {
    let dim = comps[0].grid().dim() as f64;
    match kind {
        Norm::L2 => Ok(weighted_sum(comps, |_| 1.0).sqrt()),
        Norm::Lp(p) => lp_norm_of(comps, p, sampling),
        Norm::LInf => lp_norm_of(comps, f64::INFINITY, sampling),
        Norm::HDot(s) => Ok(hdot_sq(comps, s)?.sqrt()),
        Norm::H(k) => Ok(h_sq(comps, k).sqrt()),
        Norm::BmoProxy => Ok(hdot_sq(comps, dim / 2.0)?.sqrt()),
    }
}

/// Norm evaluation shared by scalars and vectors (vectors use the pointwise
/// Euclidean magnitude).
pub trait Normed {
    fn components(&self) -> Vec<&SpectralScalar>;

    fn norm(&self, kind: Norm) -> Result<f64> {
        norm_of(&self.components(), kind, Sampling::Collocation)
    }

    fn norm_sampled(&self, kind: Norm, sampling: Sampling) -> Result<f64> {
        norm_of(&self.components(), kind, sampling)
    }

    /// `‖·‖²_{L²}`.
    fn l2_sq(&self) -> f64 {
        weighted_sum(&self.components(), |_| 1.0)
    }

    /// `‖·‖²_{Ḣ^s}`.
    fn hdot_sq(&self, s: f64) -> Result<f64> {
        hdot_sq(&self.components(), s)
    }

    /// `‖∇^m ·‖²_{L²} = V Σ |k|^{2m} |f̂|²`.
    fn grad_pow_sq(&self, m: u32) -> f64 {
        weighted_sum(&self.components(), |k2| k2.powi(m as i32))
    }
}

impl Normed for SpectralScalar {
    fn components(&self) -> Vec<&SpectralScalar> {
        vec![self]
    }
}

impl Normed for SpectralVector {
    fn components(&self) -> Vec<&SpectralScalar> {
        self.comps().iter().collect()
    }
}

/// `∫ f g dx` for real fields.
pub fn inner(f: &SpectralScalar, g: &SpectralScalar) -> f64 {
    let s: f64 = f
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum();
    s * f.grid().volume()
}

/// `∫ v·w dx`.
pub fn inner_vec(v: &SpectralVector, w: &SpectralVector) -> f64 {
    (0..3).map(|i| inner(v.comp(i), w.comp(i))).sum()
}
