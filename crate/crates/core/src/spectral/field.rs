use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::grid::Grid;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real-valued periodic scalar stored as Fourier coefficients.
#[derive(Clone, Debug)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralScalar {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralScalar {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub(crate) fn from_coeffs_unchecked(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralScalar {
            grid: grid.clone(),
            coeffs,
        }
    }

    /// Analyses physical samples (Nyquist zeroed, not dealiased).
    pub fn from_physical(grid: &Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid("physical array length does not match grid"));
        }
        let mut out = grid.to_spectral_many(&[values]);
        Ok(Self::from_coeffs_unchecked(grid, out.pop().unwrap()))
    }

    /// Samples `f` at the collocation points and analyses it.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::from_physical(grid, &values).expect("length matches by construction")
    }

    /// Single Fourier mode `amp · e^{i m·x} + c.c.` for integer wavenumbers `m`.
    pub fn mode(grid: &Grid, m: &[i64], amp: Complex64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        let idx = grid
            .index_of(m)
            .ok_or_else(|| Error::invalid("wavenumber outside the lattice"))?;
        let neg = grid.neg_index(idx);
        if grid.is_nyquist(idx) {
            return Err(Error::invalid("Nyquist modes are not representable"));
        }
        if idx == neg {
            f.coeffs[idx] = Complex64::new(2.0 * amp.re, 0.0);
        } else {
            f.coeffs[idx] += amp;
            f.coeffs[neg] += amp.conj();
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn to_physical(&self) -> Vec<f64> {
        self.grid.to_physical_many(&[&self.coeffs]).pop().unwrap()
    }

    /// Spatial mean (the zero-mode coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max_k |f̂(k) - conj f̂(-k)|`; zero for a real field.
    pub fn hermitian_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (c - self.coeffs[self.grid.neg_index(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * self.max_abs_coeff().max(f64::MIN_POSITIVE)
    }

    pub fn has_non_finite(&self) -> bool {
        self.coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
    }

    pub fn check_grid(&self, other: &SpectralScalar) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid.spec(),
                other.grid.spec()
            )))
        }
    }

    /// Applies a per-mode multiplier `f̂(k) ← m(idx) f̂(k)`.
    pub fn map_modes(&self, m: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| m(i, c))
            .collect();
        Self::from_coeffs_unchecked(&self.grid, coeffs)
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralScalar) {
        debug_assert!(self.grid.same_as(&other.grid));
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_modes(|_, c| c * a)
    }

    /// Zero-padded copy on a grid with `factor` times the points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let spec = self.grid.spec().clone();
        let fine = super::GridSpec {
            n: spec.n * factor,
            ..spec
        }
        .build()?;
        let mut out = Self::zeros(&fine);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let m = self.grid.mode_of(i);
            let j = fine
                .index_of(&m[..fine.dim()])
                .expect("coarse lattice embeds in fine lattice");
            out.coeffs[j] = *c;
        }
        Ok(out)
    }
}

impl Add for &SpectralScalar {
    type Output = SpectralScalar;
    fn add(self, rhs: &SpectralScalar) -> SpectralScalar {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralScalar {
    type Output = SpectralScalar;
    fn sub(self, rhs: &SpectralScalar) -> SpectralScalar {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SpectralScalar {
    type Output = SpectralScalar;
    fn mul(self, a: f64) -> SpectralScalar {
        self.scaled(a)
    }
}

impl Neg for &SpectralScalar {
    type Output = SpectralScalar;
    fn neg(self) -> SpectralScalar {
        self.scaled(-1.0)
    }
}

/// Three-component real vector field. On a 2D grid the components depend on
/// `(x₁, x₂)` only (the 2½D setting).
#[derive(Clone, Debug)]
pub struct SpectralVector {
    comps: [SpectralScalar; 3],
}

impl SpectralVector {
    pub fn new(comps: [SpectralScalar; 3]) -> Result<Self> {
        comps[0].check_grid(&comps[1])?;
        comps[0].check_grid(&comps[2])?;
        Ok(SpectralVector { comps })
    }

    pub(crate) fn from_parts(comps: [SpectralScalar; 3]) -> Self {
        SpectralVector { comps }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let z = SpectralScalar::zeros(grid);
        SpectralVector {
            comps: [z.clone(), z.clone(), z],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        SpectralVector {
            comps: [
                SpectralScalar::from_fn(grid, |x| f(x)[0]),
                SpectralScalar::from_fn(grid, |x| f(x)[1]),
                SpectralScalar::from_fn(grid, |x| f(x)[2]),
            ],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn comp(&self, i: usize) -> &SpectralScalar {
        &self.comps[i]
    }

    pub fn comp_mut(&mut self, i: usize) -> &mut SpectralScalar {
        &mut self.comps[i]
    }

    pub fn comps(&self) -> &[SpectralScalar; 3] {
        &self.comps
    }

    pub fn comps_mut(&mut self) -> &mut [SpectralScalar; 3] {
        &mut self.comps
    }

    pub fn into_comps(self) -> [SpectralScalar; 3] {
        self.comps
    }

    pub fn to_physical(&self) -> [Vec<f64>; 3] {
        let mut out = self.grid().to_physical_many(&[
            self.comps[0].coeffs(),
            self.comps[1].coeffs(),
            self.comps[2].coeffs(),
        ]);
        let c = out.pop().unwrap();
        let b = out.pop().unwrap();
        let a = out.pop().unwrap();
        [a, b, c]
    }

    pub fn from_physical(grid: &Grid, values: [&[f64]; 3]) -> Result<Self> {
        if values.iter().any(|v| v.len() != grid.len()) {
            return Err(Error::invalid("physical array length does not match grid"));
        }
        let mut out = grid.to_spectral_many(&values);
        let c = out.pop().unwrap();
        let b = out.pop().unwrap();
        let a = out.pop().unwrap();
        Ok(SpectralVector {
            comps: [
                SpectralScalar::from_coeffs_unchecked(grid, a),
                SpectralScalar::from_coeffs_unchecked(grid, b),
                SpectralScalar::from_coeffs_unchecked(grid, c),
            ],
        })
    }

    pub fn check_grid(&self, other: &SpectralVector) -> Result<()> {
        self.comps[0].check_grid(&other.comps[0])
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(f64::MIN_POSITIVE);
        self.comps
            .iter()
            .all(|c| c.hermitian_defect() <= rel_tol * scale)
    }

    pub fn has_non_finite(&self) -> bool {
        self.comps.iter().any(SpectralScalar::has_non_finite)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps
            .iter()
            .map(SpectralScalar::max_abs_coeff)
            .fold(0.0, f64::max)
    }

    /// `max_k |k·v̂(k)| / max_k |v̂(k)|`, zero for the zero field.
    pub fn divergence_defect(&self) -> f64 {
        let grid = self.grid();
        let scale = self.max_abs_coeff();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for idx in 0..grid.len() {
            let mut d = Complex64::new(0.0, 0.0);
            for a in 0..grid.dim() {
                d += self.comps[a].coeffs()[idx] * grid.k(a)[idx];
            }
            worst = worst.max(d.norm());
        }
        worst / scale
    }

    pub fn is_divergence_free(&self, rel_tol: f64) -> bool {
        self.divergence_defect() <= rel_tol
    }

    /// Spatial mean of each component.
    pub fn mean(&self) -> [f64; 3] {
        [
            self.comps[0].mean(),
            self.comps[1].mean(),
            self.comps[2].mean(),
        ]
    }

    pub fn axpy(&mut self, a: f64, other: &SpectralVector) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            x.axpy(a, y);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        SpectralVector {
            comps: [
                self.comps[0].scaled(a),
                self.comps[1].scaled(a),
                self.comps[2].scaled(a),
            ],
        }
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Ok(SpectralVector {
            comps: [
                self.comps[0].refined(factor)?,
                self.comps[1].refined(factor)?,
                self.comps[2].refined(factor)?,
            ],
        })
    }
}

impl Add for &SpectralVector {
    type Output = SpectralVector;
    fn add(self, rhs: &SpectralVector) -> SpectralVector {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralVector {
    type Output = SpectralVector;
    fn sub(self, rhs: &SpectralVector) -> SpectralVector {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SpectralVector {
    type Output = SpectralVector;
    fn mul(self, a: f64) -> SpectralVector {
        self.scaled(a)
    }
}

impl Neg for &SpectralVector {
    type Output = SpectralVector;
    fn neg(self) -> SpectralVector {
        self.scaled(-1.0)
    }
}
