use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shared handle to a grid. Fields hold one of these; cloning is cheap.
pub type Grid = Arc<PeriodicGrid>;

/// Plain description of a periodic grid, as stored in configs and checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of spatial variables, 2 or 3.
    pub dim: usize,
    /// Collocation points per axis (even).
    pub n: usize,
    /// Period per axis. The third entry is ignored for `dim == 2`.
    pub lengths: [f64; 3],
    /// Fraction of `n/2` retained by the dealias mask on every axis.
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize) -> Self {
        GridSpec {
            dim,
            n,
            lengths: [TAU; 3],
            dealias_fraction: 2.0 / 3.0,
        }
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.lengths = [length; 3];
        self
    }

    pub fn with_dealias_fraction(mut self, fraction: f64) -> Self {
        self.dealias_fraction = fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::invalid(format!(
                "grid dim must be 2 or 3, got {}",
                self.dim
            )));
        }
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "points per axis must be even and >= 4, got {}",
                self.n
            )));
        }
        if self.lengths[..self.dim]
            .iter()
            .any(|l| !(l.is_finite() && *l > 0.0))
        {
            return Err(Error::invalid("axis lengths must be finite and positive"));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::invalid("dealias fraction must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn build(self) -> Result<Grid> {
        PeriodicGrid::new(self)
    }
}

/// Discretisation of the torus with precomputed wavenumber tables, dealias
/// mask and FFT plans.
///
/// Storage is row-major with axis 0 (x₁) slowest. The index `i` along an axis
/// carries the integer wavenumber `i` for `i <= n/2` and `i - n` otherwise,
/// so the lattice is `{-n/2+1, …, n/2}`; the Nyquist index `n/2` is kept
/// identically zero in every field.
pub struct PeriodicGrid {
    spec: GridSpec,
    len: usize,
    strides: [usize; 3],
    /// Physical wavenumbers `2π m / L` per axis, per mode. Axis 2 is all
    /// zeros on a 2D grid.
    k: [Vec<f64>; 3],
    k2: Vec<f64>,
    mask: Vec<bool>,
    nyquist: Vec<bool>,
    neg: Vec<usize>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("spec", &self.spec)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

/// Signed integer wavenumber for storage index `i` on an axis of `n` points.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl PeriodicGrid {
    pub fn new(spec: GridSpec) -> Result<Grid> {
        spec.validate()?;
        let n = spec.n;
        let dim = spec.dim;
        let len = n.pow(dim as u32);
        let mut strides = [0usize; 3];
        for (a, s) in strides.iter_mut().enumerate().take(dim) {
            *s = n.pow((dim - 1 - a) as u32);
        }
        let cutoff = spec.dealias_fraction * (n / 2) as f64;

        let mut k = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let mut k2 = vec![0.0; len];
        let mut mask = vec![true; len];
        let mut nyquist = vec![false; len];
        let mut neg = vec![0usize; len];
        for idx in 0..len {
            let mut neg_idx = 0;
            for a in 0..dim {
                let i = (idx / strides[a]) % n;
                let m = signed_index(i, n);
                let ka = TAU / spec.lengths[a] * m as f64;
                k[a][idx] = ka;
                k2[idx] += ka * ka;
                if i == n / 2 {
                    nyquist[idx] = true;
                    mask[idx] = false;
                }
                if (m.unsigned_abs() as f64) > cutoff + 1e-12 {
                    mask[idx] = false;
                }
                neg_idx += ((n - i) % n) * strides[a];
            }
            neg[idx] = neg_idx;
        }

        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Arc::new(PeriodicGrid {
            spec,
            len,
            strides,
            k,
            k2,
            mask,
            nyquist,
            neg,
            fwd,
            inv,
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Number of modes (equal to the number of collocation points).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Physical wavenumber component along `axis` for every mode.
    pub fn k(&self, axis: usize) -> &[f64] {
        &self.k[axis]
    }

    /// `|k|²` per mode.
    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    /// Dealias mask: `true` for retained modes.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.nyquist[idx]
    }

    /// Storage index of the mode `-k`.
    pub fn neg_index(&self, idx: usize) -> usize {
        self.neg[idx]
    }

    /// Domain volume (area in 2D).
    pub fn volume(&self) -> f64 {
        self.spec.lengths[..self.dim()].iter().product()
    }

    /// Smallest grid spacing over the axes.
    pub fn dx(&self) -> f64 {
        self.spec.lengths[..self.dim()]
            .iter()
            .map(|l| l / self.n() as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// Storage index of the mode with the given signed integer wavenumbers.
    pub fn index_of(&self, m: &[i64]) -> Option<usize> {
        let n = self.n() as i64;
        if m.len() != self.dim() {
            return None;
        }
        let mut idx = 0;
        for (a, &ma) in m.iter().enumerate() {
            if ma <= -n / 2 || ma > n / 2 {
                return None;
            }
            idx += (ma.rem_euclid(n) as usize) * self.strides[a];
        }
        Some(idx)
    }

    /// Signed integer wavenumbers of a storage index.
    pub fn mode_of(&self, idx: usize) -> [i64; 3] {
        let mut m = [0i64; 3];
        for (a, ma) in m.iter_mut().enumerate().take(self.dim()) {
            *ma = signed_index((idx / self.strides[a]) % self.n(), self.n());
        }
        m
    }

    /// Physical coordinates of collocation point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (a, xa) in x.iter_mut().enumerate().take(self.dim()) {
            let i = (idx / self.strides[a]) % self.n();
            *xa = i as f64 * self.spec.lengths[a] / self.n() as f64;
        }
        x
    }

    pub(crate) fn same_as(&self, other: &PeriodicGrid) -> bool {
        std::ptr::eq(self, other) || self.spec == other.spec
    }

    fn fft_axis(&self, data: &mut [Complex64], axis: usize, forward: bool) {
        let n = self.n();
        let plan = if forward { &self.fwd } else { &self.inv };
        let stride = self.strides[axis];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        if stride == 1 {
            plan.process_with_scratch(data, &mut scratch);
            return;
        }
        let block = n * stride;
        let mut buf: Vec<Complex64> = Vec::with_capacity(block);
        for chunk in data.chunks_mut(block) {
            buf.clear();
            buf.extend(
                (0..stride)
                    .flat_map(|j| (0..n).map(move |t| t * stride + j))
                    .map(|i| chunk[i]),
            );
            plan.process_with_scratch(&mut buf, &mut scratch);
            for t in 0..n {
                let row = &mut chunk[t * stride..(t + 1) * stride];
                for (j, v) in row.iter_mut().enumerate() {
                    *v = buf[j * n + t];
                }
            }
        }
    }

    /// Unnormalised multi-dimensional DFT in place.
    fn fft_all(&self, data: &mut [Complex64], forward: bool) {
        for axis in (0..self.dim()).rev() {
            self.fft_axis(data, axis, forward);
        }
    }

    /// Forward transform of one complex physical array, normalised so that
    /// `f(x) = Σ_k f̂_k e^{ik·x}`.
    pub fn forward_complex(&self, data: &mut [Complex64]) {
        self.fft_all(data, true);
        let scale = 1.0 / self.len as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Inverse of [`forward_complex`](Self::forward_complex).
    pub fn inverse_complex(&self, data: &mut [Complex64]) {
        self.fft_all(data, false);
    }

    /// Synthesises physical values of several Hermitian coefficient arrays.
    /// Fields are packed two at a time into one complex transform.
    pub fn to_physical_many(&self, fields: &[&[Complex64]]) -> Vec<Vec<f64>> {
        let pairs: Vec<&[&[Complex64]]> = fields.chunks(2).collect();
        let out: Vec<Vec<Vec<f64>>> = map_maybe_parallel(&pairs, |pair| {
            let mut buf: Vec<Complex64> = match pair {
                [a, b] => a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
                    .collect(),
                [a] => a.to_vec(),
                _ => unreachable!(),
            };
            self.inverse_complex(&mut buf);
            if pair.len() == 2 {
                let re = buf.iter().map(|c| c.re).collect();
                let im = buf.iter().map(|c| c.im).collect();
                vec![re, im]
            } else {
                vec![buf.iter().map(|c| c.re).collect()]
            }
        });
        out.into_iter().flatten().collect()
    }

    /// Analyses several real physical arrays into exactly Hermitian,
    /// Nyquist-free coefficient arrays (not dealiased).
    pub fn to_spectral_many(&self, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
        let pairs: Vec<&[&[f64]]> = fields.chunks(2).collect();
        let out: Vec<Vec<Vec<Complex64>>> = map_maybe_parallel(&pairs, |pair| {
            let mut buf: Vec<Complex64> = match pair {
                [a, b] => a
                    .iter()
                    .zip(b.iter())
                    .map(|(&x, &y)| Complex64::new(x, y))
                    .collect(),
                [a] => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                _ => unreachable!(),
            };
            self.forward_complex(&mut buf);
            let zero = Complex64::new(0.0, 0.0);
            let sym = |idx: usize| (buf[idx], buf[self.neg[idx]].conj());
            let first: Vec<Complex64> = (0..self.len)
                .map(|idx| {
                    if self.nyquist[idx] {
                        return zero;
                    }
                    let (h, hn) = sym(idx);
                    (h + hn) * 0.5
                })
                .collect();
            let second: Vec<Complex64> = if pair.len() == 2 {
                (0..self.len)
                    .map(|idx| {
                        if self.nyquist[idx] {
                            return zero;
                        }
                        let (h, hn) = sym(idx);
                        // (h - conj h(-k)) / 2i
                        let d = h - hn;
                        Complex64::new(d.im * 0.5, -d.re * 0.5)
                    })
                    .collect()
            } else {
                Vec::new()
            };
            if pair.len() == 2 {
                vec![first, second]
            } else {
                vec![first]
            }
        });
        out.into_iter().flatten().collect()
    }
}

/// Maps over `items` on the rayon pool, or inline when the pool has a single
/// thread (handing work to one worker only adds cross-thread allocation
/// traffic).
fn map_maybe_parallel<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if rayon::current_num_threads() > 1 {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}
