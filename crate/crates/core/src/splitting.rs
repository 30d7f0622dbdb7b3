//! Whole-space radial surrogate for Fourier-splitting decay.
//!
//! A radially symmetric profile on ℝ³ is represented by `|f̂(|ξ|)|` sampled
//! on a logarithmic radius grid. Only the linear heat semigroup acts on it;
//! the nonlinear whole-space problem is out of scope.

use std::io::Write;

use serde::Serialize;

use crate::{Error, Result};

pub const DEFAULT_R_MIN: f64 = 1e-4;
pub const DEFAULT_R_MAX: f64 = 1e2;
pub const DEFAULT_NODES: usize = 4096;
/// Fit window `[t_min, t_max]` of [`verify_splitting_decay`].
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (10.0, 1000.0);

#[derive(Clone, Debug, PartialEq)]
pub struct RadialSpectrum {
    radii: Vec<f64>,
    amplitude: Vec<f64>,
}

/// `n` log-spaced radii from `r_min` to `r_max` inclusive.
pub fn log_radii(r_min: f64, r_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || n < 2 {
        return Err(Error::invalid(format!(
            "radial grid needs 0 < r_min < r_max and at least two nodes (got {r_min}, {r_max}, {n})"
        )));
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                r_max
            } else {
                (a + step * i as f64).exp()
            }
        })
        .collect())
}

impl RadialSpectrum {
    pub fn new(radii: Vec<f64>, amplitude: Vec<f64>) -> Result<Self> {
        if radii.len() != amplitude.len() || radii.len() < 2 {
            return Err(Error::invalid(
                "radii and amplitudes must have equal length >= 2",
            ));
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "radii must be positive and strictly increasing",
            ));
        }
        if let Some(a) = amplitude.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::invalid(format!(
                "amplitudes must be finite and >= 0, found {a}"
            )));
        }
        Ok(RadialSpectrum { radii, amplitude })
    }

    /// Samples `profile` on the default grid.
    pub fn from_fn(profile: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn_on(DEFAULT_R_MIN, DEFAULT_R_MAX, DEFAULT_NODES, profile)
    }

    pub fn from_fn_on(
        r_min: f64,
        r_max: f64,
        nodes: usize,
        profile: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let radii = log_radii(r_min, r_max, nodes)?;
        let amplitude = radii.iter().map(|&r| profile(r)).collect();
        Self::new(radii, amplitude)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }
}

/// `sup_{r ≤ 1} r^σ a(r)` over grid nodes.
pub fn low_freq_sup(spec: &RadialSpectrum, sigma: f64) -> Result<f64> {
    if !(-1.0..1.5).contains(&sigma) {
        return Err(Error::invalid(format!(
            "sigma must lie in [-1, 3/2), got {sigma}"
        )));
    }
    spec.radii
        .iter()
        .zip(&spec.amplitude)
        .filter(|(r, _)| **r <= 1.0)
        .map(|(r, a)| r.powf(sigma) * a)
        .reduce(f64::max)
        .ok_or_else(|| Error::invalid("no radial nodes at or below 1"))
}

/// `a(r) e^{−νtr²}`.
pub fn heat_evolve(spec: &RadialSpectrum, nu: f64, t: f64) -> Result<RadialSpectrum> {
    if !(nu >= 0.0 && t >= 0.0 && (nu * t).is_finite()) {
        return Err(Error::invalid(format!(
            "heat evolution needs nu, t >= 0 (got {nu}, {t})"
        )));
    }
    let amplitude = spec
        .radii
        .iter()
        .zip(&spec.amplitude)
        .map(|(r, a)| a * (-nu * t * r * r).exp())
        .collect();
    Ok(RadialSpectrum {
        radii: spec.radii.clone(),
        amplitude,
    })
}

/// `4π ∫ r² a(r)² dr`, trapezoidal in `ln r` (integrand `r³ a²`). Mass below
/// the first node is not counted.
pub fn l2_norm_sq(spec: &RadialSpectrum) -> f64 {
    let g: Vec<f64> = spec
        .radii
        .iter()
        .zip(&spec.amplitude)
        .map(|(r, a)| r * r * r * a * a)
        .collect();
    let mut sum = 0.0;
    for i in 1..g.len() {
        sum += 0.5 * (spec.radii[i].ln() - spec.radii[i - 1].ln()) * (g[i] + g[i - 1]);
    }
    4.0 * std::f64::consts::PI * sum
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplittingDecay {
    pub sigma: f64,
    pub nu: f64,
    pub times: Vec<f64>,
    pub l2_sq: Vec<f64>,
    /// Least-squares slope of `ln ‖f(t)‖²` against `ln t`.
    pub exponent: f64,
}

impl SplittingDecay {
    /// Expected algebraic rate `−(3/2 − σ)`.
    pub fn expected(&self) -> f64 {
        -(1.5 - self.sigma)
    }

    /// Columns `t, l2_sq, exponent`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        out.write_record(["t", "l2_sq", "exponent"]).map_err(io)?;
        for (t, v) in self.times.iter().zip(&self.l2_sq) {
            out.write_record([t.to_string(), v.to_string(), self.exponent.to_string()])
                .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `n` log-spaced times over `window`.
pub fn log_times(window: (f64, f64), n: usize) -> Result<Vec<f64>> {
    log_radii(window.0, window.1, n)
}

/// Evolves `a = r^{−σ} χ_{r≤1}` by the heat semigroup, samples `‖f(t)‖²`
/// on `t_grid` and fits the power of `t`. The fit is in `ln t`; past the
/// transient `(1+t)` and `t` carry the same exponent.
pub fn verify_splitting_decay(sigma: f64, nu: f64, t_grid: &[f64]) -> Result<SplittingDecay> {
    if sigma >= 1.5 {
        return Err(Error::invalid(format!(
            "sigma = {sigma}: the low-frequency weight r^(-sigma) is not square integrable near 0 for sigma >= 3/2"
        )));
    }
    if !(-1.0..=1.0).contains(&sigma) {
        return Err(Error::invalid(format!(
            "sigma must lie in [-1, 1], got {sigma}"
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::invalid(format!("nu must be > 0, got {nu}")));
    }
    if t_grid.len() < 2 || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::invalid(
            "time grid needs at least two positive times",
        ));
    }
    let base = RadialSpectrum::from_fn(|r| if r <= 1.0 { r.powf(-sigma) } else { 0.0 })?;
    let l2_sq = t_grid
        .iter()
        .map(|&t| heat_evolve(&base, nu, t).map(|s| l2_norm_sq(&s)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = l2_sq.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(SplittingDecay {
        sigma,
        nu,
        times: t_grid.to_vec(),
        l2_sq,
        exponent: sxy / sxx,
    })
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `∫₀¹ (1−θ)^{−α} θ^{−β} dθ` for `0 < α, β < 1`, `α + β = 1`, which equals
/// `∫₀ᵗ (t−τ)^{−α} τ^{−β} dτ` and `π / sin(πβ)`.
///
/// Tanh-sinh quadrature: with `θ = 1/(1 + e^{−π sinh s})` both endpoint
/// singularities become double-exponentially decaying tails, and the
/// integrand is evaluated in log form so nothing underflows to `0^{−α}`.
pub fn beta_convolution_bound(alpha: f64, beta: f64) -> Result<f64> {
    let inside = |v: f64| v > 0.0 && v < 1.0;
    if !(inside(alpha) && inside(beta)) {
        return Err(Error::invalid(format!(
            "alpha and beta must lie in (0, 1), got ({alpha}, {beta})"
        )));
    }
    if (alpha + beta - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "alpha + beta must equal 1, got {}",
            alpha + beta
        )));
    }
    let pi = std::f64::consts::PI;
    let term = |s: f64| {
        let x = pi * s.sinh();
        let ln_theta = -softplus(-x);
        let ln_comp = -softplus(x);
        ((1.0 - beta) * ln_theta + (1.0 - alpha) * ln_comp).exp() * pi * s.cosh()
    };
    let sum_at = |h: f64, offset: f64| {
        let mut sum = 0.0;
        let mut k = 0usize;
        loop {
            let s = offset + h * k as f64;
            let t = term(s) + if s > 0.0 { term(-s) } else { 0.0 };
            sum += t;
            if s > 1.0 && t < 1e-18 * sum.abs() || s > 12.0 {
                break;
            }
            k += 1;
        }
        sum
    };
    // Halving the step reuses the previous nodes and adds the midpoints.
    let mut h = 0.5;
    let mut total = sum_at(h, 0.0);
    let mut value = h * total;
    for _ in 0..12 {
        total += sum_at(h, 0.5 * h);
        h *= 0.5;
        let next = h * total;
        let done = (next - value).abs() <= 1e-15 * next.abs();
        value = next;
        if done {
            break;
        }
    }
    Ok(value)
}
