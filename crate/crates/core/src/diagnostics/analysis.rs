//! Time-series utilities: trapezoidal accumulators, power-law fits,
//! monotonicity monitors and the Grönwall-type inequality check.

use serde::{Deserialize, Serialize};

use super::record::DiagnosticsRecord;
use crate::spectral::SpectralScalar;
use crate::{Error, Result};

/// Running trapezoidal integral `∫ g dt` fed one sample at a time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulator {
    pub value: f64,
    pub last: Option<(f64, f64)>,
}

impl Accumulator {
    /// Adds the sample `g(t)`; the first sample only anchors the integral.
    pub fn push(&mut self, t: f64, g: f64) {
        if let Some((t0, g0)) = self.last {
            self.value += 0.5 * (t - t0) * (g0 + g);
        }
        self.last = Some((t, g));
    }

    /// Value after adding `g` over a step of length `dt`, without mutating.
    pub fn peek(&self, dt: f64, g: f64) -> f64 {
        match self.last {
            Some((_, g0)) => self.value + 0.5 * dt * (g0 + g),
            None => self.value,
        }
    }
}

/// One trapezoidal step of `U_T = ∫ ‖u‖²_{Ḣ^{d/2}} dt`: returns the new
/// accumulated value given the previous integrand sample.
pub fn accumulate_u_t(prev_acc: f64, prev_integrand: f64, integrand: f64, dt: f64) -> f64 {
    prev_acc + 0.5 * dt * (prev_integrand + integrand)
}

/// One trapezoidal step of the `X^r` accumulator for a field given by its
/// components. Returns `(new accumulated value, integrand at the new time)`.
pub fn xr_accumulate(
    prev_acc: f64,
    prev_integrand: f64,
    field: &[&SpectralScalar],
    r: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    let g = super::functionals::xr_integrand(field, r)?;
    Ok((prev_acc + 0.5 * dt * (prev_integrand + g), g))
}

/// `Γ = exp(−λ ∫ ‖u‖²_{Ḣ^{d/2}} dt)`.
pub fn gamma_weight(u_acc: f64, lambda: f64) -> f64 {
    (-lambda * u_acc).exp()
}

/// Least-squares fit of `v ≈ c (1+t)^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    /// `ln c`.
    pub intercept: f64,
    /// Root-mean-square residual in `ln v`.
    pub residual: f64,
    pub samples: usize,
}

/// Fits `ln v = ln c + p ln(1+t)` over samples with `t` inside `window`
/// (inclusive).
pub fn fit_decay_exponent(t: &[f64], v: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if t.len() != v.len() {
        return Err(Error::invalid("time and value series differ in length"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&ti, &vi) in t.iter().zip(v) {
        if ti < window.0 || ti > window.1 {
            continue;
        }
        if !(vi > 0.0) || !vi.is_finite() {
            return Err(Error::invalid(format!(
                "nonpositive value {vi} at t = {ti}"
            )));
        }
        xs.push((1.0 + ti).ln());
        ys.push(vi.ln());
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::invalid(
            "fewer than two samples inside the fit window",
        ));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit window contains a single time"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let p = sxy / sxx;
    let c = my - p * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c - p * x).powi(2))
        .sum();
    Ok(DecayFit {
        exponent: p,
        intercept: c,
        residual: (ss / nf).sqrt(),
        samples: n,
    })
}

/// Inequality monitored along a record series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MonitorKind {
    /// `‖∇B‖²` may not grow by more than `rel_tol` (relative to the previous
    /// record) while `‖Δψ‖²` stays at or below `delta_psi_threshold`.
    GradBNonincreasing {
        rel_tol: f64,
        delta_psi_threshold: f64,
    },
    /// Finite-difference estimate of `d/dt‖∇B‖² + η‖ΔB‖²` (trapezoidal in
    /// `‖ΔB‖²`) may not exceed `tol`.
    GradBDissipation { eta: f64, tol: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    /// Index of the later record of the offending pair.
    pub index: usize,
    pub time: f64,
    /// Amount by which the inequality fails.
    pub excess: f64,
}

pub fn monotonicity_monitor(records: &[DiagnosticsRecord], kind: MonitorKind) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, w) in records.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        let excess = match kind {
            MonitorKind::GradBNonincreasing {
                rel_tol,
                delta_psi_threshold,
            } => {
                let small = [a, b]
                    .iter()
                    .all(|r| r.delta_psi_l2_sq.is_none_or(|d| d <= delta_psi_threshold));
                if !small {
                    continue;
                }
                b.grad_b_l2_sq - a.grad_b_l2_sq * (1.0 + rel_tol)
            }
            MonitorKind::GradBDissipation { eta, tol } => {
                let dt = b.time - a.time;
                if dt <= 0.0 {
                    continue;
                }
                let rate = (b.grad_b_l2_sq - a.grad_b_l2_sq) / dt
                    + eta * 0.5 * (a.delta_b_l2_sq + b.delta_b_l2_sq);
                rate - tol
            }
        };
        if excess > 0.0 {
            out.push(Violation {
                index: i + 1,
                time: b.time,
                excess,
            });
        }
    }
    out
}

/// Sampled inputs of the Grönwall-type inequality
/// `X' + (1 + β(1 − X^α)) D ≤ E + W X`.
#[derive(Clone, Copy, Debug)]
pub struct GronwallSamples<'a> {
    pub t: &'a [f64],
    pub x: &'a [f64],
    pub d: &'a [f64],
    pub e: &'a [f64],
    pub w: &'a [f64],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GronwallReport {
    /// Hypothesis holds at every interval midpoint within `fd_tol`.
    pub hypothesis_holds: bool,
    /// Smallest slack of the hypothesis (negative when violated).
    pub hypothesis_margin: f64,
    /// `(X(0) + ∫E) exp(∫W)` over the whole window.
    pub gate: f64,
    /// `None` when the gate is closed (`gate ≥ 1`) and the conclusion is not
    /// asserted.
    pub conclusion_holds: Option<bool>,
    /// Smallest slack of `X(t) + ∫₀ᵗD ≤ (X(0) + ∫₀ᵗE) exp(∫₀ᵗW)`.
    pub margin: f64,
}

/// Checks the hypothesis by centred finite differences and, when the
/// smallness gate is open, the conclusion at every sample. Integrals are
/// trapezoidal.
pub fn gronwall_verify(
    s: GronwallSamples<'_>,
    alpha: f64,
    beta: f64,
    fd_tol: f64,
) -> Result<GronwallReport> {
    let n = s.t.len();
    if [s.x.len(), s.d.len(), s.e.len(), s.w.len()]
        .iter()
        .any(|&l| l != n)
    {
        return Err(Error::invalid("Grönwall samples differ in length"));
    }
    if n < 2 {
        return Err(Error::invalid("Grönwall check needs at least two samples"));
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(Error::invalid("Grönwall check needs alpha, beta >= 0"));
    }
    let h = s.t[1] - s.t[0];
    if !(h > 0.0) {
        return Err(Error::invalid("sample times must increase"));
    }
    for w in s.t.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(w[1].abs()) {
            return Err(Error::invalid("Grönwall check needs a uniform sample grid"));
        }
    }
    let mid = |v: &[f64], i: usize| 0.5 * (v[i] + v[i + 1]);
    let mut hyp_margin = f64::INFINITY;
    for i in 0..n - 1 {
        let xm = mid(s.x, i);
        let lhs = (s.x[i + 1] - s.x[i]) / h + (1.0 + beta * (1.0 - xm.powf(alpha))) * mid(s.d, i);
        let rhs = mid(s.e, i) + mid(s.w, i) * xm;
        hyp_margin = hyp_margin.min(rhs - lhs);
    }
    let mut int_d = 0.0;
    let mut int_e = 0.0;
    let mut int_w = 0.0;
    let mut margin = f64::INFINITY;
    for i in 0..n {
        if i > 0 {
            int_d += h * mid(s.d, i - 1);
            int_e += h * mid(s.e, i - 1);
            int_w += h * mid(s.w, i - 1);
        }
        let slack = (s.x[0] + int_e) * int_w.exp() - (s.x[i] + int_d);
        margin = margin.min(slack);
    }
    let gate = (s.x[0] + int_e) * int_w.exp();
    Ok(GronwallReport {
        hypothesis_holds: hyp_margin >= -fd_tol,
        hypothesis_margin: hyp_margin,
        gate,
        conclusion_holds: (gate < 1.0).then_some(margin >= -fd_tol),
        margin,
    })
}
