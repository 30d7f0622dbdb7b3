//! Theorem constants, bound formulas and calibrated-`C` reporting.
//!
//! Every formula takes the generic constant `C` as an argument. Products of
//! large exponentials are evaluated in logarithms where that avoids spurious
//! overflow, and `0^a = 0` for `a > 0`.

use serde::Serialize;

use super::functionals::{energy_of, magneto_vorticity_of};
use super::record::DiagnosticsRecord;
use crate::models::{MhdState, ModelTag, PhysParams};
use crate::spectral::{curl, Norm, Normed, SpectralVector};
use crate::{Error, Result};

fn h2_sq<F: Normed>(f: &F) -> f64 {
    f.norm(Norm::H(2)).map(|v| v * v).unwrap_or(0.0)
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be > 0, got {v}")))
    }
}

/// `C₀` of the small-magneto-vorticity bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct C0Report {
    pub e0: f64,
    pub mv0_l2_sq: f64,
    pub c0: f64,
    /// `C₀ < 1`.
    pub small: bool,
    /// `|ν−η|/(ν+η)`.
    pub ratio: f64,
    /// `|ν−η|/(ν+η) ≤ 1/8`.
    pub ratio_ok: bool,
}

/// `(‖Ω₀‖² + C𝓔₀(ν−η)²/(ν+η)²) exp(C(𝓔₀+𝓔₀²)/(ν+η)⁴)`.
pub fn c0_formula(mv0_l2_sq: f64, e0: f64, nu: f64, eta: f64, c: f64) -> Result<f64> {
    let s = nu + eta;
    if !(s > 0.0) {
        return Err(Error::invalid("C₀ needs ν + η > 0"));
    }
    let d = nu - eta;
    Ok((mv0_l2_sq + c * e0 * d * d / (s * s)) * (c * (e0 + e0 * e0) / s.powi(4)).exp())
}

pub fn compute_c0(
    u0: Option<&SpectralVector>,
    b0: &SpectralVector,
    p: &PhysParams,
    c: f64,
) -> Result<C0Report> {
    let e0 = energy_of(u0, b0).total();
    let mv0 = magneto_vorticity_of(u0, b0, p.hall).l2_sq;
    let c0 = c0_formula(mv0, e0, p.nu, p.eta, c)?;
    let ratio = (p.nu - p.eta).abs() / (p.nu + p.eta);
    Ok(C0Report {
        e0,
        mv0_l2_sq: mv0,
        c0,
        small: c0 < 1.0,
        ratio,
        ratio_ok: ratio <= 0.125,
    })
}

/// `ln(a^{2e^{−x}} e^{y})` with `a ≥ 0`; `−∞` for `a = 0`.
fn ln_pow_exp(a: f64, x: f64, y: f64) -> f64 {
    if a == 0.0 {
        f64::NEG_INFINITY
    } else {
        2.0 * (-x).exp() * a.ln() + y
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmhdConstants {
    pub h0: f64,
    pub smallness_lhs: f64,
    /// `smallness_lhs ≤ ε η²`.
    pub predicate: bool,
}

/// `𝓗₀ = ‖B₀‖²_{H²} e^{Cη⁻⁴‖∇B₀‖⁴}` and
/// `‖J₀³‖^{2exp(−Cη⁻²‖∇B₀‖²)} exp[Cη⁻²(1+ln𝓗₀)‖∇B₀‖²]`, from the norms.
pub fn emhd_formula(b_h2_sq: f64, grad_b_sq: f64, j3_l2: f64, eta: f64, c: f64) -> (f64, f64) {
    let g = grad_b_sq;
    let ln_h0 = b_h2_sq.ln() + c * g * g / eta.powi(4);
    let x = c * g / (eta * eta);
    let lhs = ln_pow_exp(j3_l2, x, x * (1.0 + ln_h0)).exp();
    (ln_h0.exp(), lhs)
}

pub fn compute_emhd_constants(
    b0: &SpectralVector,
    eta: f64,
    c: f64,
    epsilon: f64,
) -> Result<EmhdConstants> {
    require_positive("eta", eta)?;
    let j3 = curl(b0).comp(2).l2_sq().sqrt();
    let (h0, lhs) = emhd_formula(h2_sq(b0), b0.grad_pow_sq(1), j3, eta, c);
    Ok(EmhdConstants {
        h0,
        smallness_lhs: lhs,
        predicate: lhs <= epsilon * eta * eta,
    })
}

/// `𝓔₁` in 2½D: `(‖Ω₀‖² + C𝓔₀(ν−η)²/(νη)) exp(C𝓔₀/ν²)`.
pub fn e1_25d(mv0_l2_sq: f64, e0: f64, nu: f64, eta: f64, c: f64) -> f64 {
    let d = nu - eta;
    (mv0_l2_sq + c * e0 * d * d / (nu * eta)) * (c * e0 / (nu * nu)).exp()
}

/// `𝓔₁(U_T)` in 3D: `(‖Ω₀‖² + C𝓔₀(ν−η)²/(νη)) exp(C U_T/ν)`.
pub fn e1_3d(mv0_l2_sq: f64, e0: f64, nu: f64, eta: f64, u_t: f64, c: f64) -> f64 {
    let d = nu - eta;
    (mv0_l2_sq + c * e0 * d * d / (nu * eta)) * (c * u_t / nu).exp()
}

/// Right side of the higher magneto-vorticity bound (`ν = η`):
/// `‖Ω₀‖²_{H^k} exp(C𝓔₂/ν²)`.
pub fn bound3_rhs(mv0_hk_sq: f64, e2: f64, nu: f64, c: f64) -> f64 {
    mv0_hk_sq * (c * e2 / (nu * nu)).exp()
}

/// Right side of the non-logarithmic `Δψ` bound:
/// `(‖Δψ₀‖² + Cη⁻³‖B₀‖²‖∇B₀‖²‖ΔB₀‖² e^{Cη⁻⁴‖∇B₀‖⁴}) e^{Cη⁻²‖∇B₀‖²}`.
pub fn psi_without_log_rhs(b0: &SpectralVector, eta: f64, c: f64) -> Result<f64> {
    require_positive("eta", eta)?;
    let dpsi = curl(b0).comp(2).l2_sq();
    let (l2, g, lap) = (b0.l2_sq(), b0.grad_pow_sq(1), b0.grad_pow_sq(2));
    Ok(
        (dpsi + c / eta.powi(3) * l2 * g * lap * (c * g * g / eta.powi(4)).exp())
            * (c * g / (eta * eta)).exp(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HmhdConstants {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub h1: f64,
    pub s1: f64,
    pub h2: f64,
    pub smallness_lhs: f64,
    pub predicate: bool,
}

/// Norms of the initial data entering the 2½D Hall MHD constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HmhdData {
    pub u0_l2_sq: f64,
    pub b0_l2_sq: f64,
    pub grad_b0_sq: f64,
    pub b0_h2_sq: f64,
    pub j3_l2: f64,
    pub mv0_l2_sq: f64,
}

pub fn hmhd_formula(d: &HmhdData, nu: f64, eta: f64, c: f64) -> HmhdConstants {
    let e0 = d.u0_l2_sq + d.b0_l2_sq;
    let e1 = e1_25d(d.mv0_l2_sq, e0, nu, eta, c);
    let e2 = e1 + e0;
    let m = nu.min(eta);
    let h1 = (d.grad_b0_sq + c * e0 * e2 / (eta * m)) * (c * e0 / (nu * eta)).exp();
    let s1 = h1 / (eta * eta) + e0 / (nu * eta);
    let pre = d.b0_h2_sq + c * e0 * e2 / (eta * m) + c * e0 * e2 * e2 / eta.powi(4);
    let ln_h2_part = pre.ln() + c * e2 / (eta * m) + c * h1 * h1 / eta.powi(4);
    let h2 = ln_h2_part.exp() + d.u0_l2_sq;
    let lhs = ln_pow_exp(d.j3_l2, c * s1, c * s1 * (1.0 + h2.ln())).exp();
    HmhdConstants {
        e0,
        e1,
        e2,
        h1,
        s1,
        h2,
        smallness_lhs: lhs,
        predicate: false,
    }
}

pub fn compute_hmhd_constants(
    u0: &SpectralVector,
    b0: &SpectralVector,
    p: &PhysParams,
    c: f64,
    epsilon: f64,
) -> Result<HmhdConstants> {
    require_positive("nu", p.nu)?;
    require_positive("eta", p.eta)?;
    let data = HmhdData {
        u0_l2_sq: u0.l2_sq(),
        b0_l2_sq: b0.l2_sq(),
        grad_b0_sq: b0.grad_pow_sq(1),
        b0_h2_sq: h2_sq(b0),
        j3_l2: curl(b0).comp(2).l2_sq().sqrt(),
        mv0_l2_sq: magneto_vorticity_of(Some(u0), b0, p.hall).l2_sq,
    };
    let mut k = hmhd_formula(&data, p.nu, p.eta, c);
    k.predicate = k.smallness_lhs <= epsilon * p.eta * p.eta;
    Ok(k)
}

/// Smallest `C ≥ 0` with `lhs ≤ rhs(C)`: a geometric scan over
/// `[1e−8, 1e8]` followed by bisection. `None` if no scanned value works.
pub fn calibrate_c(lhs: f64, rhs: impl Fn(f64) -> f64) -> Option<f64> {
    let holds = |c: f64| {
        let r = rhs(c);
        r.is_finite() && lhs <= r
    };
    if holds(0.0) {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1e-8;
    while !holds(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// One trajectory bound: measured left side, evaluated right side at the
/// configured `C`, and the calibrated `C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub calibrated_c: Option<f64>,
}

fn check(name: &'static str, lhs: f64, c: f64, rhs: impl Fn(f64) -> f64) -> BoundCheck {
    let r = rhs(c);
    BoundCheck {
        name,
        lhs,
        rhs: r,
        holds: lhs <= r,
        calibrated_c: calibrate_c(lhs, rhs),
    }
}

fn sup(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> f64) -> f64 {
    records.iter().map(f).fold(0.0, f64::max)
}

/// Evaluates every bound applicable to the model of `initial` along the
/// record series (right sides at the final time).
pub fn bound_report(
    initial: &MhdState,
    records: &[DiagnosticsRecord],
    p: &PhysParams,
    c: f64,
) -> Result<Vec<BoundCheck>> {
    let Some(last) = records.last() else {
        return Ok(Vec::new());
    };
    let (u0, b0) = initial.primitive()?;
    let e0 = energy_of(u0.as_ref(), &b0).total();
    let mv0 = magneto_vorticity_of(u0.as_ref(), &b0, p.hall);
    let (nu, eta) = (p.nu, p.eta);
    let mut out = Vec::new();
    let tag = initial.tag();
    let two_d = initial.grid().dim() == 2;

    if tag.has_velocity() && nu > 0.0 && eta > 0.0 && tag != ModelTag::MagnetoVorticity {
        let mv_sup = sup(records, |r| r.mv_l2);
        let e1 = |c: f64| {
            if two_d {
                e1_25d(mv0.l2_sq, e0, nu, eta, c)
            } else {
                e1_3d(mv0.l2_sq, e0, nu, eta, last.u_t_acc, c)
            }
        };
        out.push(check(
            "magneto_vorticity_l2",
            mv_sup + nu * last.mv_grad_acc,
            c,
            e1,
        ));
        out.push(check(
            "vorticity_l2",
            sup(records, |r| r.omega_l2_sq) + nu.min(eta) * last.omega_grad_acc,
            c,
            |c| e1(c) + e0,
        ));
        if nu == eta {
            out.push(check(
                "magneto_vorticity_h2",
                sup(records, |r| r.mv_h2) + nu * last.mv_grad_h2_acc,
                c,
                |c| bound3_rhs(mv0.h2_sq, e1(c) + e0, nu, c),
            ));
        }
        out.push(check(
            "small_magneto_vorticity",
            mv_sup + 0.5 * (nu + eta) * last.mv_grad_acc,
            c,
            |c| c0_formula(mv0.l2_sq, e0, nu, eta, c).unwrap_or(f64::NAN),
        ));
    }

    if two_d && eta > 0.0 {
        let j3 = curl(&b0).comp(2).l2_sq().sqrt();
        let h2_lhs = sup(records, |r| r.b_h2_sq) + eta * last.grad_b_h2_acc;
        let j3_sup = sup(records, |r| r.j3_l2_sq);
        match (tag, &u0) {
            (ModelTag::EmhdVector | ModelTag::EmhdStream, _) => {
                let (g, bh2) = (b0.grad_pow_sq(1), h2_sq(&b0));
                out.push(BoundCheck {
                    name: "grad_b_dissipation",
                    lhs: sup(records, |r| r.grad_b_l2_sq) + eta * last.delta_b_acc,
                    rhs: g,
                    holds: sup(records, |r| r.grad_b_l2_sq) + eta * last.delta_b_acc <= g,
                    calibrated_c: None,
                });
                out.push(check("emhd_h2", h2_lhs, c, |c| {
                    emhd_formula(bh2, g, j3, eta, c).0
                }));
                out.push(check("emhd_current", j3_sup, c, |c| {
                    emhd_formula(bh2, g, j3, eta, c).1
                }));
            }
            (ModelTag::Hall25d | ModelTag::HmhdStream, Some(u0)) if nu > 0.0 => {
                let data = HmhdData {
                    u0_l2_sq: u0.l2_sq(),
                    b0_l2_sq: b0.l2_sq(),
                    grad_b0_sq: b0.grad_pow_sq(1),
                    b0_h2_sq: h2_sq(&b0),
                    j3_l2: j3,
                    mv0_l2_sq: mv0.l2_sq,
                };
                out.push(check("hmhd_h2", h2_lhs, c, |c| {
                    hmhd_formula(&data, nu, eta, c).h2
                }));
                out.push(check("hmhd_current", j3_sup, c, |c| {
                    hmhd_formula(&data, nu, eta, c).smallness_lhs
                }));
            }
            _ => {}
        }
    }
    Ok(out)
}
