//! Functionals of a single state.

use num_complex::Complex64;

use crate::models::{
    physical, rhs_hall_mhd_25d, rhs_hall_mhd_literal, rhs_magneto_vorticity, MhdState, PhysParams,
};
use crate::spectral::{
    curl, derivative, inner, laplacian, lp_norm_of, Norm, Normed, Sampling, SpectralScalar,
    SpectralVector,
};
use crate::{Error, Result};

/// `‖u‖²`, `‖B‖²`, `‖∇u‖²`, `‖∇B‖²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyFunctionals {
    pub energy_u: f64,
    pub energy_b: f64,
    pub diss_u: f64,
    pub diss_b: f64,
}

impl EnergyFunctionals {
    pub fn total(&self) -> f64 {
        self.energy_u + self.energy_b
    }
}

pub fn energy_of(u: Option<&SpectralVector>, b: &SpectralVector) -> EnergyFunctionals {
    let (energy_u, diss_u) = u.map_or((0.0, 0.0), |u| (u.l2_sq(), u.grad_pow_sq(1)));
    EnergyFunctionals {
        energy_u,
        energy_b: b.l2_sq(),
        diss_u,
        diss_b: b.grad_pow_sq(1),
    }
}

pub fn energy_functionals(s: &MhdState) -> Result<EnergyFunctionals> {
    let (u, b) = s.primitive()?;
    Ok(energy_of(u.as_ref(), &b))
}

/// `Ω = B + hω` together with `‖Ω‖²` in `L²`, `H¹`, `H²`.
#[derive(Clone, Debug)]
pub struct MagnetoVorticity {
    pub field: SpectralVector,
    pub l2_sq: f64,
    pub h1_sq: f64,
    pub h2_sq: f64,
}

pub fn magneto_vorticity_of(
    u: Option<&SpectralVector>,
    b: &SpectralVector,
    h: f64,
) -> MagnetoVorticity {
    let mut field = b.clone();
    if let Some(u) = u {
        if h != 0.0 {
            field.axpy(h, &curl(u));
        }
    }
    let h1 = field.norm(Norm::H(1)).unwrap_or(0.0);
    let h2 = field.norm(Norm::H(2)).unwrap_or(0.0);
    MagnetoVorticity {
        l2_sq: field.l2_sq(),
        h1_sq: h1 * h1,
        h2_sq: h2 * h2,
        field,
    }
}

pub fn magneto_vorticity(s: &MhdState, h: f64) -> Result<MagnetoVorticity> {
    let (u, b) = s.primitive()?;
    Ok(magneto_vorticity_of(u.as_ref(), &b, h))
}

/// `‖u‖²_{Ḣ^{d/2}}`, the BMO proxy.
pub fn bmo_proxy_sq(u: &SpectralVector) -> f64 {
    let s = u.grid().dim() as f64 / 2.0;
    u.hdot_sq(s).expect("positive order never fails")
}

/// Time integrand of the `X^r` norm for a field given by its components:
/// `‖f‖²_{Ḣ¹}` for `r = 2`, `‖f‖^r_{L^{r'}}` with `r' = 2r/(r−2)` for `r > 2`.
pub fn xr_integrand(comps: &[&SpectralScalar], r: f64) -> Result<f64> {
    if !r.is_finite() || r < 2.0 {
        return Err(Error::invalid(format!("X^r needs 2 <= r < ∞, got {r}")));
    }
    if r == 2.0 {
        return Ok(comps.iter().map(|c| c.grad_pow_sq(1)).sum());
    }
    let rp = conjugate_exponent(r);
    Ok(lp_norm_of(comps, rp, Sampling::Collocation)?.powf(r))
}

/// `r'` with `1/r + 1/r' = 1/2`.
pub fn conjugate_exponent(r: f64) -> f64 {
    2.0 * r / (r - 2.0)
}

/// Gradients of the four single components used by the blow-up criteria:
/// `∇B³`, `∇B̃`, `∇ω³`, `∇ω̃` (with `ω = ∇×u`), each as a list of
/// scalar components.
pub fn blowup_components(
    u: Option<&SpectralVector>,
    b: &SpectralVector,
) -> [Vec<SpectralScalar>; 4] {
    let dim = b.grid().dim();
    let grad = |fs: &[&SpectralScalar]| -> Vec<SpectralScalar> {
        let mut out = Vec::new();
        for f in fs {
            for a in 0..dim {
                out.push(derivative(f, a));
            }
        }
        out
    };
    let w = match u {
        Some(u) => curl(u),
        None => SpectralVector::zeros(b.grid()),
    };
    [
        grad(&[b.comp(2)]),
        grad(&[b.comp(0), b.comp(1)]),
        grad(&[w.comp(2)]),
        grad(&[w.comp(0), w.comp(1)]),
    ]
}

fn max3(a: f64, b: f64, c: f64) -> f64 {
    a.max(b).max(c)
}

/// Relative `L²` residual of `h∇×(∂ₜu) + ∂ₜB − ∂ₜΩ` for `Ω = B + hω`, over
/// the largest of the three term norms. Zero for the zero state.
pub fn hall_cancellation_residual_of(
    u: &SpectralVector,
    b: &SpectralVector,
    p: &PhysParams,
) -> Result<f64> {
    let (du, db) = if u.grid().dim() == 2 {
        rhs_hall_mhd_25d(u, b, p)?
    } else {
        rhs_hall_mhd_literal(u, b, p)?
    };
    let mut omega = b.clone();
    omega.axpy(p.hall, &curl(u));
    let dmv = rhs_magneto_vorticity(&omega, u, b, p)?;
    let hcu = curl(&du).scaled(p.hall);
    let lhs = &hcu + &db;
    let res = (&lhs - &dmv).l2_sq().sqrt();
    let scale = max3(hcu.l2_sq(), db.l2_sq(), dmv.l2_sq()).sqrt();
    Ok(if scale == 0.0 { 0.0 } else { res / scale })
}

/// Hall-cancellation residual of any state carrying a velocity.
pub fn hall_cancellation_residual(s: &MhdState, p: &PhysParams) -> Result<f64> {
    match s.primitive()? {
        (Some(u), b) => hall_cancellation_residual_of(&u, &b, p),
        (None, _) => Err(Error::InvalidMode(format!(
            "{} has no velocity; the magneto-vorticity is undefined",
            s.tag()
        ))),
    }
}

/// The three integrals of the double integration by parts for `Δψ`:
/// `I₁ = ∫Δ(∇B³·∇⊥ψ)Δψ`, `I₂ = ∫(∇Δψ·∇⊥ψ)ΔB³`,
/// `I₃ = Σₖ∫(∇∂ₖB³·∇⊥∂ₖψ)Δψ`.
pub fn delta_psi_integrals(psi: &SpectralScalar, b3: &SpectralScalar) -> Result<[f64; 3]> {
    if psi.grid().dim() != 2 {
        return Err(Error::InvalidMode("the Δψ identity is 2½D only".into()));
    }
    psi.check_grid(b3)?;
    // Triple products of band-limited fields are integrated exactly on the
    // 2x padded grid.
    let psi = psi.refined(2)?;
    let b3 = b3.refined(2)?;
    let grid = psi.grid().clone();
    let lap_psi = laplacian(&psi);
    let d = |f: &SpectralScalar, a: usize| derivative(f, a);
    let bracket = |f: &SpectralScalar, g: &SpectralScalar| -> SpectralScalar {
        // ∇f·∇⊥g with ∇⊥ = (∂₂, −∂₁)
        let ph = physical(&[&d(f, 0), &d(f, 1), &d(g, 0), &d(g, 1)]);
        let v: Vec<f64> = (0..grid.len())
            .map(|x| ph[0][x] * ph[3][x] - ph[1][x] * ph[2][x])
            .collect();
        SpectralScalar::from_physical(&grid, &v).expect("grid-sized buffer")
    };
    let i1 = inner(&laplacian(&bracket(&b3, &psi)), &lap_psi);
    let i2 = inner(&bracket(&lap_psi, &psi), &laplacian(&b3));
    let mut i3 = 0.0;
    for k in 0..2 {
        i3 += inner(&bracket(&d(&b3, k), &d(&psi, k)), &lap_psi);
    }
    Ok([i1, i2, i3])
}

/// `|I₁ + I₂ − 2I₃| / max(|I₁|, |I₂|, |2I₃|)`; zero when all terms vanish.
pub fn delta_psi_identity_residual(psi: &SpectralScalar, b3: &SpectralScalar) -> Result<f64> {
    let [i1, i2, i3] = delta_psi_integrals(psi, b3)?;
    let scale = max3(i1.abs(), i2.abs(), 2.0 * i3.abs());
    Ok(if scale == 0.0 {
        0.0
    } else {
        (i1 + i2 - 2.0 * i3).abs() / scale
    })
}

/// `‖f‖_∞ / (‖∇f‖ [1 + √ln(‖f‖²_{H²}/‖∇f‖²)])`, the logarithm clamped at 0.
pub fn log_sobolev_ratio<F: Normed>(f: &F) -> Result<f64> {
    let comps = f.components();
    if comps[0].grid().dim() != 2 {
        return Err(Error::InvalidMode(
            "the logarithmic Sobolev ratio is 2D only".into(),
        ));
    }
    let grad_sq = f.grad_pow_sq(1);
    if grad_sq == 0.0 {
        return Err(Error::invalid(
            "∇f = 0: the logarithmic Sobolev ratio is undefined",
        ));
    }
    let linf = f.norm(Norm::LInf)?;
    let h2_sq = f.norm(Norm::H(2))?.powi(2);
    let arg = (h2_sq / grad_sq).max(1.0);
    Ok(linf / (grad_sq.sqrt() * (1.0 + arg.ln().sqrt())))
}

/// Mean-free stream function of the horizontal part of a 2D field.
pub(crate) fn stream_of(b: &SpectralVector) -> Result<SpectralScalar> {
    let mut w = b.clone();
    for i in 0..2 {
        w.comp_mut(i).coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    }
    Ok(crate::spectral::field_to_stream(&w)?.0)
}
