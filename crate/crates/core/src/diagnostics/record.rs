//! Per-snapshot records and their accumulation along a trajectory.

use serde::{Deserialize, Serialize};

use super::analysis::{gamma_weight, Accumulator};
use super::functionals::{
    blowup_components, bmo_proxy_sq, delta_psi_identity_residual, energy_of,
    hall_cancellation_residual_of, magneto_vorticity_of, stream_of, xr_integrand,
};
use crate::models::{MhdState, PhysParams};
use crate::spectral::{curl, Norm, Normed, SpectralScalar};
use crate::{Error, Result};

/// Knobs of the diagnostics engine. Every generic theorem constant defaults
/// to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsOptions {
    /// Generic constant `C` used in every bound formula.
    pub c: f64,
    /// Smallness constant `ε` of the global-existence predicates.
    pub epsilon: f64,
    /// Weight `λ` of `Γ = exp(−λ U)`; `None` means `C/ν`.
    pub lambda: Option<f64>,
    /// Exponents `r` of the `X^r` accumulators.
    pub r_list: Vec<f64>,
    /// Evaluate the Hall-cancellation and `Δψ` identity residuals per record.
    pub identity_checks: bool,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions {
            c: 1.0,
            epsilon: 1.0,
            lambda: None,
            r_list: vec![2.0, 4.0, 6.0],
            identity_checks: true,
        }
    }
}

impl DiagnosticsOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Config("diagnostics.c must be > 0".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("diagnostics.epsilon must be > 0".into()));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) {
                return Err(Error::Config("diagnostics.lambda must be >= 0".into()));
            }
        }
        for &r in &self.r_list {
            if !r.is_finite() || r < 2.0 {
                return Err(Error::Config(format!(
                    "diagnostics.r_list: r = {r} is outside [2, ∞)"
                )));
            }
        }
        Ok(())
    }

    pub fn lambda_for(&self, p: &PhysParams) -> f64 {
        self.lambda
            .unwrap_or(if p.nu > 0.0 { self.c / p.nu } else { 0.0 })
    }
}

/// Running `X^r` integrals for one exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XrEntry {
    pub r: f64,
    pub grad_b3: f64,
    pub grad_b_h: f64,
    pub grad_omega3: f64,
    pub grad_omega_h: f64,
}

impl XrEntry {
    pub fn values(&self) -> [f64; 4] {
        [
            self.grad_b3,
            self.grad_b_h,
            self.grad_omega3,
            self.grad_omega_h,
        ]
    }
}

/// Everything the diagnostics engine reports at one time. Squared norms
/// throughout; `u_bmo_proxy_sq` is the `Ḣ^{d/2}` proxy of the BMO norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub energy_u: f64,
    pub energy_b: f64,
    pub diss_u: f64,
    pub diss_b: f64,
    /// `∫ (ν‖∇u‖² + η‖∇B‖²) dt`.
    pub diss_acc: f64,
    /// `‖u‖² + ‖B‖² + 2 diss_acc`.
    pub energy_balance: f64,
    pub mv_l2: f64,
    pub mv_h1: f64,
    pub mv_h2: f64,
    /// `∫ ‖∇Ω‖² dt`.
    pub mv_grad_acc: f64,
    /// `∫ ‖∇Ω‖²_{H²} dt`.
    pub mv_grad_h2_acc: f64,
    pub omega_l2_sq: f64,
    /// `∫ ‖∇ω‖² dt`.
    pub omega_grad_acc: f64,
    pub u_bmo_proxy_sq: f64,
    pub u_t_acc: f64,
    pub gamma_weight: f64,
    pub grad_b_l2_sq: f64,
    pub delta_b_l2_sq: f64,
    /// `∫ ‖ΔB‖² dt`.
    pub delta_b_acc: f64,
    pub j3_l2_sq: f64,
    pub b_h2_sq: f64,
    /// `∫ ‖∇B‖²_{H²} dt`.
    pub grad_b_h2_acc: f64,
    pub delta_psi_l2_sq: Option<f64>,
    pub hall_cancellation: Option<f64>,
    pub delta_psi_identity: Option<f64>,
    pub linf_u: f64,
    pub linf_b: f64,
    pub xr: Vec<XrEntry>,
}

impl DiagnosticsRecord {
    pub fn energy(&self) -> f64 {
        self.energy_u + self.energy_b
    }

    /// Fixed leading columns of the CSV layout.
    pub const BASE_COLUMNS: [&'static str; 28] = [
        "time",
        "energy_u",
        "energy_b",
        "diss_u",
        "diss_b",
        "diss_acc",
        "energy_balance",
        "mv_l2",
        "mv_h1",
        "mv_h2",
        "mv_grad_acc",
        "mv_grad_h2_acc",
        "omega_l2_sq",
        "omega_grad_acc",
        "u_bmo_proxy_sq",
        "u_t_acc",
        "gamma_weight",
        "grad_b_l2_sq",
        "delta_b_l2_sq",
        "delta_b_acc",
        "j3_l2_sq",
        "b_h2_sq",
        "grad_b_h2_acc",
        "delta_psi_l2_sq",
        "hall_cancellation",
        "delta_psi_identity",
        "linf_u",
        "linf_b",
    ];

    /// Column names: base columns, then four per `X^r` exponent.
    pub fn columns(r_list: &[f64]) -> Vec<String> {
        let mut cols: Vec<String> = Self::BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
        for r in r_list {
            for f in ["grad_b3", "grad_b_h", "grad_omega3", "grad_omega_h"] {
                cols.push(format!("xr{r}_{f}"));
            }
        }
        cols
    }

    /// Cells matching [`columns`](Self::columns); absent values are empty.
    pub fn cells(&self) -> Vec<String> {
        let f = |v: f64| format!("{v:e}");
        let o = |v: Option<f64>| v.map_or(String::new(), f);
        let mut out = vec![
            f(self.time),
            f(self.energy_u),
            f(self.energy_b),
            f(self.diss_u),
            f(self.diss_b),
            f(self.diss_acc),
            f(self.energy_balance),
            f(self.mv_l2),
            f(self.mv_h1),
            f(self.mv_h2),
            f(self.mv_grad_acc),
            f(self.mv_grad_h2_acc),
            f(self.omega_l2_sq),
            f(self.omega_grad_acc),
            f(self.u_bmo_proxy_sq),
            f(self.u_t_acc),
            f(self.gamma_weight),
            f(self.grad_b_l2_sq),
            f(self.delta_b_l2_sq),
            f(self.delta_b_acc),
            f(self.j3_l2_sq),
            f(self.b_h2_sq),
            f(self.grad_b_h2_acc),
            o(self.delta_psi_l2_sq),
            o(self.hall_cancellation),
            o(self.delta_psi_identity),
            f(self.linf_u),
            f(self.linf_b),
        ];
        for e in &self.xr {
            out.extend(e.values().iter().map(|&v| f(v)));
        }
        out
    }
}

/// Accumulator state carried between records (and through checkpoints).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackerState {
    pub diss: Accumulator,
    pub mv_grad: Accumulator,
    pub mv_grad_h2: Accumulator,
    pub omega_grad: Accumulator,
    pub grad_b_h2: Accumulator,
    pub delta_b: Accumulator,
    pub u_t: Accumulator,
    /// Per exponent, the four component accumulators.
    pub xr: Vec<[Accumulator; 4]>,
}

/// Turns a sequence of states into records, accumulating time integrals.
#[derive(Clone, Debug)]
pub struct DiagnosticsTracker {
    pub params: PhysParams,
    pub options: DiagnosticsOptions,
    pub state: TrackerState,
}

fn h2_sq<F: Normed>(f: &F) -> f64 {
    f.norm(Norm::H(2)).map(|v| v * v).unwrap_or(0.0)
}

/// `‖∇f‖²_{H²} = Σ_k (|k|² + |k|⁴ + |k|⁶) |f̂|²`.
fn grad_h2_sq<F: Normed>(f: &F) -> f64 {
    f.grad_pow_sq(1) + f.grad_pow_sq(2) + f.grad_pow_sq(3)
}

impl DiagnosticsTracker {
    pub fn new(params: PhysParams, options: DiagnosticsOptions) -> Result<Self> {
        options.validate()?;
        let xr = vec![[Accumulator::default(); 4]; options.r_list.len()];
        Ok(DiagnosticsTracker {
            params,
            options,
            state: TrackerState {
                xr,
                ..TrackerState::default()
            },
        })
    }

    pub fn with_state(
        params: PhysParams,
        options: DiagnosticsOptions,
        state: TrackerState,
    ) -> Result<Self> {
        let mut t = DiagnosticsTracker::new(params, options)?;
        if state.xr.len() != t.options.r_list.len() {
            return Err(Error::Config(
                "saved accumulators do not match diagnostics.r_list".into(),
            ));
        }
        t.state = state;
        Ok(t)
    }

    /// Computes the record of `s` and folds it into the running integrals.
    /// States must be observed in nondecreasing time order.
    pub fn observe(&mut self, s: &MhdState) -> Result<DiagnosticsRecord> {
        let p = self.params;
        let t = s.time;
        if let Some((t0, _)) = self.state.diss.last {
            if t < t0 {
                return Err(Error::invalid("diagnostics observed out of time order"));
            }
        }
        let (u, b) = s.primitive()?;
        let en = energy_of(u.as_ref(), &b);
        let mv = magneto_vorticity_of(u.as_ref(), &b, p.hall);
        let omega = u.as_ref().map(curl);
        let (omega_l2_sq, omega_grad) = omega
            .as_ref()
            .map_or((0.0, 0.0), |w| (w.l2_sq(), w.grad_pow_sq(1)));
        let u_bmo = u.as_ref().map_or(0.0, bmo_proxy_sq);
        let jb = curl(&b);
        let j3_l2_sq = jb.comp(2).l2_sq();
        let two_d = b.grid().dim() == 2;

        let st = &mut self.state;
        st.diss.push(t, p.nu * en.diss_u + p.eta * en.diss_b);
        st.mv_grad.push(t, mv.field.grad_pow_sq(1));
        st.mv_grad_h2.push(t, grad_h2_sq(&mv.field));
        st.omega_grad.push(t, omega_grad);
        st.grad_b_h2.push(t, grad_h2_sq(&b));
        let delta_b_l2_sq = b.grad_pow_sq(2);
        st.delta_b.push(t, delta_b_l2_sq);
        st.u_t.push(t, u_bmo);

        let comps = blowup_components(u.as_ref(), &b);
        let mut xr = Vec::with_capacity(self.options.r_list.len());
        for (k, &r) in self.options.r_list.iter().enumerate() {
            let mut vals = [0.0; 4];
            for (j, c) in comps.iter().enumerate() {
                let refs: Vec<&SpectralScalar> = c.iter().collect();
                let g = xr_integrand(&refs, r)?;
                st.xr[k][j].push(t, g);
                vals[j] = st.xr[k][j].value;
            }
            xr.push(XrEntry {
                r,
                grad_b3: vals[0],
                grad_b_h: vals[1],
                grad_omega3: vals[2],
                grad_omega_h: vals[3],
            });
        }

        let (hall_cancellation, delta_psi_identity) = if self.options.identity_checks {
            let hc = match &u {
                Some(u) => Some(hall_cancellation_residual_of(u, &b, &p)?),
                None => None,
            };
            let dp = if two_d {
                Some(delta_psi_identity_residual(&stream_of(&b)?, b.comp(2))?)
            } else {
                None
            };
            (hc, dp)
        } else {
            (None, None)
        };

        let lambda = self.options.lambda_for(&p);
        let st = &self.state;
        Ok(DiagnosticsRecord {
            time: t,
            energy_u: en.energy_u,
            energy_b: en.energy_b,
            diss_u: en.diss_u,
            diss_b: en.diss_b,
            diss_acc: st.diss.value,
            energy_balance: en.total() + 2.0 * st.diss.value,
            mv_l2: mv.l2_sq,
            mv_h1: mv.h1_sq,
            mv_h2: mv.h2_sq,
            mv_grad_acc: st.mv_grad.value,
            mv_grad_h2_acc: st.mv_grad_h2.value,
            omega_l2_sq,
            omega_grad_acc: st.omega_grad.value,
            u_bmo_proxy_sq: u_bmo,
            u_t_acc: st.u_t.value,
            gamma_weight: gamma_weight(st.u_t.value, lambda),
            grad_b_l2_sq: en.diss_b,
            delta_b_l2_sq,
            delta_b_acc: st.delta_b.value,
            j3_l2_sq,
            b_h2_sq: h2_sq(&b),
            grad_b_h2_acc: st.grad_b_h2.value,
            delta_psi_l2_sq: two_d.then_some(j3_l2_sq),
            hall_cancellation,
            delta_psi_identity,
            linf_u: match &u {
                Some(u) => u.norm(Norm::LInf)?,
                None => 0.0,
            },
            linf_b: b.norm(Norm::LInf)?,
            xr,
        })
    }
}
