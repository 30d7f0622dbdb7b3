//! Integrating-factor Runge–Kutta time stepping.
//!
//! Diffusion `κΔ` is diagonal in Fourier space and is applied exactly
//! through `e^{−κ|k|²τ}`; nonlinear terms are explicit (Lawson's method).

mod checkpoint;
mod run;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::models::{
    nonlinear_tendency, Fields, MhdState, ModelTag, PhysParams, RhsOptions, Transport,
};
use crate::spectral::{leray_project_in_place, Norm, Normed};
use crate::{Error, Result};

pub use checkpoint::{
    load_checkpoint, load_checkpoint_for, save_checkpoint, save_checkpoint_with, Checkpoint,
    RunProgress, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use run::{run, run_with, CheckpointPolicy, RunControl, RunOutcome};

/// Guards the CFL denominators of zero states.
pub const CFL_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    IfRk4,
    IfRk2,
}

/// Fixed step or CFL-controlled step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DtRepr", into = "DtRepr")]
pub enum DtMode {
    Fixed(f64),
    Auto,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DtRepr {
    Num(f64),
    Word(String),
}

impl TryFrom<DtRepr> for DtMode {
    type Error = String;
    fn try_from(r: DtRepr) -> std::result::Result<Self, String> {
        match r {
            DtRepr::Num(v) => Ok(DtMode::Fixed(v)),
            DtRepr::Word(w) if w == "auto" => Ok(DtMode::Auto),
            DtRepr::Word(w) => Err(format!("dt must be a number or \"auto\", got \"{w}\"")),
        }
    }
}

impl From<DtMode> for DtRepr {
    fn from(m: DtMode) -> Self {
        match m {
            DtMode::Fixed(v) => DtRepr::Num(v),
            DtMode::Auto => DtRepr::Word("auto".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: DtMode,
    pub cfl_advective: f64,
    pub cfl_hall: f64,
    /// Upper bound on automatic steps.
    pub dt_max: f64,
    pub t_end: f64,
    /// Model time between emitted records.
    pub diag_interval: f64,
    /// Leray-project divergence-free fields after every stage instead of
    /// once per step.
    pub project_each_stage: bool,
    /// Drop all nonlinear terms (exact heat semigroup).
    pub linearized: bool,
    pub transport: Transport,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            scheme: Scheme::IfRk4,
            dt: DtMode::Auto,
            cfl_advective: 0.5,
            cfl_hall: 0.2,
            dt_max: 1e-2,
            t_end: 1.0,
            diag_interval: 0.1,
            project_each_stage: false,
            linearized: false,
            transport: Transport::Convective,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "stepper.{name} must be > 0, got {v}"
                )))
            }
        };
        if let DtMode::Fixed(dt) = self.dt {
            pos("dt", dt)?;
        }
        pos("cfl_advective", self.cfl_advective)?;
        pos("cfl_hall", self.cfl_hall)?;
        pos("dt_max", self.dt_max)?;
        pos("diag_interval", self.diag_interval)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "stepper.t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        Ok(())
    }

    fn rhs_options(&self) -> RhsOptions {
        RhsOptions {
            linearized: self.linearized,
            transport: self.transport,
        }
    }
}

/// `min(cfl_adv Δx / max(‖u‖∞, ‖B‖∞, ε), cfl_hall Δx² / (h max(‖B‖∞, ε)), dt_max)`.
pub fn cfl_dt(s: &MhdState, p: &PhysParams, cfg: &StepperConfig) -> Result<f64> {
    let (u, b) = s.primitive()?;
    let ub = match &u {
        Some(u) => u.norm(Norm::LInf)?,
        None => 0.0,
    };
    let bb = b.norm(Norm::LInf)?;
    Ok(cfl_from_speeds(ub, bb, s.grid().dx(), p.hall, cfg))
}

pub(crate) fn cfl_from_speeds(u_inf: f64, b_inf: f64, dx: f64, h: f64, cfg: &StepperConfig) -> f64 {
    let adv = cfg.cfl_advective * dx / u_inf.max(b_inf).max(CFL_FLOOR);
    let hall = if h > 0.0 {
        cfg.cfl_hall * dx * dx / (h * b_inf.max(CFL_FLOOR))
    } else {
        f64::INFINITY
    };
    adv.min(hall).min(cfg.dt_max)
}

/// Per-component factors `e^{−κ|k|²τ}`, sharing arrays between equal `κ`.
struct Factors {
    kappa: Vec<f64>,
    tables: Vec<(f64, Vec<f64>)>,
}

impl Factors {
    fn new(fields: &Fields, p: &PhysParams, tau: f64) -> Self {
        let kappa = Fields::diffusivities(fields.tag(), p);
        let k2 = fields.grid().k2();
        let mut tables: Vec<(f64, Vec<f64>)> = Vec::new();
        for &k in &kappa {
            if !tables.iter().any(|(kk, _)| *kk == k) {
                tables.push((k, k2.iter().map(|&q| (-k * q * tau).exp()).collect()));
            }
        }
        Factors { kappa, tables }
    }

    fn apply(&self, f: &mut Fields) {
        for (c, k) in f.components_mut().into_iter().zip(&self.kappa) {
            if *k == 0.0 {
                continue;
            }
            let table = &self.tables.iter().find(|(kk, _)| kk == k).unwrap().1;
            for (z, e) in c.coeffs_mut().iter_mut().zip(table) {
                *z *= *e;
            }
        }
    }

    fn applied(&self, f: &Fields) -> Fields {
        let mut out = f.clone();
        self.apply(&mut out);
        out
    }
}

/// Restores the structural constraints after a step or stage: Leray
/// projection of divergence-free vectors and zero means of stream functions.
fn enforce_constraints(f: &mut Fields) {
    let zero = Complex64::new(0.0, 0.0);
    match f {
        Fields::Hall3d { u, b } | Fields::Hall25d { u, b } => {
            leray_project_in_place(u);
            leray_project_in_place(b);
        }
        Fields::EmhdVector { b } | Fields::DecoupledB { b } => leray_project_in_place(b),
        Fields::EmhdStream { psi, .. } => psi.coeffs_mut()[0] = zero,
        Fields::HmhdStream { phi, psi, .. } => {
            phi.coeffs_mut()[0] = zero;
            psi.coeffs_mut()[0] = zero;
        }
        Fields::MagnetoVorticity { .. } => {}
    }
}

fn tendency(f: &Fields, p: &PhysParams, cfg: &StepperConfig) -> Result<Fields> {
    nonlinear_tendency(f, p, cfg.rhs_options())
}

/// `a + c·b` as a new bundle.
fn lin(a: &Fields, c: f64, b: &Fields) -> Fields {
    let mut out = a.clone();
    out.axpy(c, b);
    out
}

/// Advances `s` by exactly `dt`.
pub fn step_dt(s: &MhdState, p: &PhysParams, cfg: &StepperConfig, dt: f64) -> Result<MhdState> {
    if s.tag() == ModelTag::MagnetoVorticity {
        return Err(Error::InvalidMode(
            "the magneto-vorticity system is evaluated with frozen fields and cannot be stepped"
                .into(),
        ));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("step size must be > 0, got {dt}")));
    }
    let stage = |mut f: Fields| {
        if cfg.project_each_stage {
            enforce_constraints(&mut f);
        }
        f
    };
    let v = &s.fields;
    let full = Factors::new(v, p, dt);
    let mut next = match cfg.scheme {
        Scheme::IfRk4 => {
            let half = Factors::new(v, p, 0.5 * dt);
            let k1 = tendency(v, p, cfg)?;
            let v2 = stage(half.applied(&lin(v, 0.5 * dt, &k1)));
            let k2 = tendency(&v2, p, cfg)?;
            let ehv = half.applied(v);
            let v3 = stage(lin(&ehv, 0.5 * dt, &k2));
            let k3 = tendency(&v3, p, cfg)?;
            let efv = full.applied(v);
            let v4 = stage(lin(&efv, dt, &half.applied(&k3)));
            let k4 = tendency(&v4, p, cfg)?;
            let mut acc = full.applied(&k1);
            acc.axpy(2.0, &half.applied(&lin(&k2, 1.0, &k3)));
            acc.axpy(1.0, &k4);
            lin(&efv, dt / 6.0, &acc)
        }
        Scheme::IfRk2 => {
            let k1 = tendency(v, p, cfg)?;
            let v2 = stage(full.applied(&lin(v, dt, &k1)));
            let k2 = tendency(&v2, p, cfg)?;
            let mut out = full.applied(&lin(v, 0.5 * dt, &k1));
            out.axpy(0.5 * dt, &k2);
            out
        }
    };
    enforce_constraints(&mut next);
    let time = s.time + dt;
    if next.has_non_finite() {
        return Err(Error::BlowUp {
            time,
            last_record: None,
            failure_path: None,
        });
    }
    Ok(MhdState { time, fields: next })
}

/// Advances `s` by one step of the configured size (fixed or CFL).
pub fn step(s: &MhdState, p: &PhysParams, cfg: &StepperConfig) -> Result<MhdState> {
    let dt = match cfg.dt {
        DtMode::Fixed(dt) => dt,
        DtMode::Auto => cfl_dt(s, p, cfg)?,
    };
    step_dt(s, p, cfg, dt)
}
