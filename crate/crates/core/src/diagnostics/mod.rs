//! Functionals, theorem constants, identity residuals and inequality
//! monitors evaluated on simulator states and along trajectories.
//!
//! The BMO norm is never computed: wherever it enters, the homogeneous
//! Sobolev norm `Ḣ^{d/2}` is used as an upper-bound proxy and labelled so.

mod analysis;
mod constants;
mod functionals;
mod output;
mod record;

pub use analysis::{
    accumulate_u_t, fit_decay_exponent, gamma_weight, gronwall_verify, monotonicity_monitor,
    xr_accumulate, Accumulator, DecayFit, GronwallReport, GronwallSamples, MonitorKind, Violation,
};
pub use constants::{
    bound3_rhs, bound_report, c0_formula, calibrate_c, compute_c0, compute_emhd_constants,
    compute_hmhd_constants, e1_25d, e1_3d, emhd_formula, hmhd_formula, psi_without_log_rhs,
    BoundCheck, C0Report, EmhdConstants, HmhdConstants, HmhdData,
};
pub use functionals::{
    blowup_components, bmo_proxy_sq, conjugate_exponent, delta_psi_identity_residual,
    delta_psi_integrals, energy_functionals, energy_of, hall_cancellation_residual,
    hall_cancellation_residual_of, log_sobolev_ratio, magneto_vorticity, magneto_vorticity_of,
    xr_integrand, EnergyFunctionals, MagnetoVorticity,
};
pub use output::{CsvSink, JsonlSink, RecordSink, TeeSink};
pub use record::{
    DiagnosticsOptions, DiagnosticsRecord, DiagnosticsTracker, TrackerState, XrEntry,
};
