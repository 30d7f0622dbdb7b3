//! Orchestration behind the `run`, `resume` and `constants` commands.

use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::config::RunSpec;
use crate::diagnostics::{
    bound_report, compute_c0, compute_emhd_constants, compute_hmhd_constants, fit_decay_exponent,
    monotonicity_monitor, psi_without_log_rhs, CsvSink, DiagnosticsRecord, DiagnosticsTracker,
    JsonlSink, MonitorKind, RecordSink, TeeSink,
};
use crate::integrate::{load_checkpoint_for, run_with, CheckpointPolicy, RunControl, RunOutcome};
use crate::models::{MhdState, ModelTag};
use crate::scenario::generate_scenario;
use crate::{Error, Result};

/// Ordered `key = value` lines. Floats print in shortest round-trip form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_opt(&mut self, key: impl Into<String>, value: Option<f64>) {
        match value {
            Some(v) => self.push(key, v),
            None => self.push(key, "none"),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

pub fn initial_state(spec: &RunSpec) -> Result<MhdState> {
    let grid = spec.grid.spec().build()?;
    generate_scenario(&spec.scenario, spec.model.tag, &grid, &spec.physics)
}

/// Every theorem constant and predicate applicable to the initial data.
pub fn constants_report(spec: &RunSpec, initial: &MhdState) -> Result<Report> {
    let p = &spec.physics;
    let (c, eps) = (spec.diagnostics.c, spec.diagnostics.epsilon);
    let (u0, b0) = initial.primitive()?;
    let mut r = Report::default();
    r.push("model", initial.tag());
    r.push("scenario", spec.scenario.name);
    r.push("c", c);
    r.push("epsilon", eps);
    if let (Some(u0), true) = (&u0, p.nu + p.eta > 0.0) {
        let k = compute_c0(Some(u0), &b0, p, c)?;
        r.push("c0.e0", k.e0);
        r.push("c0.mv0_l2_sq", k.mv0_l2_sq);
        r.push("c0.value", k.c0);
        r.push("c0.small", k.small);
        r.push("c0.viscosity_ratio", k.ratio);
        r.push("c0.viscosity_ratio_ok", k.ratio_ok);
    }
    if initial.grid().dim() == 2 && p.eta > 0.0 {
        if u0.is_none() {
            let k = compute_emhd_constants(&b0, p.eta, c, eps)?;
            r.push("emhd.h0", k.h0);
            r.push("emhd.smallness_lhs", k.smallness_lhs);
            r.push("emhd.smallness_rhs", eps * p.eta * p.eta);
            r.push("emhd.predicate", k.predicate);
            r.push(
                "emhd.psi_without_log_rhs",
                psi_without_log_rhs(&b0, p.eta, c)?,
            );
        } else if let (Some(u0), true) = (&u0, p.nu > 0.0) {
            let k = compute_hmhd_constants(u0, &b0, p, c, eps)?;
            r.push("hmhd.e0", k.e0);
            r.push("hmhd.e1", k.e1);
            r.push("hmhd.e2", k.e2);
            r.push("hmhd.h1", k.h1);
            r.push("hmhd.s1", k.s1);
            r.push("hmhd.h2", k.h2);
            r.push("hmhd.smallness_lhs", k.smallness_lhs);
            r.push("hmhd.smallness_rhs", eps * p.eta * p.eta);
            r.push("hmhd.predicate", k.predicate);
        }
    }
    Ok(r)
}

/// Bound checks, monitors and fitted exponents along `records`.
pub fn trajectory_report(
    spec: &RunSpec,
    initial: &MhdState,
    records: &[DiagnosticsRecord],
) -> Result<Report> {
    let p = &spec.physics;
    let mut r = Report::default();
    for b in bound_report(initial, records, p, spec.diagnostics.c)? {
        r.push(format!("bound.{}.lhs", b.name), b.lhs);
        r.push(format!("bound.{}.rhs", b.name), b.rhs);
        r.push(format!("bound.{}.holds", b.name), b.holds);
        r.push_opt(format!("bound.{}.calibrated_c", b.name), b.calibrated_c);
    }
    let tag = initial.tag();
    if matches!(tag, ModelTag::EmhdStream | ModelTag::EmhdVector) && initial.grid().dim() == 2 {
        let v = monotonicity_monitor(
            records,
            MonitorKind::GradBNonincreasing {
                rel_tol: 1e-8,
                delta_psi_threshold: spec.diagnostics.epsilon * p.eta * p.eta,
            },
        );
        r.push("monitor.grad_b_nonincreasing.violations", v.len());
        let g0 = records.first().map_or(0.0, |r| r.grad_b_l2_sq);
        let v = monotonicity_monitor(
            records,
            MonitorKind::GradBDissipation {
                eta: p.eta,
                tol: 1e-6 * g0,
            },
        );
        r.push("monitor.grad_b_dissipation.violations", v.len());
    }
    if let (Some(first), Some(last)) = (records.first(), records.last()) {
        let window = (0.5 * (first.time + last.time), last.time);
        let t: Vec<f64> = records.iter().map(|r| r.time).collect();
        let e: Vec<f64> = records.iter().map(|r| r.energy()).collect();
        match fit_decay_exponent(&t, &e, window) {
            Ok(fit) => {
                r.push("fit.energy_decay_exponent", fit.exponent);
                r.push("fit.energy_decay_residual", fit.residual);
            }
            Err(_) => r.push("fit.energy_decay_exponent", "none"),
        }
    }
    Ok(r)
}

#[derive(Debug)]
pub struct RunSummary {
    pub outcome: RunOutcome,
    pub records: Vec<DiagnosticsRecord>,
    pub report: Report,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

fn control_for(spec: &RunSpec) -> RunControl {
    let out = &spec.output;
    RunControl {
        checkpoint: spec.checkpoint.as_ref().map(|c| CheckpointPolicy {
            path: out.resolve(&c.path),
            every: c.every.unwrap_or(f64::INFINITY),
        }),
        failure_dir: Some(out.resolve(out.failure_dir.as_deref().unwrap_or(Path::new(".")))),
        progress: None,
    }
}

fn open_csv(path: &Path, append: bool) -> Result<CsvSink<BufWriter<File>>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(if append {
        CsvSink::appending(BufWriter::new(OpenOptions::new().append(true).open(path)?))
    } else {
        CsvSink::new(BufWriter::new(File::create(path)?))
    })
}

fn execute(
    spec: &RunSpec,
    initial: &MhdState,
    start: &MhdState,
    mut tracker: DiagnosticsTracker,
    control: RunControl,
    append: bool,
) -> Result<RunSummary> {
    let out = &spec.output;
    fs::create_dir_all(&out.dir)?;
    let csv_path = out.resolve(&out.csv);
    let mut csv = open_csv(&csv_path, append)?;
    let mut jsonl = match &out.jsonl {
        Some(p) => {
            let path = out.resolve(p);
            let f = if append {
                OpenOptions::new().append(true).create(true).open(path)?
            } else {
                File::create(path)?
            };
            Some(JsonlSink::new(BufWriter::new(f)))
        }
        None => None,
    };
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let outcome = {
        let mut sinks: Vec<&mut dyn RecordSink> = vec![&mut csv, &mut records];
        if let Some(j) = jsonl.as_mut() {
            sinks.push(j);
        }
        let mut tee = TeeSink::new(sinks);
        run_with(
            start,
            &spec.physics,
            &spec.stepper,
            &mut tracker,
            &mut tee,
            &control,
        )?
    };

    let mut report = constants_report(spec, initial)?;
    report.push("t_end", outcome.state.time);
    report.push("steps", outcome.steps);
    report.push("records", outcome.records_emitted);
    report.push("resumed", append);
    let traj = trajectory_report(spec, initial, &records)?;
    report.entries.extend(traj.entries);
    report.push("blow_up_detected", false);
    let summary_path = out.resolve(&out.summary);
    fs::write(&summary_path, report.render())?;
    Ok(RunSummary {
        outcome,
        records,
        report,
        csv_path,
        summary_path,
    })
}

/// Runs a configuration from its scenario's initial data.
pub fn cmd_run(spec: &RunSpec) -> Result<RunSummary> {
    let initial = initial_state(spec)?;
    let tracker = DiagnosticsTracker::new(spec.physics, spec.diagnostics.clone())?;
    execute(spec, &initial, &initial, tracker, control_for(spec), false)
}

/// Continues a run from `checkpoint` (default: the configured checkpoint
/// path), appending to the existing CSV. The summary covers the resumed
/// segment.
pub fn cmd_resume(spec: &RunSpec, checkpoint: Option<&Path>) -> Result<RunSummary> {
    let path = match (checkpoint, &spec.checkpoint) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(c)) => spec.output.resolve(&c.path),
        (None, None) => {
            return Err(Error::Config(
                "resume needs a checkpoint path ([checkpoint] path or --checkpoint)".into(),
            ))
        }
    };
    let ck = load_checkpoint_for(&path, &spec.grid.spec())?;
    if ck.params != spec.physics {
        return Err(Error::Config(format!(
            "checkpoint parameters {:?} differ from the configured physics {:?}",
            ck.params, spec.physics
        )));
    }
    if ck.state.tag() != spec.model.tag {
        return Err(Error::Config(format!(
            "checkpoint holds {} but the configuration says {}",
            ck.state.tag(),
            spec.model.tag
        )));
    }
    let progress = ck
        .progress
        .clone()
        .ok_or_else(|| Error::Format("checkpoint carries no run progress".into()))?;
    let tracker = DiagnosticsTracker::with_state(
        spec.physics,
        spec.diagnostics.clone(),
        progress.tracker.clone(),
    )?;
    let initial = initial_state(spec)?;
    let mut control = control_for(spec);
    control.progress = Some(progress);
    execute(spec, &initial, &ck.state, tracker, control, true)
}

/// Evaluates the constants of the initial data without running.
pub fn cmd_constants(spec: &RunSpec) -> Result<Report> {
    let initial = initial_state(spec)?;
    constants_report(spec, &initial)
}
