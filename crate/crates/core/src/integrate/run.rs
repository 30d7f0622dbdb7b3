//! Driving a state from its current time to `t_end`, emitting records on a
//! fixed schedule and writing checkpoints at record boundaries.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use super::checkpoint::{save_checkpoint_with, RunProgress};
use super::{cfl_dt, step_dt, DtMode, StepperConfig};
use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker, RecordSink};
use crate::models::{MhdState, PhysParams};
use crate::{Error, Result};

/// Remaining-time tolerance (relative to the record interval) below which a
/// step is stretched to land exactly on the record time.
const SNAP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointPolicy {
    /// Overwritten in place at every checkpoint.
    pub path: PathBuf,
    /// Model time between checkpoints, rounded to a whole number of record
    /// intervals.
    pub every: f64,
}

#[derive(Clone, Debug, Default)]
pub struct RunControl {
    pub checkpoint: Option<CheckpointPolicy>,
    /// Directory that receives `failure_record.json` on blow-up.
    pub failure_dir: Option<PathBuf>,
    /// Set when resuming from a checkpoint.
    pub progress: Option<RunProgress>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: MhdState,
    pub steps: u64,
    pub records_emitted: usize,
    pub last_record: Option<DiagnosticsRecord>,
    pub progress: RunProgress,
}

#[derive(Serialize)]
struct FailureRecord<'a> {
    time: f64,
    last_record: Option<&'a DiagnosticsRecord>,
}

/// Number of record intervals between `t0` and `t_end`; the last may be short.
fn interval_count(t0: f64, t_end: f64, interval: f64) -> u64 {
    let span = t_end - t0;
    if span <= 0.0 {
        0
    } else {
        (span / interval - SNAP).ceil().max(1.0) as u64
    }
}

fn record_time(t0: f64, i: u64, count: u64, t_end: f64, interval: f64) -> f64 {
    if i >= count {
        t_end
    } else {
        t0 + i as f64 * interval
    }
}

pub fn run(
    initial: &MhdState,
    p: &PhysParams,
    cfg: &StepperConfig,
    tracker: &mut DiagnosticsTracker,
    sink: &mut dyn RecordSink,
) -> Result<RunOutcome> {
    run_with(initial, p, cfg, tracker, sink, &RunControl::default())
}

/// Runs to `cfg.t_end` (absolute model time). A fresh run records the
/// initial state first; a resumed run continues the schedule stored in
/// `control.progress` and expects `tracker` to hold the saved integrals.
pub fn run_with(
    initial: &MhdState,
    p: &PhysParams,
    cfg: &StepperConfig,
    tracker: &mut DiagnosticsTracker,
    sink: &mut dyn RecordSink,
    control: &RunControl,
) -> Result<RunOutcome> {
    cfg.validate()?;
    p.validate()?;
    initial.validate()?;
    if cfg.t_end < initial.time {
        return Err(Error::Config(format!(
            "stepper.t_end = {} lies before the initial time {}",
            cfg.t_end, initial.time
        )));
    }
    let interval = cfg.diag_interval;
    let (t0, mut next, mut steps) = match &control.progress {
        Some(pr) => (pr.t_origin, pr.next_record, pr.steps),
        None => (initial.time, 0, 0),
    };
    let count = interval_count(t0, cfg.t_end, interval);
    let ck_every = control
        .checkpoint
        .as_ref()
        .map(|c| ((c.every / interval).round() as u64).max(1));

    let mut state = initial.clone();
    let mut last_record: Option<DiagnosticsRecord> = None;
    let mut emitted = 0usize;
    let progress_of = |next: u64, steps: u64, tracker: &DiagnosticsTracker| RunProgress {
        t_origin: t0,
        next_record: next,
        steps,
        tracker: tracker.state.clone(),
    };

    if next == 0 {
        let rec = tracker.observe(&state)?;
        sink.emit(&rec)?;
        last_record = Some(rec);
        emitted += 1;
        next = 1;
    }

    while next <= count {
        let target = record_time(t0, next, count, cfg.t_end, interval);
        match advance(&state, p, cfg, target, interval, &mut steps) {
            Ok(s) => state = s,
            Err(Error::BlowUp { time, .. }) => {
                let failure_path = match &control.failure_dir {
                    Some(dir) => Some(write_failure(dir, time, last_record.as_ref())?),
                    None => None,
                };
                sink.finish()?;
                return Err(Error::BlowUp {
                    time,
                    last_record: last_record.map(Box::new),
                    failure_path,
                });
            }
            Err(e) => return Err(e),
        }
        let rec = tracker.observe(&state)?;
        sink.emit(&rec)?;
        last_record = Some(rec);
        emitted += 1;
        if let (Some(policy), Some(k)) = (&control.checkpoint, ck_every) {
            if next % k == 0 || next == count {
                let pr = progress_of(next + 1, steps, tracker);
                save_checkpoint_with(&state, p, Some(&pr), &policy.path)?;
            }
        }
        next += 1;
    }
    sink.finish()?;
    Ok(RunOutcome {
        state,
        steps,
        records_emitted: emitted,
        last_record,
        progress: progress_of(next, steps, tracker),
    })
}

/// Steps from `s.time` to exactly `target`.
fn advance(
    s: &MhdState,
    p: &PhysParams,
    cfg: &StepperConfig,
    target: f64,
    interval: f64,
    steps: &mut u64,
) -> Result<MhdState> {
    let mut state = s.clone();
    let len = target - state.time;
    if len <= 0.0 {
        state.time = target;
        return Ok(state);
    }
    match cfg.dt {
        DtMode::Fixed(dt) => {
            let n = (len / dt - SNAP).ceil().max(1.0) as u64;
            let h = len / n as f64;
            for _ in 0..n {
                state = step_dt(&state, p, cfg, h)?;
                *steps += 1;
            }
        }
        DtMode::Auto => loop {
            let remaining = target - state.time;
            if remaining <= SNAP * interval {
                break;
            }
            let mut dt = cfl_dt(&state, p, cfg)?.min(remaining);
            if remaining - dt < SNAP * interval {
                dt = remaining;
            }
            state = step_dt(&state, p, cfg, dt)?;
            *steps += 1;
        },
    }
    state.time = target;
    Ok(state)
}

fn write_failure(
    dir: &std::path::Path,
    time: f64,
    last: Option<&DiagnosticsRecord>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("failure_record.json");
    let body = serde_json::to_string_pretty(&FailureRecord {
        time,
        last_record: last,
    })
    .map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&path, body)?;
    Ok(path)
}
