use std::fs;

use hallmhd::diagnostics::{DiagnosticsOptions, DiagnosticsRecord, DiagnosticsTracker};
use hallmhd::integrate::{
    cfl_dt, load_checkpoint, load_checkpoint_for, run, run_with, save_checkpoint, step_dt,
    CheckpointPolicy, DtMode, RunControl, CHECKPOINT_MAGIC,
};
use hallmhd::scenario::{generate_scenario, ScenarioName, ScenarioSpec};
use hallmhd::spectral::{GridSpec, Norm, Normed};
use hallmhd::{Error, Fields, MhdState, ModelTag, PhysParams, Scheme, StepperConfig};

fn state(name: ScenarioName, tag: ModelTag, n: usize, seed: u64, p: &PhysParams) -> MhdState {
    let grid = GridSpec::new(2, n).build().unwrap();
    generate_scenario(&ScenarioSpec::new(name).with_seed(seed), tag, &grid, p).unwrap()
}

fn rel_distance(a: &MhdState, b: &MhdState) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in a.fields.components().iter().zip(b.fields.components()) {
        for (p, q) in x.coeffs().iter().zip(y.coeffs()) {
            num += (p - q).norm_sqr();
            den += q.norm_sqr();
        }
    }
    (num / den).sqrt()
}

fn integrate_to(s: &MhdState, p: &PhysParams, cfg: &StepperConfig, t: f64, dt: f64) -> MhdState {
    let n = (t / dt).round() as usize;
    let mut s = s.clone();
    for _ in 0..n {
        s = step_dt(&s, p, cfg, dt).unwrap();
    }
    s
}

fn observed_order(scheme: Scheme) -> f64 {
    let p = PhysParams::new(0.05, 0.05, 0.5).unwrap();
    let s0 = state(ScenarioName::RandomDivfree, ModelTag::Hall25d, 16, 3, &p);
    let cfg = StepperConfig {
        scheme,
        ..StepperConfig::default()
    };
    let t = 0.2;
    let runs: Vec<MhdState> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| integrate_to(&s0, &p, &cfg, t, dt))
        .collect();
    let e1 = rel_distance(&runs[0], &runs[1]);
    let e2 = rel_distance(&runs[1], &runs[2]);
    (e1 / e2).log2()
}

#[test]
fn if_rk4_converges_at_fourth_order() {
    let order = observed_order(Scheme::IfRk4);
    assert!((order - 4.0).abs() < 0.3, "observed order {order}");
}

#[test]
fn if_rk2_converges_at_second_order() {
    let order = observed_order(Scheme::IfRk2);
    assert!((order - 2.0).abs() < 0.3, "observed order {order}");
}

#[test]
fn linear_part_is_integrated_exactly() {
    let p = PhysParams::new(0.3, 0.2, 1.0).unwrap();
    let s0 = state(ScenarioName::RandomDivfree, ModelTag::Hall25d, 16, 8, &p);
    let cfg = StepperConfig {
        linearized: true,
        ..StepperConfig::default()
    };
    let s1 = step_dt(&s0, &p, &cfg, 0.37).unwrap();
    let k2 = s0.grid().k2();
    let kappa = [p.nu, p.nu, p.nu, p.eta, p.eta, p.eta];
    for ((a, b), k) in s0
        .fields
        .components()
        .iter()
        .zip(s1.fields.components())
        .zip(kappa)
    {
        for ((x, y), k2) in a.coeffs().iter().zip(b.coeffs()).zip(k2) {
            let exact = x * (-k * k2 * 0.37).exp();
            assert!((y - exact).norm() < 1e-15);
        }
    }
}

#[test]
fn heat_reduction_follows_the_heat_equation() {
    // ψ = 0 removes every nonlinear term; B³ solves ∂ₜB³ = ηΔB³
    let p = PhysParams::new(0.0, 0.2, 1.0).unwrap();
    let s0 = state(ScenarioName::HeatReduction, ModelTag::EmhdStream, 32, 5, &p);
    let cfg = StepperConfig {
        t_end: 0.5,
        diag_interval: 0.1,
        ..StepperConfig::default()
    };
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let out = run(&s0, &p, &cfg, &mut tracker, &mut records).unwrap();
    let Fields::EmhdStream { psi, b3 } = &out.state.fields else {
        panic!("wrong tag")
    };
    let Fields::EmhdStream { b3: b30, .. } = &s0.fields else {
        panic!("wrong tag")
    };
    assert_eq!(psi.max_abs_coeff(), 0.0);
    let k2 = s0.grid().k2();
    let exact = b30.map_modes(|i, c| c * (-p.eta * k2[i] * 0.5).exp());
    for (a, e) in b3.coeffs().iter().zip(exact.coeffs()) {
        assert!((a - e).norm() < 1e-14);
    }
    // the energy of the heat flow decays monotonically
    assert!(records.windows(2).all(|w| w[1].energy_b <= w[0].energy_b));
}

#[test]
fn cfl_step_matches_formula() {
    let p = PhysParams::new(0.1, 0.1, 2.0).unwrap();
    let s = state(ScenarioName::OrszagTangLike, ModelTag::Hall25d, 32, 0, &p);
    let cfg = StepperConfig::default();
    let (u, b) = s.primitive().unwrap();
    let (ui, bi) = (
        u.unwrap().norm(Norm::LInf).unwrap(),
        b.norm(Norm::LInf).unwrap(),
    );
    let dx = 2.0 * std::f64::consts::PI / 32.0;
    let expected = (0.5 * dx / ui.max(bi))
        .min(0.2 * dx * dx / (2.0 * bi))
        .min(cfg.dt_max);
    assert!((cfl_dt(&s, &p, &cfg).unwrap() - expected).abs() < 1e-15);
}

#[test]
fn stepping_rejects_bad_input() {
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let s = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 16, 1, &p);
    let cfg = StepperConfig::default();
    assert!(step_dt(&s, &p, &cfg, 0.0).is_err());
    assert!(step_dt(&s, &p, &cfg, f64::NAN).is_err());
}

fn emhd_cfg(t_end: f64) -> StepperConfig {
    StepperConfig {
        t_end,
        diag_interval: 0.05,
        ..StepperConfig::default()
    }
}

#[test]
fn record_schedule() {
    let p = PhysParams::new(0.0, 0.1, 1.0).unwrap();
    let s0 = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 16, 2, &p);
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let cfg = StepperConfig {
        t_end: 0.23,
        ..emhd_cfg(0.0)
    };
    let out = run(&s0, &p, &cfg, &mut tracker, &mut records).unwrap();
    let times: Vec<f64> = records.iter().map(|r| r.time).collect();
    let expected = [0.0, 0.05, 0.1, 0.15000000000000002, 0.2, 0.23];
    assert_eq!(times.len(), expected.len());
    for (t, e) in times.iter().zip(expected) {
        assert!((t - e).abs() < 1e-15, "{times:?}");
    }
    assert_eq!(out.state.time, 0.23);
    assert_eq!(out.records_emitted, 6);
}

#[test]
fn zero_length_run_emits_only_the_initial_record() {
    let p = PhysParams::new(0.0, 0.1, 1.0).unwrap();
    let s0 = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 16, 2, &p);
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let out = run(&s0, &p, &emhd_cfg(0.0), &mut tracker, &mut records).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].time, 0.0);
    assert_eq!(out.steps, 0);
}

#[test]
fn fixed_step_subdivides_each_interval() {
    let p = PhysParams::new(0.0, 0.1, 1.0).unwrap();
    let s0 = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 16, 2, &p);
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    let cfg = StepperConfig {
        dt: DtMode::Fixed(0.02),
        ..emhd_cfg(0.2)
    };
    let out = run(&s0, &p, &cfg, &mut tracker, &mut Vec::new()).unwrap();
    // three steps of 1/60 per 0.05 interval
    assert_eq!(out.steps, 12);
}

#[test]
fn checkpoint_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ckpt");
    let p = PhysParams::new(0.1, 0.2, 0.7).unwrap();
    for (tag, name) in [
        (ModelTag::Hall25d, ScenarioName::RandomDivfree),
        (ModelTag::EmhdStream, ScenarioName::SmallCurl3),
        (ModelTag::HmhdStream, ScenarioName::RandomDivfree),
    ] {
        let mut s = state(name, tag, 16, 9, &p);
        s.time = 0.123456789;
        save_checkpoint(&s, &p, &path).unwrap();
        let ck = load_checkpoint(&path).unwrap();
        assert_eq!(ck.params, p);
        assert_eq!(ck.state.time, s.time);
        assert_eq!(ck.state.tag(), tag);
        for (a, b) in ck
            .state
            .fields
            .components()
            .iter()
            .zip(s.fields.components())
        {
            assert_eq!(a.coeffs(), b.coeffs());
        }
        assert!(ck.progress.is_none());
    }
    assert!(!dir.path().join("s.tmp").exists());
}

#[test]
fn corrupted_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ckpt");
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let s = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 16, 1, &p);
    save_checkpoint(&s, &p, &path).unwrap();
    let good = fs::read(&path).unwrap();
    assert_eq!(&good[..8], CHECKPOINT_MAGIC);

    let mut bad = good.clone();
    bad[0] ^= 0xff;
    fs::write(&path, &bad).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Format(m)) if m.contains("magic")));

    let mut bad = good.clone();
    bad[8] = 99;
    fs::write(&path, &bad).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Format(m)) if m.contains("version")));

    fs::write(&path, &good[..good.len() - 20]).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Format(m)) if m.contains("truncated")));

    let mut bad = good.clone();
    bad.push(0);
    fs::write(&path, &bad).unwrap();
    assert!(matches!(load_checkpoint(&path), Err(Error::Format(_))));
}

#[test]
fn checkpoint_on_another_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ckpt");
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let s = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 16, 1, &p);
    save_checkpoint(&s, &p, &path).unwrap();
    assert!(load_checkpoint_for(&path, &GridSpec::new(2, 16)).is_ok());
    assert!(matches!(
        load_checkpoint_for(&path, &GridSpec::new(2, 32)),
        Err(Error::GridMismatch(_))
    ));
}

#[test]
fn resumed_run_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ckpt");
    let p = PhysParams::new(0.0, 0.1, 1.0).unwrap();
    let s0 = state(ScenarioName::SmallCurl3, ModelTag::EmhdStream, 32, 4, &p);
    let opts = DiagnosticsOptions::default();

    let mut full: Vec<DiagnosticsRecord> = Vec::new();
    let mut tracker = DiagnosticsTracker::new(p, opts.clone()).unwrap();
    let straight = run(&s0, &p, &emhd_cfg(0.4), &mut tracker, &mut full).unwrap();

    let control = RunControl {
        checkpoint: Some(CheckpointPolicy {
            path: path.clone(),
            every: 0.1,
        }),
        ..RunControl::default()
    };
    let mut first: Vec<DiagnosticsRecord> = Vec::new();
    let mut tracker = DiagnosticsTracker::new(p, opts.clone()).unwrap();
    run_with(&s0, &p, &emhd_cfg(0.2), &mut tracker, &mut first, &control).unwrap();

    let ck = load_checkpoint(&path).unwrap();
    assert_eq!(ck.state.time, 0.2);
    let progress = ck.progress.unwrap();
    let mut tracker = DiagnosticsTracker::with_state(p, opts, progress.tracker.clone()).unwrap();
    let resume = RunControl {
        progress: Some(progress),
        ..RunControl::default()
    };
    let mut second: Vec<DiagnosticsRecord> = Vec::new();
    let resumed = run_with(
        &ck.state,
        &p,
        &emhd_cfg(0.4),
        &mut tracker,
        &mut second,
        &resume,
    )
    .unwrap();

    assert_eq!(resumed.steps, straight.steps);
    for (a, b) in resumed
        .state
        .fields
        .components()
        .iter()
        .zip(straight.state.fields.components())
    {
        assert_eq!(a.coeffs(), b.coeffs());
    }
    let joined: Vec<DiagnosticsRecord> = first.into_iter().chain(second).collect();
    assert_eq!(joined, full);
}

#[test]
fn blow_up_writes_a_failure_record() {
    let dir = tempfile::tempdir().unwrap();
    let p = PhysParams::new(0.0, 0.0, 1.0).unwrap();
    let grid = GridSpec::new(2, 16).build().unwrap();
    let spec = ScenarioSpec::new(ScenarioName::RandomDivfree)
        .with_seed(1)
        .with_amplitude(1e3);
    let s0 = generate_scenario(&spec, ModelTag::Hall25d, &grid, &p).unwrap();
    let cfg = StepperConfig {
        dt: DtMode::Fixed(1.0),
        t_end: 1e4,
        diag_interval: 1.0,
        ..StepperConfig::default()
    };
    let control = RunControl {
        failure_dir: Some(dir.path().to_path_buf()),
        ..RunControl::default()
    };
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    let err = run_with(&s0, &p, &cfg, &mut tracker, &mut Vec::new(), &control).unwrap_err();
    let Error::BlowUp {
        time,
        last_record,
        failure_path,
    } = err
    else {
        panic!("expected blow-up, got {err}");
    };
    assert!(time > 0.0);
    assert!(last_record.is_some());
    let path = failure_path.unwrap();
    let body: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(body["time"].as_f64(), Some(time));
    assert!(body["last_record"]["energy_b"].is_number());
}

#[test]
fn magneto_vorticity_cannot_be_stepped() {
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let s = state(ScenarioName::RandomDivfree, ModelTag::Hall25d, 16, 1, &p);
    let (u, b) = s.primitive().unwrap();
    let u = u.unwrap();
    let mut omega = b.clone();
    omega.axpy(1.0, &hallmhd::spectral::curl(&u));
    let mv = MhdState::new(0.0, Fields::MagnetoVorticity { omega, u, b }).unwrap();
    assert!(matches!(
        step_dt(&mv, &p, &StepperConfig::default(), 0.01),
        Err(Error::InvalidMode(_))
    ));
}
