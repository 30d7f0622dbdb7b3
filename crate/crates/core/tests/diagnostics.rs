use std::f64::consts::PI;

use hallmhd::diagnostics::{
    calibrate_c, conjugate_exponent, delta_psi_identity_residual, energy_of, fit_decay_exponent,
    gronwall_verify, hall_cancellation_residual_of, log_sobolev_ratio, magneto_vorticity_of,
    monotonicity_monitor, xr_integrand, Accumulator, CsvSink, DiagnosticsOptions,
    DiagnosticsRecord, DiagnosticsTracker, GronwallSamples, MonitorKind, RecordSink,
};
use hallmhd::scenario::RandomFields;
use hallmhd::spectral::{Grid, GridSpec, SpectralScalar, SpectralVector};
use hallmhd::{Fields, MhdState, PhysParams};
use proptest::prelude::*;

fn grid(dim: usize, n: usize) -> Grid {
    GridSpec::new(dim, n).build().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn energy_functionals_of_single_modes() {
    let g = grid(2, 16);
    let u = SpectralVector::from_fn(&g, |x| [x[1].sin(), 0.0, 0.0]);
    let b = SpectralVector::from_fn(&g, |x| [0.0, 0.0, (2.0 * x[0]).cos()]);
    let e = energy_of(Some(&u), &b);
    // ∫∫ sin² = 2π² on [0, 2π]²
    let q = 2.0 * PI * PI;
    assert!(close(e.energy_u, q, 1e-13));
    assert!(close(e.diss_u, q, 1e-13));
    assert!(close(e.energy_b, q, 1e-13));
    assert!(close(e.diss_b, 4.0 * q, 1e-13));
    assert!(close(e.total(), 2.0 * q, 1e-13));

    // ω = ∇×u = (0, 0, −cos x₂)
    let h = 0.7;
    let mv = magneto_vorticity_of(Some(&u), &b, h);
    assert!(close(mv.l2_sq, q * (1.0 + h * h), 1e-13));
    // H¹ weight 1 + |k|²: 2 for the h-mode, 5 for the B-mode
    assert!(close(mv.h1_sq, q * (5.0 + 2.0 * h * h), 1e-13));
}

#[test]
fn xr_integrand_of_cosine() {
    let g = grid(2, 16);
    let f = SpectralScalar::from_fn(&g, |x| x[0].cos());
    assert!(close(
        xr_integrand(&[&f], 2.0).unwrap(),
        2.0 * PI * PI,
        1e-13
    ));
    // r = 4 gives r' = 4 and ‖cos‖⁴_{L⁴} = ∫∫ cos⁴ = 3π²/2
    assert_eq!(conjugate_exponent(4.0), 4.0);
    assert!(close(
        xr_integrand(&[&f], 4.0).unwrap(),
        1.5 * PI * PI,
        1e-12
    ));
    assert!(xr_integrand(&[&f], 1.5).is_err());
    assert!(xr_integrand(&[&f], f64::INFINITY).is_err());
}

#[test]
fn log_sobolev_ratio_of_single_mode() {
    for m in [1.0, 3.0] {
        let g = grid(2, 32);
        let f = SpectralScalar::from_fn(&g, |x| (m * x[0]).cos());
        let grad = (2.0 * PI * PI).sqrt() * m;
        let arg: f64 = (1.0 + m * m + m.powi(4)) / (m * m);
        let expected = 1.0 / (grad * (1.0 + arg.ln().sqrt()));
        assert!(close(log_sobolev_ratio(&f).unwrap(), expected, 1e-12));
    }
    let constant = SpectralScalar::from_fn(&grid(2, 8), |_| 1.0);
    assert!(log_sobolev_ratio(&constant).is_err());
    let f3 = SpectralScalar::from_fn(&grid(3, 8), |x| x[0].cos());
    assert!(log_sobolev_ratio(&f3).is_err());
}

#[test]
fn accumulator_is_exact_for_linear_integrands() {
    let mut acc = Accumulator::default();
    let times = [0.0, 0.1, 0.35, 0.4, 1.2, 2.0];
    for &t in &times {
        acc.push(t, 3.0 * t + 1.0);
    }
    assert!(close(acc.value, 8.0, 1e-14));

    let before = acc;
    let peeked = acc.peek(0.5, 3.0 * 2.5 + 1.0);
    assert_eq!(acc, before);
    // ∫₂^2.5 (3t+1) dt = 3.875
    assert!(close(peeked, 8.0 + 3.875, 1e-14));

    assert_eq!(Accumulator::default().peek(1.0, 5.0), 0.0);
}

#[test]
fn decay_fit_recovers_exact_power_law() {
    let t: Vec<f64> = (0..60).map(|i| 1.2f64.powi(i)).collect();
    let v: Vec<f64> = t.iter().map(|t| 3.0 * (1.0 + t).powf(-0.75)).collect();
    let fit = fit_decay_exponent(&t, &v, (10.0, 1e4)).unwrap();
    assert!((fit.exponent + 0.75).abs() < 1e-12);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-11);
    assert!(fit.residual < 1e-12);
    assert_eq!(
        fit.samples,
        t.iter().filter(|&&x| (10.0..=1e4).contains(&x)).count()
    );
}

#[test]
fn decay_fit_rejects_bad_input() {
    let t = [1.0, 2.0, 3.0];
    assert!(fit_decay_exponent(&t, &[1.0, 2.0], (0.0, 5.0)).is_err());
    assert!(fit_decay_exponent(&t, &[1.0, 0.0, 1.0], (0.0, 5.0)).is_err());
    assert!(fit_decay_exponent(&t, &[1.0, 1.0, 1.0], (2.5, 5.0)).is_err());
    // a nonpositive value outside the window is ignored
    assert!(fit_decay_exponent(&t, &[-1.0, 1.0, 0.5], (1.5, 5.0)).is_ok());
}

fn samples(n: usize, h: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * h).collect()
}

#[test]
fn gronwall_equality_case_holds() {
    let (alpha, beta) = (0.5, 2.0);
    let t = samples(201, 0.01);
    let x: Vec<f64> = t.iter().map(|t| 0.5 * (-t).exp()).collect();
    // X' + (1 + β(1 − X^α)) D = 0 with E = W = 0
    let d: Vec<f64> = x
        .iter()
        .map(|x| x / (1.0 + beta * (1.0 - x.powf(alpha))))
        .collect();
    let zeros = vec![0.0; t.len()];
    let s = GronwallSamples {
        t: &t,
        x: &x,
        d: &d,
        e: &zeros,
        w: &zeros,
    };
    let r = gronwall_verify(s, alpha, beta, 1e-4).unwrap();
    assert!(r.hypothesis_holds);
    assert!(r.hypothesis_margin.abs() < 1e-4);
    assert!((r.gate - 0.5).abs() < 1e-15);
    assert_eq!(r.conclusion_holds, Some(true));
    assert!(r.margin >= 0.0);
}

#[test]
fn gronwall_detects_violation_and_closed_gate() {
    let t = samples(11, 0.1);
    let zeros = vec![0.0; t.len()];
    let growing: Vec<f64> = t.iter().map(|t| 0.5 + t).collect();
    let s = GronwallSamples {
        t: &t,
        x: &growing,
        d: &zeros,
        e: &zeros,
        w: &zeros,
    };
    let r = gronwall_verify(s, 1.0, 1.0, 1e-6).unwrap();
    assert!(!r.hypothesis_holds);
    assert!((r.hypothesis_margin + 1.0).abs() < 1e-12);
    assert_eq!(r.conclusion_holds, Some(false));
    assert!((r.margin + 1.0).abs() < 1e-12);

    let big = vec![2.0; t.len()];
    let s = GronwallSamples {
        t: &t,
        x: &big,
        d: &zeros,
        e: &zeros,
        w: &zeros,
    };
    let r = gronwall_verify(s, 1.0, 1.0, 1e-6).unwrap();
    assert!(r.hypothesis_holds);
    assert_eq!(r.conclusion_holds, None);
}

#[test]
fn gronwall_rejects_bad_grids() {
    let zeros = [0.0; 3];
    let ok = |t: &[f64]| {
        gronwall_verify(
            GronwallSamples {
                t,
                x: &zeros,
                d: &zeros,
                e: &zeros,
                w: &zeros,
            },
            1.0,
            1.0,
            0.0,
        )
    };
    assert!(ok(&[0.0, 0.1, 0.3]).is_err());
    assert!(ok(&[0.0, 0.0, 0.0]).is_err());
    assert!(ok(&[0.0, 0.1, 0.2]).is_ok());
    assert!(gronwall_verify(
        GronwallSamples {
            t: &[0.0, 0.1],
            x: &zeros,
            d: &zeros,
            e: &zeros,
            w: &zeros,
        },
        1.0,
        1.0,
        0.0
    )
    .is_err());
}

#[test]
fn calibrate_c_finds_threshold() {
    let lhs = 2f64.exp();
    let c = calibrate_c(lhs, f64::exp).unwrap();
    assert!((c - 2.0).abs() < 1e-12);
    assert_eq!(calibrate_c(0.5, |c| 1.0 + c), Some(0.0));
    assert_eq!(calibrate_c(1.0, |_| 0.5), None);
    assert_eq!(calibrate_c(1.0, |_| f64::NAN), None);
}

fn random_hall25d(seed: u64, n: usize) -> (SpectralVector, SpectralVector) {
    let g = grid(2, n);
    let mut r = RandomFields::new(seed, -5.0 / 3.0, n as f64 / 4.0);
    (r.divfree(&g, 1.0), r.divfree(&g, 1.0))
}

fn tracked_records(
    p: PhysParams,
    times: &[f64],
    scale: impl Fn(f64) -> f64,
) -> Vec<DiagnosticsRecord> {
    let (u, b) = random_hall25d(5, 16);
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    times
        .iter()
        .map(|&t| {
            let s = MhdState::new(
                t,
                Fields::Hall25d {
                    u: u.scaled(scale(t)),
                    b: b.scaled(scale(t)),
                },
            )
            .unwrap();
            tracker.observe(&s).unwrap()
        })
        .collect()
}

#[test]
fn tracker_accumulates_trapezoidally() {
    let p = PhysParams::new(0.1, 0.2, 1.0).unwrap();
    let times = [0.0, 0.1, 0.3, 0.6];
    let recs = tracked_records(p, &times, |t| (-t).exp());
    let mut acc = 0.0;
    for w in recs.windows(2) {
        let g = |r: &DiagnosticsRecord| p.nu * r.diss_u + p.eta * r.diss_b;
        acc += 0.5 * (w[1].time - w[0].time) * (g(&w[0]) + g(&w[1]));
        assert!(close(w[1].diss_acc, acc, 1e-13));
        assert!(close(
            w[1].energy_balance,
            w[1].energy() + 2.0 * w[1].diss_acc,
            1e-13
        ));
    }
    assert_eq!(recs[0].diss_acc, 0.0);
    assert!(recs.iter().all(|r| r.xr.len() == 3));
    assert!(recs
        .iter()
        .all(|r| r.hall_cancellation.unwrap() < 1e-10 && r.delta_psi_identity.unwrap() < 1e-10));
    assert!(recs
        .iter()
        .all(|r| r.gamma_weight > 0.0 && r.gamma_weight <= 1.0));
}

#[test]
fn tracker_rejects_time_reversal() {
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let (u, b) = random_hall25d(1, 8);
    let mut tracker = DiagnosticsTracker::new(p, DiagnosticsOptions::default()).unwrap();
    let at = |t| {
        MhdState::new(
            t,
            Fields::Hall25d {
                u: u.clone(),
                b: b.clone(),
            },
        )
        .unwrap()
    };
    tracker.observe(&at(1.0)).unwrap();
    assert!(tracker.observe(&at(0.5)).is_err());
}

#[test]
fn monitors_flag_growth_only() {
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let times = [0.0, 0.1, 0.2, 0.3];
    let decaying = tracked_records(p, &times, |t| 1.0 - t);
    let kind = MonitorKind::GradBNonincreasing {
        rel_tol: 0.0,
        delta_psi_threshold: f64::INFINITY,
    };
    assert!(monotonicity_monitor(&decaying, kind).is_empty());

    let mut bumped = decaying.clone();
    bumped[2].grad_b_l2_sq = 2.0 * bumped[1].grad_b_l2_sq;
    let v = monotonicity_monitor(&bumped, kind);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].index, 2);
    assert_eq!(v[0].time, bumped[2].time);
    assert!(close(v[0].excess, bumped[1].grad_b_l2_sq, 1e-14));

    // above the Δψ threshold the monitor is silent
    let gated = MonitorKind::GradBNonincreasing {
        rel_tol: 0.0,
        delta_psi_threshold: 0.0,
    };
    assert!(monotonicity_monitor(&bumped, gated).is_empty());

    let diss = MonitorKind::GradBDissipation { eta: 0.0, tol: 0.0 };
    assert!(monotonicity_monitor(&decaying, diss).is_empty());
    assert_eq!(monotonicity_monitor(&bumped, diss).len(), 1);
}

#[test]
fn identity_residuals_vanish_on_random_fields() {
    let p = PhysParams::new(0.05, 0.02, 0.8).unwrap();
    for seed in 0..3 {
        let (u, b) = random_hall25d(seed, 32);
        assert!(hall_cancellation_residual_of(&u, &b, &p).unwrap() < 1e-12);
        let psi = SpectralScalar::from_fn(&grid(2, 32), |x| {
            (x[0] + 2.0 * x[1]).sin() + 0.3 * (3.0 * x[0]).cos() * x[1].sin()
        });
        assert!(delta_psi_identity_residual(&psi, b.comp(2)).unwrap() < 1e-12);
    }
    let g = grid(2, 8);
    let zero = SpectralVector::zeros(&g);
    assert_eq!(
        hall_cancellation_residual_of(&zero, &zero, &p).unwrap(),
        0.0
    );
}

#[test]
fn csv_columns_match_cells() {
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let recs = tracked_records(p, &[0.0, 0.1], |_| 1.0);
    let cols = DiagnosticsRecord::columns(&[2.0, 4.0, 6.0]);
    assert_eq!(cols.len(), DiagnosticsRecord::BASE_COLUMNS.len() + 12);
    assert_eq!(cols[28], "xr2_grad_b3");
    assert_eq!(cols.last().unwrap(), "xr6_grad_omega_h");
    for r in &recs {
        let cells = r.cells();
        assert_eq!(cells.len(), cols.len());
        let t: f64 = cells[0].parse().unwrap();
        assert_eq!(t, r.time);
        let e: f64 = cells[2].parse().unwrap();
        assert_eq!(e, r.energy_b);
    }

    let mut sink = CsvSink::new(Vec::new());
    for r in &recs {
        sink.emit(r).unwrap();
    }
    sink.finish().unwrap();
    let text = String::from_utf8(sink.into_inner().unwrap()).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, cols);
    assert_eq!(reader.records().count(), 2);

    let mut appending = CsvSink::appending(Vec::new());
    appending.emit(&recs[0]).unwrap();
    let text = String::from_utf8(appending.into_inner().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accumulator_is_additive(gs in prop::collection::vec(-5.0f64..5.0, 2..20), split in 1usize..19) {
        let split = split.min(gs.len() - 1);
        let mut whole = Accumulator::default();
        for (i, &g) in gs.iter().enumerate() {
            whole.push(i as f64 * 0.1, g);
        }
        let mut first = Accumulator::default();
        for (i, &g) in gs[..=split].iter().enumerate() {
            first.push(i as f64 * 0.1, g);
        }
        let mut second = Accumulator::default();
        for (i, &g) in gs[split..].iter().enumerate() {
            second.push((i + split) as f64 * 0.1, g);
        }
        prop_assert!((whole.value - first.value - second.value).abs() < 1e-12);
    }

    #[test]
    fn decay_fit_is_scale_invariant(p in -3.0f64..0.0, c in 0.1f64..10.0) {
        let t: Vec<f64> = (0..30).map(|i| 1.3f64.powi(i)).collect();
        let v: Vec<f64> = t.iter().map(|t| c * (1.0 + t).powf(p)).collect();
        let fit = fit_decay_exponent(&t, &v, (0.0, f64::INFINITY)).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-10);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
    }

    #[test]
    fn hall_cancellation_holds_for_random_states(seed in 0u64..1000, h in 0.1f64..2.0) {
        let p = PhysParams::new(0.01, 0.03, h).unwrap();
        let (u, b) = random_hall25d(seed, 16);
        prop_assert!(hall_cancellation_residual_of(&u, &b, &p).unwrap() < 1e-12);
    }
}

#[test]
fn decay_fit_of_constant_series_is_flat() {
    let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
    let fit = fit_decay_exponent(&t, &[2.5; 20], (0.0, 100.0)).unwrap();
    assert!(fit.exponent.abs() < 1e-14);
    assert!((fit.intercept - 2.5f64.ln()).abs() < 1e-14);
}

#[test]
fn decay_fit_on_heat_surrogate() {
    use hallmhd::splitting::{log_times, verify_splitting_decay, DEFAULT_FIT_WINDOW};
    let t = log_times(DEFAULT_FIT_WINDOW, 41).unwrap();
    for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let d = verify_splitting_decay(sigma, 1.0, &t).unwrap();
        let fit = fit_decay_exponent(&d.times, &d.l2_sq, DEFAULT_FIT_WINDOW).unwrap();
        // the (1+t) shift biases the slope by about 0.04 at σ = −1
        assert!(
            (fit.exponent - d.expected()).abs() < 0.05,
            "sigma={sigma}: {}",
            fit.exponent
        );
    }
}

#[test]
fn hall_cancellation_without_hall_term() {
    let p = PhysParams::new(0.1, 0.05, 0.0).unwrap();
    let (u, b) = random_hall25d(9, 16);
    // with h = 0 the magneto-vorticity is B itself and both sides coincide
    assert!(hall_cancellation_residual_of(&u, &b, &p).unwrap() < 1e-12);
}
