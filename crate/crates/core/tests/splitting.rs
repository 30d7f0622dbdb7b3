use std::f64::consts::PI;

use hallmhd::splitting::{
    beta_convolution_bound, heat_evolve, l2_norm_sq, log_radii, log_times, low_freq_sup,
    verify_splitting_decay, RadialSpectrum, DEFAULT_FIT_WINDOW, DEFAULT_R_MIN,
};
use proptest::prelude::*;
use statrs::function::beta::beta;
use statrs::function::gamma::gamma_li;

fn gaussian() -> RadialSpectrum {
    RadialSpectrum::from_fn(|r| (-0.5 * r * r).exp()).unwrap()
}

#[test]
fn l2_norm_of_gaussian() {
    // 4π ∫ r² e^{−r²(1+2νt)} dr = π^{3/2} (1+2νt)^{−3/2}, less the
    // 4π r₀³/3 below the first node
    let below = 4.0 * PI * DEFAULT_R_MIN.powi(3) / 3.0;
    let s = gaussian();
    assert!(((l2_norm_sq(&s) + below) / PI.powf(1.5) - 1.0).abs() < 1e-12);
    for (nu, t) in [(1.0, 0.5), (0.3, 4.0), (2.0, 10.0)] {
        let e = l2_norm_sq(&heat_evolve(&s, nu, t).unwrap());
        let exact = PI.powf(1.5) * (1.0 + 2.0 * nu * t).powf(-1.5) - below;
        assert!(
            (e / exact - 1.0).abs() < 1e-12,
            "nu={nu} t={t}: {e} vs {exact}"
        );
    }
}

#[test]
fn heat_decay_of_power_profile_matches_incomplete_gamma() {
    // ‖f(t)‖² = 4π ∫_{r₀}^1 r^{2−2σ} e^{−2νt r²} dr
    //         = 2π (2νt)^{−p} [γ(p, 2νt) − γ(p, 2νt r₀²)], p = 3/2 − σ
    let nu: f64 = 1.0;
    for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let base =
            RadialSpectrum::from_fn(|r| if r <= 1.0 { r.powf(-sigma) } else { 0.0 }).unwrap();
        let p = 1.5 - sigma;
        for t in [10.0, 100.0, 1000.0] {
            let x = 2.0 * nu * t;
            let exact = 2.0
                * PI
                * x.powf(-p)
                * (gamma_li(p, x) - gamma_li(p, x * DEFAULT_R_MIN * DEFAULT_R_MIN));
            let got = l2_norm_sq(&heat_evolve(&base, nu, t).unwrap());
            assert!(
                (got / exact - 1.0).abs() < 1e-6,
                "sigma={sigma} t={t}: {got} vs {exact}"
            );
        }
    }
}

#[test]
fn fitted_exponents_approach_linear_rate() {
    let t = log_times(DEFAULT_FIT_WINDOW, 41).unwrap();
    for sigma in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let d = verify_splitting_decay(sigma, 1.0, &t).unwrap();
        assert_eq!(d.expected(), -(1.5 - sigma));
        assert!(
            (d.exponent - d.expected()).abs() < 0.01,
            "sigma={sigma}: {} vs {}",
            d.exponent,
            d.expected()
        );
        assert!(d.l2_sq.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn splitting_rejects_out_of_range_sigma() {
    let t = [10.0, 100.0];
    let err = verify_splitting_decay(1.5, 1.0, &t)
        .unwrap_err()
        .to_string();
    assert!(err.contains("square integrable"), "{err}");
    assert!(verify_splitting_decay(2.0, 1.0, &t).is_err());
    assert!(verify_splitting_decay(-1.5, 1.0, &t).is_err());
    assert!(verify_splitting_decay(0.0, 0.0, &t).is_err());
    assert!(verify_splitting_decay(0.0, 1.0, &[10.0]).is_err());
    assert!(verify_splitting_decay(0.0, 1.0, &[0.0, 1.0]).is_err());
    assert!(low_freq_sup(&gaussian(), 1.5).is_err());
}

#[test]
fn low_freq_sup_of_power_profile() {
    for sigma in [-1.0, 0.0, 0.7] {
        let s = RadialSpectrum::from_fn(|r| r.powf(-sigma) * (-r).exp()).unwrap();
        // r^σ a(r) = e^{−r} peaks at the smallest node
        let sup = low_freq_sup(&s, sigma).unwrap();
        assert!((sup - (-DEFAULT_R_MIN).exp()).abs() < 1e-12);
    }
}

#[test]
fn radial_grid_and_spectrum_validation() {
    let r = log_radii(1e-2, 1e2, 5).unwrap();
    let expected = [1e-2, 1e-1, 1.0, 1e1, 1e2];
    for (a, b) in r.iter().zip(expected) {
        assert!((a / b - 1.0).abs() < 1e-14);
    }
    assert_eq!(*r.last().unwrap(), 1e2);
    assert!(log_radii(0.0, 1.0, 4).is_err());
    assert!(log_radii(1.0, 1.0, 4).is_err());
    assert!(log_radii(1.0, 2.0, 1).is_err());
    assert!(RadialSpectrum::new(vec![1.0, 2.0], vec![1.0]).is_err());
    assert!(RadialSpectrum::new(vec![2.0, 1.0], vec![1.0, 1.0]).is_err());
    assert!(RadialSpectrum::new(vec![1.0, 2.0], vec![1.0, -1.0]).is_err());
    assert!(RadialSpectrum::new(vec![1.0, 2.0], vec![1.0, f64::NAN]).is_err());
    assert!(heat_evolve(&gaussian(), -1.0, 1.0).is_err());
    assert!(heat_evolve(&gaussian(), 1.0, -1.0).is_err());
}

#[test]
fn decay_csv_has_one_row_per_time() {
    let t = log_times((10.0, 100.0), 5).unwrap();
    let d = verify_splitting_decay(0.0, 1.0, &t).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let mut rd = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(rd.headers().unwrap(), vec!["t", "l2_sq", "exponent"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    let v: f64 = rows[2][1].parse().unwrap();
    assert_eq!(v, d.l2_sq[2]);
}

#[test]
fn beta_bound_matches_beta_function() {
    for b in [0.05, 0.2, 0.5, 0.73, 0.95] {
        let a = 1.0 - b;
        let got = beta_convolution_bound(a, b).unwrap();
        let oracle = beta(1.0 - a, 1.0 - b);
        assert!(
            (got / oracle - 1.0).abs() < 1e-12,
            "beta={b}: {got} vs {oracle}"
        );
    }
    assert!(beta_convolution_bound(0.0, 1.0).is_err());
    assert!(beta_convolution_bound(0.3, 0.3).is_err());
    assert!(beta_convolution_bound(1.2, -0.2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn heat_semigroup(nu in 0.01f64..3.0, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let s = gaussian();
        let a = heat_evolve(&heat_evolve(&s, nu, t1).unwrap(), nu, t2).unwrap();
        let b = heat_evolve(&s, nu, t1 + t2).unwrap();
        for (x, y) in a.amplitude().iter().zip(b.amplitude()) {
            prop_assert!((x - y).abs() <= 1e-12 * y + 1e-280, "{} vs {}", x, y);
        }
    }

    #[test]
    fn heat_decreases_norm(nu in 0.01f64..3.0, t in 0.0f64..20.0, dt in 1e-3f64..5.0) {
        let s = RadialSpectrum::from_fn(|r| r.powf(0.3) / (1.0 + r * r)).unwrap();
        let e0 = l2_norm_sq(&heat_evolve(&s, nu, t).unwrap());
        let e1 = l2_norm_sq(&heat_evolve(&s, nu, t + dt).unwrap());
        prop_assert!(e1 < e0);
    }

    #[test]
    fn beta_bound_is_symmetric(b in 0.02f64..0.98) {
        let x = beta_convolution_bound(1.0 - b, b).unwrap();
        let y = beta_convolution_bound(b, 1.0 - b).unwrap();
        prop_assert!((x / y - 1.0).abs() < 1e-12);
    }
}
