use hallmhd::models::{
    hall_term, rhs_decoupled_b, rhs_emhd_stream, rhs_emhd_vector, rhs_hall_mhd_25d,
    rhs_hall_mhd_3d, rhs_hall_mhd_literal, rhs_hmhd_stream, rhs_navier_stokes,
};
use hallmhd::scenario::RandomFields;
use hallmhd::spectral::{
    curl, field_to_stream, inner_vec, stream_to_field, vector_potential, Grid, GridSpec, Normed,
    SpectralScalar, SpectralVector,
};
use hallmhd::{Error, PhysParams};
use proptest::prelude::*;

fn grid(dim: usize, n: usize) -> Grid {
    GridSpec::new(dim, n).build().unwrap()
}

fn rel_diff(a: &SpectralVector, b: &SpectralVector) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.l2_sq().sqrt() / a.l2_sq().max(b.l2_sq()).sqrt().max(f64::MIN_POSITIVE)
}

fn pair(seed: u64, g: &Grid, k_max: f64) -> (SpectralVector, SpectralVector) {
    let mut r = RandomFields::new(seed, -5.0 / 3.0, k_max);
    (r.divfree(g, 1.0), r.divfree(g, 1.0))
}

fn fd4(values: &[f64], n: usize, axis: usize, dx: f64) -> Vec<f64> {
    let stride = if axis == 0 { n } else { 1 };
    (0..values.len())
        .map(|i| {
            let pos = (i / stride) % n;
            let at = |off: isize| {
                let p = (pos as isize + off).rem_euclid(n as isize) as usize;
                values[i - pos * stride + p * stride]
            };
            (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * dx)
        })
        .collect()
}

/// Curl of an x₃-independent field by fourth-order differences.
fn fd_curl(v: &[Vec<f64>; 3], n: usize, dx: f64) -> [Vec<f64>; 3] {
    let d = |f: &[f64], a| fd4(f, n, a, dx);
    let (d1v3, d2v3) = (d(&v[2], 0), d(&v[2], 1));
    let (d1v2, d2v1) = (d(&v[1], 0), d(&v[0], 1));
    [
        d2v3,
        d1v3.iter().map(|x| -x).collect(),
        d1v2.iter().zip(&d2v1).map(|(a, b)| a - b).collect(),
    ]
}

fn cross(a: &[Vec<f64>; 3], b: &[Vec<f64>; 3]) -> [Vec<f64>; 3] {
    let len = a[0].len();
    let c = |i: usize, j: usize| -> Vec<f64> {
        (0..len)
            .map(|x| a[i][x] * b[j][x] - a[j][x] * b[i][x])
            .collect()
    };
    [c(1, 2), c(2, 0), c(0, 1)]
}

/// Largest deviation of the spectral Hall term from a fourth-order finite
/// difference evaluation, relative to the term's size.
fn hall_fd_error(n: usize) -> f64 {
    let g = grid(2, n);
    let psi = SpectralScalar::from_fn(&g, |x| {
        x[0].sin() * (2.0 * x[1]).cos() + 0.5 * (x[0] + x[1]).cos()
    });
    let b3 = SpectralScalar::from_fn(&g, |x| x[0].cos() + (2.0 * x[1]).sin());
    let b = stream_to_field(&psi, &b3).unwrap();
    let spec = hall_term(&b).to_physical();

    let bp = b.to_physical();
    let j = fd_curl(&bp, n, g.dx());
    let oracle = fd_curl(&cross(&j, &bp), n, g.dx());
    let scale = spec.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    let err = (0..3)
        .flat_map(|i| spec[i].iter().zip(&oracle[i]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    err / scale
}

#[test]
fn hall_term_agrees_with_finite_differences() {
    let (coarse, fine) = (hall_fd_error(96), hall_fd_error(192));
    assert!(coarse < 1e-3, "{coarse}");
    let order = (coarse / fine).log2();
    assert!((order - 4.0).abs() < 0.2, "observed order {order}");
}

#[test]
fn component_form_matches_literal_form_in_two_and_a_half_d() {
    let g = grid(2, 32);
    let p = PhysParams::new(0.1, 0.05, 0.7).unwrap();
    for seed in 0..4 {
        let (u, b) = pair(seed, &g, 8.0);
        let (du, db) = rhs_hall_mhd_25d(&u, &b, &p).unwrap();
        let (lu, lb) = rhs_hall_mhd_literal(&u, &b, &p).unwrap();
        assert!(rel_diff(&du, &lu) < 1e-12, "seed {seed}");
        assert!(rel_diff(&db, &lb) < 1e-12, "seed {seed}");
    }
}

#[test]
fn three_d_reduces_to_two_and_a_half_d_for_planar_data() {
    let n = 16;
    let (g2, g3) = (grid(2, n), grid(3, n));
    let p = PhysParams::new(0.1, 0.2, 1.0).unwrap();
    // planar band-limited data, independent of x₃
    let uf = |x: [f64; 3]| {
        let (a, b) = (x[0], x[1]);
        [
            (b).sin() + 0.6 * (a + 2.0 * b).cos(),
            (a).cos() - 0.3 * (a + 2.0 * b).cos(),
            (a - b).sin(),
        ]
    };
    let bf = |x: [f64; 3]| {
        let (a, b) = (x[0], x[1]);
        [(2.0 * b).cos(), (a).sin(), (a).cos() * (b).sin()]
    };
    let (u2, b2) = (
        SpectralVector::from_fn(&g2, uf),
        SpectralVector::from_fn(&g2, bf),
    );
    let (u3, b3) = (
        SpectralVector::from_fn(&g3, uf),
        SpectralVector::from_fn(&g3, bf),
    );
    let (du2, db2) = rhs_hall_mhd_25d(&u2, &b2, &p).unwrap();
    let (du3, db3) = rhs_hall_mhd_3d(&u3, &b3, &p).unwrap();
    for (v2, v3) in [(du2, du3), (db2, db3)] {
        let (a, b) = (v2.to_physical(), v3.to_physical());
        for i in 0..3 {
            // x₃ is the fastest axis on the 3D grid
            for (x, v) in b[i].iter().enumerate() {
                assert!((a[i][x / n] - v).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn emhd_stream_matches_vector_form() {
    let g = grid(2, 32);
    let p = PhysParams::new(0.0, 0.1, 1.3).unwrap();
    for seed in 10..13 {
        let (_, b) = pair(seed, &g, 8.0);
        let (psi, b3) = field_to_stream(&b).unwrap();
        let (tpsi, tb3) = rhs_emhd_stream(&psi, &b3, &p).unwrap();
        let from_stream = stream_to_field(&tpsi, &tb3).unwrap();
        let vector = rhs_emhd_vector(&b, &p).unwrap();
        assert!(rel_diff(&from_stream, &vector) < 1e-12, "seed {seed}");
    }
}

#[test]
fn hmhd_stream_matches_vector_form() {
    let g = grid(2, 32);
    let p = PhysParams::new(0.05, 0.1, 0.8).unwrap();
    let (u, b) = pair(21, &g, 8.0);
    let (phi, u3) = field_to_stream(&u).unwrap();
    let (psi, b3) = field_to_stream(&b).unwrap();
    let (tpsi, tb3) = rhs_hmhd_stream(&phi, &u3, &psi, &b3, &p).unwrap();
    let (_, db) = rhs_hall_mhd_25d(&u, &b, &p).unwrap();
    assert!(rel_diff(&stream_to_field(&tpsi, &tb3).unwrap(), &db) < 1e-12);
}

#[test]
fn velocity_equation_without_field_is_navier_stokes() {
    let g = grid(3, 16);
    let (u, _) = pair(3, &g, 4.0);
    let p = PhysParams::new(0.07, 0.1, 1.0).unwrap();
    let (du, db) = rhs_hall_mhd_3d(&u, &SpectralVector::zeros(&g), &p).unwrap();
    assert!(rel_diff(&du, &rhs_navier_stokes(&u, 0.07).unwrap()) < 1e-12);
    assert!(db.max_abs_coeff() < 1e-15);
}

#[test]
fn decoupled_equation_matches_full_system_on_the_manifold() {
    // B = −hω with ν = η, so u = −A/h
    let g = grid(3, 16);
    let h = 0.8;
    let p = PhysParams::new(0.1, 0.1, h).unwrap();
    let (w, _) = pair(7, &g, 4.0);
    let b = curl(&w).scaled(-h);
    let u = w.clone();
    let a = vector_potential(&b).unwrap();
    assert!(rel_diff(&a.scaled(-1.0 / h), &u) < 1e-12);
    let (_, db) = rhs_hall_mhd_3d(&u, &b, &p).unwrap();
    assert!(rel_diff(&rhs_decoupled_b(&b, &p).unwrap(), &db) < 1e-12);
}

#[test]
fn decoupled_equation_needs_hall_parameter() {
    let g = grid(3, 8);
    let (_, b) = pair(1, &g, 3.0);
    let p = PhysParams::new(0.1, 0.1, 0.0).unwrap();
    assert!(rhs_decoupled_b(&b, &p).is_err());
}

#[test]
fn inputs_are_validated() {
    let g = grid(2, 16);
    let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
    let bad = SpectralVector::from_fn(&g, |x| [x[0].sin(), 0.0, 0.0]);
    let (u, _) = pair(2, &g, 4.0);
    assert!(matches!(
        rhs_hall_mhd_25d(&u, &bad, &p),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        rhs_hall_mhd_3d(&u, &u, &p),
        Err(Error::InvalidMode(_))
    ));
    assert!(PhysParams::new(-1.0, 0.1, 1.0).is_err());
    assert!(PhysParams::new(0.1, f64::NAN, 1.0).is_err());
    let other = grid(2, 8);
    let (_, b8) = pair(2, &other, 3.0);
    assert!(matches!(
        rhs_hall_mhd_25d(&u, &b8, &p),
        Err(Error::GridMismatch(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The inviscid nonlinear terms exchange energy but create none.
    #[test]
    fn nonlinear_terms_conserve_energy(seed in 0u64..10_000, h in 0.0..2.0f64) {
        let g = grid(2, 24);
        let (u, b) = pair(seed, &g, 6.0);
        let p = PhysParams::new(0.0, 0.0, h).unwrap();
        let (du, db) = rhs_hall_mhd_25d(&u, &b, &p).unwrap();
        let rate = inner_vec(&du, &u) + inner_vec(&db, &b);
        let scale = du.l2_sq().sqrt() * u.l2_sq().sqrt() + db.l2_sq().sqrt() * b.l2_sq().sqrt();
        prop_assert!(rate.abs() <= 1e-12 * scale, "rate {rate} scale {scale}");
    }

    /// With only diffusion active the energy decays at exactly the
    /// dissipation rate.
    #[test]
    fn energy_rate_equals_dissipation(seed in 0u64..10_000, nu in 0.0..1.0f64, eta in 0.0..1.0f64) {
        let g = grid(2, 24);
        let (u, b) = pair(seed, &g, 6.0);
        let p = PhysParams::new(nu, eta, 1.0).unwrap();
        let (du, db) = rhs_hall_mhd_25d(&u, &b, &p).unwrap();
        let rate = inner_vec(&du, &u) + inner_vec(&db, &b);
        let diss = nu * u.grad_pow_sq(1) + eta * b.grad_pow_sq(1);
        prop_assert!((rate + diss).abs() <= 1e-11 * (diss + du.l2_sq().sqrt()));
    }

    /// The Hall term does no work on the magnetic field.
    #[test]
    fn hall_term_is_orthogonal_to_field(seed in 0u64..10_000) {
        let g = grid(3, 12);
        let (_, b) = pair(seed, &g, 3.0);
        let t = hall_term(&b);
        prop_assert!(inner_vec(&t, &b).abs() <= 1e-12 * t.l2_sq().sqrt() * b.l2_sq().sqrt());
    }

    #[test]
    fn tendencies_stay_divergence_free(seed in 0u64..10_000) {
        let g = grid(2, 24);
        let (u, b) = pair(seed, &g, 6.0);
        let p = PhysParams::new(0.1, 0.1, 1.0).unwrap();
        let (du, db) = rhs_hall_mhd_25d(&u, &b, &p).unwrap();
        prop_assert!(du.is_divergence_free(1e-12));
        prop_assert!(db.is_divergence_free(1e-12));
    }
}
