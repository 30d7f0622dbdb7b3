//! Right-hand sides. The `nl_*` builders return nonlinear terms only; the
//! public `rhs_*` functions add the diffusion.

use crate::spectral::{
    cross_physical, curl, derivative, field_to_stream, laplacian, leray_project,
    leray_project_in_place, stream_to_field, vector_laplacian, vector_potential, Dealias,
    SpectralScalar, SpectralVector,
};
use crate::{Error, Result};

use super::terms::{cross_dealiased, physical, spectral_dealiased, vector3};
use super::{Fields, ModelTag, PhysParams, RhsOptions, Transport, DIV_TOL};

fn require_div_free(name: &str, v: &SpectralVector) -> Result<()> {
    if v.is_divergence_free(DIV_TOL) {
        Ok(())
    } else {
        Err(Error::precondition(format!(
            "{name} is not divergence-free (defect {:e})",
            v.divergence_defect()
        )))
    }
}

fn require_dim(v: &SpectralScalar, dim: usize, what: &str) -> Result<()> {
    if v.grid().dim() == dim {
        Ok(())
    } else {
        Err(Error::InvalidMode(format!(
            "{what} requires a {dim}D grid, got {}D",
            v.grid().dim()
        )))
    }
}

fn diffuse_vec(t: &mut SpectralVector, s: &SpectralVector, kappa: f64) {
    if kappa != 0.0 {
        t.axpy(kappa, &vector_laplacian(s));
    }
}

fn diffuse(t: &mut SpectralScalar, s: &SpectralScalar, kappa: f64) {
    if kappa != 0.0 {
        t.axpy(kappa, &laplacian(s));
    }
}

/// Adds `κΔf` to every component of a tendency bundle.
pub(crate) fn add_diffusion(t: &mut Fields, s: &Fields, p: &PhysParams) {
    let kappa = Fields::diffusivities(s.tag(), p);
    for ((tc, sc), k) in t
        .components_mut()
        .into_iter()
        .zip(s.components())
        .zip(kappa)
    {
        diffuse(tc, sc, k);
    }
}

/// Hall MHD nonlinear terms in literal vector form, valid on 2D (2½D) and 3D
/// grids: `P[−u·∇u + (∇×B)×B]` and `P[−u·∇B + B·∇u] − h∇×((∇×B)×B)`.
pub(crate) fn nl_hall_literal(
    u: &SpectralVector,
    b: &SpectralVector,
    h: f64,
    transport: Transport,
) -> (SpectralVector, SpectralVector) {
    let grid = u.grid().clone();
    let dim = grid.dim();
    let len = grid.len();
    let j = curl(b);
    let (mom, lor, ind) = match transport {
        Transport::Convective => {
            let mut derivs = Vec::with_capacity(6 * dim);
            for f in [u, b] {
                for a in 0..dim {
                    for i in 0..3 {
                        derivs.push(derivative(f.comp(i), a));
                    }
                }
            }
            let mut refs: Vec<&SpectralScalar> = u
                .comps()
                .iter()
                .chain(b.comps().iter())
                .chain(j.comps().iter())
                .collect();
            refs.extend(derivs.iter());
            let ph = physical(&refs);
            let du = |a: usize, i: usize| &ph[9 + 3 * a + i];
            let db = |a: usize, i: usize| &ph[9 + 3 * dim + 3 * a + i];
            let mut mom = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
            let mut ind = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
            for i in 0..3 {
                for x in 0..len {
                    let (mut adv_u, mut adv_b, mut stretch) = (0.0, 0.0, 0.0);
                    for a in 0..dim {
                        adv_u += ph[a][x] * du(a, i)[x];
                        adv_b += ph[a][x] * db(a, i)[x];
                        stretch += ph[3 + a][x] * du(a, i)[x];
                    }
                    mom[i][x] = -adv_u;
                    ind[i][x] = stretch - adv_b;
                }
            }
            let lor = cross_physical([&ph[6], &ph[7], &ph[8]], [&ph[3], &ph[4], &ph[5]]);
            let mut out = spectral_dealiased(
                &grid,
                &[
                    &mom[0], &mom[1], &mom[2], &lor[0], &lor[1], &lor[2], &ind[0], &ind[1], &ind[2],
                ],
            );
            let ind = vector3(out.split_off(6));
            let lor = vector3(out.split_off(3));
            (vector3(out), lor, ind)
        }
        Transport::Divergence => {
            let refs: Vec<&SpectralScalar> = u
                .comps()
                .iter()
                .chain(b.comps().iter())
                .chain(j.comps().iter())
                .collect();
            let ph = physical(&refs);
            let mut prods: Vec<Vec<f64>> = Vec::with_capacity(3 * dim);
            for a in 0..dim {
                for i in 0..3 {
                    prods.push((0..len).map(|x| ph[a][x] * ph[i][x]).collect());
                }
            }
            let uxb = cross_physical([&ph[0], &ph[1], &ph[2]], [&ph[3], &ph[4], &ph[5]]);
            let lor = cross_physical([&ph[6], &ph[7], &ph[8]], [&ph[3], &ph[4], &ph[5]]);
            let mut refs: Vec<&[f64]> = prods.iter().map(|v| v.as_slice()).collect();
            refs.extend([
                &uxb[0][..],
                &uxb[1][..],
                &uxb[2][..],
                &lor[0][..],
                &lor[1][..],
                &lor[2][..],
            ]);
            let mut out = spectral_dealiased(&grid, &refs);
            let lor = vector3(out.split_off(3 * dim + 3));
            let uxb = vector3(out.split_off(3 * dim));
            let mut mom = [
                SpectralScalar::zeros(&grid),
                SpectralScalar::zeros(&grid),
                SpectralScalar::zeros(&grid),
            ];
            for a in 0..dim {
                for (i, m) in mom.iter_mut().enumerate() {
                    m.axpy(-1.0, &derivative(&out[3 * a + i], a));
                }
            }
            (SpectralVector::from_parts(mom), lor, curl(&uxb))
        }
    };
    let mut du = &mom + &lor;
    leray_project_in_place(&mut du);
    let mut db = ind;
    leray_project_in_place(&mut db);
    if h != 0.0 {
        db.axpy(-h, &curl(&lor));
    }
    (du, db)
}

/// 2½D component form. With `u = None` this is the electron MHD system.
pub(crate) fn nl_hall_25d(
    u: Option<&SpectralVector>,
    b: &SpectralVector,
    h: f64,
) -> (Option<SpectralVector>, SpectralVector) {
    let grid = b.grid().clone();
    let len = grid.len();
    let b3 = b.comp(2);
    let mut spec: Vec<SpectralScalar> = Vec::with_capacity(21);
    // 0,1: B̃; 2..8: ∂_a B_i (index 2 + 3a + i)
    spec.push(b.comp(0).clone());
    spec.push(b.comp(1).clone());
    for a in 0..2 {
        for i in 0..3 {
            spec.push(derivative(b.comp(i), a));
        }
    }
    // 8,9,10: ∂₁₁B³, ∂₁₂B³, ∂₂₂B³
    let d1b3 = derivative(b3, 0);
    let d2b3 = derivative(b3, 1);
    spec.push(derivative(&d1b3, 0));
    spec.push(derivative(&d1b3, 1));
    spec.push(derivative(&d2b3, 1));
    // 11,12: ∇J³
    let j3 = &derivative(b.comp(1), 0) - &derivative(b.comp(0), 1);
    spec.push(derivative(&j3, 0));
    spec.push(derivative(&j3, 1));
    // 13,14: ũ; 15..20: ∂_a u_i (index 15 + 3a + i)
    if let Some(u) = u {
        spec.push(u.comp(0).clone());
        spec.push(u.comp(1).clone());
        for a in 0..2 {
            for i in 0..3 {
                spec.push(derivative(u.comp(i), a));
            }
        }
    }
    let refs: Vec<&SpectralScalar> = spec.iter().collect();
    let ph = physical(&refs);
    let db = |a: usize, i: usize| &ph[2 + 3 * a + i];
    let (b11, b12, b22) = (&ph[8], &ph[9], &ph[10]);
    let (dj1, dj2) = (&ph[11], &ph[12]);

    let mut ind = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for x in 0..len {
        let bt = [ph[0][x], ph[1][x]];
        // J̃ = (∂₂B³, −∂₁B³); ∂_a J̃₁ = ∂_a∂₂B³, ∂_a J̃₂ = −∂_a∂₁B³
        let jt = [db(1, 2)[x], -db(0, 2)[x]];
        let djt = [[b12[x], b22[x]], [-b11[x], -b12[x]]]; // djt[i][a] = ∂_a J̃_i
        for i in 0..2 {
            let b_grad_j = bt[0] * djt[i][0] + bt[1] * djt[i][1];
            let j_grad_b = jt[0] * db(0, i)[x] + jt[1] * db(1, i)[x];
            ind[i][x] = -h * (b_grad_j - j_grad_b);
        }
        ind[2][x] = -h * (bt[0] * dj1[x] + bt[1] * dj2[x]);
    }
    let mut mom = None;
    if u.is_some() {
        let du = |a: usize, i: usize| &ph[15 + 3 * a + i];
        let mut m = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        for x in 0..len {
            let ut = [ph[13][x], ph[14][x]];
            let bt = [ph[0][x], ph[1][x]];
            for i in 0..3 {
                let u_grad_u = ut[0] * du(0, i)[x] + ut[1] * du(1, i)[x];
                let b_grad_b = bt[0] * db(0, i)[x] + bt[1] * db(1, i)[x];
                let u_grad_b = ut[0] * db(0, i)[x] + ut[1] * db(1, i)[x];
                let b_grad_u = bt[0] * du(0, i)[x] + bt[1] * du(1, i)[x];
                m[i][x] = b_grad_b - u_grad_u;
                ind[i][x] += b_grad_u - u_grad_b;
            }
        }
        mom = Some(m);
    }
    let mut out = match &mom {
        Some(m) => spectral_dealiased(&grid, &[&ind[0], &ind[1], &ind[2], &m[0], &m[1], &m[2]]),
        None => spectral_dealiased(&grid, &[&ind[0], &ind[1], &ind[2]]),
    };
    let du = if mom.is_some() {
        let mut v = vector3(out.split_off(3));
        leray_project_in_place(&mut v);
        Some(v)
    } else {
        None
    };
    let mut dbv = vector3(out);
    leray_project_in_place(&mut dbv);
    (du, dbv)
}

/// Stream-function magnetic terms; `vel = Some((φ, u³))` adds the transport
/// by `u = (∂₂φ, −∂₁φ, u³)`.
pub(crate) fn nl_stream_magnetic(
    vel: Option<(&SpectralScalar, &SpectralScalar)>,
    psi: &SpectralScalar,
    b3: &SpectralScalar,
    h: f64,
) -> (SpectralScalar, SpectralScalar) {
    let grid = psi.grid().clone();
    let len = grid.len();
    let lap = laplacian(psi);
    let mut spec = vec![
        derivative(psi, 0),
        derivative(psi, 1),
        derivative(b3, 0),
        derivative(b3, 1),
        derivative(&lap, 0),
        derivative(&lap, 1),
    ];
    if let Some((phi, u3)) = vel {
        spec.extend([
            derivative(phi, 0),
            derivative(phi, 1),
            derivative(u3, 0),
            derivative(u3, 1),
        ]);
    }
    let refs: Vec<&SpectralScalar> = spec.iter().collect();
    let ph = physical(&refs);
    // ∇a·∇⊥b with ∇⊥ = (∂₂, −∂₁)
    let bracket = |a1: f64, a2: f64, c1: f64, c2: f64| a1 * c2 - a2 * c1;
    let mut tpsi = vec![0.0; len];
    let mut tb3 = vec![0.0; len];
    for x in 0..len {
        let (p1, p2) = (ph[0][x], ph[1][x]);
        tpsi[x] = -h * bracket(ph[2][x], ph[3][x], p1, p2);
        tb3[x] = h * bracket(ph[4][x], ph[5][x], p1, p2);
        if vel.is_some() {
            let (f1, f2, w1, w2) = (ph[6][x], ph[7][x], ph[8][x], ph[9][x]);
            tpsi[x] += bracket(f1, f2, p1, p2);
            tb3[x] += -bracket(ph[2][x], ph[3][x], f1, f2) + bracket(w1, w2, p1, p2);
        }
    }
    let mut out = spectral_dealiased(&grid, &[&tpsi, &tb3]);
    let tb3 = out.pop().unwrap();
    let mut tpsi = out.pop().unwrap();
    tpsi.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
    (tpsi, tb3)
}

/// `−∇×((A/h + h∇×B)×B)` with `∇×A = B`, `∇·A = 0`.
pub(crate) fn nl_decoupled(b: &SpectralVector, h: f64) -> Result<SpectralVector> {
    if h == 0.0 {
        return Err(Error::invalid(
            "the decoupled magnetic equation needs h > 0",
        ));
    }
    let a = vector_potential(b)?;
    let mut w = curl(b).scaled(h);
    w.axpy(1.0 / h, &a);
    Ok(-&curl(&cross_dealiased(&w, b)))
}

/// `−u·∇Ω + Ω·∇u + (η−ν)ΔB` with frozen `u` and `B`.
pub(crate) fn nl_magneto_vorticity(
    omega: &SpectralVector,
    u: &SpectralVector,
    b: &SpectralVector,
    p: &PhysParams,
) -> SpectralVector {
    let grid = u.grid().clone();
    let dim = grid.dim();
    let len = grid.len();
    let mut spec = Vec::with_capacity(6 * dim);
    for f in [omega, u] {
        for a in 0..dim {
            for i in 0..3 {
                spec.push(derivative(f.comp(i), a));
            }
        }
    }
    let mut refs: Vec<&SpectralScalar> = omega.comps().iter().chain(u.comps().iter()).collect();
    refs.extend(spec.iter());
    let ph = physical(&refs);
    let dom = |a: usize, i: usize| &ph[6 + 3 * a + i];
    let du = |a: usize, i: usize| &ph[6 + 3 * dim + 3 * a + i];
    let mut t = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    for (i, ti) in t.iter_mut().enumerate() {
        for x in 0..len {
            let mut acc = 0.0;
            for a in 0..dim {
                acc += ph[a][x] * du(a, i)[x] - ph[3 + a][x] * dom(a, i)[x];
            }
            ti[x] = acc;
        }
    }
    let mut out = vector3(spectral_dealiased(&grid, &[&t[0], &t[1], &t[2]]));
    let d = p.eta - p.nu;
    if d != 0.0 {
        out.axpy(d, &vector_laplacian(b));
    }
    out
}

fn stream_ignoring_mean(v: &SpectralVector) -> Result<(SpectralScalar, SpectralScalar)> {
    let mut w = v.clone();
    for i in 0..2 {
        w.comp_mut(i).coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
    }
    field_to_stream(&w)
}

/// Nonlinear (and, for the magneto-vorticity, non-diagonal linear) part of
/// the tendency of any tagged bundle.
pub(crate) fn nonlinear_tendency(f: &Fields, p: &PhysParams, opts: RhsOptions) -> Result<Fields> {
    let zero_like = |f: &Fields| {
        let comps = f
            .components()
            .into_iter()
            .map(|c| SpectralScalar::zeros(c.grid()))
            .collect();
        Fields::from_components(f.tag(), comps)
    };
    if opts.linearized && f.tag() != ModelTag::MagnetoVorticity {
        return zero_like(f);
    }
    let h = p.hall;
    Ok(match f {
        Fields::Hall3d { u, b } => {
            let (du, db) = nl_hall_literal(u, b, h, opts.transport);
            Fields::Hall3d { u: du, b: db }
        }
        Fields::Hall25d { u, b } => {
            let (du, db) = match opts.transport {
                Transport::Convective => {
                    let (du, db) = nl_hall_25d(Some(u), b, h);
                    (du.unwrap(), db)
                }
                Transport::Divergence => nl_hall_literal(u, b, h, Transport::Divergence),
            };
            Fields::Hall25d { u: du, b: db }
        }
        Fields::EmhdVector { b } => Fields::EmhdVector {
            b: nl_hall_25d(None, b, h).1,
        },
        Fields::EmhdStream { psi, b3 } => {
            let (psi, b3) = nl_stream_magnetic(None, psi, b3, h);
            Fields::EmhdStream { psi, b3 }
        }
        Fields::HmhdStream { phi, u3, psi, b3 } => {
            let u = stream_to_field(phi, u3)?;
            let b = stream_to_field(psi, b3)?;
            let (du, _) = nl_hall_25d(Some(&u), &b, h);
            let (dphi, du3) = stream_ignoring_mean(&du.unwrap())?;
            let (dpsi, db3) = nl_stream_magnetic(Some((phi, u3)), psi, b3, h);
            Fields::HmhdStream {
                phi: dphi,
                u3: du3,
                psi: dpsi,
                b3: db3,
            }
        }
        Fields::DecoupledB { b } => Fields::DecoupledB {
            b: nl_decoupled(b, h)?,
        },
        Fields::MagnetoVorticity { omega, u, b } => {
            let t = if opts.linearized {
                let mut t = SpectralVector::zeros(u.grid());
                t.axpy(p.eta - p.nu, &vector_laplacian(b));
                t
            } else {
                nl_magneto_vorticity(omega, u, b, p)
            };
            Fields::MagnetoVorticity {
                omega: t,
                u: SpectralVector::zeros(u.grid()),
                b: SpectralVector::zeros(u.grid()),
            }
        }
    })
}

/// Hall MHD tendency `(∂ₜu, ∂ₜB)` on a 3D grid, Hall term in literal form.
pub fn rhs_hall_mhd_3d(
    u: &SpectralVector,
    b: &SpectralVector,
    p: &PhysParams,
) -> Result<(SpectralVector, SpectralVector)> {
    require_dim(u.comp(0), 3, "rhs_hall_mhd_3d")?;
    rhs_hall_mhd_literal(u, b, p)
}

/// Literal-form Hall MHD tendency on any grid; on a 2D grid the fields are
/// treated as x₃-independent.
pub fn rhs_hall_mhd_literal(
    u: &SpectralVector,
    b: &SpectralVector,
    p: &PhysParams,
) -> Result<(SpectralVector, SpectralVector)> {
    u.check_grid(b)?;
    require_div_free("u", u)?;
    require_div_free("B", b)?;
    let (mut du, mut db) = nl_hall_literal(u, b, p.hall, Transport::Convective);
    diffuse_vec(&mut du, u, p.nu);
    diffuse_vec(&mut db, b, p.eta);
    Ok((du, db))
}

/// 2½D Hall MHD tendency in component form.
pub fn rhs_hall_mhd_25d(
    u: &SpectralVector,
    b: &SpectralVector,
    p: &PhysParams,
) -> Result<(SpectralVector, SpectralVector)> {
    u.check_grid(b)?;
    require_dim(u.comp(0), 2, "rhs_hall_mhd_25d")?;
    require_div_free("u", u)?;
    require_div_free("B", b)?;
    let (du, mut db) = nl_hall_25d(Some(u), b, p.hall);
    let mut du = du.unwrap();
    diffuse_vec(&mut du, u, p.nu);
    diffuse_vec(&mut db, b, p.eta);
    Ok((du, db))
}

/// 2½D electron MHD tendency `∂ₜB`.
pub fn rhs_emhd_vector(b: &SpectralVector, p: &PhysParams) -> Result<SpectralVector> {
    require_dim(b.comp(0), 2, "rhs_emhd_vector")?;
    require_div_free("B", b)?;
    let (_, mut db) = nl_hall_25d(None, b, p.hall);
    diffuse_vec(&mut db, b, p.eta);
    Ok(db)
}

/// Electron MHD in stream form: `(∂ₜψ, ∂ₜB³)`.
pub fn rhs_emhd_stream(
    psi: &SpectralScalar,
    b3: &SpectralScalar,
    p: &PhysParams,
) -> Result<(SpectralScalar, SpectralScalar)> {
    require_dim(psi, 2, "rhs_emhd_stream")?;
    psi.check_grid(b3)?;
    let (mut tp, mut tb) = nl_stream_magnetic(None, psi, b3, p.hall);
    diffuse(&mut tp, psi, p.eta);
    diffuse(&mut tb, b3, p.eta);
    Ok((tp, tb))
}

/// Magnetic tendencies `(∂ₜψ, ∂ₜB³)` of 2½D Hall MHD in stream form, with the
/// velocity given by `(φ, u³)`.
pub fn rhs_hmhd_stream(
    phi: &SpectralScalar,
    u3: &SpectralScalar,
    psi: &SpectralScalar,
    b3: &SpectralScalar,
    p: &PhysParams,
) -> Result<(SpectralScalar, SpectralScalar)> {
    require_dim(psi, 2, "rhs_hmhd_stream")?;
    for f in [phi, u3, b3] {
        psi.check_grid(f)?;
    }
    let (mut tp, mut tb) = nl_stream_magnetic(Some((phi, u3)), psi, b3, p.hall);
    diffuse(&mut tp, psi, p.eta);
    diffuse(&mut tb, b3, p.eta);
    Ok((tp, tb))
}

/// `∂ₜB = νΔB − ∇×((A/h + h∇×B)×B)`: the magnetic equation on the manifold
/// `B + hω = 0` with `ν = η` (then `u = −A/h`).
pub fn rhs_decoupled_b(b: &SpectralVector, p: &PhysParams) -> Result<SpectralVector> {
    require_div_free("B", b)?;
    let mut t = nl_decoupled(b, p.hall)?;
    diffuse_vec(&mut t, b, p.nu);
    Ok(t)
}

/// `∂ₜΩ = νΔΩ − u·∇Ω + Ω·∇u + (η−ν)ΔB` for `Ω = B + hω`, with `u`, `B`
/// frozen.
pub fn rhs_magneto_vorticity(
    omega: &SpectralVector,
    u: &SpectralVector,
    b: &SpectralVector,
    p: &PhysParams,
) -> Result<SpectralVector> {
    omega.check_grid(u)?;
    omega.check_grid(b)?;
    let mut t = nl_magneto_vorticity(omega, u, b, p);
    diffuse_vec(&mut t, omega, p.nu);
    Ok(t)
}

/// Navier–Stokes tendency `P[−u·∇u] + νΔu`, assembled independently of the
/// MHD builders (rotational form `u×ω`).
pub fn rhs_navier_stokes(u: &SpectralVector, nu: f64) -> Result<SpectralVector> {
    require_div_free("u", u)?;
    let w = curl(u);
    let mut t = leray_project(&cross_dealiased(u, &w));
    t.dealias_in_place();
    diffuse_vec(&mut t, u, nu);
    Ok(t)
}
