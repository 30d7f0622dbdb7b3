//! Evolution systems: parameters, tagged states and right-hand sides.

mod rhs;
mod terms;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spectral::{field_to_stream, stream_to_field, Grid, SpectralScalar, SpectralVector};
use crate::{Error, Result};

pub use rhs::{
    rhs_decoupled_b, rhs_emhd_stream, rhs_emhd_vector, rhs_hall_mhd_25d, rhs_hall_mhd_3d,
    rhs_hall_mhd_literal, rhs_hmhd_stream, rhs_magneto_vorticity, rhs_navier_stokes,
};
pub use terms::{hall_term, lorentz_force};

pub(crate) use rhs::{add_diffusion, nonlinear_tendency};
pub(crate) use terms::physical;

/// Relative divergence tolerance applied to states handed to the models.
pub const DIV_TOL: f64 = 1e-10;

/// Nondimensional viscosity `ν`, resistivity `η` and Hall constant `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub nu: f64,
    pub eta: f64,
    pub hall: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            nu: 0.1,
            eta: 0.1,
            hall: 1.0,
        }
    }
}

impl PhysParams {
    pub fn new(nu: f64, eta: f64, hall: f64) -> Result<Self> {
        let p = PhysParams { nu, eta, hall };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("nu", self.nu), ("eta", self.eta), ("hall", self.hall)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// How transport terms are assembled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transport {
    /// `u·∇f` at collocation points.
    #[default]
    Convective,
    /// `∇·(u⊗f)` with the product dealiased before differentiation.
    Divergence,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RhsOptions {
    /// Drop every nonlinear term, leaving the heat semigroup.
    pub linearized: bool,
    pub transport: Transport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Hall3d,
    Hall25d,
    EmhdVector,
    EmhdStream,
    HmhdStream,
    DecoupledB,
    MagnetoVorticity,
}

impl ModelTag {
    pub const ALL: [ModelTag; 7] = [
        ModelTag::Hall3d,
        ModelTag::Hall25d,
        ModelTag::EmhdVector,
        ModelTag::EmhdStream,
        ModelTag::HmhdStream,
        ModelTag::DecoupledB,
        ModelTag::MagnetoVorticity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Hall3d => "hall3d",
            ModelTag::Hall25d => "hall25d",
            ModelTag::EmhdVector => "emhd_vector",
            ModelTag::EmhdStream => "emhd_stream",
            ModelTag::HmhdStream => "hmhd_stream",
            ModelTag::DecoupledB => "decoupled_b",
            ModelTag::MagnetoVorticity => "magneto_vorticity",
        }
    }

    pub fn code(self) -> u32 {
        ModelTag::ALL.iter().position(|t| *t == self).unwrap() as u32
    }

    pub fn from_code(code: u32) -> Option<Self> {
        ModelTag::ALL.get(code as usize).copied()
    }

    /// Grid dimension the model lives on, if it is fixed.
    pub fn required_dim(self) -> Option<usize> {
        match self {
            ModelTag::Hall3d => Some(3),
            ModelTag::Hall25d
            | ModelTag::EmhdVector
            | ModelTag::EmhdStream
            | ModelTag::HmhdStream => Some(2),
            ModelTag::DecoupledB | ModelTag::MagnetoVorticity => None,
        }
    }

    /// Whether the model carries a velocity field.
    pub fn has_velocity(self) -> bool {
        matches!(
            self,
            ModelTag::Hall3d
                | ModelTag::Hall25d
                | ModelTag::HmhdStream
                | ModelTag::MagnetoVorticity
        )
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelTag::ALL
            .iter()
            .find(|t| t.as_str() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown model tag '{s}'")))
    }
}

/// Tag-specific field bundle. Also used for tendencies, which share the
/// shape of the state they belong to.
#[derive(Clone, Debug)]
pub enum Fields {
    Hall3d {
        u: SpectralVector,
        b: SpectralVector,
    },
    Hall25d {
        u: SpectralVector,
        b: SpectralVector,
    },
    EmhdVector {
        b: SpectralVector,
    },
    EmhdStream {
        psi: SpectralScalar,
        b3: SpectralScalar,
    },
    HmhdStream {
        phi: SpectralScalar,
        u3: SpectralScalar,
        psi: SpectralScalar,
        b3: SpectralScalar,
    },
    DecoupledB {
        b: SpectralVector,
    },
    /// `Ω = B + hω` with the velocity and magnetic field held frozen.
    MagnetoVorticity {
        omega: SpectralVector,
        u: SpectralVector,
        b: SpectralVector,
    },
}

impl Fields {
    pub fn tag(&self) -> ModelTag {
        match self {
            Fields::Hall3d { .. } => ModelTag::Hall3d,
            Fields::Hall25d { .. } => ModelTag::Hall25d,
            Fields::EmhdVector { .. } => ModelTag::EmhdVector,
            Fields::EmhdStream { .. } => ModelTag::EmhdStream,
            Fields::HmhdStream { .. } => ModelTag::HmhdStream,
            Fields::DecoupledB { .. } => ModelTag::DecoupledB,
            Fields::MagnetoVorticity { .. } => ModelTag::MagnetoVorticity,
        }
    }

    /// All scalar components in a fixed, tag-dependent order.
    pub fn components(&self) -> Vec<&SpectralScalar> {
        match self {
            Fields::Hall3d { u, b } | Fields::Hall25d { u, b } => {
                u.comps().iter().chain(b.comps().iter()).collect()
            }
            Fields::EmhdVector { b } | Fields::DecoupledB { b } => b.comps().iter().collect(),
            Fields::EmhdStream { psi, b3 } => vec![psi, b3],
            Fields::HmhdStream { phi, u3, psi, b3 } => vec![phi, u3, psi, b3],
            Fields::MagnetoVorticity { omega, u, b } => omega
                .comps()
                .iter()
                .chain(u.comps().iter())
                .chain(b.comps().iter())
                .collect(),
        }
    }

    pub fn components_mut(&mut self) -> Vec<&mut SpectralScalar> {
        match self {
            Fields::Hall3d { u, b } | Fields::Hall25d { u, b } => u
                .comps_mut()
                .iter_mut()
                .chain(b.comps_mut().iter_mut())
                .collect(),
            Fields::EmhdVector { b } | Fields::DecoupledB { b } => {
                b.comps_mut().iter_mut().collect()
            }
            Fields::EmhdStream { psi, b3 } => vec![psi, b3],
            Fields::HmhdStream { phi, u3, psi, b3 } => vec![phi, u3, psi, b3],
            Fields::MagnetoVorticity { omega, u, b } => omega
                .comps_mut()
                .iter_mut()
                .chain(u.comps_mut().iter_mut())
                .chain(b.comps_mut().iter_mut())
                .collect(),
        }
    }

    /// Component names matching [`components`](Self::components).
    pub fn component_names(tag: ModelTag) -> &'static [&'static str] {
        match tag {
            ModelTag::Hall3d | ModelTag::Hall25d => &["u1", "u2", "u3", "b1", "b2", "b3"],
            ModelTag::EmhdVector | ModelTag::DecoupledB => &["b1", "b2", "b3"],
            ModelTag::EmhdStream => &["psi", "b3"],
            ModelTag::HmhdStream => &["phi", "u3", "psi", "b3"],
            ModelTag::MagnetoVorticity => &[
                "omega1", "omega2", "omega3", "u1", "u2", "u3", "b1", "b2", "b3",
            ],
        }
    }

    /// Rebuilds a bundle of the given tag from components in
    /// [`components`](Self::components) order.
    pub fn from_components(tag: ModelTag, comps: Vec<SpectralScalar>) -> Result<Self> {
        let expected = Fields::component_names(tag).len();
        if comps.len() != expected {
            return Err(Error::invalid(format!(
                "{tag} needs {expected} components, got {}",
                comps.len()
            )));
        }
        let mut it = comps.into_iter();
        let vec3 = |it: &mut std::vec::IntoIter<SpectralScalar>| -> Result<SpectralVector> {
            SpectralVector::new([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
        };
        Ok(match tag {
            ModelTag::Hall3d => Fields::Hall3d {
                u: vec3(&mut it)?,
                b: vec3(&mut it)?,
            },
            ModelTag::Hall25d => Fields::Hall25d {
                u: vec3(&mut it)?,
                b: vec3(&mut it)?,
            },
            ModelTag::EmhdVector => Fields::EmhdVector { b: vec3(&mut it)? },
            ModelTag::DecoupledB => Fields::DecoupledB { b: vec3(&mut it)? },
            ModelTag::EmhdStream => Fields::EmhdStream {
                psi: it.next().unwrap(),
                b3: it.next().unwrap(),
            },
            ModelTag::HmhdStream => Fields::HmhdStream {
                phi: it.next().unwrap(),
                u3: it.next().unwrap(),
                psi: it.next().unwrap(),
                b3: it.next().unwrap(),
            },
            ModelTag::MagnetoVorticity => Fields::MagnetoVorticity {
                omega: vec3(&mut it)?,
                u: vec3(&mut it)?,
                b: vec3(&mut it)?,
            },
        })
    }

    pub fn grid(&self) -> &Grid {
        self.components()[0].grid()
    }

    /// Diffusivity applied to each component, in component order.
    pub fn diffusivities(tag: ModelTag, p: &PhysParams) -> Vec<f64> {
        match tag {
            ModelTag::Hall3d | ModelTag::Hall25d => vec![p.nu, p.nu, p.nu, p.eta, p.eta, p.eta],
            ModelTag::EmhdVector => vec![p.eta; 3],
            ModelTag::DecoupledB => vec![p.nu; 3],
            ModelTag::EmhdStream => vec![p.eta; 2],
            ModelTag::HmhdStream => vec![p.nu, p.nu, p.eta, p.eta],
            ModelTag::MagnetoVorticity => vec![p.nu, p.nu, p.nu, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn has_non_finite(&self) -> bool {
        self.components().iter().any(|c| c.has_non_finite())
    }

    /// `self += a · other` for bundles of the same tag.
    pub fn axpy(&mut self, a: f64, other: &Fields) {
        debug_assert_eq!(self.tag(), other.tag());
        for (x, y) in self.components_mut().into_iter().zip(other.components()) {
            x.axpy(a, y);
        }
    }
}

/// Model-tagged solution state at a given time.
#[derive(Clone, Debug)]
pub struct MhdState {
    pub time: f64,
    pub fields: Fields,
}

impl MhdState {
    /// Validates the structural invariants: one grid, the tag's dimension,
    /// Hermitian components and divergence-free vector fields.
    pub fn new(time: f64, fields: Fields) -> Result<Self> {
        let s = MhdState { time, fields };
        s.validate()?;
        Ok(s)
    }

    pub fn tag(&self) -> ModelTag {
        self.fields.tag()
    }

    pub fn grid(&self) -> &Grid {
        self.fields.grid()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::invalid("state time must be finite and >= 0"));
        }
        let comps = self.fields.components();
        let grid = comps[0].grid().clone();
        for c in &comps {
            if !c.grid().same_as(&grid) {
                return Err(Error::GridMismatch(
                    "state components live on different grids".into(),
                ));
            }
            if !c.is_hermitian(1e-12) {
                return Err(Error::invalid("state component is not Hermitian-symmetric"));
            }
        }
        if let Some(d) = self.tag().required_dim() {
            if grid.dim() != d {
                return Err(Error::InvalidMode(format!(
                    "{} requires a {d}D grid, got {}D",
                    self.tag(),
                    grid.dim()
                )));
            }
        }
        for (name, v) in self.divergence_free_vectors() {
            if !v.is_divergence_free(DIV_TOL) {
                return Err(Error::precondition(format!(
                    "{name} is not divergence-free (defect {:e})",
                    v.divergence_defect()
                )));
            }
        }
        Ok(())
    }

    fn divergence_free_vectors(&self) -> Vec<(&'static str, &SpectralVector)> {
        match &self.fields {
            Fields::Hall3d { u, b } | Fields::Hall25d { u, b } => vec![("u", u), ("B", b)],
            Fields::EmhdVector { b } | Fields::DecoupledB { b } => vec![("B", b)],
            Fields::MagnetoVorticity { omega, u, b } => {
                vec![("B + h omega", omega), ("u", u), ("B", b)]
            }
            Fields::EmhdStream { .. } | Fields::HmhdStream { .. } => vec![],
        }
    }

    /// Velocity and magnetic field in vector form. Models without a velocity
    /// return `None` for `u`.
    pub fn primitive(&self) -> Result<(Option<SpectralVector>, SpectralVector)> {
        Ok(match &self.fields {
            Fields::Hall3d { u, b } | Fields::Hall25d { u, b } => (Some(u.clone()), b.clone()),
            Fields::EmhdVector { b } | Fields::DecoupledB { b } => (None, b.clone()),
            Fields::EmhdStream { psi, b3 } => (None, stream_to_field(psi, b3)?),
            Fields::HmhdStream { phi, u3, psi, b3 } => {
                (Some(stream_to_field(phi, u3)?), stream_to_field(psi, b3)?)
            }
            Fields::MagnetoVorticity { u, b, .. } => (Some(u.clone()), b.clone()),
        })
    }

    /// Magnetic stream function and `B³` on 2½D states whose horizontal
    /// field has zero mean.
    pub fn magnetic_stream(&self) -> Option<(SpectralScalar, SpectralScalar)> {
        match &self.fields {
            Fields::EmhdStream { psi, b3 } | Fields::HmhdStream { psi, b3, .. } => {
                Some((psi.clone(), b3.clone()))
            }
            _ => {
                let (_, b) = self.primitive().ok()?;
                if b.grid().dim() != 2 {
                    return None;
                }
                field_to_stream(&b).ok()
            }
        }
    }

    /// Full tendency (diffusion plus nonlinear terms).
    pub fn rhs(&self, p: &PhysParams) -> Result<Fields> {
        self.rhs_with(p, RhsOptions::default())
    }

    pub fn rhs_with(&self, p: &PhysParams, opts: RhsOptions) -> Result<Fields> {
        let mut t = nonlinear_tendency(&self.fields, p, opts)?;
        add_diffusion(&mut t, &self.fields, p);
        Ok(t)
    }
}
