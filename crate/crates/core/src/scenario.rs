//! Seeded initial data.
//!
//! | name | construction |
//! |---|---|
//! | `random_divfree` | band-limited Gaussian `u`, `B` with energy spectrum `∝ k^slope`, Leray-projected, `‖·‖_{L²} = amplitude` |
//! | `orszag_tang_like` | `u = (−sin x₂, sin x₁, 0)`, `B = amplitude·(−sin x₂, sin 2x₁, 0)` (2½D only) |
//! | `zero_mv` | random mean-zero `u`, `B = −h ∇×u` so that `B + h∇×u = 0` |
//! | `small_curl3` | random `ψ` scaled to `‖Δψ‖_{L²} = amplitude`, random `B³` with `‖B³‖_{L²} = b3_amplitude`, optional random `u` |
//! | `heat_reduction` | `ψ = 0`, random `B³` (and optional `u`) |
//!
//! The same seed and grid always produce the same state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::models::{Fields, MhdState, ModelTag, PhysParams};
use crate::spectral::{
    curl, field_to_stream, laplacian, leray_project, stream_to_field, Grid, Normed, SpectralScalar,
    SpectralVector,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    RandomDivfree,
    OrszagTangLike,
    ZeroMv,
    SmallCurl3,
    HeatReduction,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::RandomDivfree,
        ScenarioName::OrszagTangLike,
        ScenarioName::ZeroMv,
        ScenarioName::SmallCurl3,
        ScenarioName::HeatReduction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::RandomDivfree => "random_divfree",
            ScenarioName::OrszagTangLike => "orszag_tang_like",
            ScenarioName::ZeroMv => "zero_mv",
            ScenarioName::SmallCurl3 => "small_curl3",
            ScenarioName::HeatReduction => "heat_reduction",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario \"{s}\"")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    #[serde(default)]
    pub seed: u64,
    /// L² size of the random fields; `‖Δψ₀‖` for `small_curl3`; magnetic
    /// scale for `orszag_tang_like`.
    #[serde(default = "one")]
    pub amplitude: f64,
    /// Exponent of the shell energy spectrum of random fields.
    #[serde(default = "default_slope")]
    pub slope: f64,
    /// Largest excited wavenumber `|k|`.
    #[serde(default = "default_k_max")]
    pub k_max: f64,
    /// `‖B³₀‖_{L²}` for `small_curl3` and `heat_reduction`.
    #[serde(default = "one")]
    pub b3_amplitude: f64,
    /// `‖u₀‖_{L²}` for the 2½D scenarios; `0` means no velocity.
    #[serde(default)]
    pub velocity_amplitude: f64,
}

fn one() -> f64 {
    1.0
}

fn default_slope() -> f64 {
    -5.0 / 3.0
}

fn default_k_max() -> f64 {
    4.0
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName) -> Self {
        ScenarioSpec {
            name,
            seed: 0,
            amplitude: 1.0,
            slope: default_slope(),
            k_max: default_k_max(),
            b3_amplitude: 1.0,
            velocity_amplitude: 0.0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, ok: bool| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "scenario.{name} is out of range: {v}"
                )))
            }
        };
        check("amplitude", self.amplitude, self.amplitude >= 0.0)?;
        check("slope", self.slope, true)?;
        check("k_max", self.k_max, self.k_max >= 1.0)?;
        check("b3_amplitude", self.b3_amplitude, self.b3_amplitude >= 0.0)?;
        check(
            "velocity_amplitude",
            self.velocity_amplitude,
            self.velocity_amplitude >= 0.0,
        )
    }
}

/// Band-limited random fields with a prescribed shell spectrum.
pub struct RandomFields {
    rng: ChaCha8Rng,
    slope: f64,
    k_max: f64,
}

impl RandomFields {
    pub fn new(seed: u64, slope: f64, k_max: f64) -> Self {
        RandomFields {
            rng: ChaCha8Rng::seed_from_u64(seed),
            slope,
            k_max,
        }
    }

    /// Real scalar with `|f̂(k)|² ∝ |k|^{slope − (d−1)}` for `0 < |k| ≤ k_max`
    /// inside the dealias mask, zero mean, unnormalised.
    pub fn scalar(&mut self, grid: &Grid) -> SpectralScalar {
        let k2 = grid.k2();
        let mask = grid.mask();
        let shell = (grid.dim() - 1) as f64;
        let mut raw = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (i, z) in raw.iter_mut().enumerate() {
            let re: f64 = self.rng.sample(StandardNormal);
            let im: f64 = self.rng.sample(StandardNormal);
            let k = k2[i].sqrt();
            if k == 0.0 || k > self.k_max || !mask[i] || grid.is_nyquist(i) {
                continue;
            }
            *z = Complex64::new(re, im) * k.powf(0.5 * (self.slope - shell));
        }
        let coeffs = (0..grid.len())
            .map(|i| 0.5 * (raw[i] + raw[grid.neg_index(i)].conj()))
            .collect();
        SpectralScalar::from_coeffs(grid, coeffs).expect("length matches grid")
    }

    /// Leray-projected random vector normalised to `‖v‖_{L²} = amplitude`.
    pub fn divfree(&mut self, grid: &Grid, amplitude: f64) -> SpectralVector {
        let raw = SpectralVector::new([self.scalar(grid), self.scalar(grid), self.scalar(grid)])
            .expect("components share one grid");
        let v = leray_project(&raw);
        v.scaled(scale_to(v.l2_sq(), amplitude))
    }
}

/// Factor taking a field of squared norm `l2_sq` to norm `target`.
fn scale_to(l2_sq: f64, target: f64) -> f64 {
    if l2_sq == 0.0 {
        0.0
    } else {
        target / l2_sq.sqrt()
    }
}

/// Packs `(u, B)` into the component layout of `tag`. Velocity is required
/// by models that carry one and dropped by the others.
pub fn assemble(
    tag: ModelTag,
    u: Option<SpectralVector>,
    b: SpectralVector,
    p: &PhysParams,
) -> Result<Fields> {
    let need_u = || {
        u.clone()
            .ok_or_else(|| Error::InvalidMode(format!("{tag} needs a velocity field")))
    };
    Ok(match tag {
        ModelTag::Hall3d => Fields::Hall3d { u: need_u()?, b },
        ModelTag::Hall25d => Fields::Hall25d { u: need_u()?, b },
        ModelTag::EmhdVector => Fields::EmhdVector { b },
        ModelTag::DecoupledB => Fields::DecoupledB { b },
        ModelTag::EmhdStream => {
            let (psi, b3) = field_to_stream(&b)?;
            Fields::EmhdStream { psi, b3 }
        }
        ModelTag::HmhdStream => {
            let (phi, u3) = field_to_stream(&need_u()?)?;
            let (psi, b3) = field_to_stream(&b)?;
            Fields::HmhdStream { phi, u3, psi, b3 }
        }
        ModelTag::MagnetoVorticity => {
            let u = need_u()?;
            let mut omega = b.clone();
            omega.axpy(p.hall, &curl(&u));
            Fields::MagnetoVorticity { omega, u, b }
        }
    })
}

/// Builds the initial state of `spec` on `grid` for `tag`.
pub fn generate_scenario(
    spec: &ScenarioSpec,
    tag: ModelTag,
    grid: &Grid,
    p: &PhysParams,
) -> Result<MhdState> {
    spec.validate()?;
    if let Some(d) = tag.required_dim() {
        if grid.dim() != d {
            return Err(Error::InvalidMode(format!(
                "{tag} requires a {d}D grid, got {}D",
                grid.dim()
            )));
        }
    }
    let mut rf = RandomFields::new(spec.seed, spec.slope, spec.k_max);
    let two_half = |what: &str| {
        if grid.dim() == 2 {
            Ok(())
        } else {
            Err(Error::InvalidMode(format!("scenario {what} is 2½D only")))
        }
    };
    let (u, b) = match spec.name {
        ScenarioName::RandomDivfree => {
            let u = rf.divfree(grid, spec.amplitude);
            let b = rf.divfree(grid, spec.amplitude);
            (Some(u), b)
        }
        ScenarioName::OrszagTangLike => {
            two_half("orszag_tang_like")?;
            let a = spec.amplitude;
            let u = SpectralVector::from_fn(grid, |x| [-x[1].sin(), x[0].sin(), 0.0]);
            let b =
                SpectralVector::from_fn(grid, |x| [-a * x[1].sin(), a * (2.0 * x[0]).sin(), 0.0]);
            (Some(u), b)
        }
        ScenarioName::ZeroMv => {
            if !tag.has_velocity() {
                return Err(Error::InvalidMode(format!(
                    "scenario zero_mv needs a model with velocity, got {tag}"
                )));
            }
            let u = rf.divfree(grid, spec.amplitude);
            let b = curl(&u).scaled(-p.hall);
            (Some(u), b)
        }
        ScenarioName::SmallCurl3 | ScenarioName::HeatReduction => {
            two_half(spec.name.as_str())?;
            let psi = if spec.name == ScenarioName::SmallCurl3 {
                let raw = rf.scalar(grid);
                raw.scaled(scale_to(laplacian(&raw).l2_sq(), spec.amplitude))
            } else {
                SpectralScalar::zeros(grid)
            };
            let b3 = rf.scalar(grid);
            let b3 = b3.scaled(scale_to(b3.l2_sq(), spec.b3_amplitude));
            let b = stream_to_field(&psi, &b3)?;
            let u = if spec.velocity_amplitude > 0.0 || tag.has_velocity() {
                Some(rf.divfree(grid, spec.velocity_amplitude))
            } else {
                None
            };
            (u, b)
        }
    };
    let fields = assemble(tag, u, b, p)?;
    MhdState::new(0.0, fields)
}
