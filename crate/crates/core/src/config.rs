//! Run configuration files.
//!
//! A configuration is TOML: flat `key = value` pairs grouped in sections.
//!
//! ```toml
//! [model]
//! tag = "hall25d"            # required; see ModelTag
//!
//! [grid]
//! dim = 2                    # required
//! n = 128                    # required, even
//! length = 6.283185307179586 # optional, default 2π
//! dealias_fraction = 0.6666666666666666
//!
//! [physics]                  # optional section; all three keys required if present
//! nu = 0.1
//! eta = 0.1
//! hall = 1.0
//!
//! [stepper]                  # optional; every key has a default
//! scheme = "if_rk4"          # or "if_rk2"
//! dt = "auto"                # or a number
//! t_end = 2.0
//! diag_interval = 0.01
//!
//! [scenario]
//! name = "orszag_tang_like"  # required
//! seed = 1
//!
//! [diagnostics]              # optional
//! c = 1.0
//! r_list = [2.0, 4.0]
//!
//! [output]                   # optional
//! dir = "out"
//! csv = "diagnostics.csv"
//!
//! [checkpoint]               # optional
//! path = "run.ckpt"
//! every = 0.5
//! ```
//!
//! Relative output and checkpoint paths are resolved against `output.dir`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsOptions;
use crate::integrate::StepperConfig;
use crate::models::{ModelTag, PhysParams};
use crate::scenario::ScenarioSpec;
use crate::spectral::GridSpec;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub tag: ModelTag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
    #[serde(default = "two_thirds")]
    pub dealias_fraction: f64,
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

fn two_thirds() -> f64 {
    2.0 / 3.0
}

impl GridSection {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.dim, self.n)
            .with_length(self.length)
            .with_dealias_fraction(self.dealias_fraction)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub csv: PathBuf,
    pub jsonl: Option<PathBuf>,
    pub summary: PathBuf,
    /// Receives `failure_record.json` on blow-up.
    pub failure_dir: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("."),
            csv: PathBuf::from("diagnostics.csv"),
            jsonl: None,
            summary: PathBuf::from("summary.txt"),
            failure_dir: None,
        }
    }
}

impl OutputSection {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointSection {
    pub path: PathBuf,
    /// Model time between checkpoints; defaults to one checkpoint at the end.
    pub every: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub model: ModelSection,
    pub grid: GridSection,
    #[serde(default)]
    pub physics: PhysParams,
    #[serde(default)]
    pub stepper: StepperConfig,
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticsOptions,
    #[serde(default)]
    pub output: OutputSection,
    pub checkpoint: Option<CheckpointSection>,
}

impl RunSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(Error::Config("configuration is empty".into()));
        }
        let spec: RunSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.spec().validate().map_err(as_config("grid"))?;
        if let Some(d) = self.model.tag.required_dim() {
            if d != self.grid.dim {
                return Err(Error::Config(format!(
                    "model.tag = {} needs grid.dim = {d}, got {}",
                    self.model.tag, self.grid.dim
                )));
            }
        }
        self.physics.validate().map_err(as_config("physics"))?;
        self.stepper.validate()?;
        self.scenario.validate()?;
        self.diagnostics.validate()?;
        if let Some(ck) = &self.checkpoint {
            if let Some(every) = ck.every {
                if !(every > 0.0 && every.is_finite()) {
                    return Err(Error::Config(format!(
                        "checkpoint.every must be > 0, got {every}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn as_config(section: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Config(m) => Error::Config(m),
        other => Error::Config(format!("[{section}] {other}")),
    }
}
