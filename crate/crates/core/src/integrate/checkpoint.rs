//! Binary checkpoints.
//!
//! Layout (all little-endian):
//!
//! | field | type |
//! |---|---|
//! | magic `HMHDCKPT` | 8 bytes |
//! | format version | u32 |
//! | model code (index into [`ModelTag::ALL`]) | u32 |
//! | grid dimension, points per axis | u32, u32 |
//! | domain lengths | 3 × f64 |
//! | dealias fraction | f64 |
//! | ν, η, h | 3 × f64 |
//! | time | f64 |
//! | component count | u32 |
//! | per component: coefficient count, then `(re, im)` pairs | u64, n × 2 × f64 |
//! | run-progress length, then UTF-8 JSON (may be empty) | u64, bytes |
//!
//! Coefficients are stored in row-major order with axis 0 slowest; index `i`
//! on an axis of `n` points is wavenumber `i` for `i ≤ n/2` and `i − n`
//! otherwise. Components follow [`Fields::component_names`].

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::TrackerState;
use crate::models::{Fields, MhdState, ModelTag, PhysParams};
use crate::spectral::{GridSpec, SpectralScalar};
use crate::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"HMHDCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Where a run stood when the checkpoint was written; lets a resumed run
/// continue the record schedule and the diagnostic integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunProgress {
    pub t_origin: f64,
    pub next_record: u64,
    pub steps: u64,
    pub tracker: TrackerState,
}

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub state: MhdState,
    pub params: PhysParams,
    pub progress: Option<RunProgress>,
}

pub fn save_checkpoint(s: &MhdState, p: &PhysParams, path: &Path) -> Result<()> {
    save_checkpoint_with(s, p, None, path)
}

/// Writes to a temporary sibling and renames, so readers never see a
/// partial file.
pub fn save_checkpoint_with(
    s: &MhdState,
    p: &PhysParams,
    progress: Option<&RunProgress>,
    path: &Path,
) -> Result<()> {
    let spec = s.grid().spec();
    let comps = s.fields.components();
    let mut buf = Vec::with_capacity(128 + comps.len() * (8 + 16 * s.grid().len()));
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&s.tag().code().to_le_bytes());
    buf.extend_from_slice(&(spec.dim as u32).to_le_bytes());
    buf.extend_from_slice(&(spec.n as u32).to_le_bytes());
    for v in spec.lengths {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in [spec.dealias_fraction, p.nu, p.eta, p.hall, s.time] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&(comps.len() as u32).to_le_bytes());
    for c in comps {
        buf.extend_from_slice(&(c.coeffs().len() as u64).to_le_bytes());
        for z in c.coeffs() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    let trailer = match progress {
        Some(pr) => serde_json::to_vec(pr).map_err(|e| Error::Format(e.to_string()))?,
        None => Vec::new(),
    };
    buf.extend_from_slice(&(trailer.len() as u64).to_le_bytes());
    buf.extend_from_slice(&trailer);

    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format("truncated checkpoint".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}

/// Loads a checkpoint and rejects it unless it lives on `expected`.
pub fn load_checkpoint_for(path: &Path, expected: &GridSpec) -> Result<Checkpoint> {
    let ck = load_checkpoint(path)?;
    if ck.state.grid().spec() != expected {
        return Err(Error::GridMismatch(format!(
            "checkpoint grid {:?} differs from the configured grid {:?}",
            ck.state.grid().spec(),
            expected
        )));
    }
    Ok(ck)
}

fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!(
            "unsupported checkpoint version {version} (expected {CHECKPOINT_VERSION})"
        )));
    }
    let code = r.u32()?;
    let tag = ModelTag::from_code(code)
        .ok_or_else(|| Error::Format(format!("unknown model code {code}")))?;
    let dim = r.u32()? as usize;
    let n = r.u32()? as usize;
    let lengths = [r.f64()?, r.f64()?, r.f64()?];
    let dealias_fraction = r.f64()?;
    let params = PhysParams {
        nu: r.f64()?,
        eta: r.f64()?,
        hall: r.f64()?,
    };
    let time = r.f64()?;
    let spec = GridSpec {
        dim,
        n,
        lengths,
        dealias_fraction,
    };
    let grid = spec
        .build()
        .map_err(|e| Error::Format(format!("invalid grid in header: {e}")))?;
    let ncomp = r.u32()? as usize;
    let expected = Fields::component_names(tag).len();
    if ncomp != expected {
        return Err(Error::Format(format!(
            "{tag} has {expected} components, header says {ncomp}"
        )));
    }
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let count = r.u64()? as usize;
        if count != grid.len() {
            return Err(Error::Format(format!(
                "component has {count} coefficients, grid has {}",
                grid.len()
            )));
        }
        let raw = r.take(
            count
                .checked_mul(16)
                .ok_or_else(|| Error::Format("size overflow".into()))?,
        )?;
        let coeffs: Vec<Complex64> = raw
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        comps.push(SpectralScalar::from_coeffs(&grid, coeffs)?);
    }
    let tlen = r.u64()? as usize;
    let trailer = r.take(tlen)?;
    let progress = if tlen == 0 {
        None
    } else {
        Some(
            serde_json::from_slice(trailer)
                .map_err(|e| Error::Format(format!("run progress: {e}")))?,
        )
    };
    if r.pos != bytes.len() {
        return Err(Error::Format(
            "trailing bytes after checkpoint payload".into(),
        ));
    }
    let fields = Fields::from_components(tag, comps)?;
    let state = MhdState::new(time, fields)?;
    Ok(Checkpoint {
        state,
        params,
        progress,
    })
}
