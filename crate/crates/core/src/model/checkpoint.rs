//! `SLW1` parameter files: every trainable tensor plus batch-norm running
//! statistics as little-endian f32, followed by the resolved settings text.

use std::path::Path;

use super::network::Baseline;
use crate::error::{Error, Result};
use crate::fsutil;
use crate::nn::Real;
use crate::settings::Settings;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"SLW1";
pub const CHECKPOINT_VERSION: u16 = 1;

fn push_tensor(out: &mut Vec<u8>, name: &str, dims: &[usize], data: impl Iterator<Item = f32>) {
    out.extend((name.len() as u16).to_le_bytes());
    out.extend(name.as_bytes());
    out.push(dims.len() as u8);
    for &d in dims {
        out.extend((d as u32).to_le_bytes());
    }
    for v in data {
        out.extend(v.to_le_bytes());
    }
}

pub fn encode_checkpoint<R: Real>(model: &Baseline<R>, settings: &Settings) -> Vec<u8> {
    let params = model.params();
    let stats = model.running_stats();
    let mut out = Vec::new();
    out.extend(CHECKPOINT_MAGIC);
    out.extend(CHECKPOINT_VERSION.to_le_bytes());
    out.extend(((params.len() + stats.len()) as u32).to_le_bytes());
    for p in params {
        push_tensor(
            &mut out,
            &p.name,
            p.value.shape(),
            p.value.data().iter().map(|v| v.to_f64_lossy() as f32),
        );
    }
    for (name, v) in stats {
        push_tensor(
            &mut out,
            &name,
            &[v.len()],
            v.iter().map(|x| x.to_f64_lossy() as f32),
        );
    }
    let mut settings = settings.clone();
    settings.model = model.config().clone();
    settings.seed = settings.model.seed;
    settings.mfcc.n_coeffs = settings.model.n_coeffs;
    let text = settings.to_text();
    out.extend((text.len() as u32).to_le_bytes());
    out.extend(text.as_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Data(format!("checkpoint truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn utf8(&mut self, n: usize) -> Result<&'a str> {
        std::str::from_utf8(self.take(n)?)
            .map_err(|_| Error::Data("checkpoint text is not UTF-8".into()))
    }
}

/// Rebuilds the model described by the embedded settings and fills it.
pub fn decode_checkpoint<R: Real>(bytes: &[u8]) -> Result<(Baseline<R>, Settings)> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != CHECKPOINT_MAGIC {
        return Err(Error::Data("not a checkpoint (bad magic)".into()));
    }
    let version = r.u16()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Data(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let len = r.u16()? as usize;
        let name = r.utf8(len)?.to_string();
        let rank = r.u8()? as usize;
        let dims = (0..rank)
            .map(|_| r.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let n: usize = dims.iter().product();
        let raw = r.take(
            n.checked_mul(4)
                .ok_or_else(|| Error::Data("tensor too large".into()))?,
        )?;
        let data: Vec<R> = raw
            .chunks_exact(4)
            .map(|c| R::from_f64_lossy(f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64))
            .collect();
        tensors.push((name, dims, data));
    }
    let len = r.u32()? as usize;
    let settings = Settings::parse(r.utf8(len)?)?;
    if r.pos != bytes.len() {
        return Err(Error::Data(format!(
            "{} trailing bytes after checkpoint",
            bytes.len() - r.pos
        )));
    }
    let mut model = Baseline::<R>::new(&settings.model)?;
    let mut expected: Vec<String> = model.params().iter().map(|p| p.name.clone()).collect();
    expected.extend(model.running_stats().into_iter().map(|(n, _)| n));
    let names: Vec<&str> = tensors.iter().map(|t| t.0.as_str()).collect();
    if names != expected {
        return Err(Error::Data(format!(
            "checkpoint tensors [{}] do not match the configured model [{}]",
            names.join(", "),
            expected.join(", ")
        )));
    }
    let mut it = tensors.into_iter();
    for (p, (name, dims, data)) in model.params_mut().into_iter().zip(it.by_ref()) {
        if dims != p.value.shape() {
            return Err(Error::Data(format!(
                "{name}: shape {dims:?}, expected {:?}",
                p.value.shape()
            )));
        }
        p.value.data_mut().copy_from_slice(&data);
    }
    for ((_, slot), (name, dims, data)) in model.running_stats_mut().into_iter().zip(it) {
        if dims != [slot.len()] {
            return Err(Error::Data(format!(
                "{name}: shape {dims:?}, expected [{}]",
                slot.len()
            )));
        }
        if data
            .iter()
            .any(|v| !v.is_finite() || (name.ends_with("running_var") && *v < R::zero()))
        {
            return Err(Error::Data(format!("{name}: invalid running statistic")));
        }
        *slot = data;
    }
    Ok((model, settings))
}

pub fn save_checkpoint<R: Real>(
    path: &Path,
    model: &Baseline<R>,
    settings: &Settings,
) -> Result<()> {
    fsutil::write_atomic(path, &encode_checkpoint(model, settings))
}

pub fn load_checkpoint<R: Real>(path: &Path) -> Result<(Baseline<R>, Settings)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}
