//! `MFC1` binary feature files: one utterance per file, little-endian.
//!
//! Layout: magic `MFC1`, version u16 = 1, T u32, k u16, reserved u16 = 0,
//! then `T * k` f32 values, frame-major.

use std::path::Path;

use super::mfcc::MfccSequence;
use crate::error::{Error, Result};
use crate::fsutil;

pub const FEATURE_MAGIC: &[u8; 4] = b"MFC1";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 14;

pub fn encode_features(seq: &MfccSequence) -> Result<Vec<u8>> {
    let t = u32::try_from(seq.t_frames()).map_err(|_| {
        Error::Data(format!(
            "{} frames exceed the u32 header field",
            seq.t_frames()
        ))
    })?;
    let k = u16::try_from(seq.k_coeffs()).map_err(|_| {
        Error::Data(format!(
            "{} coefficients exceed the u16 header field",
            seq.k_coeffs()
        ))
    })?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * seq.frames().len());
    out.extend_from_slice(FEATURE_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    out.extend_from_slice(&k.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    for &v in seq.frames() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_features(bytes: &[u8]) -> Result<MfccSequence> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != FEATURE_MAGIC {
        return Err(Error::Data("not an MFC1 feature file".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([bytes[i], bytes[i + 1]]);
    let version = u16_at(4);
    if version != VERSION {
        return Err(Error::Data(format!("unsupported MFC1 version {version}")));
    }
    let t = u32::from_le_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as usize;
    let k = u16_at(10) as usize;
    if u16_at(12) != 0 {
        return Err(Error::Data("MFC1 reserved field is not zero".into()));
    }
    let body = &bytes[HEADER_LEN..];
    if body.len() != 4 * t * k {
        return Err(Error::Data(format!(
            "MFC1 body holds {} bytes, header promises {t}x{k} floats",
            body.len()
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    MfccSequence::new(t, k, values)
}

pub fn write_features(path: &Path, seq: &MfccSequence) -> Result<()> {
    fsutil::write_atomic(path, &encode_features(seq)?)
}

pub fn read_features(path: &Path) -> Result<MfccSequence> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_features(&bytes).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}
