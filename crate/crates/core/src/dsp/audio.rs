use std::path::Path;

use crate::error::{Error, Result};

/// Mono PCM audio as real amplitudes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAudio {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl RawAudio {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::Data("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Data(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Keeps the leading `seconds` of audio.
    pub fn truncated(&self, seconds: f64) -> RawAudio {
        let n = ((seconds * self.sample_rate_hz as f64).round() as usize).min(self.samples.len());
        RawAudio {
            samples: self.samples[..n].to_vec(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}

/// Reads a mono 16-bit signed PCM WAV file. Any other encoding is a data
/// error that names the file.
pub fn read_wav(path: &Path) -> Result<RawAudio> {
    let reader = hound::WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::Data(format!("{}: unreadable WAV ({other})", path.display())),
    })?;
    let spec = reader.spec();
    if spec.channels != 1
        || spec.bits_per_sample != 16
        || spec.sample_format != hound::SampleFormat::Int
    {
        return Err(Error::Data(format!(
            "{}: unsupported encoding ({} channel(s), {}-bit {:?}); expected mono 16-bit PCM",
            path.display(),
            spec.channels,
            spec.bits_per_sample,
            spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f64 / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Data(format!("{}: corrupt sample data ({e})", path.display())))?;
    RawAudio::new(samples, spec.sample_rate)
}
