//! Synthetic 16-class corpus for exercising training end to end.
//!
//! Each class is white noise passed through two class-specific resonators
//! (bandpass biquads), so classes differ in spectral envelope only. Every
//! utterance jitters its centre frequencies, level and length, and is then
//! run through the regular MFCC front end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{language_registry, N_LANGUAGES};
use crate::dsp::{extract_mfcc, MfccConfig, RawAudio};
use crate::error::{Error, Result};
use crate::model::Example;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub train_per_class: usize,
    pub valid_per_class: usize,
    pub min_frames: usize,
    pub max_frames: usize,
    /// Relative centre-frequency jitter per utterance.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            train_per_class: 200,
            valid_per_class: 50,
            min_frames: 50,
            max_frames: 120,
            jitter: 0.03,
            seed: 0,
        }
    }
}

/// Resonator centre frequencies in Hz for a class.
pub fn class_resonances(class: usize) -> (f64, f64) {
    let low = 300.0 * 1.14f64.powi(class as i32);
    let high = 5200.0 / 1.09f64.powi(class as i32);
    (low, high)
}

/// Constant-peak-gain bandpass biquad.
struct Bandpass {
    b0: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    z1: f64,
    z2: f64,
}

impl Bandpass {
    fn new(center_hz: f64, q: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * std::f64::consts::PI * center_hz / sample_rate;
        let alpha = w0.sin() / (2.0 * q);
        let a0 = 1.0 + alpha;
        Self {
            b0: alpha / a0,
            b2: -alpha / a0,
            a1: -2.0 * w0.cos() / a0,
            a2: (1.0 - alpha) / a0,
            z1: 0.0,
            z2: 0.0,
        }
    }

    fn tick(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.z1;
        self.z1 = -self.a1 * y + self.z2;
        self.z2 = self.b2 * x - self.a2 * y;
        y
    }
}

/// Audio for one utterance of `class` lasting exactly `frames` MFCC frames.
pub fn synth_audio(
    class: usize,
    frames: usize,
    jitter: f64,
    mfcc: &MfccConfig,
    rng: &mut impl Rng,
) -> Result<RawAudio> {
    if class >= N_LANGUAGES || frames == 0 {
        return Err(Error::Usage(format!(
            "bad synthetic request: class {class}, {frames} frames"
        )));
    }
    let n = (frames - 1) * mfcc.hop_samples() + mfcc.frame_length_samples();
    let sr = mfcc.sample_rate_hz as f64;
    let (lo, hi) = class_resonances(class);
    let mut detune = || 1.0 + jitter * rng.random_range(-1.0..1.0);
    let (lo, hi) = (lo * detune(), hi * detune());
    let mut f_lo = Bandpass::new(lo, 8.0, sr);
    let mut f_hi = Bandpass::new(hi, 8.0, sr);
    let level = 0.1 * 10f64.powf(rng.random_range(-0.5..0.5));
    let samples = (0..n)
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            level * (f_lo.tick(x) + 0.7 * f_hi.tick(x) + 0.02 * x)
        })
        .collect();
    RawAudio::new(samples, mfcc.sample_rate_hz)
}

/// `(train, valid)` examples, classes interleaved, ids `syn-<split>-<iso>-<n>`.
pub fn synth_dataset(
    config: &SynthConfig,
    mfcc: &MfccConfig,
) -> Result<(Vec<Example>, Vec<Example>)> {
    if config.min_frames == 0 || config.min_frames > config.max_frames {
        return Err(Error::Config(
            "synthetic frame range must satisfy 0 < min <= max".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut make = |split: &str, per_class: usize| -> Result<Vec<Example>> {
        let mut out = Vec::with_capacity(per_class * N_LANGUAGES);
        for i in 0..per_class {
            for (class, lang) in language_registry().iter().enumerate() {
                let frames = rng.random_range(config.min_frames..=config.max_frames);
                let audio = synth_audio(class, frames, config.jitter, mfcc, &mut rng)?;
                out.push(Example {
                    id: format!("syn-{split}-{}-{i}", lang.iso639_3),
                    language: class,
                    features: extract_mfcc(&audio, mfcc)?,
                });
            }
        }
        Ok(out)
    };
    let train = make("train", config.train_per_class)?;
    let valid = make("valid", config.valid_per_class)?;
    Ok((train, valid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_counts_and_sizes() {
        let cfg = SynthConfig {
            train_per_class: 2,
            valid_per_class: 1,
            ..SynthConfig::default()
        };
        let (train, valid) = synth_dataset(&cfg, &MfccConfig::default()).unwrap();
        assert_eq!(train.len(), 32);
        assert_eq!(valid.len(), 16);
        for e in train.iter().chain(&valid) {
            assert!((50..=120).contains(&e.features.t_frames()));
            assert_eq!(e.features.k_coeffs(), 13);
        }
        assert_eq!(train[17].language, 1);
        assert_eq!(train[17].id, "syn-train-iba-1");
    }

    #[test]
    fn deterministic() {
        let cfg = SynthConfig {
            train_per_class: 1,
            valid_per_class: 1,
            seed: 4,
            ..SynthConfig::default()
        };
        let a = synth_dataset(&cfg, &MfccConfig::default()).unwrap();
        let b = synth_dataset(&cfg, &MfccConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resonances_are_distinct() {
        let mut lows: Vec<f64> = (0..N_LANGUAGES).map(|c| class_resonances(c).0).collect();
        lows.dedup();
        assert_eq!(lows.len(), N_LANGUAGES);
        assert!(class_resonances(15).0 < 8000.0 && class_resonances(15).1 > 1000.0);
    }
}
