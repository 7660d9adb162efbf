//! Flat `key = value` run configuration shared by every pipeline stage.
//!
//! Text form: one `key = value` per line, `#` starts a comment. Unknown keys
//! and repeated keys are rejected. [`Settings::to_text`] lists every key in a
//! fixed order, so the rendered text is a complete, reproducible record.

use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::{AuditExpectations, DEFAULT_EVAL_PER_LANGUAGE, DEFAULT_TRAIN_PER_LANGUAGE};
use crate::dsp::{MfccConfig, Window};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::model::BaselineConfig;

pub const DEFAULT_DROPOUT_GRID: [f64; 3] = [0.0, 0.4, 0.6];
pub const DEFAULT_RESAMPLES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub mfcc: MfccConfig,
    pub train_per_language: usize,
    pub eval_per_language: usize,
    /// `model.seed` and `model.n_coeffs` are kept in sync with `seed` and
    /// `mfcc.n_coeffs`.
    pub model: BaselineConfig,
    pub dropout_grid: Vec<f64>,
    pub resamples: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            seed: 0,
            mfcc: MfccConfig::default(),
            train_per_language: DEFAULT_TRAIN_PER_LANGUAGE,
            eval_per_language: DEFAULT_EVAL_PER_LANGUAGE,
            model: BaselineConfig::default(),
            dropout_grid: DEFAULT_DROPOUT_GRID.to_vec(),
            resamples: DEFAULT_RESAMPLES,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| num(key, v)).collect()
}

fn conv_specs(key: &str, value: &str) -> Result<Vec<(usize, usize)>> {
    value
        .split(',')
        .map(|spec| {
            let (f, w) = spec.trim().split_once('x').ok_or_else(|| {
                Error::Config(format!("{key}: expected FILTERSxWIDTH, got {spec:?}"))
            })?;
            Ok((num(key, f)?, num(key, w)?))
        })
        .collect()
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl Settings {
    pub const KEYS: [&'static str; 25] = [
        "seed",
        "mfcc.sample_rate_hz",
        "mfcc.frame_length_ms",
        "mfcc.hop_ms",
        "mfcc.fft_size",
        "mfcc.n_mel_filters",
        "mfcc.n_coeffs",
        "mfcc.preemphasis",
        "mfcc.window",
        "dataset.train_per_language",
        "dataset.eval_per_language",
        "model.conv_specs",
        "model.conv_dropout",
        "model.classifier_dims",
        "model.classifier_dropout",
        "model.bn_eps",
        "model.bn_momentum",
        "train.batch_size",
        "train.epochs",
        "train.lr",
        "train.beta1",
        "train.beta2",
        "train.adam_eps",
        "train.dropout_grid",
        "stats.resamples",
    ];

    /// Sets one key without validating cross-field constraints.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "seed" => self.seed = num(key, v)?,
            "mfcc.sample_rate_hz" => self.mfcc.sample_rate_hz = num(key, v)?,
            "mfcc.frame_length_ms" => self.mfcc.frame_length_ms = num(key, v)?,
            "mfcc.hop_ms" => self.mfcc.hop_ms = num(key, v)?,
            "mfcc.fft_size" => self.mfcc.fft_size = num(key, v)?,
            "mfcc.n_mel_filters" => self.mfcc.n_mel_filters = num(key, v)?,
            "mfcc.n_coeffs" => self.mfcc.n_coeffs = num(key, v)?,
            "mfcc.preemphasis" => self.mfcc.preemphasis = num(key, v)?,
            "mfcc.window" => self.mfcc.window = Window::parse(v)?,
            "dataset.train_per_language" => self.train_per_language = num(key, v)?,
            "dataset.eval_per_language" => self.eval_per_language = num(key, v)?,
            "model.conv_specs" => self.model.conv_specs = conv_specs(key, v)?,
            "model.conv_dropout" => self.model.conv_dropout = num(key, v)?,
            "model.classifier_dims" => self.model.classifier_dims = list(key, v)?,
            "model.classifier_dropout" => self.model.classifier_dropout = num(key, v)?,
            "model.bn_eps" => self.model.bn_eps = num(key, v)?,
            "model.bn_momentum" => self.model.bn_momentum = num(key, v)?,
            "train.batch_size" => self.model.batch_size = num(key, v)?,
            "train.epochs" => self.model.epochs = num(key, v)?,
            "train.lr" => self.model.adam.lr = num(key, v)?,
            "train.beta1" => self.model.adam.beta1 = num(key, v)?,
            "train.beta2" => self.model.adam.beta2 = num(key, v)?,
            "train.adam_eps" => self.model.adam.eps = num(key, v)?,
            "train.dropout_grid" => self.dropout_grid = list(key, v)?,
            "stats.resamples" => self.resamples = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown setting key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override {o:?} is not key=value")))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Syncs derived fields and checks every constraint.
    pub fn resolve(mut self) -> Result<Self> {
        self.model.seed = self.seed;
        self.model.n_coeffs = self.mfcc.n_coeffs;
        self.mfcc.validate()?;
        self.model.validate()?;
        if self.dropout_grid.is_empty() || self.dropout_grid.iter().any(|p| !(0.0..1.0).contains(p))
        {
            return Err(Error::Config(
                "train.dropout_grid needs values in [0, 1)".into(),
            ));
        }
        if self.train_per_language == 0 || self.eval_per_language == 0 {
            return Err(Error::Config("dataset counts must be positive".into()));
        }
        if self.resamples == 0 {
            return Err(Error::Config("stats.resamples must be positive".into()));
        }
        Ok(self)
    }

    pub fn audit_expectations(&self) -> AuditExpectations {
        AuditExpectations {
            train_per_language: self.train_per_language,
            eval_per_language: self.eval_per_language,
            ..AuditExpectations::default()
        }
    }

    /// Parses text on top of the defaults and resolves the result.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        s.apply_text(text)?;
        s.resolve()
    }

    /// Applies the keys of a settings text without resolving.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if !seen.insert(k.to_string()) {
                return Err(Error::Config(format!("line {}: {k} given twice", i + 1)));
            }
            self.set(k, v).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut s = Self::default();
        s.apply_text(&fsutil::read_to_string(path)?)
            .map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                other => other,
            })?;
        s.resolve()
    }

    pub fn to_text(&self) -> String {
        let m = &self.mfcc;
        let b = &self.model;
        let specs: Vec<String> = b
            .conv_specs
            .iter()
            .map(|(f, w)| format!("{f}x{w}"))
            .collect();
        let values: [String; 25] = [
            self.seed.to_string(),
            m.sample_rate_hz.to_string(),
            m.frame_length_ms.to_string(),
            m.hop_ms.to_string(),
            m.fft_size.to_string(),
            m.n_mel_filters.to_string(),
            m.n_coeffs.to_string(),
            m.preemphasis.to_string(),
            m.window.name().to_string(),
            self.train_per_language.to_string(),
            self.eval_per_language.to_string(),
            specs.join(","),
            b.conv_dropout.to_string(),
            join(&b.classifier_dims),
            b.classifier_dropout.to_string(),
            b.bn_eps.to_string(),
            b.bn_momentum.to_string(),
            b.batch_size.to_string(),
            b.epochs.to_string(),
            b.adam.lr.to_string(),
            b.adam.beta1.to_string(),
            b.adam.beta2.to_string(),
            b.adam.eps.to_string(),
            join(&self.dropout_grid),
            self.resamples.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in Self::KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
