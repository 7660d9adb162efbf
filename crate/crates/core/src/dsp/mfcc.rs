use std::f64::consts::PI;

use super::audio::RawAudio;
use super::fft::Fft;
use crate::error::{Error, Result};

/// Floor applied to filterbank energies before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Hamming,
    Hann,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Window::Hamming => "hamming",
            Window::Hann => "hann",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(Window::Hamming),
            "hann" => Ok(Window::Hann),
            other => Err(Error::Config(format!("unknown window '{other}'"))),
        }
    }
}

/// MFCC front-end parameters. Defaults are a standard 16 kHz ASR front end.
#[derive(Debug, Clone, PartialEq)]
pub struct MfccConfig {
    /// Rate the pipeline expects; audio at any other rate is rejected.
    pub sample_rate_hz: u32,
    pub frame_length_ms: f64,
    pub hop_ms: f64,
    pub fft_size: usize,
    pub n_mel_filters: usize,
    pub n_coeffs: usize,
    pub preemphasis: f64,
    pub window: Window,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 16_000,
            frame_length_ms: 25.0,
            hop_ms: 10.0,
            fft_size: 512,
            n_mel_filters: 26,
            n_coeffs: 13,
            preemphasis: 0.97,
            window: Window::Hamming,
        }
    }
}

impl MfccConfig {
    pub fn frame_length_samples(&self) -> usize {
        (self.frame_length_ms * self.sample_rate_hz as f64 / 1000.0).round() as usize
    }

    pub fn hop_samples(&self) -> usize {
        (self.hop_ms * self.sample_rate_hz as f64 / 1000.0).round() as usize
    }

    pub fn n_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.sample_rate_hz == 0 {
            return bad("sample_rate_hz must be positive".into());
        }
        if !(self.frame_length_ms > 0.0) || !(self.hop_ms > 0.0) {
            return bad("frame_length_ms and hop_ms must be positive".into());
        }
        if self.hop_ms > self.frame_length_ms {
            return bad(format!(
                "hop_ms {} exceeds frame_length_ms {}",
                self.hop_ms, self.frame_length_ms
            ));
        }
        if self.frame_length_samples() == 0 || self.hop_samples() == 0 {
            return bad("frame or hop shorter than one sample".into());
        }
        if !self.fft_size.is_power_of_two() {
            return bad(format!("fft_size {} is not a power of two", self.fft_size));
        }
        if self.fft_size < self.frame_length_samples() {
            return bad(format!(
                "fft_size {} is shorter than the frame ({} samples)",
                self.fft_size,
                self.frame_length_samples()
            ));
        }
        if self.n_coeffs == 0
            || self.n_coeffs > self.n_mel_filters
            || self.n_mel_filters > self.n_bins()
        {
            return bad(format!(
                "need 0 < n_coeffs ({}) <= n_mel_filters ({}) <= fft_size/2+1 ({})",
                self.n_coeffs,
                self.n_mel_filters,
                self.n_bins()
            ));
        }
        if !(0.0..1.0).contains(&self.preemphasis) {
            return bad(format!("preemphasis {} outside [0, 1)", self.preemphasis));
        }
        Ok(())
    }
}

/// Dense row-major matrix of reals used between front-end stages.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// `T x k` matrix of cepstral coefficients for one utterance, frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MfccSequence {
    t_frames: usize,
    k_coeffs: usize,
    frames: Vec<f64>,
}

impl MfccSequence {
    pub fn new(t_frames: usize, k_coeffs: usize, frames: Vec<f64>) -> Result<Self> {
        if t_frames == 0 || k_coeffs == 0 {
            return Err(Error::Data(format!(
                "empty MFCC sequence ({t_frames}x{k_coeffs})"
            )));
        }
        if frames.len() != t_frames * k_coeffs {
            return Err(Error::Data(format!(
                "MFCC buffer holds {} values, expected {t_frames}x{k_coeffs}",
                frames.len()
            )));
        }
        if let Some(i) = frames.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite MFCC value at frame {}, coefficient {}",
                i / k_coeffs,
                i % k_coeffs
            )));
        }
        Ok(Self {
            t_frames,
            k_coeffs,
            frames,
        })
    }

    pub fn t_frames(&self) -> usize {
        self.t_frames
    }

    pub fn k_coeffs(&self) -> usize {
        self.k_coeffs
    }

    pub fn frames(&self) -> &[f64] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.frames[t * self.k_coeffs..(t + 1) * self.k_coeffs]
    }

    pub fn get(&self, t: usize, c: usize) -> f64 {
        self.frames[t * self.k_coeffs + c]
    }
}

pub fn preemphasize(audio: &RawAudio, coeff: f64) -> Result<RawAudio> {
    if !(0.0..1.0).contains(&coeff) {
        return Err(Error::Config(format!("preemphasis {coeff} outside [0, 1)")));
    }
    let x = audio.samples();
    if x.is_empty() {
        return Err(Error::Data("cannot preemphasize empty audio".into()));
    }
    let mut out = Vec::with_capacity(x.len());
    out.push(x[0]);
    out.extend(x.windows(2).map(|w| w[1] - coeff * w[0]));
    RawAudio::new(out, audio.sample_rate_hz())
}

/// Symmetric window of `len` points.
pub fn window_coefficients(window: Window, len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| {
            let c = (2.0 * PI * n as f64 / denom).cos();
            match window {
                Window::Hamming => 0.54 - 0.46 * c,
                Window::Hann => 0.5 - 0.5 * c,
            }
        })
        .collect()
}

/// Slices audio into overlapping frames of `L` samples every `H` samples and
/// multiplies each by the window. Produces `1 + floor((N - L) / H)` frames.
pub fn frame_and_window(audio: &RawAudio, config: &MfccConfig) -> Result<Matrix> {
    config.validate()?;
    let len = config.frame_length_samples();
    let hop = config.hop_samples();
    let n = audio.len();
    if n < len {
        return Err(Error::Data(format!(
            "audio has {n} samples, shorter than one {len}-sample frame"
        )));
    }
    let t = 1 + (n - len) / hop;
    let w = window_coefficients(config.window, len);
    let x = audio.samples();
    let mut frames = Matrix::zeros(t, len);
    for f in 0..t {
        let src = &x[f * hop..f * hop + len];
        for ((o, &s), &wv) in frames.row_mut(f).iter_mut().zip(src).zip(&w) {
            *o = s * wv;
        }
    }
    Ok(frames)
}

/// `|DFT_b(frame)|^2 / fft_size` for bins `0..=fft_size/2`, each frame
/// zero-padded to `fft_size`.
pub fn power_spectrum(frames: &Matrix, fft_size: usize) -> Result<Matrix> {
    let fft = Fft::new(fft_size)?;
    if frames.cols > fft_size {
        return Err(Error::Config(format!(
            "fft_size {fft_size} is shorter than the {}-sample frame",
            frames.cols
        )));
    }
    let n_bins = fft_size / 2 + 1;
    let mut out = Matrix::zeros(frames.rows, n_bins);
    let mut re = vec![0.0; fft_size];
    let mut im = vec![0.0; fft_size];
    for t in 0..frames.rows {
        re.fill(0.0);
        im.fill(0.0);
        re[..frames.cols].copy_from_slice(frames.row(t));
        fft.forward(&mut re, &mut im);
        for (b, o) in out.row_mut(t).iter_mut().enumerate() {
            *o = (re[b] * re[b] + im[b] * im[b]) / fft_size as f64;
        }
    }
    Ok(out)
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters with edges and centers equally spaced on the mel scale
/// between 0 Hz and Nyquist. Weights are evaluated at the exact bin
/// frequencies; two filters whose centers round to the same FFT bin are
/// rejected as beyond the transform's resolution.
pub fn mel_filterbank(config: &MfccConfig, sample_rate_hz: u32) -> Result<Matrix> {
    config.validate()?;
    let n_filters = config.n_mel_filters;
    let n_bins = config.n_bins();
    let sr = sample_rate_hz as f64;
    let bin_hz = sr / config.fft_size as f64;
    let top = hz_to_mel(sr / 2.0);
    let edges: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
        .collect();
    let center_bins: Vec<i64> = edges[1..=n_filters]
        .iter()
        .map(|&f| (f / bin_hz).round() as i64)
        .collect();
    if let Some(w) = center_bins.windows(2).position(|w| w[0] == w[1]) {
        return Err(Error::Config(format!(
            "{n_filters} mel filters exceed the resolution of a {}-point FFT: filters {} and {} share center bin {}",
            config.fft_size,
            w,
            w + 1,
            center_bins[w]
        )));
    }
    let mut fb = Matrix::zeros(n_filters, n_bins);
    for m in 0..n_filters {
        let (lo, c, hi) = (edges[m], edges[m + 1], edges[m + 2]);
        for (b, o) in fb.row_mut(m).iter_mut().enumerate() {
            let f = b as f64 * bin_hz;
            let w = ((f - lo) / (c - lo)).min((hi - f) / (hi - c));
            *o = w.max(0.0);
        }
    }
    Ok(fb)
}

/// Orthonormal DCT-II basis, first `k` rows of the `n x n` transform.
pub fn dct_matrix(k: usize, n: usize) -> Matrix {
    let mut m = Matrix::zeros(k, n);
    for i in 0..k {
        let scale = if i == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        for (j, o) in m.row_mut(i).iter_mut().enumerate() {
            *o = scale * (PI * i as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos();
        }
    }
    m
}

/// Preemphasis, framing and windowing, power spectrum, mel filterbank,
/// floored log, then the first `k` orthonormal DCT-II coefficients (C0
/// included, no deltas).
pub fn extract_mfcc(audio: &RawAudio, config: &MfccConfig) -> Result<MfccSequence> {
    config.validate()?;
    if audio.sample_rate_hz() != config.sample_rate_hz {
        return Err(Error::Data(format!(
            "sample rate {} Hz does not match the configured {} Hz (no resampling)",
            audio.sample_rate_hz(),
            config.sample_rate_hz
        )));
    }
    let emphasized = preemphasize(audio, config.preemphasis)?;
    let frames = frame_and_window(&emphasized, config)?;
    let power = power_spectrum(&frames, config.fft_size)?;
    let fb = mel_filterbank(config, config.sample_rate_hz)?;
    let dct = dct_matrix(config.n_coeffs, config.n_mel_filters);

    let mut log_mel = vec![0.0; config.n_mel_filters];
    let mut out = Vec::with_capacity(frames.rows * config.n_coeffs);
    for t in 0..power.rows {
        let spec = power.row(t);
        for (m, lm) in log_mel.iter_mut().enumerate() {
            let e: f64 = fb.row(m).iter().zip(spec).map(|(w, p)| w * p).sum();
            *lm = e.max(LOG_FLOOR).ln();
        }
        for c in 0..config.n_coeffs {
            out.push(dct.row(c).iter().zip(&log_mel).map(|(d, l)| d * l).sum());
        }
    }
    MfccSequence::new(frames.rows, config.n_coeffs, out)
}
