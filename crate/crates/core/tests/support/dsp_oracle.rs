//! Straight-line reference front end: naive DFT, no shared helpers.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slid_core::dsp::fft::Fft;
use slid_core::dsp::{extract_mfcc, mel_filterbank, power_spectrum, Matrix, MfccConfig, RawAudio};

pub fn naive_dft(re: &[f64], im: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = re.len();
    let mut out_re = vec![0.0; n];
    let mut out_im = vec![0.0; n];
    for b in 0..n {
        for t in 0..n {
            let a = -2.0 * PI * ((b * t) % n) as f64 / n as f64;
            out_re[b] += re[t] * a.cos() - im[t] * a.sin();
            out_im[b] += re[t] * a.sin() + im[t] * a.cos();
        }
    }
    (out_re, out_im)
}

/// Worst `max|fft - dft| / max|dft|` over the power-of-two sizes 8..=512.
pub fn fft_worst_relative_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut n = 8;
    while n <= 512 {
        let re: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let im: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (dr, di) = naive_dft(&re, &im);
        let (mut fr, mut fi) = (re.clone(), im.clone());
        Fft::new(n).unwrap().forward(&mut fr, &mut fi);
        let scale = dr.iter().chain(&di).fold(0.0f64, |m, v| m.max(v.abs()));
        let err = (0..n).fold(0.0f64, |m, b| {
            m.max((fr[b] - dr[b]).abs()).max((fi[b] - di[b]).abs())
        });
        worst = worst.max(err / scale);
        n *= 2;
    }
    worst
}

/// MFCCs computed directly from the definitions.
pub fn reference_mfcc(x: &[f64], cfg: &MfccConfig) -> Vec<Vec<f64>> {
    let sr = cfg.sample_rate_hz as f64;
    let len = (cfg.frame_length_ms * sr / 1000.0).round() as usize;
    let hop = (cfg.hop_ms * sr / 1000.0).round() as usize;
    let nfft = cfg.fft_size;
    let nm = cfg.n_mel_filters;

    let mut y = vec![x[0]];
    for i in 1..x.len() {
        y.push(x[i] - cfg.preemphasis * x[i - 1]);
    }
    let window: Vec<f64> = (0..len)
        .map(|i| {
            let c = (2.0 * PI * i as f64 / (len - 1) as f64).cos();
            match cfg.window.name() {
                "hann" => 0.5 - 0.5 * c,
                _ => 0.54 - 0.46 * c,
            }
        })
        .collect();
    let mel = |f: f64| 2595.0 * (1.0 + f / 700.0).log10();
    let inv = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
    let edges: Vec<f64> = (0..nm + 2)
        .map(|i| inv(mel(sr / 2.0) * i as f64 / (nm + 1) as f64))
        .collect();

    let frames = 1 + (y.len() - len) / hop;
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        let mut re = vec![0.0; nfft];
        for i in 0..len {
            re[i] = y[t * hop + i] * window[i];
        }
        let (dr, di) = naive_dft(&re, &vec![0.0; nfft]);
        let power: Vec<f64> = (0..=nfft / 2)
            .map(|b| (dr[b] * dr[b] + di[b] * di[b]) / nfft as f64)
            .collect();
        let log_mel: Vec<f64> = (0..nm)
            .map(|m| {
                let mut e = 0.0;
                for (b, p) in power.iter().enumerate() {
                    let f = b as f64 * sr / nfft as f64;
                    let w = if f > edges[m] && f <= edges[m + 1] {
                        (f - edges[m]) / (edges[m + 1] - edges[m])
                    } else if f > edges[m + 1] && f < edges[m + 2] {
                        (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1])
                    } else {
                        0.0
                    };
                    e += w * p;
                }
                e.max(1e-10).ln()
            })
            .collect();
        let coeffs: Vec<f64> = (0..cfg.n_coeffs)
            .map(|c| {
                let s = if c == 0 {
                    (1.0 / nm as f64).sqrt()
                } else {
                    (2.0 / nm as f64).sqrt()
                };
                s * (0..nm)
                    .map(|j| {
                        log_mel[j] * (PI * c as f64 * (2 * j + 1) as f64 / (2 * nm) as f64).cos()
                    })
                    .sum::<f64>()
            })
            .collect();
        out.push(coeffs);
    }
    out
}

/// `(normwise, entrywise)` relative error of `extract_mfcc` against the
/// reference on one white-noise utterance.
pub fn mfcc_relative_error(seed: u64) -> (f64, f64) {
    let cfg = MfccConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(400..2400);
    let level = rng.random_range(0.01..0.9);
    let x: Vec<f64> = (0..n)
        .map(|_| level * rng.random_range(-1.0..1.0))
        .collect();
    let got = extract_mfcc(&RawAudio::new(x.clone(), cfg.sample_rate_hz).unwrap(), &cfg).unwrap();
    let want = reference_mfcc(&x, &cfg);
    assert_eq!(got.t_frames(), want.len());
    let scale = want.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let (mut norm, mut entry) = (0.0f64, 0.0f64);
    for (t, row) in want.iter().enumerate() {
        for (c, &w) in row.iter().enumerate() {
            let d = (got.get(t, c) - w).abs();
            norm = norm.max(d / scale);
            entry = entry.max(d / w.abs().max(1e-300));
        }
    }
    (norm, entry)
}

/// `(argmax filter, filter whose analytic centre is nearest 1 kHz)` for a
/// 1 kHz tone at 16 kHz, 26 filters, 512-point transform.
pub fn tone_filter_argmax() -> (usize, usize) {
    let cfg = MfccConfig::default();
    let sr = cfg.sample_rate_hz as f64;
    let len = 400;
    let frame: Vec<f64> = (0..len)
        .map(|i| (2.0 * PI * 1000.0 * i as f64 / sr).sin())
        .collect();
    let mut padded = frame.clone();
    padded.resize(cfg.fft_size, 0.0);
    let (dr, di) = naive_dft(&padded, &vec![0.0; cfg.fft_size]);
    let oracle: Vec<f64> = (0..=cfg.fft_size / 2)
        .map(|b| (dr[b] * dr[b] + di[b] * di[b]) / cfg.fft_size as f64)
        .collect();
    let fft_power = power_spectrum(
        &Matrix {
            rows: 1,
            cols: len,
            data: frame,
        },
        cfg.fft_size,
    )
    .unwrap();
    for (a, b) in fft_power.row(0).iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
    let fb = mel_filterbank(&cfg, cfg.sample_rate_hz).unwrap();
    let energies: Vec<f64> = (0..fb.rows)
        .map(|m| fb.row(m).iter().zip(&oracle).map(|(w, p)| w * p).sum())
        .collect();
    let argmax = (0..energies.len())
        .max_by(|&a, &b| energies[a].total_cmp(&energies[b]))
        .unwrap();
    let top = 2595.0 * (1.0 + sr / 2.0 / 700.0).log10();
    let centre = |m: usize| 700.0 * (10f64.powf(top * (m + 1) as f64 / 27.0 / 2595.0) - 1.0);
    let nearest = (0..26)
        .min_by(|&a, &b| {
            (centre(a) - 1000.0)
                .abs()
                .total_cmp(&(centre(b) - 1000.0).abs())
        })
        .unwrap();
    (argmax, nearest)
}
