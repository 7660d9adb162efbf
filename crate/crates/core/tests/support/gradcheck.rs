//! Central finite-difference gradient checks on tiny random instances.
//!
//! Each check builds a layer from a seed, takes the scalar loss
//! `L = sum(y * r)` for a fixed random `r` (cross-entropy for the loss and
//! the full model), and compares analytic gradients with
//! `(L(v + eps) - L(v - eps)) / (2 eps)` for every parameter entry and every
//! unmasked input entry.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slid_core::model::{Baseline, BaselineConfig};
use slid_core::nn::{
    softmax_cross_entropy, BatchNorm1d, Conv1d, Dense, Dropout, FrameMask, MaskedAvgPool, Mode,
    Relu, Tensor,
};

pub const EPS: f64 = 1e-3;
pub const TOLERANCE: f64 = 1e-4;

/// `|a - n| / max(|a|, |n|)`, or the absolute gap when both are below 1e-10.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    let gap = (analytic - numeric).abs();
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-10 {
        gap
    } else {
        gap / scale
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_tensor(rng: &mut impl Rng, shape: &[usize], scale: f64) -> Tensor<f64> {
    let n = shape.iter().product();
    Tensor::from_vec(
        shape,
        (0..n)
            .map(|_| scale * rng.random_range(-1.0..1.0))
            .collect(),
    )
    .unwrap()
}

fn weighted_sum(y: &Tensor<f64>, r: &Tensor<f64>) -> f64 {
    y.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Outcome {
    /// Largest per-tensor normwise relative error: max |a - n| over the
    /// tensor divided by max(|a|, |n|) over the tensor.
    pub worst: f64,
    /// Largest entrywise relative error, for reference.
    pub worst_entry: f64,
    pub checked: usize,
    /// Entries whose difference stencil crossed a ReLU kink.
    pub skipped: usize,
}

impl Outcome {
    pub fn merge(self, o: Outcome) -> Outcome {
        Outcome {
            worst: self.worst.max(o.worst),
            worst_entry: self.worst_entry.max(o.worst_entry),
            checked: self.checked + o.checked,
            skipped: self.skipped + o.skipped,
        }
    }
}

/// Compares `analytic` with central differences of `loss` over the listed
/// entries of one tensor `values`. `loss` returns `None` when the perturbed
/// point lies across a kink, where differences say nothing about the
/// gradient.
fn compare_partial(
    values: &mut Vec<f64>,
    analytic: &[f64],
    indices: impl Iterator<Item = usize>,
    loss: &mut dyn FnMut(&[f64]) -> Option<f64>,
) -> Outcome {
    let mut out = Outcome::default();
    let (mut gap, mut scale) = (0.0f64, 0.0f64);
    for i in indices {
        let orig = values[i];
        values[i] = orig + EPS;
        let up = loss(values);
        values[i] = orig - EPS;
        let down = loss(values);
        values[i] = orig;
        match (up, down) {
            (Some(up), Some(down)) => {
                let numeric = (up - down) / (2.0 * EPS);
                out.checked += 1;
                out.worst_entry = out.worst_entry.max(rel_err(analytic[i], numeric));
                gap = gap.max((analytic[i] - numeric).abs());
                scale = scale.max(analytic[i].abs()).max(numeric.abs());
            }
            _ => out.skipped += 1,
        }
    }
    out.worst = if scale < 1e-10 { gap } else { gap / scale };
    out
}

fn compare(
    values: &mut Vec<f64>,
    analytic: &[f64],
    indices: impl Iterator<Item = usize>,
    loss: &mut dyn FnMut(&[f64]) -> f64,
) -> Outcome {
    compare_partial(values, analytic, indices, &mut |v| Some(loss(v)))
}

fn mask_indices(mask: &FrameMask, channels: usize) -> Vec<usize> {
    let frames = mask.frames();
    let mut out = Vec::new();
    for b in 0..mask.batch() {
        for c in 0..channels {
            for t in 0..frames {
                if mask.is_valid(b, t) {
                    out.push((b * channels + c) * frames + t);
                }
            }
        }
    }
    out
}

fn random_mask(rng: &mut impl Rng, batch: usize, frames: usize) -> FrameMask {
    let mut lengths: Vec<usize> = (0..batch).map(|_| rng.random_range(2..=frames)).collect();
    lengths[0] = frames;
    FrameMask::from_lengths(&lengths, frames)
}

fn zero_masked(x: &mut Tensor<f64>, mask: &FrameMask) {
    let (channels, frames) = (x.shape()[1], x.shape()[2]);
    for b in 0..mask.batch() {
        for c in 0..channels {
            for t in 0..frames {
                if !mask.is_valid(b, t) {
                    x.data_mut()[(b * channels + c) * frames + t] = 0.0;
                }
            }
        }
    }
}

pub fn check_conv(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let (batch, c_in, c_out, width, frames) = (2, 2, 3, 2, 5);
    let layer = Conv1d::<f64>::new("c", c_in, c_out, width, &mut g);
    let mask = random_mask(&mut g, batch, frames);
    let mut x = random_tensor(&mut g, &[batch, c_in, frames], 1.0);
    zero_masked(&mut x, &mask);
    let r = random_tensor(&mut g, &[batch, c_out, frames], 1.0);
    let mut work = layer.clone();
    work.forward(&x, &mask).unwrap();
    let gx = work.backward(&r).unwrap();
    let (gw, gb) = (
        work.weight.grad.data().to_vec(),
        work.bias.grad.data().to_vec(),
    );

    let mut worst = Outcome::default();
    let mut w = layer.weight.value.data().to_vec();
    worst = worst.merge(compare(&mut w, &gw, 0..gw.len(), &mut |v| {
        let mut l = layer.clone();
        l.weight.value.data_mut().copy_from_slice(v);
        weighted_sum(&l.infer(&x, &mask).unwrap(), &r)
    }));
    let mut bias = layer.bias.value.data().to_vec();
    worst = worst.merge(compare(&mut bias, &gb, 0..gb.len(), &mut |v| {
        let mut l = layer.clone();
        l.bias.value.data_mut().copy_from_slice(v);
        weighted_sum(&l.infer(&x, &mask).unwrap(), &r)
    }));
    let mut xv = x.data().to_vec();
    worst.merge(compare(
        &mut xv,
        gx.data(),
        mask_indices(&mask, c_in).into_iter(),
        &mut |v| {
            let xi = Tensor::from_vec(x.shape(), v.to_vec()).unwrap();
            weighted_sum(&layer.infer(&xi, &mask).unwrap(), &r)
        },
    ))
}

pub fn check_batchnorm(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let (batch, channels, frames) = (3, 2, 4);
    let mut layer = BatchNorm1d::<f64>::new("bn", channels, 1e-5, 0.1);
    for v in layer.gamma.value.data_mut() {
        *v = g.random_range(0.5..1.5);
    }
    for v in layer.beta.value.data_mut() {
        *v = g.random_range(-0.5..0.5);
    }
    let mask = random_mask(&mut g, batch, frames);
    let x = random_tensor(&mut g, &[batch, channels, frames], 2.0);
    let r = random_tensor(&mut g, &[batch, channels, frames], 1.0);
    let run = |l: &BatchNorm1d<f64>, x: &Tensor<f64>| {
        let mut l = l.clone();
        weighted_sum(&l.forward(x, &mask, Mode::Train).unwrap(), &r)
    };
    let mut work = layer.clone();
    work.forward(&x, &mask, Mode::Train).unwrap();
    let gx = work.backward(&r).unwrap();
    let (gg, gb) = (
        work.gamma.grad.data().to_vec(),
        work.beta.grad.data().to_vec(),
    );

    let mut worst = Outcome::default();
    let mut gamma = layer.gamma.value.data().to_vec();
    worst = worst.merge(compare(&mut gamma, &gg, 0..channels, &mut |v| {
        let mut l = layer.clone();
        l.gamma.value.data_mut().copy_from_slice(v);
        run(&l, &x)
    }));
    let mut beta = layer.beta.value.data().to_vec();
    worst = worst.merge(compare(&mut beta, &gb, 0..channels, &mut |v| {
        let mut l = layer.clone();
        l.beta.value.data_mut().copy_from_slice(v);
        run(&l, &x)
    }));
    let mut xv = x.data().to_vec();
    worst.merge(compare(
        &mut xv,
        gx.data(),
        mask_indices(&mask, channels).into_iter(),
        &mut |v| run(&layer, &Tensor::from_vec(x.shape(), v.to_vec()).unwrap()),
    ))
}

pub fn check_relu(seed: u64) -> Outcome {
    let mut g = rng(seed);
    // Entries kept at least 0.1 away from the kink.
    let data: Vec<f64> = (0..12)
        .map(|_| {
            let v: f64 = g.random_range(0.1..2.0);
            if g.random_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    let x = Tensor::from_vec(&[3, 4], data).unwrap();
    let r = random_tensor(&mut g, &[3, 4], 1.0);
    let mut relu = Relu::new();
    relu.forward(&x);
    let gx = relu.backward(&r).unwrap();
    let mut xv = x.data().to_vec();
    compare(&mut xv, gx.data(), 0..12, &mut |v| {
        weighted_sum(
            &Relu::infer(&Tensor::from_vec(&[3, 4], v.to_vec()).unwrap()),
            &r,
        )
    })
}

pub fn check_dropout(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let x = random_tensor(&mut g, &[2, 6], 1.0);
    let r = random_tensor(&mut g, &[2, 6], 1.0);
    let mut layer = Dropout::new(0.4).unwrap();
    let drop_seed = g.random::<u64>();
    layer.forward(&x, Mode::Train, &mut rng(drop_seed));
    let gx = layer.backward(&r).unwrap();
    let mut xv = x.data().to_vec();
    compare(&mut xv, gx.data(), 0..12, &mut |v| {
        let mut l = Dropout::new(0.4).unwrap();
        let xi = Tensor::from_vec(&[2, 6], v.to_vec()).unwrap();
        weighted_sum(&l.forward(&xi, Mode::Train, &mut rng(drop_seed)), &r)
    })
}

pub fn check_pool(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let (batch, channels, frames) = (3, 2, 5);
    let mask = random_mask(&mut g, batch, frames);
    let x = random_tensor(&mut g, &[batch, channels, frames], 1.0);
    let r = random_tensor(&mut g, &[batch, channels], 1.0);
    let mut pool = MaskedAvgPool::new();
    pool.forward(&x, &mask).unwrap();
    let gx = pool.backward(&r).unwrap();
    let mut xv = x.data().to_vec();
    compare(
        &mut xv,
        gx.data(),
        mask_indices(&mask, channels).into_iter(),
        &mut |v| {
            let xi = Tensor::from_vec(x.shape(), v.to_vec()).unwrap();
            weighted_sum(&MaskedAvgPool::infer(&xi, &mask).unwrap(), &r)
        },
    )
}

pub fn check_dense(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let mut layer = Dense::<f64>::new("d", 4, 3, &mut g);
    for v in layer.bias.value.data_mut() {
        *v = g.random_range(-0.5..0.5);
    }
    let x = random_tensor(&mut g, &[2, 4], 1.0);
    let r = random_tensor(&mut g, &[2, 3], 1.0);
    let mut work = layer.clone();
    work.forward(&x).unwrap();
    let gx = work.backward(&r).unwrap();
    let (gw, gb) = (
        work.weight.grad.data().to_vec(),
        work.bias.grad.data().to_vec(),
    );
    let mut worst = Outcome::default();
    let mut w = layer.weight.value.data().to_vec();
    worst = worst.merge(compare(&mut w, &gw, 0..12, &mut |v| {
        let mut l = layer.clone();
        l.weight.value.data_mut().copy_from_slice(v);
        weighted_sum(&l.infer(&x).unwrap(), &r)
    }));
    let mut b = layer.bias.value.data().to_vec();
    worst = worst.merge(compare(&mut b, &gb, 0..3, &mut |v| {
        let mut l = layer.clone();
        l.bias.value.data_mut().copy_from_slice(v);
        weighted_sum(&l.infer(&x).unwrap(), &r)
    }));
    let mut xv = x.data().to_vec();
    worst.merge(compare(&mut xv, gx.data(), 0..8, &mut |v| {
        weighted_sum(
            &layer
                .infer(&Tensor::from_vec(&[2, 4], v.to_vec()).unwrap())
                .unwrap(),
            &r,
        )
    }))
}

pub fn check_cross_entropy(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let logits = random_tensor(&mut g, &[2, 16], 3.0);
    let gold = [g.random_range(0..16), g.random_range(0..16)];
    let (_, grad) = softmax_cross_entropy(&logits, &gold).unwrap();
    let mut lv = logits.data().to_vec();
    compare(&mut lv, grad.data(), 0..32, &mut |v| {
        softmax_cross_entropy(&Tensor::from_vec(&[2, 16], v.to_vec()).unwrap(), &gold)
            .unwrap()
            .0
    })
}

pub fn tiny_config(seed: u64) -> BaselineConfig {
    BaselineConfig {
        n_coeffs: 3,
        conv_specs: vec![(4, 3), (5, 2)],
        conv_dropout: 0.4,
        classifier_dims: vec![5, 6, 16],
        classifier_dropout: 0.4,
        seed,
        ..BaselineConfig::default()
    }
}

/// Full extractor and classifier in train mode (batch statistics, fixed
/// dropout masks) under cross-entropy. Perturbations that flip any ReLU are
/// skipped.
pub fn check_composite(seed: u64) -> Outcome {
    let mut g = rng(seed);
    let config = tiny_config(seed);
    let model = Baseline::<f64>::new(&config).unwrap();
    let (batch, frames) = (3, 6);
    let mask = random_mask(&mut g, batch, frames);
    let mut x = random_tensor(&mut g, &[batch, config.n_coeffs, frames], 1.0);
    zero_masked(&mut x, &mask);
    let gold: Vec<usize> = (0..batch).map(|_| g.random_range(0..16)).collect();
    let drop_seed = g.random::<u64>();
    let mut work = model.clone();
    let logits = work
        .forward(&x, &mask, Mode::Train, &mut rng(drop_seed))
        .unwrap();
    let pattern = work.activation_pattern();
    let (_, grad) = softmax_cross_entropy(&logits, &gold).unwrap();
    let gx = work.backward(&grad).unwrap();
    let analytic: Vec<Vec<f64>> = work
        .params()
        .iter()
        .map(|p| p.grad.data().to_vec())
        .collect();
    let loss = |m: &Baseline<f64>, x: &Tensor<f64>| {
        let mut m = m.clone();
        let logits = m
            .forward(x, &mask, Mode::Train, &mut rng(drop_seed))
            .unwrap();
        (m.activation_pattern() == pattern)
            .then(|| softmax_cross_entropy(&logits, &gold).unwrap().0)
    };

    let mut worst = Outcome::default();
    for (k, ga) in analytic.iter().enumerate() {
        let mut values = model.params()[k].value.data().to_vec();
        worst = worst.merge(compare_partial(&mut values, ga, 0..ga.len(), &mut |v| {
            let mut m = model.clone();
            m.params_mut()[k].value.data_mut().copy_from_slice(v);
            loss(&m, &x)
        }));
    }
    let mut xv = x.data().to_vec();
    worst.merge(compare_partial(
        &mut xv,
        gx.data(),
        mask_indices(&mask, config.n_coeffs).into_iter(),
        &mut |v| loss(&model, &Tensor::from_vec(x.shape(), v.to_vec()).unwrap()),
    ))
}

pub type Check = fn(u64) -> Outcome;

pub const CHECKS: [(&str, Check); 8] = [
    ("conv1d", check_conv),
    ("batchnorm", check_batchnorm),
    ("relu", check_relu),
    ("dropout", check_dropout),
    ("avgpool", check_pool),
    ("dense", check_dense),
    ("softmax_cross_entropy", check_cross_entropy),
    ("baseline", check_composite),
];
