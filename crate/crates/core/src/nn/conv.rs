use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::real::{gemm, MatRef, Real};
use super::tensor::{FrameMask, Param, Tensor};
use crate::error::{Error, Result};

/// Temporal convolution, stride 1, with symmetric zero padding that keeps the
/// sequence length: `left = (width - 1) / 2` frames before, the rest after.
///
/// Outputs at masked frames are forced to zero, so padding never leaks into
/// the next layer and a sample's result does not depend on its batch.
#[derive(Debug, Clone)]
pub struct Conv1d<R> {
    in_channels: usize,
    out_channels: usize,
    width: usize,
    /// `[out, in, width]`
    pub weight: Param<R>,
    /// `[out]`
    pub bias: Param<R>,
    cache: Option<(Tensor<R>, FrameMask)>,
}

impl<R: Real> Conv1d<R> {
    /// He-normal weights, zero bias.
    pub fn new(
        name: &str,
        in_channels: usize,
        out_channels: usize,
        width: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let fan_in = (in_channels * width) as f64;
        let normal = Normal::new(0.0, (2.0 / fan_in).sqrt()).expect("positive std");
        let w = (0..out_channels * in_channels * width)
            .map(|_| R::from_f64_lossy(normal.sample(rng)))
            .collect();
        let weight =
            Tensor::from_vec(&[out_channels, in_channels, width], w).expect("shape matches");
        Self::from_parts(name, weight, Tensor::zeros(&[out_channels])).expect("consistent shapes")
    }

    pub fn from_parts(name: &str, weight: Tensor<R>, bias: Tensor<R>) -> Result<Self> {
        weight.expect_rank(3, "conv weight")?;
        let (out_channels, in_channels, width) =
            (weight.shape()[0], weight.shape()[1], weight.shape()[2]);
        if bias.shape() != [out_channels] {
            return Err(Error::Usage(format!(
                "conv bias shape {:?} does not match {out_channels} filters",
                bias.shape()
            )));
        }
        Ok(Self {
            in_channels,
            out_channels,
            width,
            weight: Param::new(format!("{name}.weight"), weight),
            bias: Param::new(format!("{name}.bias"), bias),
            cache: None,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn left_pad(&self) -> usize {
        (self.width - 1) / 2
    }

    pub fn params(&self) -> [&Param<R>; 2] {
        [&self.weight, &self.bias]
    }

    pub fn params_mut(&mut self) -> [&mut Param<R>; 2] {
        [&mut self.weight, &mut self.bias]
    }

    fn check_input(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<(usize, usize)> {
        x.expect_rank(3, "conv1d input")?;
        let (b, c, t) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        if c != self.in_channels {
            return Err(Error::Usage(format!(
                "conv1d expects {} input channels, got {c}",
                self.in_channels
            )));
        }
        mask.check(b, t, "conv1d")?;
        Ok((b, t))
    }

    /// `cols[(c * width + w) * span + t] = x[c, t + w - left]`, zero outside.
    fn im2col(&self, sample: &[R], frames: usize, span: usize, cols: &mut Vec<R>) {
        let left = self.left_pad() as isize;
        cols.clear();
        cols.resize(self.in_channels * self.width * span, R::zero());
        for c in 0..self.in_channels {
            let src = &sample[c * frames..(c + 1) * frames];
            for w in 0..self.width {
                let row = &mut cols[(c * self.width + w) * span..(c * self.width + w + 1) * span];
                let shift = w as isize - left;
                // t + shift in [0, frames)
                let lo = (-shift).max(0) as usize;
                let hi = ((frames as isize - shift).min(span as isize)).max(0) as usize;
                if lo < hi {
                    let s0 = (lo as isize + shift) as usize;
                    row[lo..hi].copy_from_slice(&src[s0..s0 + (hi - lo)]);
                }
            }
        }
    }

    fn compute(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        let (batch, frames) = self.check_input(x, mask)?;
        let k = self.in_channels * self.width;
        let mut out = Tensor::zeros(&[batch, self.out_channels, frames]);
        let mut cols = Vec::new();
        let per_in = self.in_channels * frames;
        let per_out = self.out_channels * frames;
        for b in 0..batch {
            let span = mask.active_len(b);
            if span == 0 {
                continue;
            }
            self.im2col(
                &x.data()[b * per_in..(b + 1) * per_in],
                frames,
                span,
                &mut cols,
            );
            let o = &mut out.data_mut()[b * per_out..(b + 1) * per_out];
            gemm(
                R::one(),
                MatRef::new(self.weight.value.data(), self.out_channels, k),
                MatRef::new(&cols, k, span),
                R::zero(),
                o,
                frames,
            );
            let valid = mask.sample(b);
            for (oc, &bias) in self.bias.value.data().iter().enumerate() {
                let row = &mut o[oc * frames..oc * frames + span];
                for (v, &ok) in row.iter_mut().zip(valid) {
                    *v = if ok { *v + bias } else { R::zero() };
                }
            }
        }
        Ok(out)
    }

    /// Eval-style forward without caching.
    pub fn infer(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        self.compute(x, mask)
    }

    pub fn forward(&mut self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        let out = self.compute(x, mask)?;
        self.cache = Some((x.clone(), mask.clone()));
        Ok(out)
    }

    /// Sets `weight.grad` and `bias.grad` for the cached batch (summed over
    /// samples) and returns the gradient with respect to the input.
    pub fn backward(&mut self, grad_out: &Tensor<R>) -> Result<Tensor<R>> {
        let (x, mask) = self
            .cache
            .take()
            .ok_or_else(|| Error::Usage("conv1d backward called before forward".into()))?;
        let (batch, frames) = (x.shape()[0], x.shape()[2]);
        if grad_out.shape() != [batch, self.out_channels, frames] {
            return Err(Error::Usage(format!(
                "conv1d grad_out shape {:?}, expected {:?}",
                grad_out.shape(),
                [batch, self.out_channels, frames]
            )));
        }
        let k = self.in_channels * self.width;
        let left = self.left_pad() as isize;
        self.weight.zero_grad();
        self.bias.zero_grad();
        let mut grad_x = Tensor::zeros(x.shape());
        let mut cols = Vec::new();
        let mut gm = Vec::new();
        let mut gcols = Vec::new();
        let per_in = self.in_channels * frames;
        let per_out = self.out_channels * frames;
        for b in 0..batch {
            let span = mask.active_len(b);
            if span == 0 {
                continue;
            }
            let valid = mask.sample(b);
            let g = &grad_out.data()[b * per_out..(b + 1) * per_out];
            gm.clear();
            for oc in 0..self.out_channels {
                gm.extend(
                    g[oc * frames..oc * frames + span]
                        .iter()
                        .zip(valid)
                        .map(|(&v, &ok)| if ok { v } else { R::zero() }),
                );
            }
            for (oc, gb) in self.bias.grad.data_mut().iter_mut().enumerate() {
                *gb += gm[oc * span..(oc + 1) * span].iter().copied().sum::<R>();
            }
            self.im2col(
                &x.data()[b * per_in..(b + 1) * per_in],
                frames,
                span,
                &mut cols,
            );
            gemm(
                R::one(),
                MatRef::new(&gm, self.out_channels, span),
                MatRef::t(&cols, span, k),
                R::one(),
                self.weight.grad.data_mut(),
                k,
            );
            gcols.clear();
            gcols.resize(k * span, R::zero());
            gemm(
                R::one(),
                MatRef::t(self.weight.value.data(), k, self.out_channels),
                MatRef::new(&gm, self.out_channels, span),
                R::zero(),
                &mut gcols,
                span,
            );
            let gx = &mut grad_x.data_mut()[b * per_in..(b + 1) * per_in];
            for c in 0..self.in_channels {
                for w in 0..self.width {
                    let row = &gcols[(c * self.width + w) * span..(c * self.width + w + 1) * span];
                    let shift = w as isize - left;
                    let lo = (-shift).max(0) as usize;
                    let hi = ((frames as isize - shift).min(span as isize)).max(0) as usize;
                    for t in lo..hi {
                        gx[c * frames + (t as isize + shift) as usize] += row[t];
                    }
                }
            }
        }
        Ok(grad_x)
    }
}
