use super::real::Real;
use super::tensor::{FrameMask, Mode, Param, Tensor};
use crate::error::{Error, Result};

/// Per-channel batch normalization over `[batch, channels, time]`, with
/// statistics taken over unmasked frames only. Masked outputs are zero.
#[derive(Debug, Clone)]
pub struct BatchNorm1d<R> {
    channels: usize,
    pub gamma: Param<R>,
    pub beta: Param<R>,
    pub running_mean: Vec<R>,
    pub running_var: Vec<R>,
    pub eps: R,
    pub momentum: R,
    cache: Option<Cache<R>>,
}

#[derive(Debug, Clone)]
struct Cache<R> {
    x_hat: Tensor<R>,
    inv_std: Vec<R>,
    mask: FrameMask,
    mode: Mode,
}

impl<R: Real> BatchNorm1d<R> {
    pub fn new(name: &str, channels: usize, eps: f64, momentum: f64) -> Self {
        Self {
            channels,
            gamma: Param::new(
                format!("{name}.gamma"),
                Tensor::from_vec(&[channels], vec![R::one(); channels]).expect("non-empty"),
            ),
            beta: Param::new(format!("{name}.beta"), Tensor::zeros(&[channels])),
            running_mean: vec![R::zero(); channels],
            running_var: vec![R::one(); channels],
            eps: R::from_f64_lossy(eps),
            momentum: R::from_f64_lossy(momentum),
            cache: None,
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn params(&self) -> [&Param<R>; 2] {
        [&self.gamma, &self.beta]
    }

    pub fn params_mut(&mut self) -> [&mut Param<R>; 2] {
        [&mut self.gamma, &mut self.beta]
    }

    fn dims(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<(usize, usize)> {
        x.expect_rank(3, "batchnorm input")?;
        if x.shape()[1] != self.channels {
            return Err(Error::Usage(format!(
                "batchnorm expects {} channels, got {}",
                self.channels,
                x.shape()[1]
            )));
        }
        mask.check(x.shape()[0], x.shape()[2], "batchnorm")?;
        Ok((x.shape()[0], x.shape()[2]))
    }

    /// Normalizes with `mean`/`inv_std`, returning `(y, x_hat)`.
    fn normalize(
        &self,
        x: &Tensor<R>,
        mask: &FrameMask,
        mean: &[R],
        inv_std: &[R],
    ) -> (Tensor<R>, Tensor<R>) {
        let (batch, frames) = (x.shape()[0], x.shape()[2]);
        let mut y = Tensor::zeros(x.shape());
        let mut x_hat = Tensor::zeros(x.shape());
        for b in 0..batch {
            let valid = mask.sample(b);
            for c in 0..self.channels {
                let off = (b * self.channels + c) * frames;
                let (g, be) = (self.gamma.value.data()[c], self.beta.value.data()[c]);
                for t in 0..frames {
                    if valid[t] {
                        let h = (x.data()[off + t] - mean[c]) * inv_std[c];
                        x_hat.data_mut()[off + t] = h;
                        y.data_mut()[off + t] = g * h + be;
                    }
                }
            }
        }
        (y, x_hat)
    }

    fn running_inv_std(&self) -> Vec<R> {
        self.running_var
            .iter()
            .map(|&v| R::one() / (v + self.eps).sqrt())
            .collect()
    }

    /// Eval-mode forward without caching.
    pub fn infer(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        self.dims(x, mask)?;
        Ok(self
            .normalize(x, mask, &self.running_mean, &self.running_inv_std())
            .0)
    }

    pub fn forward(&mut self, x: &Tensor<R>, mask: &FrameMask, mode: Mode) -> Result<Tensor<R>> {
        let (batch, frames) = self.dims(x, mask)?;
        let (mean, inv_std) = match mode {
            Mode::Eval => (self.running_mean.clone(), self.running_inv_std()),
            Mode::Train => {
                let n = mask.count();
                if n < 2 {
                    return Err(Error::Degenerate(format!(
                        "batchnorm needs at least 2 unmasked frames in train mode, got {n}"
                    )));
                }
                let nr = R::from_usize(n).expect("count fits");
                let mut mean = vec![R::zero(); self.channels];
                let mut var = vec![R::zero(); self.channels];
                for c in 0..self.channels {
                    let mut s = R::zero();
                    for b in 0..batch {
                        let off = (b * self.channels + c) * frames;
                        for (t, &ok) in mask.sample(b).iter().enumerate() {
                            if ok {
                                s += x.data()[off + t];
                            }
                        }
                    }
                    mean[c] = s / nr;
                    let mut q = R::zero();
                    for b in 0..batch {
                        let off = (b * self.channels + c) * frames;
                        for (t, &ok) in mask.sample(b).iter().enumerate() {
                            if ok {
                                let d = x.data()[off + t] - mean[c];
                                q += d * d;
                            }
                        }
                    }
                    var[c] = q / nr;
                }
                let unbias = nr / (nr - R::one());
                for c in 0..self.channels {
                    let m = self.momentum;
                    self.running_mean[c] = (R::one() - m) * self.running_mean[c] + m * mean[c];
                    self.running_var[c] =
                        (R::one() - m) * self.running_var[c] + m * var[c] * unbias;
                }
                let inv_std = var
                    .iter()
                    .map(|&v| R::one() / (v + self.eps).sqrt())
                    .collect();
                (mean, inv_std)
            }
        };
        let (y, x_hat) = self.normalize(x, mask, &mean, &inv_std);
        self.cache = Some(Cache {
            x_hat,
            inv_std,
            mask: mask.clone(),
            mode,
        });
        Ok(y)
    }

    pub fn backward(&mut self, grad_out: &Tensor<R>) -> Result<Tensor<R>> {
        let cache = self
            .cache
            .take()
            .ok_or_else(|| Error::Usage("batchnorm backward called before forward".into()))?;
        if grad_out.shape() != cache.x_hat.shape() {
            return Err(Error::Usage(format!(
                "batchnorm grad_out shape {:?}, expected {:?}",
                grad_out.shape(),
                cache.x_hat.shape()
            )));
        }
        let (batch, frames) = (grad_out.shape()[0], grad_out.shape()[2]);
        let mask = &cache.mask;
        let nr = R::from_usize(mask.count().max(1)).expect("count fits");
        let mut grad_x = Tensor::zeros(grad_out.shape());
        for c in 0..self.channels {
            let gamma = self.gamma.value.data()[c];
            let (mut dg, mut db, mut sum_dxh, mut sum_dxh_xh) =
                (R::zero(), R::zero(), R::zero(), R::zero());
            for b in 0..batch {
                let off = (b * self.channels + c) * frames;
                for (t, &ok) in mask.sample(b).iter().enumerate() {
                    if ok {
                        let dy = grad_out.data()[off + t];
                        let xh = cache.x_hat.data()[off + t];
                        dg += dy * xh;
                        db += dy;
                        sum_dxh += dy * gamma;
                        sum_dxh_xh += dy * gamma * xh;
                    }
                }
            }
            self.gamma.grad.data_mut()[c] = dg;
            self.beta.grad.data_mut()[c] = db;
            let inv = cache.inv_std[c];
            for b in 0..batch {
                let off = (b * self.channels + c) * frames;
                for (t, &ok) in mask.sample(b).iter().enumerate() {
                    if ok {
                        let dxh = grad_out.data()[off + t] * gamma;
                        grad_x.data_mut()[off + t] = match cache.mode {
                            Mode::Eval => dxh * inv,
                            Mode::Train => {
                                inv / nr
                                    * (nr * dxh
                                        - sum_dxh
                                        - cache.x_hat.data()[off + t] * sum_dxh_xh)
                            }
                        };
                    }
                }
            }
        }
        Ok(grad_x)
    }
}
