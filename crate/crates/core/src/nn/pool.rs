use super::real::Real;
use super::tensor::{FrameMask, Tensor};
use crate::error::{Error, Result};

/// Per-channel mean over each sample's unmasked frames: `[B, C, T] -> [B, C]`.
#[derive(Debug, Clone, Default)]
pub struct MaskedAvgPool {
    cache: Option<(Vec<usize>, FrameMask)>,
}

impl MaskedAvgPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn infer<R: Real>(x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        x.expect_rank(3, "pool input")?;
        let (batch, channels, frames) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        mask.check(batch, frames, "pool")?;
        let mut out = Tensor::zeros(&[batch, channels]);
        for b in 0..batch {
            let n = mask.count_sample(b);
            if n == 0 {
                return Err(Error::Degenerate(format!(
                    "sample {b} has no unmasked frames to pool"
                )));
            }
            let nr = R::from_usize(n).expect("count fits");
            let valid = mask.sample(b);
            for c in 0..channels {
                let row = &x.data()[(b * channels + c) * frames..(b * channels + c + 1) * frames];
                let s: R = row
                    .iter()
                    .zip(valid)
                    .filter(|(_, &ok)| ok)
                    .map(|(&v, _)| v)
                    .sum();
                out.data_mut()[b * channels + c] = s / nr;
            }
        }
        Ok(out)
    }

    pub fn forward<R: Real>(&mut self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        let out = Self::infer(x, mask)?;
        self.cache = Some((x.shape().to_vec(), mask.clone()));
        Ok(out)
    }

    pub fn backward<R: Real>(&mut self, grad_out: &Tensor<R>) -> Result<Tensor<R>> {
        let (shape, mask) = self
            .cache
            .take()
            .ok_or_else(|| Error::Usage("pool backward called before forward".into()))?;
        let (batch, channels, frames) = (shape[0], shape[1], shape[2]);
        if grad_out.shape() != [batch, channels] {
            return Err(Error::Usage(format!(
                "pool grad_out shape {:?}, expected [{batch}, {channels}]",
                grad_out.shape()
            )));
        }
        let mut g = Tensor::zeros(&shape);
        for b in 0..batch {
            let share = R::one() / R::from_usize(mask.count_sample(b)).expect("count fits");
            let valid = mask.sample(b);
            for c in 0..channels {
                let v = grad_out.data()[b * channels + c] * share;
                let row =
                    &mut g.data_mut()[(b * channels + c) * frames..(b * channels + c + 1) * frames];
                for (o, &ok) in row.iter_mut().zip(valid) {
                    if ok {
                        *o = v;
                    }
                }
            }
        }
        Ok(g)
    }
}
