use super::real::Real;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Dense row-major tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<R> {
    shape: Vec<usize>,
    data: Vec<R>,
}

impl<R: Real> Tensor<R> {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![R::zero(); shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<R>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() || shape.iter().any(|&d| d == 0) {
            return Err(Error::Usage(format!(
                "tensor shape {shape:?} does not fit {} values",
                data.len()
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [R] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<R> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn fill(&mut self, v: R) {
        self.data.fill(v);
    }

    pub fn expect_rank(&self, rank: usize, what: &str) -> Result<()> {
        if self.shape.len() != rank {
            return Err(Error::Usage(format!(
                "{what}: expected a rank-{rank} tensor, got shape {:?}",
                self.shape
            )));
        }
        Ok(())
    }

    pub fn cast<S: Real>(&self) -> Tensor<S> {
        Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .map(|v| S::from_f64_lossy(v.to_f64_lossy()))
                .collect(),
        }
    }
}

/// Per-sample frame validity for a `[batch, channels, time]` batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameMask {
    batch: usize,
    frames: usize,
    valid: Vec<bool>,
}

impl FrameMask {
    pub fn new(batch: usize, frames: usize, valid: Vec<bool>) -> Result<Self> {
        if valid.len() != batch * frames {
            return Err(Error::Usage(format!(
                "mask holds {} flags, expected {batch}x{frames}",
                valid.len()
            )));
        }
        Ok(Self {
            batch,
            frames,
            valid,
        })
    }

    pub fn full(batch: usize, frames: usize) -> Self {
        Self {
            batch,
            frames,
            valid: vec![true; batch * frames],
        }
    }

    /// Prefix masks for right-padded sequences.
    pub fn from_lengths(lengths: &[usize], frames: usize) -> Self {
        let mut valid = vec![false; lengths.len() * frames];
        for (b, &len) in lengths.iter().enumerate() {
            valid[b * frames..b * frames + len.min(frames)].fill(true);
        }
        Self {
            batch: lengths.len(),
            frames,
            valid,
        }
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn is_valid(&self, b: usize, t: usize) -> bool {
        self.valid[b * self.frames + t]
    }

    pub fn sample(&self, b: usize) -> &[bool] {
        &self.valid[b * self.frames..(b + 1) * self.frames]
    }

    /// One past the last valid frame of sample `b` (0 when fully masked).
    pub fn active_len(&self, b: usize) -> usize {
        self.sample(b).iter().rposition(|&v| v).map_or(0, |i| i + 1)
    }

    pub fn count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn count_sample(&self, b: usize) -> usize {
        self.sample(b).iter().filter(|&&v| v).count()
    }

    pub(crate) fn check(&self, batch: usize, frames: usize, what: &str) -> Result<()> {
        if self.batch != batch || self.frames != frames {
            return Err(Error::Usage(format!(
                "{what}: mask is {}x{}, input is {batch}x{frames}",
                self.batch, self.frames
            )));
        }
        Ok(())
    }
}

/// A learnable tensor with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Param<R> {
    pub name: String,
    pub value: Tensor<R>,
    pub grad: Tensor<R>,
}

impl<R: Real> Param<R> {
    pub fn new(name: impl Into<String>, value: Tensor<R>) -> Self {
        let grad = Tensor::zeros(value.shape());
        Self {
            name: name.into(),
            value,
            grad,
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(R::zero());
    }
}
