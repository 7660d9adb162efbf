use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::BaselineConfig;
use crate::error::{Error, Result};
use crate::nn::{
    BatchNorm1d, Conv1d, Dense, Dropout, FrameMask, MaskedAvgPool, Mode, Param, Real, Relu, Tensor,
};

#[derive(Debug, Clone)]
struct ConvBlock<R> {
    conv: Conv1d<R>,
    bn: BatchNorm1d<R>,
    relu: Relu,
    dropout: Dropout,
}

#[derive(Debug, Clone)]
struct HiddenLayer<R> {
    dense: Dense<R>,
    relu: Relu,
    dropout: Dropout,
}

/// The convolutional baseline: a segment-level extractor (conv blocks then
/// masked average pooling) followed by a feed-forward language classifier.
///
/// Inputs are `[batch, n_coeffs, frames]`; outputs are `[batch, 16]` logits.
#[derive(Debug, Clone)]
pub struct Baseline<R> {
    config: BaselineConfig,
    blocks: Vec<ConvBlock<R>>,
    pool: MaskedAvgPool,
    hidden: Vec<HiddenLayer<R>>,
    output: Dense<R>,
}

impl<R: Real> Baseline<R> {
    /// Weights drawn from a generator seeded with `config.seed`.
    pub fn new(config: &BaselineConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut blocks = Vec::new();
        let mut c_in = config.n_coeffs;
        for (i, &(filters, width)) in config.conv_specs.iter().enumerate() {
            blocks.push(ConvBlock {
                conv: Conv1d::new(&format!("conv{i}"), c_in, filters, width, &mut rng),
                bn: BatchNorm1d::new(
                    &format!("bn{i}"),
                    filters,
                    config.bn_eps,
                    config.bn_momentum,
                ),
                relu: Relu::new(),
                dropout: Dropout::new(config.conv_dropout)?,
            });
            c_in = filters;
        }
        let dims = &config.classifier_dims;
        let mut hidden = Vec::new();
        for (i, w) in dims[..dims.len() - 1].windows(2).enumerate() {
            hidden.push(HiddenLayer {
                dense: Dense::new(&format!("fc{i}"), w[0], w[1], &mut rng),
                relu: Relu::new(),
                dropout: Dropout::new(config.classifier_dropout)?,
            });
        }
        let n = dims.len();
        let output = Dense::new(&format!("fc{}", n - 2), dims[n - 2], dims[n - 1], &mut rng);
        Ok(Self {
            config: config.clone(),
            blocks,
            pool: MaskedAvgPool::new(),
            hidden,
            output,
        })
    }

    pub fn config(&self) -> &BaselineConfig {
        &self.config
    }

    fn check_input(&self, x: &Tensor<R>) -> Result<()> {
        x.expect_rank(3, "model input")?;
        if x.shape()[1] != self.config.n_coeffs {
            return Err(Error::Usage(format!(
                "model expects {} coefficients per frame, got {}",
                self.config.n_coeffs,
                x.shape()[1]
            )));
        }
        Ok(())
    }

    /// Segment embeddings `[batch, d]` in eval mode, without caching.
    pub fn embed(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        self.check_input(x)?;
        let mut h = x.clone();
        for b in &self.blocks {
            h = b.conv.infer(&h, mask)?;
            h = b.bn.infer(&h, mask)?;
            h = Relu::infer(&h);
        }
        MaskedAvgPool::infer(&h, mask)
    }

    /// Logits from embeddings in eval mode.
    pub fn classify(&self, u: &Tensor<R>) -> Result<Tensor<R>> {
        let mut h = u.clone();
        for l in &self.hidden {
            h = Relu::infer(&l.dense.infer(&h)?);
        }
        self.output.infer(&h)
    }

    /// Eval-mode logits; touches no state.
    pub fn infer(&self, x: &Tensor<R>, mask: &FrameMask) -> Result<Tensor<R>> {
        self.classify(&self.embed(x, mask)?)
    }

    /// Logits with every layer caching for [`Baseline::backward`]. Train mode
    /// uses batch statistics, updates running statistics and draws dropout
    /// masks from `rng`.
    pub fn forward(
        &mut self,
        x: &Tensor<R>,
        mask: &FrameMask,
        mode: Mode,
        rng: &mut impl Rng,
    ) -> Result<Tensor<R>> {
        self.check_input(x)?;
        let mut h = x.clone();
        for b in &mut self.blocks {
            h = b.conv.forward(&h, mask)?;
            h = b.bn.forward(&h, mask, mode)?;
            h = b.relu.forward(&h);
            h = b.dropout.forward(&h, mode, rng);
        }
        h = self.pool.forward(&h, mask)?;
        for l in &mut self.hidden {
            h = l.dense.forward(&h)?;
            h = l.relu.forward(&h);
            h = l.dropout.forward(&h, mode, rng);
        }
        self.output.forward(&h)
    }

    /// Fills every parameter gradient and returns the input gradient.
    pub fn backward(&mut self, grad_logits: &Tensor<R>) -> Result<Tensor<R>> {
        let mut g = self.output.backward(grad_logits)?;
        for l in self.hidden.iter_mut().rev() {
            g = l.dropout.backward(&g)?;
            g = l.relu.backward(&g)?;
            g = l.dense.backward(&g)?;
        }
        g = self.pool.backward(&g)?;
        for b in self.blocks.iter_mut().rev() {
            g = b.dropout.backward(&g)?;
            g = b.relu.backward(&g)?;
            g = b.bn.backward(&g)?;
            g = b.conv.backward(&g)?;
        }
        Ok(g)
    }

    /// ReLU on/off states cached by the last [`Baseline::forward`], in layer
    /// order. Empty once consumed by backward.
    pub fn activation_pattern(&self) -> Vec<bool> {
        let blocks = self.blocks.iter().map(|b| &b.relu);
        let hidden = self.hidden.iter().map(|l| &l.relu);
        blocks
            .chain(hidden)
            .flat_map(|r| r.pattern().unwrap_or(&[]).iter().copied())
            .collect()
    }

    /// Trainable parameters in a fixed order: extractor, then classifier.
    pub fn params(&self) -> Vec<&Param<R>> {
        let mut out = Vec::new();
        for b in &self.blocks {
            out.extend(b.conv.params());
            out.extend(b.bn.params());
        }
        for l in &self.hidden {
            out.extend(l.dense.params());
        }
        out.extend(self.output.params());
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        let mut out = Vec::new();
        for b in &mut self.blocks {
            out.extend(b.conv.params_mut());
            out.extend(b.bn.params_mut());
        }
        for l in &mut self.hidden {
            out.extend(l.dense.params_mut());
        }
        out.extend(self.output.params_mut());
        out
    }

    /// Trainable parameter counts `(extractor, classifier)`.
    pub fn param_counts(&self) -> (usize, usize) {
        let f = self
            .blocks
            .iter()
            .flat_map(|b| b.conv.params().into_iter().chain(b.bn.params()))
            .map(|p| p.value.len())
            .sum();
        let total: usize = self.params().iter().map(|p| p.value.len()).sum();
        (f, total - f)
    }

    /// Batch-norm running statistics as `(name, values)` pairs.
    pub fn running_stats(&self) -> Vec<(String, &[R])> {
        let mut out = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            out.push((format!("bn{i}.running_mean"), b.bn.running_mean.as_slice()));
            out.push((format!("bn{i}.running_var"), b.bn.running_var.as_slice()));
        }
        out
    }

    pub fn running_stats_mut(&mut self) -> Vec<(String, &mut Vec<R>)> {
        let mut out = Vec::new();
        for (i, b) in self.blocks.iter_mut().enumerate() {
            out.push((format!("bn{i}.running_mean"), &mut b.bn.running_mean));
            out.push((format!("bn{i}.running_var"), &mut b.bn.running_var));
        }
        out
    }

    pub fn cast<S: Real>(&self) -> Baseline<S> {
        let mut out = Baseline::<S>::new(&self.config).expect("config already validated");
        for (dst, src) in out.params_mut().into_iter().zip(self.params()) {
            dst.value = src.value.cast();
        }
        for ((_, dst), (_, src)) in out
            .running_stats_mut()
            .into_iter()
            .zip(self.running_stats())
        {
            *dst = src
                .iter()
                .map(|&v| S::from_f64_lossy(v.to_f64_lossy()))
                .collect();
        }
        out
    }
}
