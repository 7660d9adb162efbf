use crate::dataset::N_LANGUAGES;
use crate::error::{Error, Result};
use crate::nn::AdamConfig;

/// Architecture and training hyperparameters of the convolutional baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    /// MFCC coefficients per frame.
    pub n_coeffs: usize,
    /// `(filters, width)` per convolution block.
    pub conv_specs: Vec<(usize, usize)>,
    pub conv_dropout: f64,
    /// Input and output sizes of the classifier layers; the first equals the
    /// last filter count and the last equals the number of languages.
    pub classifier_dims: Vec<usize>,
    pub classifier_dropout: f64,
    pub bn_eps: f64,
    pub bn_momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            n_coeffs: 13,
            conv_specs: vec![(64, 16), (128, 32), (256, 48)],
            conv_dropout: 0.0,
            classifier_dims: vec![256, 256, 256, N_LANGUAGES],
            classifier_dropout: 0.4,
            bn_eps: 1e-5,
            bn_momentum: 0.1,
            batch_size: 256,
            epochs: 50,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl BaselineConfig {
    pub fn embedding_dim(&self) -> usize {
        self.conv_specs.last().map_or(0, |s| s.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_coeffs == 0 {
            return bad("model.n_coeffs must be positive".into());
        }
        if self.conv_specs.is_empty() || self.conv_specs.iter().any(|&(f, w)| f == 0 || w == 0) {
            return bad(
                "model.conv_specs needs at least one block with positive filters and width".into(),
            );
        }
        if self.classifier_dims.len() < 2 || self.classifier_dims.contains(&0) {
            return bad("model.classifier_dims needs at least two positive sizes".into());
        }
        if self.classifier_dims[0] != self.embedding_dim() {
            return bad(format!(
                "model.classifier_dims starts at {} but the embedding has {} dimensions",
                self.classifier_dims[0],
                self.embedding_dim()
            ));
        }
        if *self.classifier_dims.last().expect("non-empty") != N_LANGUAGES {
            return bad(format!(
                "model.classifier_dims must end at {N_LANGUAGES} languages"
            ));
        }
        for (key, p) in [
            ("model.conv_dropout", self.conv_dropout),
            ("model.classifier_dropout", self.classifier_dropout),
        ] {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("{key} = {p} outside [0, 1)"));
            }
        }
        if !(self.bn_eps > 0.0) || !(self.bn_momentum > 0.0 && self.bn_momentum < 1.0) {
            return bad("model.bn_eps must be positive and model.bn_momentum inside (0, 1)".into());
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return bad("train.batch_size and train.epochs must be positive".into());
        }
        let a = &self.adam;
        if !(a.lr > 0.0)
            || !(0.0..1.0).contains(&a.beta1)
            || !(0.0..1.0).contains(&a.beta2)
            || !(a.eps > 0.0)
        {
            return bad("adam settings need lr > 0, betas in [0, 1) and eps > 0".into());
        }
        Ok(())
    }

    /// Closed-form trainable parameter counts `(extractor, classifier)`.
    pub fn param_counts(&self) -> (usize, usize) {
        let mut f = 0;
        let mut c_in = self.n_coeffs;
        for &(filters, width) in &self.conv_specs {
            f += filters * c_in * width + filters + 2 * filters;
            c_in = filters;
        }
        let g = self
            .classifier_dims
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum();
        (f, g)
    }
}
