use rand::Rng;

use super::real::Real;
use super::tensor::{Mode, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct Relu {
    active: Option<Vec<bool>>,
}

impl Relu {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn infer<R: Real>(x: &Tensor<R>) -> Tensor<R> {
        let mut y = x.clone();
        for v in y.data_mut() {
            *v = v.max(R::zero());
        }
        y
    }

    pub fn forward<R: Real>(&mut self, x: &Tensor<R>) -> Tensor<R> {
        self.active = Some(x.data().iter().map(|&v| v > R::zero()).collect());
        Self::infer(x)
    }

    /// Which inputs of the cached forward pass were strictly positive.
    pub fn pattern(&self) -> Option<&[bool]> {
        self.active.as_deref()
    }

    /// Gradient passes where the input was strictly positive.
    pub fn backward<R: Real>(&mut self, grad_out: &Tensor<R>) -> Result<Tensor<R>> {
        let active = self
            .active
            .take()
            .ok_or_else(|| Error::Usage("relu backward called before forward".into()))?;
        if active.len() != grad_out.len() {
            return Err(Error::Usage(
                "relu grad_out size differs from forward input".into(),
            ));
        }
        let mut g = grad_out.clone();
        for (v, &a) in g.data_mut().iter_mut().zip(&active) {
            if !a {
                *v = R::zero();
            }
        }
        Ok(g)
    }
}

/// Inverted dropout: in training each unit is zeroed with probability `p`
/// and survivors are scaled by `1 / (1 - p)`; evaluation is the identity.
#[derive(Debug, Clone)]
pub struct Dropout {
    p: f64,
    scales: Option<Option<Vec<f64>>>,
}

impl Dropout {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Config(format!(
                "dropout probability {p} outside [0, 1)"
            )));
        }
        Ok(Self { p, scales: None })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn forward<R: Real>(&mut self, x: &Tensor<R>, mode: Mode, rng: &mut impl Rng) -> Tensor<R> {
        if mode == Mode::Eval || self.p == 0.0 {
            self.scales = Some(None);
            return x.clone();
        }
        let keep = 1.0 / (1.0 - self.p);
        let scales: Vec<f64> = (0..x.len())
            .map(|_| {
                if rng.random::<f64>() < self.p {
                    0.0
                } else {
                    keep
                }
            })
            .collect();
        let mut y = x.clone();
        for (v, &s) in y.data_mut().iter_mut().zip(&scales) {
            *v *= R::from_f64_lossy(s);
        }
        self.scales = Some(Some(scales));
        y
    }

    pub fn backward<R: Real>(&mut self, grad_out: &Tensor<R>) -> Result<Tensor<R>> {
        let scales = self
            .scales
            .take()
            .ok_or_else(|| Error::Usage("dropout backward called before forward".into()))?;
        let mut g = grad_out.clone();
        if let Some(scales) = scales {
            if scales.len() != g.len() {
                return Err(Error::Usage(
                    "dropout grad_out size differs from forward input".into(),
                ));
            }
            for (v, &s) in g.data_mut().iter_mut().zip(&scales) {
                *v *= R::from_f64_lossy(s);
            }
        }
        Ok(g)
    }
}
