use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::real::{gemm, MatRef, Real};
use super::tensor::{Param, Tensor};
use crate::error::{Error, Result};

/// Affine map `y = W x + b` applied row-wise to a `[batch, in]` matrix.
#[derive(Debug, Clone)]
pub struct Dense<R> {
    in_dim: usize,
    out_dim: usize,
    /// `[out, in]`
    pub weight: Param<R>,
    pub bias: Param<R>,
    cache: Option<Tensor<R>>,
}

impl<R: Real> Dense<R> {
    pub fn new(name: &str, in_dim: usize, out_dim: usize, rng: &mut impl Rng) -> Self {
        let normal = Normal::new(0.0, (2.0 / in_dim as f64).sqrt()).expect("positive std");
        let w = (0..out_dim * in_dim)
            .map(|_| R::from_f64_lossy(normal.sample(rng)))
            .collect();
        Self::from_parts(
            name,
            Tensor::from_vec(&[out_dim, in_dim], w).expect("shape matches"),
            Tensor::zeros(&[out_dim]),
        )
        .expect("consistent shapes")
    }

    pub fn from_parts(name: &str, weight: Tensor<R>, bias: Tensor<R>) -> Result<Self> {
        weight.expect_rank(2, "dense weight")?;
        let (out_dim, in_dim) = (weight.shape()[0], weight.shape()[1]);
        if bias.shape() != [out_dim] {
            return Err(Error::Usage(format!(
                "dense bias shape {:?} does not match {out_dim} outputs",
                bias.shape()
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weight: Param::new(format!("{name}.weight"), weight),
            bias: Param::new(format!("{name}.bias"), bias),
            cache: None,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn params(&self) -> [&Param<R>; 2] {
        [&self.weight, &self.bias]
    }

    pub fn params_mut(&mut self) -> [&mut Param<R>; 2] {
        [&mut self.weight, &mut self.bias]
    }

    pub fn infer(&self, x: &Tensor<R>) -> Result<Tensor<R>> {
        x.expect_rank(2, "dense input")?;
        if x.shape()[1] != self.in_dim {
            return Err(Error::Usage(format!(
                "dense expects {} inputs, got {}",
                self.in_dim,
                x.shape()[1]
            )));
        }
        let batch = x.shape()[0];
        let mut y = Tensor::zeros(&[batch, self.out_dim]);
        for row in y.data_mut().chunks_exact_mut(self.out_dim) {
            row.copy_from_slice(self.bias.value.data());
        }
        gemm(
            R::one(),
            MatRef::new(x.data(), batch, self.in_dim),
            MatRef::t(self.weight.value.data(), self.in_dim, self.out_dim),
            R::one(),
            y.data_mut(),
            self.out_dim,
        );
        Ok(y)
    }

    pub fn forward(&mut self, x: &Tensor<R>) -> Result<Tensor<R>> {
        let y = self.infer(x)?;
        self.cache = Some(x.clone());
        Ok(y)
    }

    pub fn backward(&mut self, grad_out: &Tensor<R>) -> Result<Tensor<R>> {
        let x = self
            .cache
            .take()
            .ok_or_else(|| Error::Usage("dense backward called before forward".into()))?;
        let batch = x.shape()[0];
        if grad_out.shape() != [batch, self.out_dim] {
            return Err(Error::Usage(format!(
                "dense grad_out shape {:?}, expected [{batch}, {}]",
                grad_out.shape(),
                self.out_dim
            )));
        }
        gemm(
            R::one(),
            MatRef::t(grad_out.data(), self.out_dim, batch),
            MatRef::new(x.data(), batch, self.in_dim),
            R::zero(),
            self.weight.grad.data_mut(),
            self.in_dim,
        );
        let gb = self.bias.grad.data_mut();
        gb.fill(R::zero());
        for row in grad_out.data().chunks_exact(self.out_dim) {
            for (g, &v) in gb.iter_mut().zip(row) {
                *g += v;
            }
        }
        let mut gx = Tensor::zeros(&[batch, self.in_dim]);
        gemm(
            R::one(),
            MatRef::new(grad_out.data(), batch, self.out_dim),
            MatRef::new(self.weight.value.data(), self.out_dim, self.in_dim),
            R::zero(),
            gx.data_mut(),
            self.in_dim,
        );
        Ok(gx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_weights() {
        let mut w = vec![0.0f64; 9];
        for i in 0..3 {
            w[i * 4] = 1.0;
        }
        let d = Dense::from_parts(
            "d",
            Tensor::from_vec(&[3, 3], w).unwrap(),
            Tensor::zeros(&[3]),
        )
        .unwrap();
        let x = Tensor::from_vec(&[2, 3], vec![1.0, 2.0, 3.0, -4.0, 5.0, 6.5]).unwrap();
        assert_eq!(d.infer(&x).unwrap(), x);
    }

    #[test]
    fn batch_rows_match_single_rows() {
        let w = Tensor::from_vec(&[2, 3], vec![0.5, -1.0, 2.0, 0.25, 3.0, -0.5]).unwrap();
        let d =
            Dense::from_parts("d", w, Tensor::from_vec(&[2], vec![0.1, -0.2]).unwrap()).unwrap();
        let x = Tensor::from_vec(&[2, 3], vec![1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let both = d.infer(&x).unwrap();
        for b in 0..2 {
            let one = d
                .infer(&Tensor::from_vec(&[1, 3], x.data()[b * 3..b * 3 + 3].to_vec()).unwrap())
                .unwrap();
            assert_eq!(one.data(), &both.data()[b * 2..b * 2 + 2]);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let d = Dense::<f64>::from_parts("d", Tensor::zeros(&[2, 3]), Tensor::zeros(&[2])).unwrap();
        assert!(d.infer(&Tensor::zeros(&[1, 4])).is_err());
        assert!(
            Dense::<f64>::from_parts("d", Tensor::zeros(&[2, 3]), Tensor::zeros(&[3])).is_err()
        );
    }
}
