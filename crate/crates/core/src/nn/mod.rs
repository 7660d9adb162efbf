//! Reverse-mode kernel for the fixed baseline graph.
//!
//! Every layer has an explicit `forward` that caches what its `backward`
//! needs, plus an `infer` path taking `&self` for pure evaluation. Tensors
//! are row-major; sequence batches are laid out `[batch, channels, time]`
//! with a [`FrameMask`] marking real (non-padding) frames.

mod activation;
mod adam;
mod batchnorm;
mod conv;
mod dense;
mod loss;
mod pool;
mod real;
mod tensor;

pub use activation::{Dropout, Relu};
pub use adam::{Adam, AdamConfig};
pub use batchnorm::BatchNorm1d;
pub use conv::Conv1d;
pub use dense::Dense;
pub use loss::{softmax, softmax_cross_entropy};
pub use pool::MaskedAvgPool;
pub use real::{gemm, Real};
pub use tensor::{FrameMask, Mode, Param, Tensor};
