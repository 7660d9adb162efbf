use super::real::Real;
use super::tensor::Tensor;
use crate::error::{Error, Result};

/// Max-shifted softmax of one logit row.
pub fn softmax<R: Real>(logits: &[R]) -> Vec<R> {
    let max = logits.iter().copied().fold(R::neg_infinity(), R::max);
    let exps: Vec<R> = logits.iter().map(|&v| (v - max).exp()).collect();
    let z: R = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / z).collect()
}

/// Mean cross-entropy over a `[batch, classes]` logit matrix and its
/// gradient `(softmax - onehot) / batch`.
pub fn softmax_cross_entropy<R: Real>(
    logits: &Tensor<R>,
    gold: &[usize],
) -> Result<(R, Tensor<R>)> {
    logits.expect_rank(2, "logits")?;
    let (batch, classes) = (logits.shape()[0], logits.shape()[1]);
    if gold.len() != batch {
        return Err(Error::Usage(format!(
            "{} labels for a batch of {batch}",
            gold.len()
        )));
    }
    if let Some(&g) = gold.iter().find(|&&g| g >= classes) {
        return Err(Error::Usage(format!(
            "gold label {g} outside {classes} classes"
        )));
    }
    if !logits.is_finite() {
        return Err(Error::Numeric("non-finite logits".into()));
    }
    let br = R::from_usize(batch).expect("batch fits");
    let mut grad = Tensor::zeros(logits.shape());
    let mut loss = R::zero();
    for (b, &g) in gold.iter().enumerate() {
        let row = &logits.data()[b * classes..(b + 1) * classes];
        let max = row.iter().copied().fold(R::neg_infinity(), R::max);
        let log_z = row.iter().map(|&v| (v - max).exp()).sum::<R>().ln() + max;
        loss += log_z - row[g];
        let out = &mut grad.data_mut()[b * classes..(b + 1) * classes];
        for (o, &v) in out.iter_mut().zip(row) {
            *o = (v - log_z).exp() / br;
        }
        out[g] -= R::one() / br;
    }
    Ok((loss / br, grad))
}
