use super::network::Baseline;
use crate::dataset::N_LANGUAGES;
use crate::dsp::MfccSequence;
use crate::error::{Error, Result};
use crate::nn::{softmax, FrameMask, Real, Tensor};

/// One labelled utterance.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub id: String,
    /// Registry index of the gold language.
    pub language: usize,
    pub features: MfccSequence,
}

/// Stacks sequences into `[batch, k, max_frames]` with zero padding on the
/// right and the matching frame mask.
pub fn collate<R: Real>(seqs: &[&MfccSequence]) -> Result<(Tensor<R>, FrameMask)> {
    let first = seqs
        .first()
        .ok_or_else(|| Error::Usage("cannot collate an empty batch".into()))?;
    let k = first.k_coeffs();
    if let Some(bad) = seqs.iter().find(|s| s.k_coeffs() != k) {
        return Err(Error::Data(format!(
            "mixed coefficient counts in one batch: {k} and {}",
            bad.k_coeffs()
        )));
    }
    let lengths: Vec<usize> = seqs.iter().map(|s| s.t_frames()).collect();
    let frames = *lengths.iter().max().expect("non-empty");
    let mut data = vec![R::zero(); seqs.len() * k * frames];
    for (b, s) in seqs.iter().enumerate() {
        for t in 0..s.t_frames() {
            for (c, &v) in s.frame(t).iter().enumerate() {
                data[(b * k + c) * frames + t] = R::from_f64_lossy(v);
            }
        }
    }
    Ok((
        Tensor::from_vec(&[seqs.len(), k, frames], data)?,
        FrameMask::from_lengths(&lengths, frames),
    ))
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Eval-mode class and probabilities for each sequence, in input order.
pub fn predict<R: Real>(
    model: &Baseline<R>,
    seqs: &[&MfccSequence],
    batch_size: usize,
) -> Result<Vec<(usize, [f64; N_LANGUAGES])>> {
    let mut out = Vec::with_capacity(seqs.len());
    for chunk in seqs.chunks(batch_size.max(1)) {
        let (x, mask) = collate::<R>(chunk)?;
        let logits = model.infer(&x, &mask)?;
        if !logits.is_finite() {
            return Err(Error::Numeric("non-finite logits during prediction".into()));
        }
        for row in logits.data().chunks_exact(N_LANGUAGES) {
            let wide: Vec<f64> = row.iter().map(|v| v.to_f64_lossy()).collect();
            let p = softmax(&wide);
            out.push((argmax(&wide), p.try_into().expect("16 classes")));
        }
    }
    Ok(out)
}
