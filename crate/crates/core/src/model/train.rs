use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::batch::{argmax, collate, predict, Example};
use super::config::BaselineConfig;
use super::network::Baseline;
use crate::dataset::N_LANGUAGES;
use crate::error::{Error, Result};
use crate::eval::macro_f1_of_labels;
use crate::nn::{softmax_cross_entropy, Adam, FrameMask, Mode, Real, Tensor};

const SHUFFLE_STREAM: u64 = 1;
const DROPOUT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean batch loss over the epoch.
    pub train_loss: f64,
    /// Macro-F1 of the train-mode predictions made while training.
    pub train_macro_f1: f64,
    pub valid_macro_f1: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// First epoch with the highest validation macro-F1.
    pub best_epoch: usize,
}

impl TrainHistory {
    pub fn best(&self) -> Option<&EpochRecord> {
        self.epochs.get(self.best_epoch)
    }

    /// TSV with a header row and six-decimal reals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("epoch\ttrain_loss\ttrain_macro_f1\tvalid_macro_f1\tseconds\n");
        for e in &self.epochs {
            let _ = writeln!(
                out,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                e.epoch, e.train_loss, e.train_macro_f1, e.valid_macro_f1, e.seconds
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<R> {
    pub best: Baseline<R>,
    pub last: Baseline<R>,
    pub history: TrainHistory,
}

/// One optimizer step on a batch; returns the batch loss and the train-mode
/// logits.
pub fn train_step<R: Real>(
    model: &mut Baseline<R>,
    adam: &mut Adam<R>,
    x: &Tensor<R>,
    mask: &FrameMask,
    gold: &[usize],
    rng: &mut impl Rng,
) -> Result<(f64, Tensor<R>)> {
    let logits = model.forward(x, mask, Mode::Train, rng)?;
    let (loss, grad) = softmax_cross_entropy(&logits, gold)?;
    let loss = loss.to_f64_lossy();
    if !loss.is_finite() {
        return Err(Error::Numeric("non-finite loss".into()));
    }
    model.backward(&grad)?;
    adam.step(&mut model.params_mut())?;
    Ok((loss, logits))
}

fn check_split(name: &str, data: &[Example], k: usize) -> Result<()> {
    if data.is_empty() {
        return Err(Error::Data(format!("{name} split is empty")));
    }
    if let Some(e) = data
        .iter()
        .find(|e| e.features.k_coeffs() != k || e.language >= N_LANGUAGES)
    {
        return Err(Error::Data(format!(
            "{name} example {} has {} coefficients and label {}; the model expects {k} coefficients",
            e.id,
            e.features.k_coeffs(),
            e.language
        )));
    }
    Ok(())
}

/// Validation macro-F1 of eval-mode predictions.
pub fn score<R: Real>(model: &Baseline<R>, data: &[Example], batch_size: usize) -> Result<f64> {
    let seqs: Vec<_> = data.iter().map(|e| &e.features).collect();
    let pred: Vec<usize> = predict(model, &seqs, batch_size)?
        .into_iter()
        .map(|p| p.0)
        .collect();
    let gold: Vec<usize> = data.iter().map(|e| e.language).collect();
    macro_f1_of_labels(&gold, &pred)
}

/// Trains a freshly initialized baseline and keeps the best epoch by
/// validation macro-F1. `on_epoch` sees each record as it completes.
pub fn train<R: Real>(
    config: &BaselineConfig,
    train_set: &[Example],
    valid_set: &[Example],
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainOutcome<R>> {
    config.validate()?;
    check_split("train", train_set, config.n_coeffs)?;
    check_split("valid", valid_set, config.n_coeffs)?;
    let mut model = Baseline::<R>::new(config)?;
    let mut adam = Adam::new(config.adam, &model.params());
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(SHUFFLE_STREAM);
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(config.seed);
    dropout_rng.set_stream(DROPOUT_STREAM);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = TrainHistory::default();
    let mut best: Option<Baseline<R>> = None;
    for epoch in 0..config.epochs {
        let started = Instant::now();
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        let mut gold = Vec::with_capacity(order.len());
        let mut pred = Vec::with_capacity(order.len());
        let batches = order.chunks(config.batch_size);
        let n_batches = batches.len();
        for (b, idx) in batches.enumerate() {
            let seqs: Vec<_> = idx.iter().map(|&i| &train_set[i].features).collect();
            let labels: Vec<usize> = idx.iter().map(|&i| train_set[i].language).collect();
            let (x, mask) = collate::<R>(&seqs)?;
            let (loss, logits) =
                train_step(&mut model, &mut adam, &x, &mask, &labels, &mut dropout_rng).map_err(
                    |e| match e {
                        Error::Numeric(m) => {
                            Error::Numeric(format!("epoch {epoch} batch {b}: {m}"))
                        }
                        other => other,
                    },
                )?;
            loss_sum += loss;
            for row in logits.data().chunks_exact(N_LANGUAGES) {
                let wide: Vec<f64> = row.iter().map(|v| v.to_f64_lossy()).collect();
                pred.push(argmax(&wide));
            }
            gold.extend(labels);
        }
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / n_batches as f64,
            train_macro_f1: macro_f1_of_labels(&gold, &pred)?,
            valid_macro_f1: score(&model, valid_set, config.batch_size)?,
            seconds: started.elapsed().as_secs_f64(),
        };
        on_epoch(&record);
        let improved = history
            .best()
            .is_none_or(|b| record.valid_macro_f1 > b.valid_macro_f1);
        if improved {
            history.best_epoch = epoch;
            best = Some(model.clone());
        }
        history.epochs.push(record);
    }
    Ok(TrainOutcome {
        best: best.expect("at least one epoch"),
        last: model,
        history,
    })
}

/// Index of the best validation score; ties go to the smaller dropout.
pub fn select_dropout(results: &[(f64, f64)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &(p, f1)) in results.iter().enumerate() {
        let better = match best {
            None => true,
            Some(j) => {
                let (bp, bf) = results[j];
                f1 > bf || (f1 == bf && p < bp)
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}
