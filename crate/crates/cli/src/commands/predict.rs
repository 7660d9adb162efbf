use std::path::PathBuf;

use clap::Args;
use slid_core::dataset::{language_registry, load_manifest, Split};
use slid_core::eval::{save_predictions, Prediction, PredictionSet};
use slid_core::model::{load_checkpoint, predict};
use slid_core::settings::Settings;
use slid_core::{Error, Result};

use crate::data::{load_examples, parse_split};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: Split,
    /// Predictions TSV (`id`, `prediction`).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the 16 class probabilities per record.
    #[arg(long)]
    pub probabilities: bool,
}

pub fn run(g: &GlobalOpts, _settings: &Settings, a: &PredictArgs) -> Result<()> {
    let (model, ckpt) = load_checkpoint::<f32>(&a.checkpoint)?;
    let manifest = load_manifest(&a.manifest)?;
    let examples = load_examples(&a.manifest, &manifest, a.split)?;
    if let Some(bad) = examples
        .iter()
        .find(|e| e.features.k_coeffs() != ckpt.mfcc.n_coeffs)
    {
        return Err(Error::Data(format!(
            "record {}: {} coefficients, the checkpoint expects {}",
            bad.id,
            bad.features.k_coeffs(),
            ckpt.mfcc.n_coeffs
        )));
    }
    let seqs: Vec<_> = examples.iter().map(|e| &e.features).collect();
    let out = predict(&model, &seqs, ckpt.model.batch_size)?;
    let entries = examples
        .iter()
        .zip(out)
        .map(|(e, (class, p))| Prediction {
            id: e.id.clone(),
            label: language_registry()[class].iso639_3.to_string(),
            probabilities: a.probabilities.then_some(p),
        })
        .collect();
    save_predictions(&a.out, &PredictionSet::new(entries)?)?;
    g.say(format!(
        "wrote {} {} predictions to {}",
        examples.len(),
        a.split.token(),
        a.out.display()
    ));
    Ok(())
}
