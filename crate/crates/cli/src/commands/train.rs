use std::path::PathBuf;

use clap::Args;
use slid_core::dataset::{load_manifest, Split};
use slid_core::model::{train_run, tune_dropout, EpochRecord};
use slid_core::settings::Settings;
use slid_core::Result;

use crate::data::load_examples;
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Prepared manifest whose record paths are feature files.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub run_dir: PathBuf,
    /// Tune conv dropout over these values (or `train.dropout_grid` when
    /// given without values), one run subdirectory each.
    #[arg(long, num_args = 0.., value_delimiter = ',', value_name = "P,P,...")]
    pub dropout_grid: Option<Vec<f64>>,
}

fn progress(r: &EpochRecord) -> String {
    format!(
        "epoch {} loss {:.4} train_macro_f1 {:.4} valid_macro_f1 {:.4}",
        r.epoch, r.train_loss, r.train_macro_f1, r.valid_macro_f1
    )
}

pub fn run(g: &GlobalOpts, settings: &Settings, a: &TrainArgs) -> Result<()> {
    let manifest = load_manifest(&a.manifest)?;
    let train_set = load_examples(&a.manifest, &manifest, Split::Train)?;
    let valid_set = load_examples(&a.manifest, &manifest, Split::Valid)?;
    g.say(format!(
        "training on {} records, validating on {}",
        train_set.len(),
        valid_set.len()
    ));
    match &a.dropout_grid {
        None => {
            let outcome = train_run(&a.run_dir, settings, &train_set, &valid_set, &mut |r| {
                g.say(progress(r))
            })?;
            let best = outcome.history.best().expect("at least one epoch");
            g.say(format!(
                "best epoch {} valid_macro_f1 {:.4}; run written to {}",
                outcome.history.best_epoch,
                best.valid_macro_f1,
                a.run_dir.display()
            ));
        }
        Some(grid) => {
            let mut s = settings.clone();
            if !grid.is_empty() {
                s.dropout_grid = grid.clone();
            }
            let s = s.resolve()?;
            let (trials, chosen) =
                tune_dropout(&a.run_dir, &s, &train_set, &valid_set, &mut |p, r| {
                    g.say(format!("dropout {p:.2} {}", progress(r)))
                })?;
            let t = &trials[chosen];
            g.say(format!(
                "selected dropout {:.2} (epoch {}, valid_macro_f1 {:.4}) in {}",
                t.dropout,
                t.best_epoch,
                t.best_valid_macro_f1,
                t.dir.display()
            ));
        }
    }
    Ok(())
}
