use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::batch::Example;
use super::checkpoint::save_checkpoint;
use super::train::{select_dropout, train, EpochRecord, TrainOutcome};
use crate::error::{Error, Result};
use crate::fsutil;
use crate::settings::Settings;

/// File names inside a run directory.
pub struct RunFiles;

impl RunFiles {
    pub const CONFIG: &'static str = "config.txt";
    pub const HISTORY: &'static str = "history.tsv";
    pub const BEST: &'static str = "best.ckpt";
    pub const LAST: &'static str = "last.ckpt";
    pub const SELECTION: &'static str = "selection.tsv";
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Trains in 32-bit and writes the resolved settings, the history and both
/// checkpoints into `dir`.
pub fn train_run(
    dir: &Path,
    settings: &Settings,
    train_set: &[Example],
    valid_set: &[Example],
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainOutcome<f32>> {
    create_dir(dir)?;
    fsutil::write_atomic(&dir.join(RunFiles::CONFIG), settings.to_text().as_bytes())?;
    let outcome = train::<f32>(&settings.model, train_set, valid_set, on_epoch)?;
    fsutil::write_atomic(
        &dir.join(RunFiles::HISTORY),
        outcome.history.to_tsv().as_bytes(),
    )?;
    save_checkpoint(&dir.join(RunFiles::BEST), &outcome.best, settings)?;
    save_checkpoint(&dir.join(RunFiles::LAST), &outcome.last, settings)?;
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropoutTrial {
    pub dropout: f64,
    pub dir: PathBuf,
    pub best_epoch: usize,
    pub best_valid_macro_f1: f64,
}

/// One run per conv-dropout value in `settings.dropout_grid`, each in its
/// own subdirectory, plus `selection.tsv`. Returns the trials and the index
/// of the selected one.
pub fn tune_dropout(
    dir: &Path,
    settings: &Settings,
    train_set: &[Example],
    valid_set: &[Example],
    on_epoch: &mut dyn FnMut(f64, &EpochRecord),
) -> Result<(Vec<DropoutTrial>, usize)> {
    if settings.dropout_grid.is_empty() {
        return Err(Error::Config("train.dropout_grid is empty".into()));
    }
    create_dir(dir)?;
    let mut trials = Vec::new();
    for &p in &settings.dropout_grid {
        let mut s = settings.clone();
        s.model.conv_dropout = p;
        let sub = dir.join(format!("dropout-{p:.2}"));
        let outcome = train_run(&sub, &s, train_set, valid_set, &mut |r| on_epoch(p, r))?;
        let best = outcome.history.best().expect("at least one epoch");
        trials.push(DropoutTrial {
            dropout: p,
            dir: sub,
            best_epoch: outcome.history.best_epoch,
            best_valid_macro_f1: best.valid_macro_f1,
        });
    }
    let scores: Vec<(f64, f64)> = trials
        .iter()
        .map(|t| (t.dropout, t.best_valid_macro_f1))
        .collect();
    let chosen = select_dropout(&scores).expect("non-empty grid");
    let mut tsv = String::from("dropout\tbest_epoch\tbest_valid_macro_f1\tselected\n");
    for (i, t) in trials.iter().enumerate() {
        let _ = writeln!(
            tsv,
            "{:.2}\t{}\t{:.6}\t{}",
            t.dropout,
            t.best_epoch,
            t.best_valid_macro_f1,
            if i == chosen { "yes" } else { "no" }
        );
    }
    fsutil::write_atomic(&dir.join(RunFiles::SELECTION), tsv.as_bytes())?;
    Ok((trials, chosen))
}
