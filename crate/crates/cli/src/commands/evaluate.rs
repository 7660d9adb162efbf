use std::path::PathBuf;

use clap::Args;
use slid_core::dataset::{load_manifest, Split};
use slid_core::eval::{
    aggregate, confusion, load_predictions, per_language_prf, render_confusion_csv,
    render_metrics_json, render_normalized_csv, render_report,
};
use slid_core::settings::Settings;
use slid_core::{fsutil, Result};

use super::create_dir;
use crate::data::{parse_split, split_records};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Gold manifest.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: Split,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Receives metrics.json, confusion.csv, confusion_normalized.csv and report.txt.
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(g: &GlobalOpts, _settings: &Settings, a: &EvaluateArgs) -> Result<()> {
    let manifest = load_manifest(&a.manifest)?;
    let gold: Vec<(&str, usize)> = split_records(&manifest, a.split)
        .into_iter()
        .map(|r| (r.id.as_str(), r.language))
        .collect();
    let preds = load_predictions(&a.predictions)?;
    let cm = confusion(&gold, &preds)?;
    let report = aggregate(&per_language_prf(&cm), &cm);
    let text = render_report(&report, &cm);
    create_dir(&a.out_dir)?;
    fsutil::write_atomic(
        &a.out_dir.join("metrics.json"),
        render_metrics_json(&report).as_bytes(),
    )?;
    fsutil::write_atomic(
        &a.out_dir.join("confusion.csv"),
        render_confusion_csv(&cm).as_bytes(),
    )?;
    fsutil::write_atomic(
        &a.out_dir.join("confusion_normalized.csv"),
        render_normalized_csv(&cm).as_bytes(),
    )?;
    fsutil::write_atomic(&a.out_dir.join("report.txt"), text.as_bytes())?;
    if !g.quiet {
        print!("{text}");
    }
    // Always printed, always last.
    println!("MACRO_F1={:.3}", report.macro_avg.f1);
    Ok(())
}
