use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use slid_core::dataset::{language_index, language_registry, load_manifest, Split, N_LANGUAGES};
use slid_core::eval::{confusion, load_predictions, per_language_prf, PredictionSet, OUT_OF_SET};
use slid_core::settings::Settings;
use slid_core::stats::{
    load_f1_table, paired_permutation_test, pearson_fit, render_f1_table, scatter_points,
    PairedOutcomes, PermutationMode, Statistic,
};
use slid_core::{fsutil, Error, Result};

use super::{create_dir, sanitize};
use crate::data::{parse_split, split_records};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Gold manifest for the significance tests.
    #[arg(long, requires_all = ["predictions_a", "predictions_b"])]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value = "test", value_parser = parse_split)]
    pub split: Split,
    #[arg(long, requires = "manifest")]
    pub predictions_a: Option<PathBuf>,
    #[arg(long, requires = "manifest")]
    pub predictions_b: Option<PathBuf>,
    #[arg(long, default_value = "a")]
    pub name_a: String,
    #[arg(long, default_value = "b")]
    pub name_b: String,
    /// Per-language F1 table (`iso` column plus one column per system);
    /// repeatable. Two or more systems in total enable the correlation outputs.
    #[arg(long = "f1-table")]
    pub f1_tables: Vec<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn label_index(label: &str) -> usize {
    language_index(label).unwrap_or(OUT_OF_SET)
}

fn per_language_f1(gold: &[(&str, usize)], preds: &PredictionSet) -> Result<[f64; N_LANGUAGES]> {
    let cm = confusion(gold, preds)?;
    Ok(per_language_prf(&cm).map(|p| p.f1))
}

fn significance(
    g: &GlobalOpts,
    settings: &Settings,
    a: &CompareArgs,
    manifest: &Path,
    pa: &Path,
    pb: &Path,
) -> Result<()> {
    let manifest = load_manifest(manifest)?;
    let gold: Vec<(&str, usize)> = split_records(&manifest, a.split)
        .into_iter()
        .map(|r| (r.id.as_str(), r.language))
        .collect();
    let (set_a, set_b) = (load_predictions(pa)?, load_predictions(pb)?);
    // Both calls reject missing and unknown ids.
    let f1_a = per_language_f1(&gold, &set_a).map_err(|e| name_err(e, &a.name_a))?;
    let f1_b = per_language_f1(&gold, &set_b).map_err(|e| name_err(e, &a.name_b))?;
    let lookup = |set: &PredictionSet| -> Vec<usize> {
        gold.iter()
            .map(|(id, _)| label_index(&set.get(id).expect("ids checked").label))
            .collect()
    };
    let outcomes = PairedOutcomes::new(
        gold.iter().map(|g| g.1).collect(),
        lookup(&set_a),
        lookup(&set_b),
    )?;
    let mode = PermutationMode::Auto(settings.resamples);
    let mut tests = vec![(Statistic::Accuracy, "ALL")];
    tests.extend(
        language_registry()
            .iter()
            .enumerate()
            .map(|(i, l)| (Statistic::LanguageF1(i), l.iso639_3)),
    );
    let mut out = String::from(
        "test_name\tlanguage\tstatistic\tobserved_diff\tp_value\tresamples\texhaustive\tseed\n",
    );
    for (stat, lang) in tests {
        let r = paired_permutation_test(&outcomes, stat, mode, settings.seed)?;
        let name = match stat {
            Statistic::Accuracy => "accuracy",
            Statistic::LanguageF1(_) => "f1",
        };
        let _ = writeln!(
            out,
            "paired_permutation\t{lang}\t{name}\t{:.6}\t{:.6}\t{}\t{}\t{}",
            r.observed, r.p_value, r.resamples, r.exhaustive, settings.seed
        );
        if lang == "ALL" {
            g.say(format!(
                "accuracy difference {:.6}, p = {:.6} ({} {})",
                r.observed,
                r.p_value,
                r.resamples,
                if r.exhaustive {
                    "patterns"
                } else {
                    "resamples"
                }
            ));
        }
    }
    fsutil::write_atomic(&a.out_dir.join("significance.tsv"), out.as_bytes())?;
    let table = vec![(a.name_a.clone(), f1_a), (a.name_b.clone(), f1_b)];
    fsutil::write_atomic(
        &a.out_dir.join("f1_table.tsv"),
        render_f1_table(&table).as_bytes(),
    )?;
    Ok(())
}

fn name_err(e: Error, system: &str) -> Error {
    match e {
        Error::Data(m) => Error::Data(format!("system {system}: {m}")),
        other => other,
    }
}

fn fmt_or_na(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map(f).unwrap_or_else(|| "NA".into())
}

fn correlations(g: &GlobalOpts, a: &CompareArgs) -> Result<()> {
    let mut systems = Vec::new();
    let mut seen = HashSet::new();
    for path in &a.f1_tables {
        for (name, values) in load_f1_table(path)? {
            if !seen.insert(name.clone()) {
                return Err(Error::Data(format!(
                    "system {name:?} appears in more than one F1 table"
                )));
            }
            systems.push((name, values));
        }
    }
    if systems.len() < 2 {
        return Err(Error::Usage(format!(
            "correlation needs at least 2 systems across the F1 tables, got {}",
            systems.len()
        )));
    }
    let n = systems.len();
    let mut fits = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            fits[i][j] = match pearson_fit(&systems[i].1, &systems[j].1) {
                Ok(f) => Some(f),
                Err(Error::Degenerate(m)) => {
                    if i < j {
                        g.say(format!(
                            "warning: no fit for {} vs {}: {m}",
                            systems[i].0, systems[j].0
                        ));
                    }
                    None
                }
                Err(e) => return Err(e),
            };
        }
    }
    let header: String = std::iter::once("system")
        .chain(systems.iter().map(|s| s.0.as_str()))
        .collect::<Vec<_>>()
        .join("\t");
    let matrix = |cell: &dyn Fn(&slid_core::stats::FitResult) -> String| {
        let mut out = format!("{header}\n");
        for (i, (name, _)) in systems.iter().enumerate() {
            out.push_str(name);
            for fit in &fits[i] {
                out.push('\t');
                out.push_str(&fit.as_ref().map(cell).unwrap_or_else(|| "NA".into()));
            }
            out.push('\n');
        }
        out
    };
    fsutil::write_atomic(
        &a.out_dir.join("r_squared.tsv"),
        matrix(&|f| format!("{:.6}", f.r_squared)).as_bytes(),
    )?;
    fsutil::write_atomic(
        &a.out_dir.join("p_value.tsv"),
        matrix(&|f| format!("{:.6e}", f.p_value)).as_bytes(),
    )?;
    let mut pairs = String::from("system_x\tsystem_y\tslope\tintercept\tr_squared\tp_value\tn\n");
    for i in 0..n {
        for j in i + 1..n {
            let f = fits[i][j];
            let _ = writeln!(
                pairs,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                systems[i].0,
                systems[j].0,
                fmt_or_na(f.map(|f| f.slope), |v| format!("{v:.6}")),
                fmt_or_na(f.map(|f| f.intercept), |v| format!("{v:.6}")),
                fmt_or_na(f.map(|f| f.r_squared), |v| format!("{v:.6}")),
                fmt_or_na(f.map(|f| f.p_value), |v| format!("{v:.6e}")),
                N_LANGUAGES
            );
            let mut csv = String::from("language,f1_system_a,f1_system_b\n");
            for (iso, x, y) in scatter_points(&systems[i].1, &systems[j].1) {
                let _ = writeln!(csv, "{iso},{x:.6},{y:.6}");
            }
            let file = format!(
                "scatter_{}__{}.csv",
                sanitize(&systems[i].0),
                sanitize(&systems[j].0)
            );
            fsutil::write_atomic(&a.out_dir.join(file), csv.as_bytes())?;
            if let Some(f) = f {
                g.say(format!(
                    "{} vs {}: R^2 = {:.2}, p = {:.3e}",
                    systems[i].0, systems[j].0, f.r_squared, f.p_value
                ));
            }
        }
    }
    fsutil::write_atomic(&a.out_dir.join("pairwise_fits.tsv"), pairs.as_bytes())?;
    Ok(())
}

pub fn run(g: &GlobalOpts, settings: &Settings, a: &CompareArgs) -> Result<()> {
    let sig = match (&a.manifest, &a.predictions_a, &a.predictions_b) {
        (Some(m), Some(pa), Some(pb)) => Some((m, pa, pb)),
        (None, None, None) => None,
        _ => {
            return Err(Error::Usage(
                "significance tests need --manifest, --predictions-a and --predictions-b".into(),
            ))
        }
    };
    if sig.is_none() && a.f1_tables.is_empty() {
        return Err(Error::Usage(
            "nothing to compare: give prediction files and/or --f1-table".into(),
        ));
    }
    if a.name_a == a.name_b && sig.is_some() {
        return Err(Error::Usage("--name-a and --name-b must differ".into()));
    }
    create_dir(&a.out_dir)?;
    if let Some((m, pa, pb)) = sig {
        significance(g, settings, a, m, pa, pb)?;
    }
    if !a.f1_tables.is_empty() {
        correlations(g, a)?;
    }
    Ok(())
}
