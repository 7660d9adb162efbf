use std::path::{Path, PathBuf};

use clap::Args;
use slid_core::dataset::{
    audit_manifest, load_manifest, save_manifest, select_training, split_eval, Manifest, Split,
};
use slid_core::settings::Settings;
use slid_core::{fsutil, Error, Result};

use super::{create_dir, manifest_relative, parent_dir};
use crate::data::resolve;
use crate::GlobalOpts;

/// Rewrites relative record paths so they resolve from `to`'s directory.
fn rebase(manifest: Manifest, from: &Path, to: &Path) -> Result<Manifest> {
    let out_dir = parent_dir(to);
    create_dir(out_dir)?;
    let records = manifest
        .into_records()
        .into_iter()
        .map(|mut r| {
            if Path::new(&r.path).is_relative() {
                r.path = manifest_relative(out_dir, &resolve(from, &r.path));
            }
            r
        })
        .collect();
    Manifest::new(records)
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output manifest with train/valid/test assignments.
    #[arg(long)]
    pub out: PathBuf,
    /// Audit report; defaults to `<out>.audit.txt`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Report text: one line per violation, then `#`-prefixed warnings.
fn render_report(violations: &[String], warnings: &[String]) -> String {
    let mut out = String::new();
    for v in violations {
        out.push_str(v);
        out.push('\n');
    }
    for w in warnings {
        out.push_str("# ");
        out.push_str(w);
        out.push('\n');
    }
    out
}

pub fn run(g: &GlobalOpts, settings: &Settings, a: &PrepareArgs) -> Result<()> {
    let report_path = a.report.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".audit.txt");
        PathBuf::from(p)
    });
    let manifest = load_manifest(&a.manifest)?;
    let fail = |lines: Vec<String>, warnings: &[String]| -> Result<()> {
        fsutil::write_atomic(&report_path, render_report(&lines, warnings).as_bytes())?;
        for l in &lines {
            g.say(l);
        }
        Err(Error::Data(format!(
            "{} audit violation(s); report written to {}",
            lines.len(),
            report_path.display()
        )))
    };
    let outcome = match split_eval(&manifest, settings.eval_per_language, settings.seed) {
        Ok(o) => o,
        Err(Error::Data(m)) => return fail(m.lines().map(str::to_string).collect(), &[]),
        Err(e) => return Err(e),
    };
    let prepared = match select_training(
        &outcome.manifest,
        settings.train_per_language,
        settings.seed,
    ) {
        Ok(m) => m,
        Err(Error::Data(m)) => {
            let lines = m
                .lines()
                .filter(|l| !l.starts_with("insufficient"))
                .map(str::to_string)
                .collect();
            return fail(lines, &outcome.warnings);
        }
        Err(e) => return Err(e),
    };
    let violations: Vec<String> = audit_manifest(&prepared, &settings.audit_expectations())
        .iter()
        .map(|v| v.to_string())
        .collect();
    if !violations.is_empty() {
        return fail(violations, &outcome.warnings);
    }
    save_manifest(&a.out, &rebase(prepared.clone(), &a.manifest, &a.out)?)?;
    fsutil::write_atomic(
        &report_path,
        render_report(&[], &outcome.warnings).as_bytes(),
    )?;
    for w in &outcome.warnings {
        g.say(format!("warning: {w}"));
    }
    let count = |s| prepared.split(s).count();
    g.say(format!(
        "prepared {}: {} train, {} valid, {} test; audit clean",
        a.out.display(),
        count(Split::Train),
        count(Split::Valid),
        count(Split::Test)
    ));
    Ok(())
}
