//! Manifest-driven loading of feature files.

use std::path::{Path, PathBuf};

use slid_core::dataset::{Manifest, SampleRecord, Split};
use slid_core::dsp::read_features;
use slid_core::model::Example;
use slid_core::{Error, Result};

/// Relative record paths resolve against the manifest's directory.
pub fn resolve(manifest_path: &Path, record_path: &str) -> PathBuf {
    let p = Path::new(record_path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

pub fn split_records(manifest: &Manifest, split: Split) -> Vec<&SampleRecord> {
    manifest.split(split).collect()
}

pub fn load_examples(
    manifest_path: &Path,
    manifest: &Manifest,
    split: Split,
) -> Result<Vec<Example>> {
    split_records(manifest, split)
        .into_iter()
        .map(|r| {
            let path = resolve(manifest_path, &r.path);
            let features = read_features(&path).map_err(|e| match e {
                Error::Io { source, .. } => Error::Data(format!(
                    "record {}: cannot read feature file {}: {source}",
                    r.id,
                    path.display()
                )),
                Error::Data(m) => Error::Data(format!("record {}: {m}", r.id)),
                other => other,
            })?;
            Ok(Example {
                id: r.id.clone(),
                language: r.language,
                features,
            })
        })
        .collect()
}

pub fn parse_split(s: &str) -> std::result::Result<Split, String> {
    match Split::parse(s) {
        Some(Split::Unassigned) | None => Err(format!("expected train, valid or test, got {s:?}")),
        Some(split) => Ok(split),
    }
}
