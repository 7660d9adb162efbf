use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use slid_core::dataset::{load_manifest, save_manifest, Manifest, SampleRecord};
use slid_core::dsp::{extract_mfcc, read_wav, trim_or_reject, write_features, GateDecision};
use slid_core::settings::Settings;
use slid_core::{Error, Result};

use super::{create_dir, manifest_relative, parent_dir, sanitize};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// Input manifest; record paths are audio files relative to `--audio-root`.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub audio_root: PathBuf,
    /// Directory receiving one `<id>.mfc` file per kept record.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Rewritten manifest; defaults to `<out-dir>/manifest.tsv`.
    #[arg(long)]
    pub out_manifest: Option<PathBuf>,
}

enum Outcome {
    Kept { record: SampleRecord, trimmed: bool },
    Rejected { id: String, duration_s: f64 },
}

fn audio_path(root: &Path, record: &SampleRecord) -> PathBuf {
    let p = Path::new(&record.path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        root.join(p)
    }
}

fn process(
    settings: &Settings,
    a: &FeaturizeArgs,
    manifest_dir: &Path,
    record: &SampleRecord,
) -> Result<Outcome> {
    let src = audio_path(&a.audio_root, record);
    let audio = read_wav(&src)?;
    let expect = settings.audit_expectations();
    let decision = trim_or_reject(
        audio.duration_s(),
        expect.min_duration_s,
        expect.max_duration_s,
    )
    .map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", src.display())),
        other => other,
    })?;
    let (audio, trimmed) = match decision {
        GateDecision::Reject => {
            return Ok(Outcome::Rejected {
                id: record.id.clone(),
                duration_s: audio.duration_s(),
            })
        }
        GateDecision::Accept => (audio, false),
        GateDecision::TrimToMax { keep_s } => (audio.truncated(keep_s), true),
    };
    let features = extract_mfcc(&audio, &settings.mfcc).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", src.display())),
        Error::Numeric(m) => Error::Numeric(format!("{}: {m}", src.display())),
        other => other,
    })?;
    let out = a.out_dir.join(format!("{}.mfc", sanitize(&record.id)));
    write_features(&out, &features)?;
    Ok(Outcome::Kept {
        record: SampleRecord {
            path: manifest_relative(manifest_dir, &out),
            duration_s: audio.duration_s(),
            ..record.clone()
        },
        trimmed,
    })
}

pub fn run(g: &GlobalOpts, settings: &Settings, a: &FeaturizeArgs) -> Result<()> {
    let manifest = load_manifest(&a.manifest)?;
    let mut by_name: HashMap<String, &str> = HashMap::new();
    for r in manifest.records() {
        if let Some(prev) = by_name.insert(sanitize(&r.id), &r.id) {
            return Err(Error::Data(format!(
                "records {prev:?} and {:?} map to the same feature file name",
                r.id
            )));
        }
    }
    create_dir(&a.out_dir)?;
    let out_manifest = a
        .out_manifest
        .clone()
        .unwrap_or_else(|| a.out_dir.join("manifest.tsv"));
    let manifest_dir = parent_dir(&out_manifest).to_path_buf();
    create_dir(&manifest_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.jobs as usize)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start {} worker threads: {e}", g.jobs)))?;
    // Results come back in manifest order regardless of scheduling.
    let outcomes: Vec<Result<Outcome>> = pool.install(|| {
        manifest
            .records()
            .par_iter()
            .map(|r| process(settings, a, &manifest_dir, r))
            .collect()
    });
    let (mut kept, mut trimmed, mut rejected) = (Vec::new(), 0usize, Vec::new());
    for o in outcomes {
        match o? {
            Outcome::Kept { record, trimmed: t } => {
                trimmed += t as usize;
                kept.push(record);
            }
            Outcome::Rejected { id, duration_s } => rejected.push((id, duration_s)),
        }
    }
    for (id, d) in &rejected {
        g.say(format!(
            "rejected {id}: {d:.3} s is below the minimum duration"
        ));
    }
    let n_kept = kept.len();
    save_manifest(&out_manifest, &Manifest::new(kept)?)?;
    g.say(format!(
        "featurized {} records: {n_kept} written ({trimmed} trimmed), {} rejected; manifest {}",
        manifest.len(),
        rejected.len(),
        out_manifest.display()
    ));
    Ok(())
}
