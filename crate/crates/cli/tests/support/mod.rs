#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slid_core::dataset::{language_registry, MANIFEST_HEADER};
use slid_core::dsp::{extract_mfcc, write_features, MfccConfig};
use slid_core::synth::synth_audio;

/// Small network and dataset sizes that train in seconds.
pub const TOY: [&str; 8] = [
    "--set=model.conv_specs=8x3,16x5",
    "--set=model.classifier_dims=16,16",
    "--set=train.batch_size=16",
    "--set=train.epochs=2",
    "--set=train.lr=0.003",
    "--set=dataset.train_per_language=3",
    "--set=dataset.eval_per_language=2",
    "--set=stats.resamples=2000",
];

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slid-bench"))
        .args(args)
        .env_remove("SLID_BENCH_CONFIG")
        .output()
        .expect("binary runs")
}

pub fn run_toy(args: &[&str]) -> Output {
    let mut all: Vec<&str> = TOY.to_vec();
    all.extend_from_slice(args);
    run(&all)
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// Raw manifest over synthetic feature files in `dir/features`.
///
/// Per language: `n_train` records pre-marked `train` by one reader, and an
/// unassigned evaluation pool of `eval_speakers` speakers (alternating
/// m/f) with `per_speaker` records each.
pub fn feature_corpus(
    dir: &Path,
    n_train: usize,
    eval_speakers: usize,
    per_speaker: usize,
    seed: u64,
) -> PathBuf {
    let mfcc = MfccConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = format!("{MANIFEST_HEADER}\n");
    for (class, lang) in language_registry().iter().enumerate() {
        let iso = lang.iso639_3;
        let mut rows = Vec::new();
        for i in 0..n_train {
            rows.push((
                format!("{iso}-tr{i}"),
                format!("reader-{iso}"),
                "u",
                "train",
                "wilderness",
            ));
        }
        for s in 0..eval_speakers {
            let gender = if s % 2 == 0 { "m" } else { "f" };
            for k in 0..per_speaker {
                rows.push((
                    format!("{iso}-ev{s}-{k}"),
                    format!("{iso}-spk{s}"),
                    gender,
                    "-",
                    "cv",
                ));
            }
        }
        for (id, speaker, gender, split, source) in rows {
            let frames = 40 + (id.len() * 7 + class * 3) % 30;
            let audio = synth_audio(class, frames, 0.03, &mfcc, &mut rng).expect("synth");
            let rel = format!("features/{id}.mfc");
            write_features(&dir.join(&rel), &extract_mfcc(&audio, &mfcc).expect("mfcc"))
                .expect("write");
            let _ = writeln!(
                text,
                "{id}\t{rel}\t{iso}\t{speaker}\t{gender}\t5.0\t{source}\t{split}"
            );
        }
    }
    let path = dir.join("raw.tsv");
    std::fs::write(&path, text).expect("write manifest");
    path
}

/// Content of `path` with the `seconds` column of a history TSV blanked.
pub fn history_without_seconds(path: &Path) -> String {
    std::fs::read_to_string(path)
        .expect("history")
        .lines()
        .map(|l| {
            let mut cols: Vec<&str> = l.split('\t').collect();
            if let Some(last) = cols.last_mut() {
                if *last != "seconds" {
                    *last = "";
                }
            }
            cols.join("\t")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Every file below `root`, relative path and bytes, sorted by path.
pub fn tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).expect("read_dir") {
            let path = entry.expect("entry").path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).expect("below root").to_path_buf();
                let bytes = if rel.file_name().is_some_and(|n| n == "history.tsv") {
                    history_without_seconds(&path).into_bytes()
                } else {
                    std::fs::read(&path).expect("read")
                };
                out.push((rel, bytes));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}
