//! Tab-separated manifests, one row per utterance.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::registry::{language_index, language_registry};
use crate::error::{Error, Result};
use crate::fsutil;

pub const MANIFEST_HEADER: &str =
    "id\tpath\tlanguage\tspeaker_id\tgender\tduration_s\tsource\tsplit";
const N_COLUMNS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Male,
    Female,
    Unknown,
}

impl Gender {
    pub fn token(self) -> &'static str {
        match self {
            Gender::Male => "m",
            Gender::Female => "f",
            Gender::Unknown => "u",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "m" => Some(Gender::Male),
            "f" => Some(Gender::Female),
            "u" => Some(Gender::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Valid,
    Test,
    Unassigned,
}

impl Split {
    pub fn token(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
            Split::Unassigned => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "valid" => Some(Split::Valid),
            "test" => Some(Split::Test),
            "-" => Some(Split::Unassigned),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub id: String,
    /// Audio or feature file, relative paths resolve against a caller root.
    pub path: String,
    /// Index into [`language_registry`].
    pub language: usize,
    pub speaker_id: Option<String>,
    pub gender: Gender,
    pub duration_s: f64,
    pub source: String,
    pub split: Split,
}

impl SampleRecord {
    pub fn iso(&self) -> &'static str {
        language_registry()[self.language].iso639_3
    }
}

/// Ordered list of records with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    records: Vec<SampleRecord>,
}

impl Manifest {
    pub fn new(records: Vec<SampleRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut problems = Vec::new();
        for r in &records {
            if !seen.insert(r.id.as_str()) {
                problems.push(format!("duplicate id '{}'", r.id));
            }
            if r.language >= language_registry().len() {
                problems.push(format!(
                    "record '{}': language index {} out of range",
                    r.id, r.language
                ));
            }
            if !(r.duration_s > 0.0) || !r.duration_s.is_finite() {
                problems.push(format!(
                    "record '{}': non-positive duration {}",
                    r.id, r.duration_s
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Data(problems.join("\n")));
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<SampleRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &SampleRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }
}

/// Parses manifest text, collecting every row problem into one report.
pub fn parse_manifest(text: &str) -> Result<Manifest> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == MANIFEST_HEADER => {}
        Some(h) => {
            return Err(Error::Data(format!(
                "line 1: manifest header must be '{}', got '{}'",
                MANIFEST_HEADER.replace('\t', "\\t"),
                h.replace('\t', "\\t")
            )))
        }
        None => return Err(Error::Data("empty manifest (no header row)".into())),
    }
    let mut records = Vec::new();
    let mut problems = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != N_COLUMNS {
            problems.push(format!(
                "line {row}: expected {N_COLUMNS} columns, found {}",
                cols.len()
            ));
            continue;
        }
        let mut bad = false;
        let mut flag = |m: String| {
            problems.push(format!("line {row}: {m}"));
            bad = true;
        };
        let id = cols[0];
        if id.is_empty() {
            flag("empty id".into());
        } else if !seen.insert(id.to_string()) {
            flag(format!("duplicate id '{id}'"));
        }
        let language = language_index(cols[2]);
        if language.is_none() {
            flag(format!("unknown language '{}'", cols[2]));
        }
        let gender = Gender::parse(cols[4]);
        if gender.is_none() {
            flag(format!(
                "bad gender token '{}' (expected m, f or u)",
                cols[4]
            ));
        }
        let duration = cols[5]
            .parse::<f64>()
            .ok()
            .filter(|d| *d > 0.0 && d.is_finite());
        if duration.is_none() {
            flag(format!("bad duration '{}'", cols[5]));
        }
        let split = Split::parse(cols[7]);
        if split.is_none() {
            flag(format!(
                "bad split token '{}' (expected train, valid, test or -)",
                cols[7]
            ));
        }
        if bad {
            continue;
        }
        records.push(SampleRecord {
            id: id.to_string(),
            path: cols[1].to_string(),
            language: language.unwrap(),
            speaker_id: (cols[3] != "-").then(|| cols[3].to_string()),
            gender: gender.unwrap(),
            duration_s: duration.unwrap(),
            source: cols[6].to_string(),
            split: split.unwrap(),
        });
    }
    if !problems.is_empty() {
        return Err(Error::Data(format!(
            "invalid manifest:\n{}",
            problems.join("\n")
        )));
    }
    Manifest::new(records)
}

pub fn render_manifest(manifest: &Manifest) -> Result<String> {
    let mut out = String::with_capacity(64 * (manifest.len() + 1));
    out.push_str(MANIFEST_HEADER);
    out.push('\n');
    for r in manifest.records() {
        let speaker = r.speaker_id.as_deref().unwrap_or("-");
        for (name, field) in [
            ("id", &r.id[..]),
            ("path", &r.path),
            ("speaker_id", speaker),
            ("source", &r.source),
        ] {
            if field.contains(['\t', '\n', '\r']) {
                return Err(Error::Data(format!(
                    "record '{}': {name} contains a tab or newline",
                    r.id
                )));
            }
        }
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.path,
            r.iso(),
            speaker,
            r.gender.token(),
            r.duration_s,
            r.source,
            r.split.token()
        );
    }
    Ok(out)
}

pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = fsutil::read_to_string(path)?;
    parse_manifest(&text).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn save_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    fsutil::write_atomic(path, render_manifest(manifest)?.as_bytes())
}
