//! Compliance audit of a finalized manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::manifest::{Gender, Manifest, Split};
use super::registry::{language_registry, N_LANGUAGES};
use super::split::{DEFAULT_EVAL_PER_LANGUAGE, DEFAULT_TRAIN_PER_LANGUAGE};
use crate::dsp::{DEFAULT_MAX_DURATION_S, DEFAULT_MIN_DURATION_S};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationCode {
    Dur,
    Cnt,
    Spk,
    Gen,
    Lang,
}

impl ViolationCode {
    pub fn prefix(self) -> &'static str {
        match self {
            ViolationCode::Dur => "DUR",
            ViolationCode::Cnt => "CNT",
            ViolationCode::Spk => "SPK",
            ViolationCode::Gen => "GEN",
            ViolationCode::Lang => "LANG",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code.prefix(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditExpectations {
    pub train_per_language: usize,
    pub eval_per_language: usize,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
}

impl Default for AuditExpectations {
    fn default() -> Self {
        Self {
            train_per_language: DEFAULT_TRAIN_PER_LANGUAGE,
            eval_per_language: DEFAULT_EVAL_PER_LANGUAGE,
            min_duration_s: DEFAULT_MIN_DURATION_S,
            max_duration_s: DEFAULT_MAX_DURATION_S,
        }
    }
}

/// Lists every violated constraint; an empty list means the manifest is
/// compliant. Records left unassigned are only checked for language
/// coverage.
pub fn audit_manifest(manifest: &Manifest, expect: &AuditExpectations) -> Vec<Violation> {
    let reg = language_registry();
    let mut out = Vec::new();
    let mut push = |code, message: String| out.push(Violation { code, message });

    let mut present = [false; N_LANGUAGES];
    let mut counts = [[0usize; 3]; N_LANGUAGES];
    for r in manifest.records() {
        present[r.language] = true;
        let slot = match r.split {
            Split::Train => 0,
            Split::Valid => 1,
            Split::Test => 2,
            Split::Unassigned => continue,
        };
        counts[r.language][slot] += 1;
        if !(expect.min_duration_s..=expect.max_duration_s).contains(&r.duration_s) {
            push(
                ViolationCode::Dur,
                format!(
                    "{} ({}, {}): duration {} s outside [{}, {}]",
                    r.id,
                    r.iso(),
                    r.split.token(),
                    r.duration_s,
                    expect.min_duration_s,
                    expect.max_duration_s
                ),
            );
        }
    }

    for (l, info) in reg.iter().enumerate() {
        if !present[l] {
            push(
                ViolationCode::Lang,
                format!("{}: no records in manifest", info.iso639_3),
            );
        }
        for (slot, (split, want)) in [
            (Split::Train, expect.train_per_language),
            (Split::Valid, expect.eval_per_language),
            (Split::Test, expect.eval_per_language),
        ]
        .into_iter()
        .enumerate()
        {
            let have = counts[l][slot];
            if have != want {
                push(
                    ViolationCode::Cnt,
                    format!(
                        "{} {}: {have} records, expected {want}",
                        info.iso639_3,
                        split.token()
                    ),
                );
            }
        }
    }

    // speaker -> splits it occurs in, among valid/test
    let mut speaker_splits: BTreeMap<&str, BTreeSet<Split>> = BTreeMap::new();
    for r in manifest.records() {
        if let (Some(s), Split::Valid | Split::Test) = (&r.speaker_id, r.split) {
            speaker_splits.entry(s).or_default().insert(r.split);
        }
    }
    for (spk, splits) in &speaker_splits {
        if splits.len() > 1 {
            push(
                ViolationCode::Spk,
                format!("speaker '{spk}' appears in both valid and test"),
            );
        }
    }

    // Gender: a split is flagged when its own speakers have enough
    // eligible records of the minority gender to close more of the gap.
    for (l, info) in reg.iter().enumerate() {
        for split in [Split::Valid, Split::Test] {
            let members: Vec<_> = manifest
                .records()
                .iter()
                .filter(|r| r.language == l && r.split == split)
                .collect();
            if members.is_empty() {
                continue;
            }
            let speakers: BTreeSet<&str> = members
                .iter()
                .filter_map(|r| r.speaker_id.as_deref())
                .collect();
            let mut avail = [0usize; 2];
            for r in manifest.records() {
                let eligible = r.language == l
                    && matches!(r.split, Split::Unassigned)
                    && r.speaker_id
                        .as_deref()
                        .is_some_and(|s| speakers.contains(s))
                    && (expect.min_duration_s..=expect.max_duration_s).contains(&r.duration_s);
                if eligible {
                    match r.gender {
                        Gender::Male => avail[0] += 1,
                        Gender::Female => avail[1] += 1,
                        Gender::Unknown => {}
                    }
                }
            }
            let m = members.iter().filter(|r| r.gender == Gender::Male).count();
            let f = members
                .iter()
                .filter(|r| r.gender == Gender::Female)
                .count();
            let gap = m.abs_diff(f);
            // swapping one majority record for one unused minority record closes the gap by 2
            let (minority_spare, fixable) = if m > f {
                (avail[1], gap / 2)
            } else {
                (avail[0], gap / 2)
            };
            if fixable > 0 && minority_spare > 0 {
                push(
                    ViolationCode::Gen,
                    format!(
                        "{} {}: {m} male / {f} female while {minority_spare} unused minority-gender record(s) of the same speakers remain",
                        info.iso639_3,
                        split.token()
                    ),
                );
            }
        }
    }
    out
}
