use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::{language_registry, N_LANGUAGES};
use crate::error::{Error, Result};
use crate::fsutil;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub id: String,
    /// Free-form label; anything that is not a registry code is out of set.
    pub label: String,
    /// Class probabilities in registry order.
    pub probabilities: Option<[f64; N_LANGUAGES]>,
}

/// System output for one split, in file order. Ids are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionSet {
    entries: Vec<Prediction>,
}

impl PredictionSet {
    pub fn new(entries: Vec<Prediction>) -> Result<Self> {
        let mut seen = HashSet::new();
        let dups: Vec<&str> = entries
            .iter()
            .filter(|e| !seen.insert(e.id.as_str()))
            .map(|e| e.id.as_str())
            .collect();
        if !dups.is_empty() {
            return Err(Error::Data(format!(
                "duplicate prediction ids: {}",
                offenders(&dups)
            )));
        }
        let with_probs = entries.iter().filter(|e| e.probabilities.is_some()).count();
        if with_probs != 0 && with_probs != entries.len() {
            return Err(Error::Data(
                "probabilities must be given for all predictions or none".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Prediction] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_probabilities(&self) -> bool {
        self.entries
            .first()
            .is_some_and(|e| e.probabilities.is_some())
    }

    pub fn get(&self, id: &str) -> Option<&Prediction> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// At most ten items, then a count of the rest.
pub(crate) fn offenders(items: &[&str]) -> String {
    let mut s = items
        .iter()
        .take(10)
        .copied()
        .collect::<Vec<_>>()
        .join(", ");
    if items.len() > 10 {
        let _ = write!(s, " (and {} more)", items.len() - 10);
    }
    s
}

fn header(with_probs: bool) -> String {
    let mut h = String::from("id\tprediction");
    if with_probs {
        for l in language_registry() {
            h.push('\t');
            h.push_str(l.iso639_3);
        }
    }
    h
}

pub fn parse_predictions(text: &str) -> Result<PredictionSet> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::Data("empty predictions file".into()))?;
    let with_probs = if head == header(false) {
        false
    } else if head == header(true) {
        true
    } else {
        return Err(Error::Data(format!(
            "predictions header must be `id<TAB>prediction` optionally followed by the 16 codes, got {head:?}"
        )));
    };
    let want = if with_probs { 2 + N_LANGUAGES } else { 2 };
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != want {
            return Err(Error::Data(format!(
                "line {lineno}: expected {want} columns, got {}",
                cols.len()
            )));
        }
        let probabilities = if with_probs {
            let mut p = [0.0; N_LANGUAGES];
            for (slot, raw) in p.iter_mut().zip(&cols[2..]) {
                *slot = raw
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && (0.0..=1.0).contains(v))
                    .ok_or_else(|| {
                        Error::Data(format!("line {lineno}: bad probability {raw:?}"))
                    })?;
            }
            Some(p)
        } else {
            None
        };
        entries.push(Prediction {
            id: cols[0].to_string(),
            label: cols[1].to_string(),
            probabilities,
        });
    }
    PredictionSet::new(entries)
}

pub fn render_predictions(set: &PredictionSet) -> String {
    let mut out = header(set.has_probabilities());
    out.push('\n');
    for e in set.entries() {
        out.push_str(&e.id);
        out.push('\t');
        out.push_str(&e.label);
        if let Some(p) = &e.probabilities {
            for v in p {
                let _ = write!(out, "\t{v:.6}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn load_predictions(path: &Path) -> Result<PredictionSet> {
    parse_predictions(&fsutil::read_to_string(path)?).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn save_predictions(path: &Path, set: &PredictionSet) -> Result<()> {
    fsutil::write_atomic(path, render_predictions(set).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_probabilities() {
        let mut p = [0.0; N_LANGUAGES];
        p[3] = 0.75;
        p[0] = 0.25;
        let set = PredictionSet::new(vec![
            Prediction {
                id: "u1".into(),
                label: "sun".into(),
                probabilities: Some(p),
            },
            Prediction {
                id: "u2".into(),
                label: "kab".into(),
                probabilities: Some([1.0 / 16.0; 16]),
            },
        ])
        .unwrap();
        let text = render_predictions(&set);
        assert!(text.starts_with("id\tprediction\tkab\tiba"));
        let back = parse_predictions(&text).unwrap();
        assert_eq!(back.entries()[0], set.entries()[0]);
        assert_eq!(render_predictions(&back), text);
    }

    #[test]
    fn out_of_set_labels_are_kept() {
        let set = parse_predictions("id\tprediction\na\tdeu\nb\teng\n").unwrap();
        assert_eq!(set.get("a").unwrap().label, "deu");
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_predictions("id\tlabel\n").is_err());
        assert!(parse_predictions("id\tprediction\na\n").is_err());
        let err = parse_predictions("id\tprediction\na\teng\na\ttha\n").unwrap_err();
        assert!(err.to_string().contains("duplicate prediction ids: a"));
    }

    #[test]
    fn offender_list_is_capped() {
        let ids: Vec<String> = (0..13).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let s = offenders(&refs);
        assert!(s.ends_with("x9 (and 3 more)"));
    }
}
