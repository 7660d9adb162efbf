use std::collections::{HashMap, HashSet};

use super::predictions::{offenders, PredictionSet};
use crate::dataset::{language_index, N_LANGUAGES};
use crate::error::{Error, Result};

/// Column index of predictions outside the registry.
pub const OUT_OF_SET: usize = N_LANGUAGES;
pub const N_COLUMNS: usize = N_LANGUAGES + 1;

/// Rows are gold languages, columns predicted languages plus `OUT_OF_SET`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[u64; N_COLUMNS]; N_LANGUAGES],
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// `pred` entries equal to [`OUT_OF_SET`] mark out-of-set predictions.
    pub fn from_indices(gold: &[usize], pred: &[usize]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::Usage(format!(
                "{} gold labels vs {} predictions",
                gold.len(),
                pred.len()
            )));
        }
        let mut cm = Self::new();
        for (&g, &p) in gold.iter().zip(pred) {
            if g >= N_LANGUAGES || p >= N_COLUMNS {
                return Err(Error::Usage(format!(
                    "label index out of range: gold {g}, predicted {p}"
                )));
            }
            cm.counts[g][p] += 1;
        }
        Ok(cm)
    }

    pub fn add(&mut self, gold: usize, pred: usize) {
        self.counts[gold][pred] += 1;
    }

    pub fn get(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold][pred]
    }

    pub fn rows(&self) -> &[[u64; N_COLUMNS]; N_LANGUAGES] {
        &self.counts
    }

    pub fn row_sum(&self, gold: usize) -> u64 {
        self.counts[gold].iter().sum()
    }

    pub fn col_sum(&self, pred: usize) -> u64 {
        self.counts.iter().map(|r| r[pred]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..N_LANGUAGES).map(|i| self.counts[i][i]).sum()
    }

    pub fn out_of_set(&self) -> u64 {
        self.col_sum(OUT_OF_SET)
    }
}

/// Cross-tabulates gold `(id, language index)` pairs against predictions.
/// The id sets must match exactly.
pub fn confusion(gold: &[(&str, usize)], pred: &PredictionSet) -> Result<ConfusionMatrix> {
    let mut gold_ids = HashSet::new();
    let dup_gold: Vec<&str> = gold
        .iter()
        .map(|g| g.0)
        .filter(|id| !gold_ids.insert(*id))
        .collect();
    if !dup_gold.is_empty() {
        return Err(Error::Data(format!(
            "duplicate gold ids: {}",
            offenders(&dup_gold)
        )));
    }
    let by_id: HashMap<&str, &str> = pred
        .entries()
        .iter()
        .map(|e| (e.id.as_str(), e.label.as_str()))
        .collect();
    let missing: Vec<&str> = gold
        .iter()
        .map(|g| g.0)
        .filter(|id| !by_id.contains_key(id))
        .collect();
    let extra: Vec<&str> = pred
        .entries()
        .iter()
        .map(|e| e.id.as_str())
        .filter(|id| !gold_ids.contains(id))
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        let mut parts = Vec::new();
        if !missing.is_empty() {
            parts.push(format!(
                "{} gold ids without a prediction: {}",
                missing.len(),
                offenders(&missing)
            ));
        }
        if !extra.is_empty() {
            parts.push(format!(
                "{} predictions for unknown ids: {}",
                extra.len(),
                offenders(&extra)
            ));
        }
        return Err(Error::Data(parts.join("; ")));
    }
    let mut cm = ConfusionMatrix::new();
    for &(id, g) in gold {
        if g >= N_LANGUAGES {
            return Err(Error::Usage(format!(
                "gold language index {g} out of range"
            )));
        }
        cm.add(g, language_index(by_id[id]).unwrap_or(OUT_OF_SET));
    }
    Ok(cm)
}
