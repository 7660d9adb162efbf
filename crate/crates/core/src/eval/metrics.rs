use super::confusion::{ConfusionMatrix, N_COLUMNS, OUT_OF_SET};
use crate::dataset::{families, N_LANGUAGES};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Prf {
    /// Zero denominators give zero.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            precision,
            recall,
            f1,
        }
    }
}

pub fn per_language_prf(cm: &ConfusionMatrix) -> [Prf; N_LANGUAGES] {
    std::array::from_fn(|i| {
        let tp = cm.get(i, i);
        Prf::from_counts(tp, cm.col_sum(i) - tp, cm.row_sum(i) - tp)
    })
}

/// Unweighted mean of each component.
pub fn macro_average(values: &[Prf]) -> Prf {
    if values.is_empty() {
        return Prf::default();
    }
    let n = values.len() as f64;
    Prf {
        precision: values.iter().map(|v| v.precision).sum::<f64>() / n,
        recall: values.iter().map(|v| v.recall).sum::<f64>() / n,
        f1: values.iter().map(|v| v.f1).sum::<f64>() / n,
    }
}

/// Unweighted mean F1 per family, families in registry order.
pub fn family_macro_f1(f1: &[f64; N_LANGUAGES]) -> Vec<(&'static str, f64)> {
    families()
        .into_iter()
        .map(|(name, members)| {
            let mean = members.iter().map(|&i| f1[i]).sum::<f64>() / members.len() as f64;
            (name, mean)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_language: [Prf; N_LANGUAGES],
    pub macro_avg: Prf,
    pub micro: Prf,
    pub accuracy: f64,
    pub per_family: Vec<(&'static str, f64)>,
    pub n_samples: u64,
    pub n_out_of_set: u64,
    /// Gold sample count per language.
    pub support: [u64; N_LANGUAGES],
}

/// Macro scores come from `prf`; micro scores, accuracy and counts from `cm`.
pub fn aggregate(prf: &[Prf; N_LANGUAGES], cm: &ConfusionMatrix) -> MetricsReport {
    let tp = cm.trace();
    let in_set_predictions: u64 = (0..N_LANGUAGES).map(|c| cm.col_sum(c)).sum();
    let total = cm.total();
    let f1s: [f64; N_LANGUAGES] = std::array::from_fn(|i| prf[i].f1);
    MetricsReport {
        per_language: *prf,
        macro_avg: macro_average(prf),
        micro: Prf::from_counts(tp, in_set_predictions - tp, total - tp),
        accuracy: ratio(tp, total),
        per_family: family_macro_f1(&f1s),
        n_samples: total,
        n_out_of_set: cm.out_of_set(),
        support: std::array::from_fn(|i| cm.row_sum(i)),
    }
}

/// Rows divided by their gold counts; empty rows stay zero.
pub fn normalize_confusion(cm: &ConfusionMatrix) -> Vec<[f64; N_COLUMNS]> {
    (0..N_LANGUAGES)
        .map(|g| {
            let n = cm.row_sum(g);
            std::array::from_fn(|p| ratio(cm.get(g, p), n))
        })
        .collect()
}

/// Macro-F1 of label indices; `pred` may use [`OUT_OF_SET`].
pub fn macro_f1_of_labels(gold: &[usize], pred: &[usize]) -> Result<f64> {
    let cm = ConfusionMatrix::from_indices(gold, pred)?;
    debug_assert!(OUT_OF_SET == N_LANGUAGES);
    Ok(macro_average(&per_language_prf(&cm)).f1)
}
