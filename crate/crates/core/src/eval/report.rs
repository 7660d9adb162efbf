use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use super::confusion::{ConfusionMatrix, N_COLUMNS};
use super::metrics::{normalize_confusion, MetricsReport, Prf};
use crate::dataset::{families, language_registry, N_LANGUAGES};

fn cell(v: f64) -> String {
    format!("{v:.3}")
}

/// Text table grouped by family; languages without gold samples show `n/a`.
pub fn render_report(report: &MetricsReport, cm: &ConfusionMatrix) -> String {
    let reg = language_registry();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:>9} {:>9} {:>9} {:>7}",
        "language", "precision", "recall", "f1", "gold"
    );
    let family_f1: std::collections::HashMap<_, _> = report.per_family.iter().copied().collect();
    for (family, members) in families() {
        let _ = writeln!(
            out,
            "{:<24} {:>9} {:>9} {:>9}",
            format!("[{family}]"),
            "",
            "",
            cell(family_f1[family])
        );
        for i in members {
            let Prf {
                precision,
                recall,
                f1,
            } = report.per_language[i];
            let n = cm.row_sum(i);
            let (p, r, f) = if n == 0 {
                ("n/a".to_string(), "n/a".to_string(), "n/a".to_string())
            } else {
                (cell(precision), cell(recall), cell(f1))
            };
            let _ = writeln!(out, "  {:<22} {p:>9} {r:>9} {f:>9} {n:>7}", reg[i].iso639_3);
        }
    }
    let m = report.macro_avg;
    let u = report.micro;
    let _ = writeln!(
        out,
        "{:<24} {:>9} {:>9} {:>9}",
        "macro",
        cell(m.precision),
        cell(m.recall),
        cell(m.f1)
    );
    let _ = writeln!(
        out,
        "{:<24} {:>9} {:>9} {:>9}",
        "micro",
        cell(u.precision),
        cell(u.recall),
        cell(u.f1)
    );
    let _ = writeln!(out, "{:<24} {:>29}", "accuracy", cell(report.accuracy));
    let _ = writeln!(out, "{:<24} {:>29}", "samples", report.n_samples);
    let _ = writeln!(out, "{:<24} {:>29}", "out of set", report.n_out_of_set);
    let empty: Vec<&str> = (0..N_LANGUAGES)
        .filter(|&i| report.support[i] == 0)
        .map(|i| reg[i].iso639_3)
        .collect();
    if !empty.is_empty() {
        let _ = writeln!(
            out,
            "warning: no gold samples for {}; counted as F1 = 0 in macro averages",
            empty.join(", ")
        );
    }
    out
}

fn prf_json(p: &Prf) -> Value {
    json!({ "precision": p.precision, "recall": p.recall, "f1": p.f1 })
}

/// Machine-readable metrics; keys in registry order.
pub fn render_metrics_json(report: &MetricsReport) -> String {
    let mut per_language = Map::new();
    for (l, p) in language_registry().iter().zip(&report.per_language) {
        per_language.insert(l.iso639_3.to_string(), prf_json(p));
    }
    let mut per_family = Map::new();
    for (f, v) in &report.per_family {
        per_family.insert(f.to_string(), json!(v));
    }
    let doc = json!({
        "per_language": per_language,
        "macro": prf_json(&report.macro_avg),
        "micro": prf_json(&report.micro),
        "accuracy": report.accuracy,
        "per_family": per_family,
        "n_samples": report.n_samples,
        "n_out_of_set": report.n_out_of_set,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("plain values serialize");
    s.push('\n');
    s
}

fn csv_header() -> String {
    let mut h = String::from("gold");
    for l in language_registry() {
        h.push(',');
        h.push_str(l.iso639_3);
    }
    h.push_str(",OUT_OF_SET\n");
    h
}

pub fn render_confusion_csv(cm: &ConfusionMatrix) -> String {
    let mut out = csv_header();
    for (l, row) in language_registry().iter().zip(cm.rows()) {
        out.push_str(l.iso639_3);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Gold-normalized rates at six decimals.
pub fn render_normalized_csv(cm: &ConfusionMatrix) -> String {
    let mut out = csv_header();
    for (l, row) in language_registry().iter().zip(normalize_confusion(cm)) {
        out.push_str(l.iso639_3);
        for v in row.iter().take(N_COLUMNS) {
            let _ = write!(out, ",{v:.6}");
        }
        out.push('\n');
    }
    out
}
