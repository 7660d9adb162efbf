//! Transcribed per-language F1 columns and printed aggregate rows of the
//! shared-task results table.

use slid_core::dataset::N_LANGUAGES;
use slid_core::stats::{parse_f1_table, F1Table};

pub const SYSTEMS: [&str; 4] = ["anlirika", "baseline", "lipsia", "ntr"];

pub fn test_f1() -> F1Table {
    parse_f1_table(include_str!("../fixtures/published_test_f1.tsv")).expect("fixture parses")
}

pub fn valid_f1() -> F1Table {
    parse_f1_table(include_str!("../fixtures/published_valid_f1.tsv")).expect("fixture parses")
}

pub fn split_f1(split: &str) -> F1Table {
    match split {
        "test" => test_f1(),
        "valid" => valid_f1(),
        other => panic!("unknown split {other}"),
    }
}

pub fn column(table: &F1Table, system: &str) -> [f64; N_LANGUAGES] {
    table
        .iter()
        .find(|(n, _)| n == system)
        .expect("known system")
        .1
}

/// `(row, system, split, value)`; rows are family names, `macro_f1`,
/// `micro_f1` and `accuracy` (as a fraction).
pub fn printed() -> Vec<(String, String, String, f64)> {
    include_str!("../fixtures/published_printed.tsv")
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (
                f[0].into(),
                f[1].into(),
                f[2].into(),
                f[3].parse().expect("number"),
            )
        })
        .collect()
}

pub fn printed_value(row: &str, system: &str, split: &str) -> Option<f64> {
    printed()
        .into_iter()
        .find(|(r, s, p, _)| r == row && s == system && p == split)
        .map(|t| t.3)
}
