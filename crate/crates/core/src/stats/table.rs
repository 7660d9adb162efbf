//! Per-language F1 tables: one column per system, one row per language.
//!
//! ```text
//! iso    sysA   sysB
//! kab    0.329  0.181
//! ...
//! ```
//!
//! The header starts with `iso`; all 16 registry languages must appear
//! exactly once, in any order.

use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::{language_index, language_registry, N_LANGUAGES};
use crate::error::{Error, Result};
use crate::fsutil;

pub type F1Table = Vec<(String, [f64; N_LANGUAGES])>;

pub fn parse_f1_table(text: &str) -> Result<F1Table> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Data("empty F1 table".into()))?;
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    if cols.first() != Some(&"iso") || cols.len() < 2 {
        return Err(Error::Data(
            "F1 table header must be `iso` followed by system names".into(),
        ));
    }
    let names = &cols[1..];
    let mut values = vec![[f64::NAN; N_LANGUAGES]; names.len()];
    let mut seen = [false; N_LANGUAGES];
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Data(format!(
                "F1 table row {}: {} fields, expected {}",
                n + 2,
                fields.len(),
                cols.len()
            )));
        }
        let lang = language_index(fields[0]).ok_or_else(|| {
            Error::Data(format!(
                "F1 table row {}: unknown language {:?}",
                n + 2,
                fields[0]
            ))
        })?;
        if std::mem::replace(&mut seen[lang], true) {
            return Err(Error::Data(format!("F1 table: {} listed twice", fields[0])));
        }
        for (s, f) in fields[1..].iter().enumerate() {
            let v: f64 = f
                .parse()
                .ok()
                .filter(|v: &f64| (0.0..=1.0).contains(v))
                .ok_or_else(|| {
                    Error::Data(format!("F1 table row {}: bad F1 value {f:?}", n + 2))
                })?;
            values[s][lang] = v;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Data(format!(
            "F1 table is missing language {}",
            language_registry()[missing].iso639_3
        )));
    }
    Ok(names.iter().map(|s| s.to_string()).zip(values).collect())
}

/// Registry order, values at 6 decimals.
pub fn render_f1_table(table: &[(String, [f64; N_LANGUAGES])]) -> String {
    let mut out = String::from("iso");
    for (name, _) in table {
        let _ = write!(out, "\t{name}");
    }
    out.push('\n');
    for (i, l) in language_registry().iter().enumerate() {
        out.push_str(l.iso639_3);
        for (_, v) in table {
            let _ = write!(out, "\t{:.6}", v[i]);
        }
        out.push('\n');
    }
    out
}

pub fn load_f1_table(path: &Path) -> Result<F1Table> {
    parse_f1_table(&fsutil::read_to_string(path)?).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}
