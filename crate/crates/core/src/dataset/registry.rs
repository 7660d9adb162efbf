//! The sixteen task languages with their typological metadata.
//!
//! Order matters: it is the label order of the classifier, the row order of
//! confusion matrices and the grouping order of reports.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Macroarea {
    Africa,
    Eurasia,
    Papunesia,
}

impl Macroarea {
    pub fn name(self) -> &'static str {
        match self {
            Macroarea::Africa => "Africa",
            Macroarea::Eurasia => "Eurasia",
            Macroarea::Papunesia => "Papunesia",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LanguageInfo {
    pub iso639_3: &'static str,
    pub wilderness_id: &'static str,
    pub name: &'static str,
    pub family: &'static str,
    pub genus: &'static str,
    pub macroarea: Macroarea,
    pub eval_source: &'static str,
}

pub const N_LANGUAGES: usize = 16;

const fn lang(
    iso639_3: &'static str,
    wilderness_id: &'static str,
    name: &'static str,
    family: &'static str,
    genus: &'static str,
    macroarea: Macroarea,
    eval_source: &'static str,
) -> LanguageInfo {
    LanguageInfo {
        iso639_3,
        wilderness_id,
        name,
        family,
        genus,
        macroarea,
        eval_source,
    }
}

use Macroarea::*;

// cnh keeps the benchmark grouping (Niger-Congo / Gur).
static REGISTRY: [LanguageInfo; N_LANGUAGES] = [
    lang(
        "kab",
        "KABCEB",
        "Kabyle",
        "Afro-Asiatic",
        "Berber",
        Africa,
        "CV",
    ),
    lang(
        "iba",
        "IBATIV",
        "Iban",
        "Austronesian",
        "Malayo-Sumbawan",
        Papunesia,
        "SLR24",
    ),
    lang(
        "ind",
        "INZTSI",
        "Indonesian",
        "Austronesian",
        "Malayo-Sumbawan",
        Papunesia,
        "CV",
    ),
    lang(
        "sun",
        "SUNIBS",
        "Sundanese",
        "Austronesian",
        "Malayo-Sumbawan",
        Papunesia,
        "SLR36",
    ),
    lang(
        "jav",
        "JAVNRF",
        "Javanese",
        "Austronesian",
        "Javanese",
        Papunesia,
        "SLR35",
    ),
    lang(
        "eus", "EUSEAB", "Euskara", "Basque", "Basque", Eurasia, "CV",
    ),
    lang(
        "tam",
        "TCVWTC",
        "Tamil",
        "Dravidian",
        "Southern Dravidian",
        Eurasia,
        "SLR65",
    ),
    lang(
        "kan",
        "ERVWTC",
        "Kannada",
        "Dravidian",
        "Southern Dravidian",
        Eurasia,
        "SLR79",
    ),
    lang(
        "tel",
        "TCWWTC",
        "Telugu",
        "Dravidian",
        "South-Central Dravidian",
        Eurasia,
        "SLR66",
    ),
    lang(
        "hin",
        "HNDSKV",
        "Hindi",
        "Indo-European",
        "Indic",
        Eurasia,
        "SS",
    ),
    lang(
        "por",
        "PORARA",
        "Portuguese",
        "Indo-European",
        "Romance",
        Eurasia,
        "CV",
    ),
    lang(
        "rus",
        "RUSS76",
        "Russian",
        "Indo-European",
        "Slavic",
        Eurasia,
        "CV",
    ),
    lang(
        "eng",
        "EN1NIV",
        "English",
        "Indo-European",
        "Germanic",
        Eurasia,
        "CV",
    ),
    lang(
        "mar",
        "MARWTC",
        "Marathi",
        "Indo-European",
        "Indic",
        Eurasia,
        "SLR64",
    ),
    lang(
        "cnh",
        "CNHBSM",
        "Chin, Hakha",
        "Niger-Congo",
        "Gur",
        Africa,
        "CV",
    ),
    lang(
        "tha",
        "THATSV",
        "Thai",
        "Tai-Kadai",
        "Kam-Tai",
        Eurasia,
        "CV",
    ),
];

pub fn language_registry() -> &'static [LanguageInfo; N_LANGUAGES] {
    &REGISTRY
}

pub fn language_index(iso: &str) -> Option<usize> {
    REGISTRY.iter().position(|l| l.iso639_3 == iso)
}

pub fn lookup(iso: &str) -> Option<&'static LanguageInfo> {
    REGISTRY.iter().find(|l| l.iso639_3 == iso)
}

/// Families in first-appearance order, each with its member language indices.
pub fn families() -> Vec<(&'static str, Vec<usize>)> {
    let mut out: Vec<(&'static str, Vec<usize>)> = Vec::new();
    for (i, l) in REGISTRY.iter().enumerate() {
        match out.iter_mut().find(|(f, _)| *f == l.family) {
            Some((_, members)) => members.push(i),
            None => out.push((l.family, vec![i])),
        }
    }
    out
}
