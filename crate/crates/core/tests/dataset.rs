mod support;

use slid_core::dataset::{
    language_registry, lookup, parse_manifest, render_manifest, Gender, Macroarea, Manifest,
    SampleRecord, Split, DEFAULT_EVAL_PER_LANGUAGE, DEFAULT_TRAIN_PER_LANGUAGE,
};
use support::manifests::{check_pipeline, random_manifest, run_cases};

#[test]
fn thousand_randomized_manifests() {
    let tally = run_cases(1000, 24, 6).unwrap();
    assert_eq!(
        tally.built + tally.eval_infeasible + tally.train_deficient,
        1000
    );
    assert!(tally.built > 100, "{tally:?}");
    assert!(
        tally.eval_infeasible > 0 && tally.train_deficient > 0,
        "{tally:?}"
    );
}

#[test]
fn default_scale_manifests() {
    let mut built = 0;
    for seed in 0..4 {
        let m = random_manifest(
            4242 + seed,
            DEFAULT_TRAIN_PER_LANGUAGE,
            DEFAULT_EVAL_PER_LANGUAGE,
        );
        built += check_pipeline(
            &m,
            DEFAULT_TRAIN_PER_LANGUAGE,
            DEFAULT_EVAL_PER_LANGUAGE,
            seed,
        )
        .unwrap()
        .built;
    }
    assert!(built > 0);
}

#[test]
fn registry_matches_transcription() {
    let table = [
        (
            "kab",
            "KABCEB",
            "Kabyle",
            "Afro-Asiatic",
            "Berber",
            Macroarea::Africa,
            "CV",
        ),
        (
            "iba",
            "IBATIV",
            "Iban",
            "Austronesian",
            "Malayo-Sumbawan",
            Macroarea::Papunesia,
            "SLR24",
        ),
        (
            "ind",
            "INZTSI",
            "Indonesian",
            "Austronesian",
            "Malayo-Sumbawan",
            Macroarea::Papunesia,
            "CV",
        ),
        (
            "sun",
            "SUNIBS",
            "Sundanese",
            "Austronesian",
            "Malayo-Sumbawan",
            Macroarea::Papunesia,
            "SLR36",
        ),
        (
            "jav",
            "JAVNRF",
            "Javanese",
            "Austronesian",
            "Javanese",
            Macroarea::Papunesia,
            "SLR35",
        ),
        (
            "eus",
            "EUSEAB",
            "Euskara",
            "Basque",
            "Basque",
            Macroarea::Eurasia,
            "CV",
        ),
        (
            "tam",
            "TCVWTC",
            "Tamil",
            "Dravidian",
            "Southern Dravidian",
            Macroarea::Eurasia,
            "SLR65",
        ),
        (
            "kan",
            "ERVWTC",
            "Kannada",
            "Dravidian",
            "Southern Dravidian",
            Macroarea::Eurasia,
            "SLR79",
        ),
        (
            "tel",
            "TCWWTC",
            "Telugu",
            "Dravidian",
            "South-Central Dravidian",
            Macroarea::Eurasia,
            "SLR66",
        ),
        (
            "hin",
            "HNDSKV",
            "Hindi",
            "Indo-European",
            "Indic",
            Macroarea::Eurasia,
            "SS",
        ),
        (
            "por",
            "PORARA",
            "Portuguese",
            "Indo-European",
            "Romance",
            Macroarea::Eurasia,
            "CV",
        ),
        (
            "rus",
            "RUSS76",
            "Russian",
            "Indo-European",
            "Slavic",
            Macroarea::Eurasia,
            "CV",
        ),
        (
            "eng",
            "EN1NIV",
            "English",
            "Indo-European",
            "Germanic",
            Macroarea::Eurasia,
            "CV",
        ),
        (
            "mar",
            "MARWTC",
            "Marathi",
            "Indo-European",
            "Indic",
            Macroarea::Eurasia,
            "SLR64",
        ),
        (
            "cnh",
            "CNHBSM",
            "Chin, Hakha",
            "Niger-Congo",
            "Gur",
            Macroarea::Africa,
            "CV",
        ),
        (
            "tha",
            "THATSV",
            "Thai",
            "Tai-Kadai",
            "Kam-Tai",
            Macroarea::Eurasia,
            "CV",
        ),
    ];
    let reg = language_registry();
    for (info, row) in reg.iter().zip(table) {
        let got = (
            info.iso639_3,
            info.wilderness_id,
            info.name,
            info.family,
            info.genus,
            info.macroarea,
            info.eval_source,
        );
        assert_eq!(got, row);
    }
    assert_eq!(lookup("jav").unwrap().eval_source, "SLR35");
}

#[test]
fn manifest_round_trip_on_random_manifests() {
    for seed in 0..20 {
        let m = random_manifest(seed, 10, 4);
        let text = render_manifest(&m).unwrap();
        let back = parse_manifest(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(render_manifest(&back).unwrap(), text);
    }
}

#[test]
fn manifest_rejects_duplicates() {
    let r = SampleRecord {
        id: "a".into(),
        path: "a.mfc".into(),
        language: 0,
        speaker_id: None,
        gender: Gender::Unknown,
        duration_s: 4.0,
        source: "x".into(),
        split: Split::Unassigned,
    };
    assert!(Manifest::new(vec![r.clone(), r]).is_err());
}
