//! Task dataset: language registry, manifests, selection and splitting.

mod audit;
mod manifest;
mod registry;
mod split;

pub use audit::{audit_manifest, AuditExpectations, Violation, ViolationCode};
pub use manifest::{
    load_manifest, parse_manifest, render_manifest, save_manifest, Gender, Manifest, SampleRecord,
    Split, MANIFEST_HEADER,
};
pub use registry::{
    families, language_index, language_registry, lookup, LanguageInfo, Macroarea, N_LANGUAGES,
};
pub use split::{
    select_training, split_eval, SplitOutcome, DEFAULT_EVAL_PER_LANGUAGE,
    DEFAULT_TRAIN_PER_LANGUAGE,
};
