//! Scoring of prediction files against gold labels.
//!
//! Predictions outside the 16-language registry are kept: they land in an
//! extra `OUT_OF_SET` confusion column, count as a miss for the gold
//! language and as a false positive for no language.

mod confusion;
mod metrics;
mod predictions;
mod report;

pub use confusion::{confusion, ConfusionMatrix, N_COLUMNS, OUT_OF_SET};
pub use metrics::{
    aggregate, family_macro_f1, macro_average, macro_f1_of_labels, normalize_confusion,
    per_language_prf, MetricsReport, Prf,
};
pub use predictions::{
    load_predictions, parse_predictions, render_predictions, save_predictions, Prediction,
    PredictionSet,
};
pub use report::{render_confusion_csv, render_metrics_json, render_normalized_csv, render_report};
