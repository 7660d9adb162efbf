//! System comparison: paired permutation tests and Pearson linear fits.

mod fit;
mod permutation;
mod special;
mod table;

pub use fit::{correlate_all, pearson_fit, scatter_points, t_distribution_sf, FitResult};
pub use permutation::{
    paired_permutation_test, PairedOutcomes, PermutationMode, PermutationResult, Statistic,
    AUTO_EXHAUSTIVE_PATTERNS, MAX_EXHAUSTIVE,
};
pub use special::{incomplete_beta, ln_gamma};
pub use table::{load_f1_table, parse_f1_table, render_f1_table, F1Table};
