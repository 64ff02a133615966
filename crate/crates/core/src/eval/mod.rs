//! Cross-validation, ranking metrics, benchmark orchestration and planted
//! synthetic datasets.

mod benchmark;
mod metrics;
mod report;
mod split;
mod synthetic;

pub use benchmark::{
    embed_network, run_algorithm, run_benchmark, AccountScores, BenchmarkConfig, Dataset,
};
pub use metrics::{best_f1, mean_std, min_max_rescale, roc_auc, F1Sweep, F1_THRESHOLDS};
pub use report::{
    read_reports_json, write_reports_csv, write_reports_json, EvalReport, FoldResult, ReportStatus,
    REPORT_SCHEMA_VERSION,
};
pub use split::{kfold_split, FoldSplit};
pub use synthetic::{
    generate_synthetic, SyntheticConfig, SyntheticDataset, HIGH_SOURCE_RATING, LOW_SOURCE_RATING,
    MIN_POSTS,
};
