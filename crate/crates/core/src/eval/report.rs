use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::centrality::{Algorithm, NetworkKind};
use crate::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_size: usize,
    /// Test accounts absent from the algorithm's network.
    pub missing_from_network: usize,
    /// `None` when the test set holds a single class.
    pub auc: Option<f64>,
    pub f1: Option<f64>,
    pub threshold: Option<f64>,
    /// node2vec bias parameters used in this fold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

/// Cross-validation summary for one algorithm. Standard deviations are
/// sample (n − 1) deviations over the evaluated folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub algorithm: Algorithm,
    pub network: NetworkKind,
    pub status: ReportStatus,
    pub reason: Option<String>,
    pub folds: Vec<FoldResult>,
    pub skipped_folds: usize,
    pub mean_auc: Option<f64>,
    pub std_auc: Option<f64>,
    pub mean_f1: Option<f64>,
    pub std_f1: Option<f64>,
    pub seed: u64,
    pub dataset_fingerprint: String,
    pub config: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    schema_version: u32,
    reports: Vec<EvalReport>,
}

pub fn write_reports_json<W: Write>(out: W, reports: &[EvalReport]) -> Result<()> {
    let file = ReportFile {
        schema_version: REPORT_SCHEMA_VERSION,
        reports: reports.to_vec(),
    };
    serde_json::to_writer_pretty(out, &file)?;
    Ok(())
}

pub fn read_reports_json<R: std::io::Read>(input: R) -> Result<Vec<EvalReport>> {
    let file: ReportFile = serde_json::from_reader(input)?;
    if file.schema_version != REPORT_SCHEMA_VERSION {
        return Err(crate::Error::input(format!(
            "unsupported report schema version {}",
            file.schema_version
        )));
    }
    Ok(file.reports)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    algorithm: &'a str,
    network: &'a str,
    fold: usize,
    auc: Option<f64>,
    f1: Option<f64>,
    threshold: Option<f64>,
}

/// One row per evaluated fold; not-applicable algorithms contribute no rows.
pub fn write_reports_csv<W: Write>(out: W, reports: &[EvalReport]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["algorithm", "network", "fold", "auc", "f1", "threshold"])?;
    for r in reports {
        for f in &r.folds {
            w.serialize(CsvRow {
                algorithm: r.algorithm.name(),
                network: r.network.name(),
                fold: f.fold,
                auc: f.auc,
                f1: f.f1,
                threshold: f.threshold,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}
