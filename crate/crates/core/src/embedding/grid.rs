use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{knn_score, node2vec, KnnConfig, Node2vecParams, WalkGraph};
use crate::centrality::Algorithm;
use crate::eval::{kfold_split, roc_auc};
use crate::ingest::{CredibilityLabel, LabelSets};
use crate::{Error, Result};

/// Candidate values for both `p` and `q`.
pub const DEFAULT_PQ_GRID: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub p: f64,
    pub q: f64,
    /// Mean ROC AUC over folds with both classes in the test set.
    pub mean_auc: Option<f64>,
    pub folds_evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best: GridCell,
    pub cells: Vec<GridCell>,
}

/// `Greater` when `a` should win over `b`.
fn rank_cells(a: &GridCell, b: &GridCell) -> Ordering {
    let auc = |c: &GridCell| c.mean_auc.unwrap_or(f64::NEG_INFINITY);
    let is_default = |c: &GridCell| c.p == 1.0 && c.q == 1.0;
    auc(a)
        .total_cmp(&auc(b))
        .then(is_default(a).cmp(&is_default(b)))
        .then(b.p.total_cmp(&a.p))
        .then(b.q.total_cmp(&a.q))
}

/// Picks the `(p, q)` pair with the highest mean cross-validated ROC AUC of
/// node2vec + KNN over `grid × grid`. Ties prefer `(1, 1)`, then the
/// lexicographically smallest pair.
///
/// `labels` should hold only accounts the caller may train on; the folds are
/// drawn from them.
pub fn grid_search_pq<G: WalkGraph + Sync>(
    g: &G,
    labels: &LabelSets,
    grid: &[f64],
    base: &Node2vecParams,
    knn: &KnnConfig,
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    if labels.is_empty() {
        return Err(Error::config("grid search needs labeled accounts"));
    }
    if grid.is_empty() {
        return Err(Error::config(
            "grid search needs at least one candidate value",
        ));
    }
    let known: Vec<String> = labels.accounts().into_iter().map(str::to_string).collect();
    let splits = kfold_split(&known, folds, seed)?;

    let mut cells = Vec::with_capacity(grid.len() * grid.len());
    for &p in grid {
        for &q in grid {
            let params = Node2vecParams { p, q, ..*base };
            let emb = node2vec(g, &params)?;
            let mut aucs = Vec::new();
            for split in &splits {
                let train = labels.restrict_to(split.train.iter().map(String::as_str));
                let test: Vec<&str> = split.test.iter().map(String::as_str).collect();
                let scores = knn_score(&emb, &train, &test, knn, Algorithm::Node2vecReshare)?;
                let positive: Vec<bool> = test
                    .iter()
                    .map(|a| labels.label_of(a) == Some(CredibilityLabel::Low))
                    .collect();
                if let Some(auc) = roc_auc(&scores.values, &positive)? {
                    aucs.push(auc);
                }
            }
            let mean_auc = (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64);
            cells.push(GridCell {
                p,
                q,
                mean_auc,
                folds_evaluated: aucs.len(),
            });
        }
    }
    let best = cells
        .iter()
        .max_by(|a, b| rank_cells(a, b))
        .expect("non-empty grid")
        .clone();
    Ok(GridSearchResult { best, cells })
}
