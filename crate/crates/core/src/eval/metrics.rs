use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of evenly spaced thresholds in `[0, 1]` swept by [`best_f1`].
pub const F1_THRESHOLDS: usize = 1000;

fn check(scores: &[f64], positive: &[bool]) -> Result<()> {
    if scores.len() != positive.len() {
        return Err(Error::Mismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            positive.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::input("scores must be finite"));
    }
    Ok(())
}

/// Area under the ROC curve with `positive` marking low-credibility
/// accounts and larger scores meaning more suspicious.
///
/// Computed from average ranks (the Mann–Whitney U statistic), so tied
/// positive/negative pairs count one half. `None` when only one class is
/// present.
pub fn roc_auc(scores: &[f64], positive: &[bool]) -> Result<Option<f64>> {
    check(scores, positive)?;
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Ranks are 1-based; a tie group spanning ranks i+1..=j gets (i+1+j)/2.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = order[i..j].iter().filter(|&&k| positive[k]).count();
        rank_sum += avg * pos_in_group as f64;
        i = j;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(Some(u / (n_pos as f64 * n_neg as f64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F1Sweep {
    pub f1: f64,
    /// Smallest grid threshold (on min-max rescaled scores) reaching `f1`.
    pub threshold: f64,
}

/// Min-max rescales the scores to `[0, 1]`. Constant scores map to 0.
pub fn min_max_rescale(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.0; scores.len()];
    }
    scores.iter().map(|s| (s - lo) / (hi - lo)).collect()
}

/// Best F1 over [`F1_THRESHOLDS`] thresholds `k/999` applied to min-max
/// rescaled scores, predicting positive when `score ≥ threshold`.
pub fn best_f1(scores: &[f64], positive: &[bool]) -> Result<F1Sweep> {
    check(scores, positive)?;
    let n_pos = positive.iter().filter(|&&p| p).count();
    if n_pos == 0 {
        return Err(Error::input("F1 needs at least one positive label"));
    }
    let rescaled = min_max_rescale(scores);
    let mut sorted: Vec<(f64, bool)> = rescaled.into_iter().zip(positive.iter().copied()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Positives with score below each sorted position.
    let mut pos_below = Vec::with_capacity(sorted.len() + 1);
    pos_below.push(0usize);
    for &(_, p) in &sorted {
        pos_below.push(pos_below.last().unwrap() + usize::from(p));
    }

    let mut best = F1Sweep {
        f1: -1.0,
        threshold: 0.0,
    };
    for k in 0..F1_THRESHOLDS {
        let t = k as f64 / (F1_THRESHOLDS - 1) as f64;
        let cut = sorted.partition_point(|&(s, _)| s < t);
        let predicted = sorted.len() - cut;
        let tp = n_pos - pos_below[cut];
        let f1 = if tp == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (predicted + n_pos) as f64
        };
        if f1 > best.f1 {
            best = F1Sweep { f1, threshold: t };
        }
    }
    Ok(best)
}

/// Mean and sample standard deviation; the deviation is `None` for fewer
/// than two values.
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some(var.sqrt()))
}
