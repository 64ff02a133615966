use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EmbeddingMatrix;
use crate::centrality::{Algorithm, Polarity, ScoreVector};
use crate::ingest::{CredibilityLabel, LabelSets};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    /// `1 − cos(a, b)`; a zero vector is at distance 1 from everything.
    #[default]
    Cosine,
    Euclidean,
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distance::Cosine => "cosine",
            Distance::Euclidean => "euclidean",
        })
    }
}

impl FromStr for Distance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cosine" => Ok(Distance::Cosine),
            "euclidean" => Ok(Distance::Euclidean),
            _ => Err(Error::config(format!("unknown distance {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnConfig {
    pub k: usize,
    pub distance: Distance,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            k: 10,
            distance: Distance::Cosine,
        }
    }
}

impl KnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        Ok(())
    }
}

struct Point {
    id: String,
    vec: Vec<f64>,
    norm: f64,
}

impl Point {
    fn new(id: &str, row: Option<&[f32]>, dim: usize) -> Self {
        let vec: Vec<f64> = match row {
            Some(r) => r.iter().map(|&x| x as f64).collect(),
            None => vec![0.0; dim],
        };
        let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        Point {
            id: id.to_string(),
            vec,
            norm,
        }
    }

    fn distance(&self, other: &Point, metric: Distance) -> f64 {
        match metric {
            Distance::Cosine => {
                if self.norm == 0.0 || other.norm == 0.0 {
                    return 1.0;
                }
                let dot: f64 = self.vec.iter().zip(&other.vec).map(|(a, b)| a * b).sum();
                1.0 - dot / (self.norm * other.norm)
            }
            Distance::Euclidean => self
                .vec
                .iter()
                .zip(&other.vec)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Scores each target by the fraction of its `k` nearest labeled training
/// accounts that are low-credibility.
///
/// Only labeled accounts present in the embedding take part as neighbors, and
/// a target never counts itself. Distance ties go to the smaller account id.
/// Targets missing from the embedding are treated as the zero vector.
/// `algorithm` only tags the returned scores.
pub fn knn_score(
    emb: &EmbeddingMatrix,
    train_labels: &LabelSets,
    targets: &[&str],
    cfg: &KnnConfig,
    algorithm: Algorithm,
) -> Result<ScoreVector> {
    cfg.validate()?;
    let dim = emb.dimension();
    // Sorted by id so that a stable sort on distance breaks ties by id.
    let labeled: Vec<(Point, bool)> = train_labels
        .accounts()
        .into_iter()
        .filter_map(|id| {
            let row = emb.get(id)?;
            let low = train_labels.label_of(id) == Some(CredibilityLabel::Low);
            Some((Point::new(id, Some(row), dim), low))
        })
        .collect();
    if labeled.is_empty() {
        return Err(Error::input(
            "KNN needs at least one labeled training account with an embedding",
        ));
    }

    let mut values = Vec::with_capacity(targets.len());
    let mut dists: Vec<(f64, bool)> = Vec::with_capacity(labeled.len());
    for &target in targets {
        let t = Point::new(target, emb.get(target), dim);
        dists.clear();
        dists.extend(
            labeled
                .iter()
                .filter(|(p, _)| p.id != t.id)
                .map(|(p, low)| (t.distance(p, cfg.distance), *low)),
        );
        if dists.is_empty() {
            // The target is the only labeled account.
            values.push(0.0);
            continue;
        }
        dists.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = cfg.k.min(dists.len());
        let low = dists[..k].iter().filter(|(_, l)| *l).count();
        values.push(low as f64 / k as f64);
    }
    Ok(ScoreVector {
        values,
        polarity: Polarity::Suspicion,
        algorithm,
        converged: true,
        iterations: 0,
    })
}
