//! Label-propagation and centrality scorers for account credibility.
//!
//! Reshare-network family (operating on the reshare network `G` or its
//! transpose, the trust network):
//!
//! ```text
//! PageRank Trust   τ ← (1−α) Pᵀτ + α/N                on the trust network
//! PPR Trust        τ ← (1−α) Pᵀτ + α τ⁰               τ⁰ uniform on H
//! TrustRank        PPR Trust with τ⁰ built from the top PageRank seeds
//! LoCred           s ← (1−α) Pᵀs + α s⁰               on the reshare network, s⁰ uniform on L
//! Rep. Scaling     r = τ (1 − s / max s)
//! ```
//!
//! where `P` is the row-stochastic transition matrix of the network.
//! Bipartite family: HITS, Co-HITS, BGRM, BiRank and CoCred, see
//! [`bipartite`].

mod bipartite;
mod pagerank;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bipartite::{
    bipartite_label_propagation, cocred, hits, initial_account_scores, BipartiteVariant,
};
pub use pagerank::{
    locred, pagerank_trust, personalized_pagerank, personalized_pagerank_trust, reputation_scaling,
    trustrank, trustrank_personalization, trustrank_seeds,
};

use crate::networks::NodeIndex;
use crate::{Error, Result};

/// How probability mass on nodes without out-links is handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DanglingPolicy {
    /// Redistribute it along the teleport vector, keeping scores stochastic.
    #[default]
    Teleport,
    /// Drop it, iterating the update rule literally.
    Absorb,
}

/// How LoCred scores enter reputation scaling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReputationInput {
    /// Divide by the maximum so that `s` spans `[0, 1]`.
    #[default]
    MaxRescaled,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    /// Account-side teleportation factor.
    pub alpha: f64,
    /// Source-side teleportation factor.
    pub beta: f64,
    /// L1 change between iterates at which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// TrustRank seed set size as a fraction of the node count.
    pub seed_fraction: f64,
    pub dangling: DanglingPolicy,
    pub reputation_input: ReputationInput,
    /// Orientation given to plain HITS account scores.
    pub hits_polarity: Polarity,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            alpha: 0.85,
            beta: 0.85,
            tolerance: 1e-8,
            max_iterations: 100,
            seed_fraction: 0.02,
            dangling: DanglingPolicy::Teleport,
            reputation_input: ReputationInput::MaxRescaled,
            hits_polarity: Polarity::Suspicion,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("max_iterations must be positive"));
        }
        if !(self.seed_fraction > 0.0 && self.seed_fraction <= 1.0) {
            return Err(Error::config(format!(
                "seed_fraction = {} must lie in (0, 1]",
                self.seed_fraction
            )));
        }
        Ok(())
    }
}

/// Which end of a score ranks low-credibility accounts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Larger means more credible.
    Credibility,
    /// Larger means less credible.
    Suspicion,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Credibility => "credibility",
            Polarity::Suspicion => "suspicion",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    PagerankTrust,
    PprTrust,
    #[serde(rename = "trustrank")]
    TrustRank,
    #[serde(rename = "locred")]
    LoCred,
    ReputationScaling,
    Node2vecReshare,
    #[serde(rename = "cocred")]
    CoCred,
    #[serde(rename = "node2vec_coshare")]
    Node2vecCoShare,
    #[serde(rename = "cohits")]
    CoHits,
    Hits,
    Bgrm,
    #[serde(rename = "birank")]
    BiRank,
}

impl Algorithm {
    pub const ALL: [Algorithm; 12] = [
        Algorithm::Node2vecReshare,
        Algorithm::LoCred,
        Algorithm::ReputationScaling,
        Algorithm::TrustRank,
        Algorithm::PprTrust,
        Algorithm::PagerankTrust,
        Algorithm::CoCred,
        Algorithm::Node2vecCoShare,
        Algorithm::CoHits,
        Algorithm::Hits,
        Algorithm::Bgrm,
        Algorithm::BiRank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PagerankTrust => "pagerank_trust",
            Algorithm::PprTrust => "ppr_trust",
            Algorithm::TrustRank => "trustrank",
            Algorithm::LoCred => "locred",
            Algorithm::ReputationScaling => "reputation_scaling",
            Algorithm::Node2vecReshare => "node2vec_reshare",
            Algorithm::CoCred => "cocred",
            Algorithm::Node2vecCoShare => "node2vec_coshare",
            Algorithm::CoHits => "cohits",
            Algorithm::Hits => "hits",
            Algorithm::Bgrm => "bgrm",
            Algorithm::BiRank => "birank",
        }
    }

    /// The network whose edges the method consumes.
    pub fn network(self) -> NetworkKind {
        match self {
            Algorithm::PagerankTrust | Algorithm::PprTrust | Algorithm::TrustRank => {
                NetworkKind::Trust
            }
            Algorithm::LoCred | Algorithm::ReputationScaling | Algorithm::Node2vecReshare => {
                NetworkKind::Reshare
            }
            Algorithm::Node2vecCoShare => NetworkKind::CoShare,
            Algorithm::CoCred
            | Algorithm::CoHits
            | Algorithm::Hits
            | Algorithm::Bgrm
            | Algorithm::BiRank => NetworkKind::Bipartite,
        }
    }

    /// Methods whose input is the reshare network or its transpose.
    pub fn needs_reshares(self) -> bool {
        matches!(self.network(), NetworkKind::Reshare | NetworkKind::Trust)
    }

    pub fn is_embedding(self) -> bool {
        matches!(
            self,
            Algorithm::Node2vecReshare | Algorithm::Node2vecCoShare
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Reshare,
    Trust,
    Bipartite,
    #[serde(rename = "coshare")]
    CoShare,
}

impl NetworkKind {
    pub fn name(self) -> &'static str {
        match self {
            NetworkKind::Reshare => "reshare",
            NetworkKind::Trust => "trust",
            NetworkKind::Bipartite => "bipartite",
            NetworkKind::CoShare => "coshare",
        }
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NetworkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reshare" | "retweet" => Ok(NetworkKind::Reshare),
            "trust" => Ok(NetworkKind::Trust),
            "bipartite" => Ok(NetworkKind::Bipartite),
            "coshare" | "co-share" | "co_share" => Ok(NetworkKind::CoShare),
            _ => Err(Error::config(format!("unknown network {s:?}"))),
        }
    }
}

/// Per-node scores with their orientation and convergence record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub values: Vec<f64>,
    pub polarity: Polarity,
    pub algorithm: Algorithm,
    pub converged: bool,
    pub iterations: usize,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scores oriented so that larger means less credible.
    pub fn suspicion(&self) -> Vec<f64> {
        match self.polarity {
            Polarity::Suspicion => self.values.clone(),
            Polarity::Credibility => self.values.iter().map(|v| -v).collect(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Writes `node,score,polarity,algorithm,converged,iterations` rows, most
/// suspicious first; equal scores keep id order.
pub fn write_scores_csv<W: Write>(out: W, nodes: &NodeIndex, scores: &ScoreVector) -> Result<()> {
    if nodes.len() != scores.len() {
        return Err(Error::Mismatch(format!(
            "{} nodes for {} scores",
            nodes.len(),
            scores.len()
        )));
    }
    let suspicion = scores.suspicion();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| {
        suspicion[b]
            .total_cmp(&suspicion[a])
            .then_with(|| nodes.id(a).cmp(nodes.id(b)))
    });
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "node",
        "score",
        "polarity",
        "algorithm",
        "converged",
        "iterations",
    ])?;
    for i in order {
        w.write_record([
            nodes.id(i),
            &scores.values[i].to_string(),
            &scores.polarity.to_string(),
            scores.algorithm.name(),
            &scores.converged.to_string(),
            &scores.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub(crate) fn check_indices(n: usize, nodes: &[usize], what: &str) -> Result<()> {
    match nodes.iter().find(|&&i| i >= n) {
        Some(i) => Err(Error::input(format!(
            "{what} node {i} out of range for {n} nodes"
        ))),
        None => Ok(()),
    }
}
