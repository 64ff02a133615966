//! Ranking on the account–source bipartite graph.
//!
//! All label-aware variants share one Jacobi-style iteration
//!
//! ```text
//! u_i ← α u⁰_i + (1−α) Σ_j N_ij d_j
//! d_j ← β d⁰   + (1−β) Σ_i M_ij u_i
//! ```
//!
//! and differ only in how the share counts `G_ij` are normalized:
//!
//! | variant | `N_ij`                | `M_ij`                |
//! |---------|-----------------------|-----------------------|
//! | Co-HITS | `G_ij / s_i`          | `G_ij / s_j`          |
//! | BGRM    | `G_ij / (s_i s_j)`    | `G_ij / (s_i s_j)`    |
//! | BiRank  | `G_ij / √(s_i s_j)`   | `G_ij / √(s_i s_j)`   |
//!
//! with `s_i`, `s_j` the account and source strengths. CoCred uses the
//! Co-HITS rule but pins labeled accounts to `u⁰` and renormalizes both
//! sides to sum 1 after every step.

use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{check_indices, l1_distance, Algorithm, Polarity, PropagationConfig, ScoreVector};
use crate::networks::BipartiteGraph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BipartiteVariant {
    CoHits,
    Bgrm,
    BiRank,
}

impl BipartiteVariant {
    pub fn algorithm(self) -> Algorithm {
        match self {
            BipartiteVariant::CoHits => Algorithm::CoHits,
            BipartiteVariant::Bgrm => Algorithm::Bgrm,
            BipartiteVariant::BiRank => Algorithm::BiRank,
        }
    }

    /// `(N_ij, M_ij)` for one edge.
    fn normalize(self, g: f64, s_account: f64, s_source: f64) -> (f64, f64) {
        match self {
            BipartiteVariant::CoHits => (g / s_account, g / s_source),
            BipartiteVariant::Bgrm => {
                let w = g / (s_account * s_source);
                (w, w)
            }
            BipartiteVariant::BiRank => {
                let w = g / (s_account * s_source).sqrt();
                (w, w)
            }
        }
    }
}

impl fmt::Display for BipartiteVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.algorithm().fmt(f)
    }
}

impl FromStr for BipartiteVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Algorithm>()? {
            Algorithm::CoHits => Ok(BipartiteVariant::CoHits),
            Algorithm::Bgrm => Ok(BipartiteVariant::Bgrm),
            Algorithm::BiRank => Ok(BipartiteVariant::BiRank),
            other => Err(Error::config(format!(
                "{other} is not a bipartite propagation variant"
            ))),
        }
    }
}

fn normalize_l1(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if total > 0.0 {
        v.iter_mut().for_each(|x| *x /= total);
    }
}

fn score(
    values: Vec<f64>,
    algorithm: Algorithm,
    polarity: Polarity,
    converged: bool,
    iterations: usize,
) -> ScoreVector {
    ScoreVector {
        values,
        polarity,
        algorithm,
        converged,
        iterations,
    }
}

/// Hub (account) and authority (source) scores on the binarized incidence,
/// L1-normalized after each half step.
pub fn hits(b: &BipartiteGraph, cfg: &PropagationConfig) -> Result<(ScoreVector, ScoreVector)> {
    cfg.validate()?;
    if b.edge_count() == 0 {
        return Err(Error::input(
            "HITS needs a bipartite graph with at least one edge",
        ));
    }
    let (nu, nd) = (b.account_count(), b.source_count());
    let mut u = vec![1.0 / nu as f64; nu];
    let mut d = vec![1.0 / nd as f64; nd];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut nu_next: Vec<f64> = (0..nu)
            .map(|i| b.account_row(i).0.iter().map(|&j| d[j]).sum())
            .collect();
        normalize_l1(&mut nu_next);
        let mut nd_next: Vec<f64> = (0..nd)
            .map(|j| b.source_row(j).0.iter().map(|&i| nu_next[i]).sum())
            .collect();
        normalize_l1(&mut nd_next);
        let delta = l1_distance(&u, &nu_next) + l1_distance(&d, &nd_next);
        u = nu_next;
        d = nd_next;
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!("HITS did not converge within {iterations} iterations");
    }
    Ok((
        score(u, Algorithm::Hits, cfg.hits_polarity, converged, iterations),
        score(d, Algorithm::Hits, cfg.hits_polarity, converged, iterations),
    ))
}

/// Prior account scores: 0 on `high`, 1 on `low`, `1/|U|` elsewhere,
/// normalized to sum 1.
pub fn initial_account_scores(
    n_accounts: usize,
    high: &[usize],
    low: &[usize],
) -> Result<Vec<f64>> {
    if high.is_empty() && low.is_empty() {
        return Err(Error::config(
            "bipartite propagation needs at least one labeled account",
        ));
    }
    check_indices(n_accounts, high, "high-credibility")?;
    check_indices(n_accounts, low, "low-credibility")?;
    let mut u0 = vec![1.0 / n_accounts as f64; n_accounts];
    for &i in high {
        u0[i] = 0.0;
    }
    for &i in low {
        if high.contains(&i) {
            return Err(Error::config(format!(
                "account {i} is labeled both high and low"
            )));
        }
        u0[i] = 1.0;
    }
    let total: f64 = u0.iter().sum();
    if total == 0.0 {
        return Err(Error::config(
            "every account is labeled high; prior has no mass",
        ));
    }
    u0.iter_mut().for_each(|x| *x /= total);
    Ok(u0)
}

/// Precomputed per-edge normalizations, laid out like the graph rows.
struct Normalized {
    by_account: Vec<Vec<(usize, f64)>>,
    by_source: Vec<Vec<(usize, f64)>>,
}

fn normalized(b: &BipartiteGraph, variant: BipartiteVariant) -> Normalized {
    let s_acc: Vec<f64> = (0..b.account_count())
        .map(|i| b.account_strength(i))
        .collect();
    let s_src: Vec<f64> = (0..b.source_count())
        .map(|j| b.source_strength(j))
        .collect();
    let by_account = (0..b.account_count())
        .map(|i| {
            let (cols, w) = b.account_row(i);
            cols.iter()
                .zip(w)
                .map(|(&j, &g)| (j, variant.normalize(g, s_acc[i], s_src[j]).0))
                .collect()
        })
        .collect();
    let by_source = (0..b.source_count())
        .map(|j| {
            let (rows, w) = b.source_row(j);
            rows.iter()
                .zip(w)
                .map(|(&i, &g)| (i, variant.normalize(g, s_acc[i], s_src[j]).1))
                .collect()
        })
        .collect();
    Normalized {
        by_account,
        by_source,
    }
}

fn dot(row: &[(usize, f64)], x: &[f64]) -> f64 {
    row.iter().map(|&(k, w)| w * x[k]).sum()
}

/// Co-HITS, BGRM or BiRank seeded with known labels.
///
/// Account scores are suspicion-aligned: low-credibility priors carry the mass.
pub fn bipartite_label_propagation(
    b: &BipartiteGraph,
    high: &[usize],
    low: &[usize],
    cfg: &PropagationConfig,
    variant: BipartiteVariant,
) -> Result<(ScoreVector, ScoreVector)> {
    cfg.validate()?;
    let u0 = initial_account_scores(b.account_count(), high, low)?;
    let nd = b.source_count();
    if nd == 0 {
        return Err(Error::input("bipartite graph has no sources"));
    }
    let d0 = 1.0 / nd as f64;
    let norm = normalized(b, variant);
    let (alpha, beta) = (cfg.alpha, cfg.beta);

    let mut u = u0.clone();
    let mut d = vec![d0; nd];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let u_next: Vec<f64> = norm
            .by_account
            .iter()
            .zip(&u0)
            .map(|(row, &prior)| alpha * prior + (1.0 - alpha) * dot(row, &d))
            .collect();
        let d_next: Vec<f64> = norm
            .by_source
            .iter()
            .map(|row| beta * d0 + (1.0 - beta) * dot(row, &u))
            .collect();
        let delta = l1_distance(&u, &u_next) + l1_distance(&d, &d_next);
        u = u_next;
        d = d_next;
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!("{variant} did not converge within {iterations} iterations");
    }
    let alg = variant.algorithm();
    Ok((
        score(u, alg, Polarity::Suspicion, converged, iterations),
        score(d, alg, Polarity::Suspicion, converged, iterations),
    ))
}

/// Co-HITS with labeled accounts pinned to their prior and both sides
/// renormalized to sum 1 after every step.
pub fn cocred(
    b: &BipartiteGraph,
    high: &[usize],
    low: &[usize],
    cfg: &PropagationConfig,
) -> Result<(ScoreVector, ScoreVector)> {
    cfg.validate()?;
    let u0 = initial_account_scores(b.account_count(), high, low)?;
    let nd = b.source_count();
    if nd == 0 {
        return Err(Error::input("bipartite graph has no sources"));
    }
    let mut pinned = vec![false; b.account_count()];
    high.iter().chain(low).for_each(|&i| pinned[i] = true);
    let d0 = 1.0 / nd as f64;
    let norm = normalized(b, BipartiteVariant::CoHits);
    let (alpha, beta) = (cfg.alpha, cfg.beta);

    let mut u = u0.clone();
    let mut d = vec![d0; nd];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut u_next: Vec<f64> = norm
            .by_account
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if pinned[i] {
                    u0[i]
                } else {
                    alpha * u0[i] + (1.0 - alpha) * dot(row, &d)
                }
            })
            .collect();
        let mut d_next: Vec<f64> = norm
            .by_source
            .iter()
            .map(|row| beta * d0 + (1.0 - beta) * dot(row, &u))
            .collect();
        normalize_l1(&mut u_next);
        normalize_l1(&mut d_next);
        let delta = l1_distance(&u, &u_next) + l1_distance(&d, &d_next);
        u = u_next;
        d = d_next;
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!("CoCred did not converge within {iterations} iterations");
    }
    Ok((
        score(
            u,
            Algorithm::CoCred,
            Polarity::Suspicion,
            converged,
            iterations,
        ),
        score(
            d,
            Algorithm::CoCred,
            Polarity::Suspicion,
            converged,
            iterations,
        ),
    ))
}
