//! Planted two-block datasets with tunable homophily.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::ingest::{CredibilityLabel, LabelSets, PostRecord, SourceRating};
use crate::rng;
use crate::{Error, Result};

/// Every synthetic account makes at least this many posts, so the default
/// activity filters keep all of them.
pub const MIN_POSTS: usize = 5;
pub const HIGH_SOURCE_RATING: f64 = 90.0;
pub const LOW_SOURCE_RATING: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub high_accounts: usize,
    pub low_accounts: usize,
    pub high_sources: usize,
    pub low_sources: usize,
    /// Probability that a reshare or a shared domain crosses blocks.
    pub mu: f64,
    /// Mean posts per account; counts are `MIN_POSTS + Poisson(mean − MIN_POSTS)`.
    pub mean_posts: f64,
    /// Probability that a post reshares another account.
    pub reshare_fraction: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            high_accounts: 1000,
            low_accounts: 1000,
            high_sources: 50,
            low_sources: 50,
            mu: 0.05,
            mean_posts: 20.0,
            reshare_fraction: 0.5,
            seed: 1,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::config(format!("mu = {} outside [0, 1]", self.mu)));
        }
        if !(0.0..=1.0).contains(&self.reshare_fraction) {
            return Err(Error::config(format!(
                "reshare_fraction = {} outside [0, 1]",
                self.reshare_fraction
            )));
        }
        if self.high_accounts < 2 || self.low_accounts < 2 {
            return Err(Error::config(
                "each account block needs at least 2 accounts",
            ));
        }
        if self.high_sources == 0 || self.low_sources == 0 {
            return Err(Error::config("each source pool needs at least 1 source"));
        }
        if !(self.mean_posts >= MIN_POSTS as f64 && self.mean_posts.is_finite()) {
            return Err(Error::config(format!(
                "mean_posts must be at least {MIN_POSTS}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub posts: Vec<PostRecord>,
    pub ratings: Vec<SourceRating>,
    /// Block membership of every account.
    pub truth: LabelSets,
}

/// Generates a two-block dataset. Account and domain ids are neutral
/// (`u00042`, `news007.example`) and blocks are assigned by a seeded
/// shuffle, so ids carry no label information.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticDataset> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, &[0x5359_4e54]);

    let n_acc = cfg.high_accounts + cfg.low_accounts;
    let mut accounts: Vec<String> = (0..n_acc).map(|i| format!("u{i:05}")).collect();
    accounts.shuffle(&mut rng);
    let (high_acc, low_acc) = accounts.split_at(cfg.high_accounts);

    let n_src = cfg.high_sources + cfg.low_sources;
    let mut sources: Vec<String> = (0..n_src).map(|i| format!("news{i:03}.example")).collect();
    sources.shuffle(&mut rng);
    let (high_src, low_src) = sources.split_at(cfg.high_sources);

    let extra = cfg.mean_posts - MIN_POSTS as f64;
    let poisson = (extra > 0.0).then(|| Poisson::new(extra).expect("positive mean"));

    let mut ids: Vec<(&str, CredibilityLabel)> = high_acc
        .iter()
        .map(|a| (a.as_str(), CredibilityLabel::High))
        .chain(low_acc.iter().map(|a| (a.as_str(), CredibilityLabel::Low)))
        .collect();
    ids.sort_unstable_by_key(|(a, _)| *a);

    let mut posts = Vec::new();
    for (account, block) in ids {
        let (own_acc, other_acc, own_src, other_src) = match block {
            CredibilityLabel::High => (high_acc, low_acc, high_src, low_src),
            CredibilityLabel::Low => (low_acc, high_acc, low_src, high_src),
        };
        let count = MIN_POSTS + poisson.map_or(0, |p| p.sample(&mut rng) as usize);
        for _ in 0..count {
            let pool = if rng.random::<f64>() < cfg.mu {
                other_src
            } else {
                own_src
            };
            let domain = pool[rng.random_range(0..pool.len())].clone();
            let reshared_from = (rng.random::<f64>() < cfg.reshare_fraction).then(|| {
                let pool = if rng.random::<f64>() < cfg.mu {
                    other_acc
                } else {
                    own_acc
                };
                loop {
                    let a = &pool[rng.random_range(0..pool.len())];
                    if a != account {
                        break a.clone();
                    }
                }
            });
            posts.push(PostRecord {
                account_id: account.to_string(),
                post_id: format!("p{:07}", posts.len()),
                domains: vec![domain],
                reshared_from,
            });
        }
    }

    let mut ratings: Vec<SourceRating> = high_src
        .iter()
        .map(|d| SourceRating {
            domain: d.clone(),
            score: HIGH_SOURCE_RATING,
        })
        .chain(low_src.iter().map(|d| SourceRating {
            domain: d.clone(),
            score: LOW_SOURCE_RATING,
        }))
        .collect();
    ratings.sort_by(|a, b| a.domain.cmp(&b.domain));

    let truth = LabelSets {
        high: high_acc.iter().cloned().collect(),
        low: low_acc.iter().cloned().collect(),
    };
    Ok(SyntheticDataset {
        posts,
        ratings,
        truth,
    })
}
