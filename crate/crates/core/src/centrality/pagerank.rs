use log::warn;

use super::{
    check_indices, l1_distance, Algorithm, DanglingPolicy, Polarity, PropagationConfig,
    ReputationInput, ScoreVector,
};
use crate::networks::DirectedWeightedGraph;
use crate::{Error, Result};

struct Run {
    values: Vec<f64>,
    converged: bool,
    iterations: usize,
}

/// Power iteration of `x_i ← (1−α) Σ_j (W_ji / Σ_ℓ W_jℓ) x_j + α t_i`,
/// starting from `t`.
fn propagate(g: &DirectedWeightedGraph, teleport: &[f64], cfg: &PropagationConfig) -> Run {
    let n = g.node_count();
    let alpha = cfg.alpha;
    let out_strength: Vec<f64> = (0..n).map(|j| g.out_strength(j)).collect();
    let dangling: Vec<usize> = (0..n).filter(|&j| out_strength[j] == 0.0).collect();

    let mut x = teleport.to_vec();
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let leaked = match cfg.dangling {
            DanglingPolicy::Teleport => dangling.iter().map(|&j| x[j]).sum::<f64>(),
            DanglingPolicy::Absorb => 0.0,
        };
        for (i, slot) in next.iter_mut().enumerate() {
            let (srcs, w) = g.in_neighbors(i);
            let walk: f64 = srcs
                .iter()
                .zip(w)
                .map(|(&j, &wji)| wji / out_strength[j] * x[j])
                .sum();
            *slot = (1.0 - alpha) * (walk + leaked * teleport[i]) + alpha * teleport[i];
        }
        let delta = l1_distance(&x, &next);
        std::mem::swap(&mut x, &mut next);
        if delta < cfg.tolerance {
            converged = true;
            break;
        }
    }
    Run {
        values: x,
        converged,
        iterations,
    }
}

fn finish(run: Run, algorithm: Algorithm, polarity: Polarity) -> ScoreVector {
    if !run.converged {
        warn!(
            "{algorithm} did not converge within {} iterations",
            run.iterations
        );
    }
    ScoreVector {
        values: run.values,
        polarity,
        algorithm,
        converged: run.converged,
        iterations: run.iterations,
    }
}

fn uniform_on(n: usize, nodes: &[usize]) -> Vec<f64> {
    let mut t = vec![0.0; n];
    let mut members = nodes.to_vec();
    members.sort_unstable();
    members.dedup();
    for &i in &members {
        t[i] = 1.0 / members.len() as f64;
    }
    t
}

/// Weighted PageRank on the trust network with uniform teleportation.
pub fn pagerank_trust(
    trust: &DirectedWeightedGraph,
    cfg: &PropagationConfig,
) -> Result<ScoreVector> {
    cfg.validate()?;
    let n = trust.node_count();
    if n == 0 {
        return Err(Error::input("PageRank Trust needs at least one node"));
    }
    let run = propagate(trust, &vec![1.0 / n as f64; n], cfg);
    Ok(finish(run, Algorithm::PagerankTrust, Polarity::Credibility))
}

/// Propagation with an arbitrary teleport vector, normalized to sum 1.
pub fn personalized_pagerank(
    g: &DirectedWeightedGraph,
    teleport: &[f64],
    cfg: &PropagationConfig,
) -> Result<ScoreVector> {
    cfg.validate()?;
    if teleport.len() != g.node_count() {
        return Err(Error::Mismatch(format!(
            "teleport vector has {} entries for {} nodes",
            teleport.len(),
            g.node_count()
        )));
    }
    if teleport.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::config(
            "teleport entries must be finite and non-negative",
        ));
    }
    let total: f64 = teleport.iter().sum();
    if total <= 0.0 {
        return Err(Error::config("teleport vector must have positive mass"));
    }
    let t: Vec<f64> = teleport.iter().map(|v| v / total).collect();
    Ok(finish(
        propagate(g, &t, cfg),
        Algorithm::PprTrust,
        Polarity::Credibility,
    ))
}

/// PageRank Trust restarted uniformly on the known high-credibility accounts.
pub fn personalized_pagerank_trust(
    trust: &DirectedWeightedGraph,
    high: &[usize],
    cfg: &PropagationConfig,
) -> Result<ScoreVector> {
    if high.is_empty() {
        return Err(Error::config(
            "personalized PageRank Trust needs a non-empty high-credibility set",
        ));
    }
    check_indices(trust.node_count(), high, "high-credibility")?;
    personalized_pagerank(trust, &uniform_on(trust.node_count(), high), cfg)
}

/// Top `ceil(seed_fraction · N)` nodes by PageRank Trust, ties to the lower index.
pub fn trustrank_seeds(pagerank: &ScoreVector, seed_fraction: f64) -> Vec<usize> {
    let n = pagerank.len();
    let k = ((seed_fraction * n as f64).ceil() as usize).clamp(1, n.max(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        pagerank.values[b]
            .total_cmp(&pagerank.values[a])
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Seed personalization: 1 on good seeds, 0 on bad ones, ½ on unlabeled
/// seeds, 0 off the seed set; normalized to sum 1.
pub fn trustrank_personalization(
    n: usize,
    seeds: &[usize],
    high: &[usize],
    low: &[usize],
) -> Vec<f64> {
    let mut is_high = vec![false; n];
    let mut is_low = vec![false; n];
    high.iter().for_each(|&i| is_high[i] = true);
    low.iter().for_each(|&i| is_low[i] = true);

    let mut t = vec![0.0; n];
    if !seeds.iter().any(|&s| is_high[s] || is_low[s]) {
        warn!("no TrustRank seed carries a label; personalization is uniform over the seeds");
    }
    for &s in seeds {
        t[s] = if is_high[s] {
            1.0
        } else if is_low[s] {
            0.0
        } else {
            0.5
        };
    }
    let total: f64 = t.iter().sum();
    if total == 0.0 {
        warn!("every TrustRank seed is labeled low; falling back to uniform over the seeds");
        return uniform_on(n, seeds);
    }
    t.iter().map(|v| v / total).collect()
}

pub fn trustrank(
    trust: &DirectedWeightedGraph,
    high: &[usize],
    low: &[usize],
    cfg: &PropagationConfig,
) -> Result<ScoreVector> {
    if high.is_empty() && low.is_empty() {
        return Err(Error::config(
            "TrustRank needs at least one labeled account",
        ));
    }
    let n = trust.node_count();
    check_indices(n, high, "high-credibility")?;
    check_indices(n, low, "low-credibility")?;
    let pr = pagerank_trust(trust, cfg)?;
    let seeds = trustrank_seeds(&pr, cfg.seed_fraction);
    let t = trustrank_personalization(n, &seeds, high, low);
    let mut out = personalized_pagerank(trust, &t, cfg)?;
    out.algorithm = Algorithm::TrustRank;
    Ok(out)
}

/// Low-credibility spreading score on the reshare network, restarted on `L`.
pub fn locred(
    reshare: &DirectedWeightedGraph,
    low: &[usize],
    cfg: &PropagationConfig,
) -> Result<ScoreVector> {
    cfg.validate()?;
    if low.is_empty() {
        return Err(Error::config(
            "LoCred needs a non-empty low-credibility set",
        ));
    }
    check_indices(reshare.node_count(), low, "low-credibility")?;
    let t = uniform_on(reshare.node_count(), low);
    Ok(finish(
        propagate(reshare, &t, cfg),
        Algorithm::LoCred,
        Polarity::Suspicion,
    ))
}

/// `r_i = τ_i (1 − s_i)` from PPR Trust and LoCred.
pub fn reputation_scaling(
    tau: &ScoreVector,
    s: &ScoreVector,
    mode: ReputationInput,
) -> Result<ScoreVector> {
    if tau.len() != s.len() {
        return Err(Error::Mismatch(format!(
            "trust scores cover {} nodes, LoCred scores {}",
            tau.len(),
            s.len()
        )));
    }
    let scale = match mode {
        ReputationInput::Raw => 1.0,
        ReputationInput::MaxRescaled => {
            let max = s.values.iter().copied().fold(0.0, f64::max);
            if max > 0.0 {
                max
            } else {
                1.0
            }
        }
    };
    let values = tau
        .values
        .iter()
        .zip(&s.values)
        .map(|(t, s)| t * (1.0 - s / scale))
        .collect();
    Ok(ScoreVector {
        values,
        polarity: Polarity::Credibility,
        algorithm: Algorithm::ReputationScaling,
        converged: tau.converged && s.converged,
        iterations: tau.iterations.max(s.iterations),
    })
}
