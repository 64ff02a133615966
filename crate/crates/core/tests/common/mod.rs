//! Dense brute-force oracles and random instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use crednet::networks::{
    BipartiteGraph, DirectedWeightedGraph, NodeIndex, UndirectedWeightedGraph,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(prefix: &str, n: usize) -> NodeIndex {
    NodeIndex::new((0..n).map(|i| format!("{prefix}{i:03}")).collect()).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Random digraph with integer weights 1..=5, no self-loops, returned with
/// its dense weight matrix `w[i][j]`.
pub fn random_digraph(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
) -> (DirectedWeightedGraph, Dense) {
    let mut w = vec![vec![0.0; n]; n];
    let mut edges = Vec::new();
    for (i, row) in w.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j && rng.random::<f64>() < density {
                let weight = rng.random_range(1..=5) as f64;
                *cell = weight;
                edges.push((i, j, weight));
            }
        }
    }
    (
        DirectedWeightedGraph::from_edges(ids("n", n), edges).unwrap(),
        w,
    )
}

/// Random account × source incidence where every account and every source
/// has at least one edge.
pub fn random_bipartite(
    rng: &mut ChaCha8Rng,
    nu: usize,
    nd: usize,
    density: f64,
) -> (BipartiteGraph, Dense) {
    let mut g = vec![vec![0.0; nd]; nu];
    for row in g.iter_mut() {
        for cell in row.iter_mut() {
            if rng.random::<f64>() < density {
                *cell = rng.random_range(1..=5) as f64;
            }
        }
    }
    for (i, row) in g.iter_mut().enumerate() {
        if row.iter().all(|&x| x == 0.0) {
            row[i % nd] = 1.0;
        }
    }
    for j in 0..nd {
        if g.iter().all(|row| row[j] == 0.0) {
            g[j % nu][j] = 1.0;
        }
    }
    let edges: Vec<_> = g
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(move |(j, &w)| (i, j, w))
        })
        .collect();
    (
        BipartiteGraph::from_edges(ids("a", nu), ids("s", nd), edges).unwrap(),
        g,
    )
}

/// Disjoint random high/low index sets, each of roughly `fraction · n`
/// nodes and at least one node each.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, fraction: f64) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let k = ((fraction * n as f64).round() as usize).clamp(1, n / 2);
    let mut high = order[..k].to_vec();
    let mut low = order[k..2 * k].to_vec();
    high.sort_unstable();
    low.sort_unstable();
    (high, low)
}

pub fn uniform_on(n: usize, nodes: &[usize]) -> Vec<f64> {
    let mut t = vec![0.0; n];
    for &i in nodes {
        t[i] = 1.0 / nodes.len() as f64;
    }
    t
}

/// Builds the full dense update matrix `M` with
/// `x ← (1−α) M x + α t`, folding dangling columns onto `t` when asked,
/// and iterates it from `t` to a tight tolerance.
pub fn dense_propagation(
    w: &Dense,
    t: &[f64],
    alpha: f64,
    redistribute_dangling: bool,
) -> Vec<f64> {
    let n = w.len();
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        let out: f64 = w[j].iter().sum();
        for i in 0..n {
            m[i][j] = if out > 0.0 {
                w[j][i] / out
            } else if redistribute_dangling {
                t[i]
            } else {
                0.0
            };
        }
    }
    let mut x = t.to_vec();
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|i| (1.0 - alpha) * (0..n).map(|j| m[i][j] * x[j]).sum::<f64>() + alpha * t[i])
            .collect();
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}

/// Top `ceil(fraction · n)` indices by score, ties to the lower index.
pub fn top_seeds(scores: &[f64], fraction: f64) -> Vec<usize> {
    let n = scores.len();
    let k = ((fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    let mut s = order[..k].to_vec();
    s.sort_unstable();
    s
}

pub fn trustrank_teleport(n: usize, seeds: &[usize], high: &[usize], low: &[usize]) -> Vec<f64> {
    let mut t = vec![0.0; n];
    for &s in seeds {
        t[s] = if high.contains(&s) {
            1.0
        } else if low.contains(&s) {
            0.0
        } else {
            0.5
        };
    }
    let total: f64 = t.iter().sum();
    if total == 0.0 {
        return uniform_on(n, seeds);
    }
    t.iter().map(|v| v / total).collect()
}

pub fn transpose(w: &Dense) -> Dense {
    let n = w.len();
    (0..n).map(|i| (0..n).map(|j| w[j][i]).collect()).collect()
}

/// Prior account vector: 0 on high, 1 on low, 1/|U| elsewhere, normalized.
pub fn bipartite_prior(nu: usize, high: &[usize], low: &[usize]) -> Vec<f64> {
    let mut u0: Vec<f64> = (0..nu)
        .map(|i| {
            if high.contains(&i) {
                0.0
            } else if low.contains(&i) {
                1.0
            } else {
                1.0 / nu as f64
            }
        })
        .collect();
    let total: f64 = u0.iter().sum();
    u0.iter_mut().for_each(|x| *x /= total);
    u0
}

/// Dense `(N, M)` normalizations of the incidence for each variant.
pub fn bipartite_matrices(g: &Dense, variant: &str) -> (Dense, Dense) {
    let nu = g.len();
    let nd = g[0].len();
    let su: Vec<f64> = g.iter().map(|r| r.iter().sum()).collect();
    let sd: Vec<f64> = (0..nd).map(|j| g.iter().map(|r| r[j]).sum()).collect();
    let mut n_mat = vec![vec![0.0; nd]; nu];
    let mut m_mat = vec![vec![0.0; nd]; nu];
    for i in 0..nu {
        for j in 0..nd {
            if g[i][j] == 0.0 {
                continue;
            }
            let (a, b) = match variant {
                "cohits" => (g[i][j] / su[i], g[i][j] / sd[j]),
                "bgrm" => (g[i][j] / (su[i] * sd[j]), g[i][j] / (su[i] * sd[j])),
                "birank" => (
                    g[i][j] / (su[i] * sd[j]).sqrt(),
                    g[i][j] / (su[i] * sd[j]).sqrt(),
                ),
                _ => panic!("unknown variant {variant}"),
            };
            n_mat[i][j] = a;
            m_mat[i][j] = b;
        }
    }
    (n_mat, m_mat)
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// Jacobi iteration of `u ← α u⁰ + (1−α) N d`, `d ← β d⁰ + (1−β) Mᵀ u`.
/// With `pinned`, labeled accounts stay at `u⁰` and both sides are
/// renormalized each step.
pub fn dense_bipartite(
    g: &Dense,
    variant: &str,
    u0: &[f64],
    alpha: f64,
    beta: f64,
    pinned: Option<&[bool]>,
) -> (Vec<f64>, Vec<f64>) {
    let (nu, nd) = (g.len(), g[0].len());
    let (n_mat, m_mat) = bipartite_matrices(g, variant);
    let d0 = 1.0 / nd as f64;
    let mut u = u0.to_vec();
    let mut d = vec![d0; nd];
    for _ in 0..100_000 {
        let mut un: Vec<f64> = (0..nu)
            .map(|i| {
                if pinned.is_some_and(|p| p[i]) {
                    u0[i]
                } else {
                    alpha * u0[i] + (1.0 - alpha) * (0..nd).map(|j| n_mat[i][j] * d[j]).sum::<f64>()
                }
            })
            .collect();
        let mut dn: Vec<f64> = (0..nd)
            .map(|j| beta * d0 + (1.0 - beta) * (0..nu).map(|i| m_mat[i][j] * u[i]).sum::<f64>())
            .collect();
        if pinned.is_some() {
            normalize(&mut un);
            normalize(&mut dn);
        }
        let delta = l1(&u, &un) + l1(&d, &dn);
        u = un;
        d = dn;
        if delta < 1e-15 {
            break;
        }
    }
    (u, d)
}

/// HITS on the binarized incidence with L1 normalization per half step.
pub fn dense_hits(g: &Dense, tol: f64) -> (Vec<f64>, Vec<f64>) {
    let (nu, nd) = (g.len(), g[0].len());
    let a: Dense = g
        .iter()
        .map(|r| r.iter().map(|&x| if x > 0.0 { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut u = vec![1.0 / nu as f64; nu];
    let mut d = vec![1.0 / nd as f64; nd];
    for _ in 0..1_000_000 {
        let mut un: Vec<f64> = (0..nu)
            .map(|i| (0..nd).map(|j| a[i][j] * d[j]).sum())
            .collect();
        normalize(&mut un);
        let mut dn: Vec<f64> = (0..nd)
            .map(|j| (0..nu).map(|i| a[i][j] * un[i]).sum())
            .collect();
        normalize(&mut dn);
        let delta = l1(&u, &un) + l1(&d, &dn);
        u = un;
        d = dn;
        if delta < tol {
            break;
        }
    }
    (u, d)
}

/// AUC by comparing every positive with every negative.
pub fn pairwise_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in (0..scores.len()).filter(|&i| positive[i]) {
        for j in (0..scores.len()).filter(|&j| !positive[j]) {
            pairs += 1.0;
            if scores[i] > scores[j] {
                wins += 1.0;
            } else if scores[i] == scores[j] {
                wins += 0.5;
            }
        }
    }
    (pairs > 0.0).then(|| wins / pairs)
}

/// Best F1 over every distinct min-max rescaled score used as threshold.
pub fn exhaustive_f1(scores: &[f64], positive: &[bool]) -> f64 {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r: Vec<f64> = scores
        .iter()
        .map(|s| if hi > lo { (s - lo) / (hi - lo) } else { 0.0 })
        .collect();
    let n_pos = positive.iter().filter(|&&p| p).count() as f64;
    let mut best: f64 = 0.0;
    for &t in &r {
        let tp = r
            .iter()
            .zip(positive)
            .filter(|&(&s, &p)| s >= t && p)
            .count() as f64;
        let pred = r.iter().filter(|&&s| s >= t).count() as f64;
        if tp > 0.0 {
            let precision = tp / pred;
            let recall = tp / n_pos;
            best = best.max(2.0 * precision * recall / (precision + recall));
        }
    }
    best
}

/// TF-IDF vectors by definition: raw count times `ln(|U| / df)`.
pub fn dense_tfidf(g: &Dense) -> Dense {
    let nu = g.len();
    let nd = g[0].len();
    let df: Vec<f64> = (0..nd)
        .map(|j| g.iter().filter(|r| r[j] > 0.0).count() as f64)
        .collect();
    g.iter()
        .map(|r| {
            (0..nd)
                .map(|j| {
                    if r[j] > 0.0 {
                        r[j] * (nu as f64 / df[j]).ln()
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Random simple undirected graph with weights 1..=5, edges listed `u < v`.
pub fn random_undirected(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
) -> (UndirectedWeightedGraph, Dense) {
    let mut w = vec![vec![0.0; n]; n];
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < density {
                let weight = rng.random_range(1..=5) as f64;
                w[u][v] = weight;
                w[v][u] = weight;
                edges.push((u, v, weight));
            }
        }
    }
    (
        UndirectedWeightedGraph::from_edges(ids("n", n), edges).unwrap(),
        w,
    )
}

/// Repeatedly deletes any node with fewer than `k` incident arcs until
/// nothing changes. `arcs` counts each arc once at both endpoints.
pub fn naive_core(n: usize, arcs: &[(usize, usize)], k: usize) -> Vec<bool> {
    let mut alive = vec![true; n];
    loop {
        let mut deg = vec![0usize; n];
        for &(u, v) in arcs {
            if alive[u] && alive[v] {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        let doomed: Vec<usize> = (0..n).filter(|&i| alive[i] && deg[i] < k).collect();
        if doomed.is_empty() {
            return alive;
        }
        for i in doomed {
            alive[i] = false;
        }
    }
}

/// Exact node2vec step distribution at `v` after arriving from `t`,
/// straight from the definition on the dense weight matrix.
pub fn second_order_step(w: &Dense, p: f64, q: f64, t: usize, v: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..w.len())
        .map(|x| {
            if w[v][x] == 0.0 {
                0.0
            } else if x == t {
                w[v][x] / p
            } else if w[t][x] > 0.0 {
                w[v][x]
            } else {
                w[v][x] / q
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|r| r / total).collect()
}

/// Largest absolute gap between empirical `(t, v) → x` frequencies in the
/// corpus and the exact distribution, over every visited state, plus the
/// visit count of the least visited state.
pub fn transition_gap(walks: &[Vec<u32>], w: &Dense, p: f64, q: f64) -> (f64, usize) {
    let n = w.len();
    let mut counts = vec![vec![vec![0usize; n]; n]; n];
    for walk in walks {
        for tri in walk.windows(3) {
            counts[tri[0] as usize][tri[1] as usize][tri[2] as usize] += 1;
        }
    }
    let mut gap = 0.0f64;
    let mut fewest = usize::MAX;
    for t in 0..n {
        for v in 0..n {
            let total: usize = counts[t][v].iter().sum();
            if total == 0 {
                continue;
            }
            fewest = fewest.min(total);
            let exact = second_order_step(w, p, q, t, v);
            for x in 0..n {
                gap = gap.max((counts[t][v][x] as f64 / total as f64 - exact[x]).abs());
            }
        }
    }
    (gap, fewest)
}
