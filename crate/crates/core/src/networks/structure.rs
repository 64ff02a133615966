use super::graph::{induced, Network};
use crate::{Error, Result};

/// k used when exporting the reshare-network core.
pub const PRESET_RESHARE_CORE: usize = 3;
/// k used when exporting the bipartite-network core.
pub const PRESET_BIPARTITE_CORE: usize = 4;
pub const PRESET_BACKBONE_SIGNIFICANCE: f64 = 0.3;

/// Incident arc counts per node; a directed node counts in- plus out-arcs.
fn incidence<G: Network>(g: &G) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.node_count()];
    for (u, v, _) in g.edge_list() {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Core number of every node by bucket peeling (Batagelj–Zaversnik).
pub fn core_numbers<G: Network>(g: &G) -> Vec<usize> {
    let adj = incidence(g);
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in &adj[v] {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// Maximal subgraph in which every node has degree at least `k`.
pub fn k_core<G: Network>(g: &G, k: usize) -> Result<G> {
    let core = core_numbers(g);
    let keep: Vec<bool> = core.iter().map(|&c| c >= k).collect();
    induced(g, &keep, &g.edge_list())
}

/// Disparity-filter p-values of one edge, seen from each endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSignificance {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub source_degree: usize,
    pub target_degree: usize,
    /// `(1 - w / s)^(k - 1)` with the source's strength `s` and degree `k`.
    pub p_source: f64,
    pub p_target: f64,
}

impl EdgeSignificance {
    /// Significant at either endpoint; degree-one endpoints always pass.
    pub fn passes(&self, significance: f64) -> bool {
        self.source_degree == 1
            || self.target_degree == 1
            || self.p_source < significance
            || self.p_target < significance
    }
}

fn disparity_p(weight: f64, strength: f64, degree: usize) -> f64 {
    (1.0 - weight / strength).powi(degree as i32 - 1)
}

/// Directed graphs use out-arcs at the source and in-arcs at the target.
pub fn disparity_pvalues<G: Network>(g: &G) -> Vec<EdgeSignificance> {
    let n = g.node_count();
    let edges = g.edge_list();
    let mut out_deg = vec![0usize; n];
    let mut out_str = vec![0.0f64; n];
    let mut in_deg = vec![0usize; n];
    let mut in_str = vec![0.0f64; n];
    for &(u, v, w) in &edges {
        out_deg[u] += 1;
        out_str[u] += w;
        in_deg[v] += 1;
        in_str[v] += w;
    }
    if !g.is_directed() {
        for i in 0..n {
            out_deg[i] += in_deg[i];
            out_str[i] += in_str[i];
        }
        in_deg.clone_from(&out_deg);
        in_str.clone_from(&out_str);
    }
    edges
        .into_iter()
        .map(|(u, v, w)| EdgeSignificance {
            source: u,
            target: v,
            weight: w,
            source_degree: out_deg[u],
            target_degree: in_deg[v],
            p_source: disparity_p(w, out_str[u], out_deg[u]),
            p_target: disparity_p(w, in_str[v], in_deg[v]),
        })
        .collect()
}

/// Keeps the edges that are significant at either endpoint. Nodes are kept.
pub fn disparity_backbone<G: Network>(g: &G, significance: f64) -> Result<G> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::config(format!(
            "significance {significance} must lie in (0, 1)"
        )));
    }
    let kept = disparity_pvalues(g)
        .into_iter()
        .filter(|e| e.passes(significance))
        .map(|e| (e.source, e.target, e.weight))
        .collect();
    G::from_edge_list(g.nodes().clone(), kept)
}

/// Pearson correlation of endpoint scores over edges whose endpoints are
/// both scored. Undirected edges count in both orientations; weights are
/// ignored. `None` when fewer than two edges qualify or either side has
/// zero variance.
pub fn credibility_assortativity<G: Network>(g: &G, scores: &[Option<f64>]) -> Option<f64> {
    assert_eq!(scores.len(), g.node_count(), "one score slot per node");
    let mut pairs = Vec::new();
    for (u, v, _) in g.edge_list() {
        if let (Some(x), Some(y)) = (scores[u], scores[v]) {
            pairs.push((x, y));
            if !g.is_directed() {
                pairs.push((y, x));
            }
        }
    }
    let m = if g.is_directed() {
        pairs.len()
    } else {
        pairs.len() / 2
    };
    if m < 2 {
        return None;
    }
    let len = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / len;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
