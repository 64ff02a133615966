//! Reshare, trust, bipartite and co-share networks plus structural analyses.

mod export;
mod graph;
mod structure;

use std::collections::{BTreeMap, HashMap};

pub use export::{write_edges_csv, write_nodes_csv, NodeAttributes};
pub use graph::{DirectedWeightedGraph, Network, NodeIndex, UndirectedWeightedGraph};
pub use structure::{
    core_numbers, credibility_assortativity, disparity_backbone, disparity_pvalues, k_core,
    EdgeSignificance, PRESET_BACKBONE_SIGNIFICANCE, PRESET_BIPARTITE_CORE, PRESET_RESHARE_CORE,
};

use crate::ingest::PostRecord;
use crate::Result;
use graph::Csr;

/// Co-share network: accounts joined by the cosine similarity of their
/// TF-IDF domain vectors.
pub type CoShareGraph = UndirectedWeightedGraph;

/// Edge `i → j` weighted by how many times `j` reshared `i`.
///
/// Every account that posts or is reshared becomes a node; self-reshares
/// are dropped.
pub fn build_reshare_network(records: &[PostRecord]) -> DirectedWeightedGraph {
    let nodes =
        NodeIndex::from_unsorted(records.iter().flat_map(|r| {
            std::iter::once(r.account_id.as_str()).chain(r.reshared_from.as_deref())
        }));
    let edges: Vec<_> = records
        .iter()
        .filter_map(|r| {
            let src = r.reshared_from.as_deref()?;
            Some((nodes.get(src)?, nodes.get(&r.account_id)?, 1.0))
        })
        .collect();
    DirectedWeightedGraph::from_edges(nodes, edges).expect("indices come from the node set")
}

/// Trust network: the transpose of the reshare network.
pub fn transpose_graph(g: &DirectedWeightedGraph) -> DirectedWeightedGraph {
    g.transpose()
}

/// Weighted account × source incidence.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    accounts: NodeIndex,
    sources: NodeIndex,
    by_account: Csr,
    by_source: Csr,
}

impl BipartiteGraph {
    /// `edges` are `(account, source, weight)`; repeated pairs are summed.
    pub fn from_edges(
        accounts: NodeIndex,
        sources: NodeIndex,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let (nu, nd) = (accounts.len(), sources.len());
        let mut merged = BTreeMap::new();
        for (i, j, w) in edges {
            if i >= nu || j >= nd {
                return Err(crate::Error::input(format!(
                    "bipartite edge ({i}, {j}) out of range"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(crate::Error::input(format!(
                    "bipartite edge ({i}, {j}) has weight {w}"
                )));
            }
            *merged.entry((i, j)).or_insert(0.0) += w;
        }
        let by_account = Csr::from_sorted(nu, &merged);
        let by_source = by_account.transposed(nd);
        Ok(BipartiteGraph {
            accounts,
            sources,
            by_account,
            by_source,
        })
    }

    pub fn accounts(&self) -> &NodeIndex {
        &self.accounts
    }

    pub fn sources(&self) -> &NodeIndex {
        &self.sources
    }

    pub fn account_count(&self) -> usize {
        self.accounts.len()
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn edge_count(&self) -> usize {
        self.by_account.nnz()
    }

    /// Sources shared by account `i` with their share counts.
    pub fn account_row(&self, i: usize) -> (&[usize], &[f64]) {
        self.by_account.row(i)
    }

    /// Accounts sharing source `j` with their share counts.
    pub fn source_row(&self, j: usize) -> (&[usize], &[f64]) {
        self.by_source.row(j)
    }

    pub fn account_strength(&self, i: usize) -> f64 {
        self.by_account.strength(i)
    }

    pub fn source_strength(&self, j: usize) -> f64 {
        self.by_source.strength(j)
    }

    pub fn account_degree(&self, i: usize) -> usize {
        self.by_account.degree(i)
    }

    pub fn source_degree(&self, j: usize) -> usize {
        self.by_source.degree(j)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.by_account.iter()
    }

    /// Flattens both partitions into one undirected graph. Account ids are
    /// prefixed `account:` and source ids `source:` so they cannot collide.
    pub fn to_undirected(&self) -> UndirectedWeightedGraph {
        let nu = self.account_count();
        let ids = self
            .accounts
            .ids()
            .iter()
            .map(|a| format!("account:{a}"))
            .chain(self.sources.ids().iter().map(|d| format!("source:{d}")))
            .collect();
        let edges = self.edges().map(|(i, j, w)| (i, nu + j, w));
        UndirectedWeightedGraph::from_edges(
            NodeIndex::new(ids).expect("prefixed ids are unique"),
            edges,
        )
        .expect("valid bipartite edges")
    }
}

/// `G_ij` = number of posts by account `i` that link to domain `j`.
pub fn build_bipartite_network(records: &[PostRecord]) -> BipartiteGraph {
    let accounts = NodeIndex::from_unsorted(records.iter().map(|r| r.account_id.as_str()));
    let sources = NodeIndex::from_unsorted(
        records
            .iter()
            .flat_map(|r| r.domains.iter().map(String::as_str)),
    );
    let edges: Vec<_> = records
        .iter()
        .flat_map(|r| {
            let i = accounts.get(&r.account_id).expect("account indexed");
            let sources = &sources;
            r.domains
                .iter()
                .map(move |d| (i, sources.get(d).expect("domain indexed"), 1.0))
        })
        .collect();
    BipartiteGraph::from_edges(accounts, sources, edges).expect("indices come from the node sets")
}

/// Per-account TF-IDF rows: raw share counts times `ln(|U| / df)`.
pub fn tfidf_vectors(b: &BipartiteGraph) -> Vec<Vec<(usize, f64)>> {
    let n = b.account_count() as f64;
    let idf: Vec<f64> = (0..b.source_count())
        .map(|j| (n / b.source_degree(j) as f64).ln())
        .collect();
    (0..b.account_count())
        .map(|i| {
            let (cols, w) = b.account_row(i);
            cols.iter()
                .zip(w)
                .map(|(&j, &c)| (j, c * idf[j]))
                .filter(|&(_, v)| v > 0.0)
                .collect()
        })
        .collect()
}

/// Projects the bipartite graph onto accounts.
///
/// Only accounts with at least one positive-similarity partner appear.
pub fn build_coshare_network(b: &BipartiteGraph) -> CoShareGraph {
    let vectors = tfidf_vectors(b);
    let norms: Vec<f64> = vectors
        .iter()
        .map(|v| v.iter().map(|&(_, x)| x * x).sum::<f64>().sqrt())
        .collect();
    let mut postings: Vec<Vec<(usize, f64)>> = vec![Vec::new(); b.source_count()];
    for (i, v) in vectors.iter().enumerate() {
        for &(j, x) in v {
            postings[j].push((i, x));
        }
    }

    let nu = b.account_count();
    let mut acc = vec![0.0f64; nu];
    let mut touched = Vec::new();
    let mut pairs = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        for &(j, x) in v {
            for &(k, y) in &postings[j] {
                if k > i {
                    if acc[k] == 0.0 {
                        touched.push(k);
                    }
                    acc[k] += x * y;
                }
            }
        }
        touched.sort_unstable();
        for &k in &touched {
            let cos = (acc[k] / (norms[i] * norms[k])).min(1.0);
            if cos > 0.0 {
                pairs.push((i, k, cos));
            }
            acc[k] = 0.0;
        }
        touched.clear();
    }

    let mut present = vec![false; nu];
    for &(i, k, _) in &pairs {
        present[i] = true;
        present[k] = true;
    }
    let mut remap = HashMap::new();
    let mut ids = Vec::new();
    for i in (0..nu).filter(|&i| present[i]) {
        remap.insert(i, ids.len());
        ids.push(b.accounts().id(i).to_string());
    }
    let edges = pairs.into_iter().map(|(i, k, w)| (remap[&i], remap[&k], w));
    UndirectedWeightedGraph::from_edges(NodeIndex::new(ids).expect("account ids unique"), edges)
        .expect("cosines lie in (0, 1]")
}
