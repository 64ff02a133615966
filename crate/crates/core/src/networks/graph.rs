use std::collections::{BTreeMap, HashMap};

use crate::{Error, Result};

/// Bidirectional mapping between string ids and dense node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeIndex {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl NodeIndex {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if lookup.insert(id.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate node id {id:?}")));
            }
        }
        Ok(NodeIndex { ids, lookup })
    }

    /// Builds an index over the sorted, deduplicated ids.
    pub fn from_unsorted<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        ids.sort_unstable();
        ids.dedup();
        NodeIndex::new(ids).expect("deduplicated")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

/// Compressed sparse rows with per-entry weights; columns sorted within a row.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
}

impl Csr {
    /// `entries` must already be merged (no duplicate `(row, col)`).
    pub(crate) fn from_sorted(rows: usize, entries: &BTreeMap<(usize, usize), f64>) -> Self {
        let mut offsets = vec![0usize; rows + 1];
        for &(r, _) in entries.keys() {
            offsets[r + 1] += 1;
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        let (cols, weights) = entries.iter().map(|(&(_, c), &w)| (c, w)).unzip();
        Csr {
            offsets,
            cols,
            weights,
        }
    }

    pub(crate) fn transposed(&self, cols_len: usize) -> Self {
        let entries: BTreeMap<(usize, usize), f64> =
            self.iter().map(|(r, c, w)| ((c, r), w)).collect();
        Csr::from_sorted(cols_len, &entries)
    }

    pub(crate) fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.offsets[r]..self.offsets[r + 1];
        (&self.cols[span.clone()], &self.weights[span])
    }

    pub(crate) fn degree(&self, r: usize) -> usize {
        self.offsets[r + 1] - self.offsets[r]
    }

    pub(crate) fn strength(&self, r: usize) -> f64 {
        self.row(r).1.iter().sum()
    }

    pub(crate) fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn rows(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows()).flat_map(move |r| {
            let (c, w) = self.row(r);
            c.iter().zip(w).map(move |(&c, &w)| (r, c, w))
        })
    }
}

pub(crate) fn merge_edges(
    n: usize,
    edges: impl IntoIterator<Item = (usize, usize, f64)>,
    symmetric: bool,
) -> Result<BTreeMap<(usize, usize), f64>> {
    let mut merged = BTreeMap::new();
    for (u, v, w) in edges {
        if u >= n || v >= n {
            return Err(Error::input(format!(
                "edge ({u}, {v}) out of range for {n} nodes"
            )));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::input(format!(
                "edge ({u}, {v}) has non-positive weight {w}"
            )));
        }
        if u == v {
            continue;
        }
        let key = if symmetric {
            (u.min(v), u.max(v))
        } else {
            (u, v)
        };
        *merged.entry(key).or_insert(0.0) += w;
    }
    Ok(merged)
}

/// Directed graph with positive edge weights and no self-loops.
///
/// Out- and in-adjacency are both kept so that propagation along either
/// direction is a row scan.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedWeightedGraph {
    nodes: NodeIndex,
    out: Csr,
    inc: Csr,
}

impl DirectedWeightedGraph {
    /// Parallel edges are summed; self-loops are dropped.
    pub fn from_edges(
        nodes: NodeIndex,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = nodes.len();
        let merged = merge_edges(n, edges, false)?;
        let out = Csr::from_sorted(n, &merged);
        let inc = out.transposed(n);
        Ok(DirectedWeightedGraph { nodes, out, inc })
    }

    pub fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.nnz()
    }

    pub fn out_neighbors(&self, i: usize) -> (&[usize], &[f64]) {
        self.out.row(i)
    }

    pub fn in_neighbors(&self, i: usize) -> (&[usize], &[f64]) {
        self.inc.row(i)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out.degree(i)
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.inc.degree(i)
    }

    pub fn out_strength(&self, i: usize) -> f64 {
        self.out.strength(i)
    }

    pub fn in_strength(&self, i: usize) -> f64 {
        self.inc.strength(i)
    }

    pub fn total_weight(&self) -> f64 {
        self.out.iter().map(|(_, _, w)| w).sum()
    }

    /// Edges `(source, target, weight)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.out.iter()
    }

    pub fn transpose(&self) -> Self {
        DirectedWeightedGraph {
            nodes: self.nodes.clone(),
            out: self.inc.clone(),
            inc: self.out.clone(),
        }
    }
}

/// Undirected graph with positive edge weights; each edge stored in both rows.
#[derive(Debug, Clone, PartialEq)]
pub struct UndirectedWeightedGraph {
    nodes: NodeIndex,
    adj: Csr,
}

impl UndirectedWeightedGraph {
    /// `(u, v)` and `(v, u)` name the same edge; repeated mentions are summed.
    pub fn from_edges(
        nodes: NodeIndex,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let n = nodes.len();
        let merged = merge_edges(n, edges, true)?;
        let both: BTreeMap<(usize, usize), f64> = merged
            .iter()
            .flat_map(|(&(u, v), &w)| [((u, v), w), ((v, u), w)])
            .collect();
        Ok(UndirectedWeightedGraph {
            nodes,
            adj: Csr::from_sorted(n, &both),
        })
    }

    pub fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.nnz() / 2
    }

    pub fn neighbors(&self, i: usize) -> (&[usize], &[f64]) {
        self.adj.row(i)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj.degree(i)
    }

    pub fn strength(&self, i: usize) -> f64 {
        self.adj.strength(i)
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let (cols, w) = self.adj.row(u);
        cols.binary_search(&v).ok().map(|k| w[k])
    }

    /// Each edge once, as `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().filter(|&(u, v, _)| u < v)
    }
}

/// Read-only view shared by the structural analyses and exporters.
pub trait Network: Sized {
    fn nodes(&self) -> &NodeIndex;
    fn is_directed(&self) -> bool;
    /// Directed graphs list every arc; undirected graphs list each edge once.
    fn edge_list(&self) -> Vec<(usize, usize, f64)>;
    fn from_edge_list(nodes: NodeIndex, edges: Vec<(usize, usize, f64)>) -> Result<Self>;

    fn node_count(&self) -> usize {
        self.nodes().len()
    }
}

impl Network for DirectedWeightedGraph {
    fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    fn is_directed(&self) -> bool {
        true
    }

    fn edge_list(&self) -> Vec<(usize, usize, f64)> {
        self.edges().collect()
    }

    fn from_edge_list(nodes: NodeIndex, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        DirectedWeightedGraph::from_edges(nodes, edges)
    }
}

impl Network for UndirectedWeightedGraph {
    fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    fn is_directed(&self) -> bool {
        false
    }

    fn edge_list(&self) -> Vec<(usize, usize, f64)> {
        self.edges().collect()
    }

    fn from_edge_list(nodes: NodeIndex, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        UndirectedWeightedGraph::from_edges(nodes, edges)
    }
}

/// Subgraph induced by `keep`, re-indexed in the original order.
pub(crate) fn induced<G: Network>(
    g: &G,
    keep: &[bool],
    edges: &[(usize, usize, f64)],
) -> Result<G> {
    let mut remap = vec![usize::MAX; keep.len()];
    let mut ids = Vec::new();
    for (i, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
        remap[i] = ids.len();
        ids.push(g.nodes().id(i).to_string());
    }
    let kept = edges
        .iter()
        .filter(|&&(u, v, _)| keep[u] && keep[v])
        .map(|&(u, v, w)| (remap[u], remap[v], w))
        .collect();
    G::from_edge_list(NodeIndex::new(ids)?, kept)
}
