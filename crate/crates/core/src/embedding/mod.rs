//! node2vec account embeddings, KNN ranking, `(p, q)` grid search and PCA.

mod grid;
mod io;
mod knn;
mod pca;
mod sgns;
mod walks;

use serde::{Deserialize, Serialize};

pub use grid::{grid_search_pq, GridCell, GridSearchResult, DEFAULT_PQ_GRID};
pub use io::{
    read_embedding, read_node_index, write_embedding, write_node_index, write_pca_csv, PcaRow,
};
pub use knn::{knn_score, Distance, KnnConfig};
pub use pca::{pca_project_2d, Projection2d};
pub use sgns::train_embeddings;
pub use walks::{generate_biased_walks, WalkCorpus, WalkGraph};

use crate::networks::NodeIndex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Node2vecParams {
    /// Return bias.
    pub p: f64,
    /// In-out bias.
    pub q: f64,
    pub dimension: usize,
    pub window: usize,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// 1 gives bit-reproducible training; more workers train lock-free in
    /// parallel and are not reproducible.
    pub workers: usize,
}

impl Default for Node2vecParams {
    fn default() -> Self {
        Node2vecParams {
            p: 1.0,
            q: 1.0,
            dimension: 128,
            window: 10,
            walks_per_node: 10,
            walk_length: 80,
            epochs: 10,
            negatives: 5,
            learning_rate: 0.025,
            seed: 1,
            workers: 1,
        }
    }
}

impl Node2vecParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.q > 0.0 && self.p.is_finite() && self.q.is_finite()) {
            return Err(Error::config(format!(
                "p = {} and q = {} must be positive",
                self.p, self.q
            )));
        }
        let counts = [
            ("dimension", self.dimension),
            ("window", self.window),
            ("walks_per_node", self.walks_per_node),
            ("walk_length", self.walk_length),
            ("epochs", self.epochs),
            ("workers", self.workers),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::config(format!("{name} must be positive")));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("learning_rate must be positive"));
        }
        Ok(())
    }
}

/// Dense row-major `N × dimension` matrix, one row per graph node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    nodes: NodeIndex,
    dimension: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(nodes: NodeIndex, dimension: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != nodes.len() * dimension {
            return Err(Error::input(format!(
                "embedding has {} values, expected {} × {}",
                data.len(),
                nodes.len(),
                dimension
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("embedding contains non-finite values"));
        }
        Ok(EmbeddingMatrix {
            nodes,
            dimension,
            data,
        })
    }

    pub fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    pub fn rows(&self) -> usize {
        self.nodes.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Row for a node id, if the node is embedded.
    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.nodes.get(id).map(|i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }
}

/// Walks plus SGNS training in one call.
pub fn node2vec<G: WalkGraph + Sync>(g: &G, params: &Node2vecParams) -> Result<EmbeddingMatrix> {
    let corpus = generate_biased_walks(g, params)?;
    train_embeddings(&corpus, g.nodes(), params)
}
