//! Credibility inference on news-sharing networks.
//!
//! The crate turns post records into reshare, trust, bipartite account-source
//! and co-share networks, then scores accounts with label-propagation and
//! centrality methods or with node2vec embeddings plus a KNN classifier.
//! The [`eval`] module holds the cross-validation harness and a planted
//! two-block generator used to check homophily-driven behaviour.

pub mod centrality;
pub mod embedding;
mod error;
pub mod eval;
pub mod ingest;
pub mod networks;
pub(crate) mod rng;

pub use centrality::{Polarity, PropagationConfig, ScoreVector};
pub use embedding::{EmbeddingMatrix, KnnConfig, Node2vecParams};
pub use error::{Error, Result};
pub use eval::{EvalReport, FoldSplit, SyntheticConfig};
pub use ingest::{AccountCredibility, CredibilityLabel, LabelSets, PostRecord, SourceRating};
pub use networks::{BipartiteGraph, CoShareGraph, DirectedWeightedGraph, UndirectedWeightedGraph};
