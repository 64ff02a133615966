use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::metrics::{best_f1, mean_std, roc_auc};
use super::report::{EvalReport, FoldResult, ReportStatus, REPORT_SCHEMA_VERSION};
use super::split::kfold_split;
use crate::centrality::{
    bipartite_label_propagation, cocred, hits, locred, pagerank_trust, personalized_pagerank_trust,
    reputation_scaling, trustrank, Algorithm, BipartiteVariant, NetworkKind, PropagationConfig,
    ScoreVector,
};
use crate::embedding::{
    grid_search_pq, knn_score, node2vec, EmbeddingMatrix, KnnConfig, Node2vecParams,
};
use crate::ingest::{CredibilityLabel, LabelSets, PostRecord};
use crate::networks::{
    build_bipartite_network, build_coshare_network, build_reshare_network, BipartiteGraph,
    CoShareGraph, DirectedWeightedGraph, NodeIndex,
};
use crate::{Error, Result};

/// Posts, known labels and the networks derived from the posts. Networks are
/// built on first use.
pub struct Dataset {
    records: Vec<PostRecord>,
    labels: LabelSets,
    reshare: OnceLock<DirectedWeightedGraph>,
    trust: OnceLock<DirectedWeightedGraph>,
    bipartite: OnceLock<BipartiteGraph>,
    coshare: OnceLock<CoShareGraph>,
}

impl Dataset {
    pub fn new(records: Vec<PostRecord>, labels: LabelSets) -> Self {
        Dataset {
            records,
            labels,
            reshare: OnceLock::new(),
            trust: OnceLock::new(),
            bipartite: OnceLock::new(),
            coshare: OnceLock::new(),
        }
    }

    pub fn records(&self) -> &[PostRecord] {
        &self.records
    }

    pub fn labels(&self) -> &LabelSets {
        &self.labels
    }

    pub fn reshare(&self) -> &DirectedWeightedGraph {
        self.reshare
            .get_or_init(|| build_reshare_network(&self.records))
    }

    pub fn trust(&self) -> &DirectedWeightedGraph {
        self.trust.get_or_init(|| self.reshare().transpose())
    }

    pub fn bipartite(&self) -> &BipartiteGraph {
        self.bipartite
            .get_or_init(|| build_bipartite_network(&self.records))
    }

    pub fn coshare(&self) -> &CoShareGraph {
        self.coshare
            .get_or_init(|| build_coshare_network(self.bipartite()))
    }

    /// Account nodes of a network, in score order.
    pub fn accounts(&self, kind: NetworkKind) -> &NodeIndex {
        match kind {
            NetworkKind::Reshare => self.reshare().nodes(),
            NetworkKind::Trust => self.trust().nodes(),
            NetworkKind::Bipartite => self.bipartite().accounts(),
            NetworkKind::CoShare => self.coshare().nodes(),
        }
    }

    /// SHA-256 over a canonical rendering of posts and labels.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.records {
            h.update(r.account_id.as_bytes());
            h.update(b"\t");
            h.update(r.post_id.as_bytes());
            h.update(b"\t");
            h.update(r.domains.join(",").as_bytes());
            h.update(b"\t");
            h.update(r.reshared_from.as_deref().unwrap_or("").as_bytes());
            h.update(b"\n");
        }
        for (tag, set) in [("high", &self.labels.high), ("low", &self.labels.low)] {
            for a in set {
                h.update(format!("{tag}\t{a}\n").as_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub propagation: PropagationConfig,
    pub node2vec: Node2vecParams,
    pub knn: KnnConfig,
    pub folds: usize,
    /// When set, node2vec `(p, q)` is chosen per fold by an inner grid search
    /// over the training accounts.
    pub pq_grid: Option<Vec<f64>>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            propagation: PropagationConfig::default(),
            node2vec: Node2vecParams::default(),
            knn: KnnConfig::default(),
            folds: 5,
            pq_grid: None,
        }
    }
}

/// Scores for the accounts of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AccountScores {
    pub accounts: NodeIndex,
    pub scores: ScoreVector,
}

impl AccountScores {
    /// Suspicion-aligned score per id; ids outside the network get the mean
    /// score of those inside it.
    pub fn suspicion_for(&self, ids: &[&str]) -> (Vec<f64>, usize) {
        let s = self.scores.suspicion();
        let fill = if s.is_empty() {
            0.0
        } else {
            s.iter().sum::<f64>() / s.len() as f64
        };
        let mut missing = 0;
        let out = ids
            .iter()
            .map(|id| match self.accounts.get(id) {
                Some(i) => s[i],
                None => {
                    missing += 1;
                    fill
                }
            })
            .collect();
        (out, missing)
    }
}

fn indices(nodes: &NodeIndex, ids: &std::collections::BTreeSet<String>) -> Vec<usize> {
    ids.iter().filter_map(|a| nodes.get(a)).collect()
}

/// Trains node2vec on the network an embedding algorithm uses.
pub fn embed_network(
    data: &Dataset,
    algorithm: Algorithm,
    params: &Node2vecParams,
) -> Result<EmbeddingMatrix> {
    match algorithm {
        Algorithm::Node2vecReshare => node2vec(data.reshare(), params),
        Algorithm::Node2vecCoShare => node2vec(data.coshare(), params),
        other => Err(Error::config(format!("{other} is not an embedding method"))),
    }
}

fn check_applicable(data: &Dataset, algorithm: Algorithm) -> Result<()> {
    if algorithm.needs_reshares() && data.reshare().edge_count() == 0 {
        return Err(Error::NotApplicable(format!(
            "{algorithm} needs reshare edges and the dataset has none"
        )));
    }
    if algorithm.network() == NetworkKind::Bipartite && data.bipartite().edge_count() == 0 {
        return Err(Error::NotApplicable(format!(
            "{algorithm} needs account-source edges"
        )));
    }
    if algorithm == Algorithm::Node2vecCoShare && data.coshare().edge_count() == 0 {
        return Err(Error::NotApplicable(
            "the co-share network has no edges".into(),
        ));
    }
    Ok(())
}

/// Runs one algorithm with `labels` as the known accounts.
///
/// Embedding methods reuse `embedding` when given; otherwise they train one
/// with `cfg.node2vec`.
pub fn run_algorithm(
    data: &Dataset,
    algorithm: Algorithm,
    labels: &LabelSets,
    cfg: &BenchmarkConfig,
    embedding: Option<&EmbeddingMatrix>,
) -> Result<AccountScores> {
    check_applicable(data, algorithm)?;
    let prop = &cfg.propagation;
    let accounts = data.accounts(algorithm.network()).clone();
    let high = indices(&accounts, &labels.high);
    let low = indices(&accounts, &labels.low);
    let scores = match algorithm {
        Algorithm::PagerankTrust => pagerank_trust(data.trust(), prop)?,
        Algorithm::PprTrust => personalized_pagerank_trust(data.trust(), &high, prop)?,
        Algorithm::TrustRank => trustrank(data.trust(), &high, &low, prop)?,
        Algorithm::LoCred => locred(data.reshare(), &low, prop)?,
        Algorithm::ReputationScaling => {
            let tau = trustrank(data.trust(), &high, &low, prop)?;
            let s = locred(data.reshare(), &low, prop)?;
            reputation_scaling(&tau, &s, prop.reputation_input)?
        }
        Algorithm::Hits => hits(data.bipartite(), prop)?.0,
        Algorithm::CoCred => cocred(data.bipartite(), &high, &low, prop)?.0,
        Algorithm::CoHits | Algorithm::Bgrm | Algorithm::BiRank => {
            let variant = match algorithm {
                Algorithm::CoHits => BipartiteVariant::CoHits,
                Algorithm::Bgrm => BipartiteVariant::Bgrm,
                _ => BipartiteVariant::BiRank,
            };
            bipartite_label_propagation(data.bipartite(), &high, &low, prop, variant)?.0
        }
        Algorithm::Node2vecReshare | Algorithm::Node2vecCoShare => {
            let owned;
            let emb = match embedding {
                Some(e) => e,
                None => {
                    owned = embed_network(data, algorithm, &cfg.node2vec)?;
                    &owned
                }
            };
            let targets: Vec<&str> = accounts.ids().iter().map(String::as_str).collect();
            knn_score(emb, labels, &targets, &cfg.knn, algorithm)?
        }
    };
    Ok(AccountScores { accounts, scores })
}

/// Cross-validates each algorithm over the dataset's known accounts.
///
/// In every fold only training labels reach the algorithm; test accounts keep
/// default scores and metrics use test accounts alone. Folds whose test set
/// has a single class are skipped and counted.
pub fn run_benchmark(
    data: &Dataset,
    algorithms: &[Algorithm],
    cfg: &BenchmarkConfig,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    let known: Vec<String> = data
        .labels()
        .accounts()
        .into_iter()
        .map(str::to_string)
        .collect();
    let splits = kfold_split(&known, cfg.folds, seed)?;
    let fingerprint = data.fingerprint();
    let config = serde_json::to_value(cfg)?;

    let mut reports = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        let mut report = EvalReport {
            schema_version: REPORT_SCHEMA_VERSION,
            algorithm,
            network: algorithm.network(),
            status: ReportStatus::Ok,
            reason: None,
            folds: Vec::new(),
            skipped_folds: 0,
            mean_auc: None,
            std_auc: None,
            mean_f1: None,
            std_f1: None,
            seed,
            dataset_fingerprint: fingerprint.clone(),
            config: config.clone(),
        };
        match evaluate(data, algorithm, cfg, seed, &splits) {
            Ok(folds) => {
                report.skipped_folds = folds.iter().filter(|f| f.auc.is_none()).count();
                let aucs: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
                let f1s: Vec<f64> = folds.iter().filter_map(|f| f.f1).collect();
                (report.mean_auc, report.std_auc) = mean_std(&aucs);
                (report.mean_f1, report.std_f1) = mean_std(&f1s);
                report.folds = folds;
                info!(
                    "{algorithm}: mean AUC {:?}, mean F1 {:?} over {} folds",
                    report.mean_auc,
                    report.mean_f1,
                    aucs.len()
                );
            }
            Err(Error::NotApplicable(reason)) => {
                warn!("{algorithm} skipped: {reason}");
                report.status = ReportStatus::NotApplicable;
                report.reason = Some(reason);
            }
            Err(e) => return Err(e),
        }
        reports.push(report);
    }
    Ok(reports)
}

fn evaluate(
    data: &Dataset,
    algorithm: Algorithm,
    cfg: &BenchmarkConfig,
    seed: u64,
    splits: &[super::FoldSplit],
) -> Result<Vec<FoldResult>> {
    check_applicable(data, algorithm)?;
    // Embeddings do not see labels, so without a grid search one training
    // run serves every fold.
    let mut embeddings: BTreeMap<(u64, u64), EmbeddingMatrix> = BTreeMap::new();
    let key = |p: &Node2vecParams| (p.p.to_bits(), p.q.to_bits());

    let mut folds = Vec::with_capacity(splits.len());
    for split in splits {
        let train = data
            .labels()
            .restrict_to(split.train.iter().map(String::as_str));
        assert!(
            split.test.iter().all(|t| train.label_of(t).is_none()),
            "fold {}: test account leaked into training labels",
            split.fold
        );

        let mut params = cfg.node2vec;
        if algorithm.is_embedding() {
            if let Some(grid) = &cfg.pq_grid {
                let inner_seed = crate::rng::derive_seed(seed, &[split.fold as u64]);
                let found = match algorithm {
                    Algorithm::Node2vecReshare => grid_search_pq(
                        data.reshare(),
                        &train,
                        grid,
                        &params,
                        &cfg.knn,
                        cfg.folds,
                        inner_seed,
                    )?,
                    _ => grid_search_pq(
                        data.coshare(),
                        &train,
                        grid,
                        &params,
                        &cfg.knn,
                        cfg.folds,
                        inner_seed,
                    )?,
                };
                params.p = found.best.p;
                params.q = found.best.q;
            }
            if let Entry::Vacant(slot) = embeddings.entry(key(&params)) {
                slot.insert(embed_network(data, algorithm, &params)?);
            }
        }
        let scored = run_algorithm(data, algorithm, &train, cfg, embeddings.get(&key(&params)))?;

        let test: Vec<&str> = split.test.iter().map(String::as_str).collect();
        let (scores, missing) = scored.suspicion_for(&test);
        let positive: Vec<bool> = test
            .iter()
            .map(|a| data.labels().label_of(a) == Some(CredibilityLabel::Low))
            .collect();
        let auc = roc_auc(&scores, &positive)?;
        let f1 = match auc {
            Some(_) => Some(best_f1(&scores, &positive)?),
            None => {
                warn!(
                    "{algorithm}: fold {} has a single-class test set; skipped",
                    split.fold
                );
                None
            }
        };
        folds.push(FoldResult {
            fold: split.fold,
            test_size: test.len(),
            missing_from_network: missing,
            auc,
            f1: f1.map(|f| f.f1),
            threshold: f1.map(|f| f.threshold),
            p: algorithm.is_embedding().then_some(params.p),
            q: algorithm.is_embedding().then_some(params.q),
        });
    }
    Ok(folds)
}
