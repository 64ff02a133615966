use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::Node2vecParams;
use crate::networks::{DirectedWeightedGraph, NodeIndex, UndirectedWeightedGraph};
use crate::rng;
use crate::{Error, Result};

/// A graph that random walks can traverse. Directed graphs are walked
/// along edge direction.
pub trait WalkGraph {
    fn nodes(&self) -> &NodeIndex;
    /// Sorted successor indices and the matching edge weights.
    fn successors(&self, i: usize) -> (&[usize], &[f64]);
    fn edge_count(&self) -> usize;

    fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors(from).0.binary_search(&to).is_ok()
    }
}

impl WalkGraph for DirectedWeightedGraph {
    fn nodes(&self) -> &NodeIndex {
        DirectedWeightedGraph::nodes(self)
    }

    fn successors(&self, i: usize) -> (&[usize], &[f64]) {
        self.out_neighbors(i)
    }

    fn edge_count(&self) -> usize {
        DirectedWeightedGraph::edge_count(self)
    }
}

impl WalkGraph for UndirectedWeightedGraph {
    fn nodes(&self) -> &NodeIndex {
        UndirectedWeightedGraph::nodes(self)
    }

    fn successors(&self, i: usize) -> (&[usize], &[f64]) {
        self.neighbors(i)
    }

    fn edge_count(&self) -> usize {
        UndirectedWeightedGraph::edge_count(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    /// `walks_per_node` rounds; within a round, one walk per node in a
    /// seeded shuffled order.
    pub walks: Vec<Vec<u32>>,
    pub node_count: usize,
}

impl WalkCorpus {
    pub fn token_count(&self) -> usize {
        self.walks.iter().map(Vec::len).sum()
    }
}

/// Samples an index proportional to `weights` by inverse CDF.
fn sample_weighted<R: Rng>(rng: &mut R, cumulative: &[f64]) -> usize {
    let total = *cumulative.last().expect("non-empty");
    let r = rng.random::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= r)
        .min(cumulative.len() - 1)
}

struct Walker<'a, G> {
    g: &'a G,
    /// Per-node prefix sums of outgoing weights for first-order steps.
    cumulative: Vec<Vec<f64>>,
    inv_p: f64,
    inv_q: f64,
    first_order: bool,
}

impl<'a, G: WalkGraph> Walker<'a, G> {
    fn new(g: &'a G, p: f64, q: f64) -> Self {
        let cumulative = (0..g.nodes().len())
            .map(|i| {
                g.successors(i)
                    .1
                    .iter()
                    .scan(0.0, |acc, &w| {
                        *acc += w;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        Walker {
            g,
            cumulative,
            inv_p: 1.0 / p,
            inv_q: 1.0 / q,
            first_order: p == 1.0 && q == 1.0,
        }
    }

    fn walk<R: Rng>(
        &self,
        start: usize,
        length: usize,
        rng: &mut R,
        scratch: &mut Vec<f64>,
    ) -> Vec<u32> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start as u32);
        let mut prev: Option<usize> = None;
        let mut cur = start;
        while walk.len() < length {
            let (succ, weights) = self.g.successors(cur);
            if succ.is_empty() {
                break;
            }
            let next = match prev {
                Some(t) if !self.first_order => {
                    scratch.clear();
                    let mut acc = 0.0;
                    for (&x, &w) in succ.iter().zip(weights) {
                        acc += w * self.bias(t, x);
                        scratch.push(acc);
                    }
                    succ[sample_weighted(rng, scratch)]
                }
                _ => succ[sample_weighted(rng, &self.cumulative[cur])],
            };
            walk.push(next as u32);
            prev = Some(cur);
            cur = next;
        }
        walk
    }

    fn bias(&self, prev: usize, x: usize) -> f64 {
        if x == prev {
            self.inv_p
        } else if self.g.has_edge(prev, x) {
            1.0
        } else {
            self.inv_q
        }
    }
}

/// Second-order biased walks: from `v`, having arrived from `t`, the
/// unnormalized weight of moving to `x` is `w(v, x)` times `1/p` if
/// `x = t`, 1 if `t → x` is an edge, and `1/q` otherwise. Walks stop early
/// at nodes without successors.
///
/// Each walk draws from its own stream seeded by `(seed, node, round)`, so
/// the corpus does not depend on the thread count.
pub fn generate_biased_walks<G: WalkGraph + Sync>(
    g: &G,
    params: &Node2vecParams,
) -> Result<WalkCorpus> {
    params.validate()?;
    if g.edge_count() == 0 {
        return Err(Error::NotApplicable(
            "random walks need a graph with at least one edge".into(),
        ));
    }
    let n = g.nodes().len();
    let walker = Walker::new(g, params.p, params.q);
    let mut walks = Vec::with_capacity(n * params.walks_per_node);
    for round in 0..params.walks_per_node {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::stream(params.seed, &[0x5748_4c4b, round as u64]));
        let batch: Vec<Vec<u32>> = order
            .par_iter()
            .map_init(Vec::new, |scratch, &start| {
                let mut r = rng::stream(params.seed, &[start as u64, round as u64]);
                walker.walk(start, params.walk_length, &mut r, scratch)
            })
            .collect();
        walks.extend(batch);
    }
    Ok(WalkCorpus {
        walks,
        node_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> NodeIndex {
        NodeIndex::new((0..n).map(|i| format!("n{i}")).collect()).unwrap()
    }

    #[test]
    fn corpus_shape_and_adjacency() {
        let g = DirectedWeightedGraph::from_edges(
            ids(4),
            [(0, 1, 1.0), (1, 2, 2.0), (2, 0, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let params = Node2vecParams {
            walks_per_node: 3,
            walk_length: 12,
            p: 0.5,
            q: 2.0,
            ..Default::default()
        };
        let c = generate_biased_walks(&g, &params).unwrap();
        assert_eq!(c.walks.len(), 12);
        for round in c.walks.chunks(4) {
            let mut starts: Vec<u32> = round.iter().map(|w| w[0]).collect();
            starts.sort_unstable();
            assert_eq!(starts, vec![0, 1, 2, 3]);
        }
        for w in &c.walks {
            for pair in w.windows(2) {
                assert!(g.has_edge(pair[0] as usize, pair[1] as usize));
            }
            // Node 3 has no successors, so walks end there.
            if let Some(pos) = w.iter().position(|&x| x == 3) {
                assert_eq!(pos, w.len() - 1);
            }
        }
    }

    #[test]
    fn walks_are_seed_deterministic() {
        let g = UndirectedWeightedGraph::from_edges(
            ids(5),
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 0, 1.0),
            ],
        )
        .unwrap();
        let params = Node2vecParams {
            walks_per_node: 2,
            walk_length: 20,
            p: 4.0,
            q: 0.25,
            seed: 9,
            ..Default::default()
        };
        assert_eq!(
            generate_biased_walks(&g, &params).unwrap(),
            generate_biased_walks(&g, &params).unwrap()
        );
        let other = Node2vecParams { seed: 10, ..params };
        assert_ne!(
            generate_biased_walks(&g, &params).unwrap(),
            generate_biased_walks(&g, &other).unwrap()
        );
    }

    #[test]
    fn edgeless_graph_is_rejected() {
        let g = DirectedWeightedGraph::from_edges(ids(2), []).unwrap();
        assert!(generate_biased_walks(&g, &Node2vecParams::default()).is_err());
    }
}
