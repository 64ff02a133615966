//! Skip-gram with negative sampling over a walk corpus.

use std::cell::UnsafeCell;
use std::sync::atomic::{AtomicUsize, Ordering};

use log::warn;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::walks::WalkCorpus;
use super::{EmbeddingMatrix, Node2vecParams};
use crate::networks::NodeIndex;
use crate::rng;
use crate::{Error, Result};

const MAX_EXP: f32 = 6.0;

/// Node ids drawn with probability proportional to `count^0.75`.
struct NegativeSampler {
    alias: WeightedAliasIndex<f64>,
}

impl NegativeSampler {
    fn new(counts: &[u64]) -> Result<Self> {
        let weights = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::input(format!("cannot build negative sampler: {e}")))?;
        Ok(NegativeSampler { alias })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        self.alias.sample(rng)
    }
}

/// Parameter matrix shared between training workers.
///
/// Workers update rows without locks. With a single worker access is
/// exclusive; with several, concurrent row updates may interleave, which
/// asynchronous SGD tolerates at the cost of bit-reproducibility.
struct SharedMatrix {
    data: UnsafeCell<Vec<f32>>,
    dim: usize,
}

unsafe impl Sync for SharedMatrix {}

impl SharedMatrix {
    fn new(data: Vec<f32>, dim: usize) -> Self {
        SharedMatrix {
            data: UnsafeCell::new(data),
            dim,
        }
    }

    /// # Safety
    /// The returned slice must not outlive the current SGD step, and no
    /// other live reference may point at the same row within this worker.
    #[allow(clippy::mut_from_ref)]
    unsafe fn row(&self, i: usize) -> &mut [f32] {
        let base = (*self.data.get()).as_mut_ptr().add(i * self.dim);
        std::slice::from_raw_parts_mut(base, self.dim)
    }

    fn into_inner(self) -> Vec<f32> {
        self.data.into_inner()
    }
}

#[inline]
fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 16];
    let (ca, cb) = (a.chunks_exact(16), b.chunks_exact(16));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..16 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f32 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    acc.iter().sum::<f32>() + tail
}

/// `y += alpha * x`
#[inline]
fn axpy(y: &mut [f32], alpha: f32, x: &[f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

struct Trainer<'a> {
    params: &'a Node2vecParams,
    syn0: &'a SharedMatrix,
    syn1: &'a SharedMatrix,
    negatives: &'a NegativeSampler,
    processed: &'a AtomicUsize,
    total_tokens: usize,
}

impl Trainer<'_> {
    fn learning_rate(&self) -> f32 {
        let lr0 = self.params.learning_rate;
        let done = self.processed.load(Ordering::Relaxed) as f64;
        let lr = lr0 * (1.0 - done / (self.total_tokens as f64 + 1.0));
        lr.max(lr0 * 1e-4) as f32
    }

    fn train_walks(&self, walks: &[Vec<u32>], rng: &mut ChaCha8Rng) {
        let dim = self.params.dimension;
        let mut grad = vec![0.0f32; dim];
        for walk in walks {
            let lr = self.learning_rate();
            for (pos, &center) in walk.iter().enumerate() {
                let shrink = rng.random_range(0..self.params.window);
                let span = self.params.window - shrink;
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(walk.len() - 1);
                for (c, &context) in walk.iter().enumerate().take(hi + 1).skip(lo) {
                    if c == pos {
                        continue;
                    }
                    self.pair(context as usize, center as usize, lr, &mut grad, rng);
                }
            }
            self.processed.fetch_add(walk.len(), Ordering::Relaxed);
        }
    }

    /// One positive and `negatives` negative updates for the input row of
    /// `context` against the output row of `center`.
    fn pair(&self, context: usize, center: usize, lr: f32, grad: &mut [f32], rng: &mut ChaCha8Rng) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        // SAFETY: syn0 and syn1 are distinct matrices; each row reference
        // below is dropped before the next one to the same matrix is taken.
        let input = unsafe { self.syn0.row(context) };
        for k in 0..=self.params.negatives {
            let (target, label) = if k == 0 {
                (center, 1.0f32)
            } else {
                let t = self.negatives.sample(rng);
                if t == center {
                    continue;
                }
                (t, 0.0)
            };
            let output = unsafe { self.syn1.row(target) };
            let f = dot(input, output);
            let g = if f > MAX_EXP {
                (label - 1.0) * lr
            } else if f < -MAX_EXP {
                label * lr
            } else {
                (label - 1.0 / (1.0 + (-f).exp())) * lr
            };
            axpy(grad, g, output);
            axpy(output, g, input);
        }
        axpy(input, 1.0, grad);
    }
}

/// Trains input vectors with skip-gram negative sampling.
///
/// Negatives follow the unigram distribution raised to 0.75; the learning
/// rate decays linearly over all epochs. Nodes that never occur in the
/// corpus get zero rows.
pub fn train_embeddings(
    corpus: &WalkCorpus,
    nodes: &NodeIndex,
    params: &Node2vecParams,
) -> Result<EmbeddingMatrix> {
    params.validate()?;
    if corpus.walks.is_empty() || corpus.token_count() == 0 {
        return Err(Error::input("cannot train on an empty walk corpus"));
    }
    let n = nodes.len();
    let dim = params.dimension;
    let mut counts = vec![0u64; n];
    for &t in corpus.walks.iter().flatten() {
        let t = t as usize;
        if t >= n {
            return Err(Error::input(format!("walk token {t} outside {n} nodes")));
        }
        counts[t] += 1;
    }
    let absent = counts.iter().filter(|&&c| c == 0).count();
    if absent > 0 {
        warn!("{absent} nodes never occur in the walk corpus; their embeddings are zero");
    }

    let mut init_rng = rng::stream(params.seed, &[0x1A17]);
    let syn0: Vec<f32> = counts
        .iter()
        .flat_map(|&c| {
            let row: Vec<f32> = (0..dim)
                .map(|_| {
                    if c == 0 {
                        0.0
                    } else {
                        (init_rng.random::<f32>() - 0.5) / dim as f32
                    }
                })
                .collect();
            row
        })
        .collect();
    let syn0 = SharedMatrix::new(syn0, dim);
    let syn1 = SharedMatrix::new(vec![0.0; n * dim], dim);
    let negatives = NegativeSampler::new(&counts)?;
    let processed = AtomicUsize::new(0);
    let trainer = Trainer {
        params,
        syn0: &syn0,
        syn1: &syn1,
        negatives: &negatives,
        processed: &processed,
        total_tokens: corpus.token_count() * params.epochs,
    };

    let workers = params.workers.min(corpus.walks.len());
    for epoch in 0..params.epochs {
        if workers <= 1 {
            let mut r = rng::stream(params.seed, &[0x5347_4e53, epoch as u64, 0]);
            trainer.train_walks(&corpus.walks, &mut r);
        } else {
            let chunk = corpus.walks.len().div_ceil(workers);
            rayon::scope(|s| {
                for (w, walks) in corpus.walks.chunks(chunk).enumerate() {
                    let trainer = &trainer;
                    s.spawn(move |_| {
                        let mut r =
                            rng::stream(params.seed, &[0x5347_4e53, epoch as u64, w as u64]);
                        trainer.train_walks(walks, &mut r);
                    });
                }
            });
        }
    }
    EmbeddingMatrix::new(nodes.clone(), dim, syn0.into_inner())
}
