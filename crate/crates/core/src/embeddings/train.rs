use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_vocab, EmbeddingSpace, TrainConfig, Vocab};
use crate::error::{Error, Result};
use crate::text;

/// Longest token run trained as one unit; longer documents are split.
const MAX_SENTENCE: usize = 1000;
const MIN_ALPHA_FRACTION: f64 = 1e-4;
const UNIGRAM_POWER: f64 = 0.75;
const INIT_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean negative-sampling loss per (word, context) pair, one per epoch.
    pub epoch_losses: Vec<f64>,
    pub vocab_size: usize,
    /// In-vocabulary tokens per epoch before downsampling.
    pub tokens_per_epoch: u64,
}

/// f32 matrix shared between workers without locks. Relaxed atomics keep
/// concurrent updates well-defined; lost updates are tolerated by SGD.
struct SharedMatrix {
    data: Vec<AtomicU32>,
    dim: usize,
}

impl SharedMatrix {
    fn from_values(values: Vec<f32>, dim: usize) -> Self {
        SharedMatrix {
            data: values
                .into_iter()
                .map(|v| AtomicU32::new(v.to_bits()))
                .collect(),
            dim,
        }
    }

    fn load_row(&self, row: usize, buf: &mut [f32]) {
        let start = row * self.dim;
        for (b, a) in buf.iter_mut().zip(&self.data[start..start + self.dim]) {
            *b = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn store_row(&self, row: usize, buf: &[f32]) {
        let start = row * self.dim;
        for (b, a) in buf.iter().zip(&self.data[start..start + self.dim]) {
            a.store(b.to_bits(), Ordering::Relaxed);
        }
    }

    fn into_f64(self) -> Vec<f64> {
        self.data
            .into_iter()
            .map(|a| f32::from_bits(a.into_inner()) as f64)
            .collect()
    }
}

/// Cumulative unigram^0.75 distribution for drawing negative samples.
struct NegativeTable {
    cumulative: Vec<f64>,
}

impl NegativeTable {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(UNIGRAM_POWER);
                acc
            })
            .collect();
        NegativeTable { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let x = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

struct Shared<'a> {
    cfg: &'a TrainConfig,
    input: SharedMatrix,
    output: SharedMatrix,
    negatives: NegativeTable,
    keep_prob: Vec<f64>,
    processed: AtomicU64,
    total_work: f64,
}

#[derive(Default, Clone, Copy)]
struct EpochLoss {
    sum: f64,
    pairs: u64,
}

impl Shared<'_> {
    fn alpha(&self) -> f32 {
        let progress = self.processed.load(Ordering::Relaxed) as f64 / (self.total_work + 1.0);
        let frac = (1.0 - progress).max(MIN_ALPHA_FRACTION);
        (self.cfg.learning_rate * frac) as f32
    }

    fn train_sentence(
        &self,
        sentence: &[u32],
        rng: &mut ChaCha8Rng,
        kept: &mut Vec<u32>,
        bufs: &mut Buffers,
        loss: &mut EpochLoss,
    ) {
        kept.clear();
        for &w in sentence {
            let p = self.keep_prob[w as usize];
            if p >= 1.0 || p >= rng.gen::<f64>() {
                kept.push(w);
            }
        }
        let window = self.cfg.window;
        for pos in 0..kept.len() {
            let alpha = self.alpha();
            let center = kept[pos] as usize;
            let reduced = window - rng.gen_range(0..window);
            let lo = pos.saturating_sub(reduced);
            let hi = (pos + reduced).min(kept.len() - 1);
            for (ctx_pos, &context) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                if ctx_pos == pos {
                    continue;
                }
                self.train_pair(context as usize, center, alpha, rng, bufs, loss);
            }
            self.processed.fetch_add(1, Ordering::Relaxed);
        }
        // Downsampled tokens still count towards the learning-rate schedule.
        let skipped = (sentence.len() - kept.len()) as u64;
        self.processed.fetch_add(skipped, Ordering::Relaxed);
    }

    fn train_pair(
        &self,
        input: usize,
        target: usize,
        alpha: f32,
        rng: &mut ChaCha8Rng,
        bufs: &mut Buffers,
        loss: &mut EpochLoss,
    ) {
        let Buffers {
            input_row,
            output_row,
            grad,
        } = bufs;
        self.input.load_row(input, input_row);
        grad.iter_mut().for_each(|g| *g = 0.0);
        for d in 0..=self.cfg.negatives {
            let (out, label) = if d == 0 {
                (target, 1.0f32)
            } else {
                let neg = self.negatives.sample(rng);
                if neg == target {
                    continue;
                }
                (neg, 0.0f32)
            };
            self.output.load_row(out, output_row);
            let f: f32 = input_row
                .iter()
                .zip(output_row.iter())
                .map(|(a, b)| a * b)
                .sum();
            loss.sum += if label == 1.0 {
                softplus(-(f as f64))
            } else {
                softplus(f as f64)
            };
            let g = (label - sigmoid(f)) * alpha;
            for ((e, o), i) in grad
                .iter_mut()
                .zip(output_row.iter_mut())
                .zip(input_row.iter())
            {
                *e += g * *o;
                *o += g * *i;
            }
            self.output.store_row(out, output_row);
        }
        loss.pairs += 1;
        for (i, e) in input_row.iter_mut().zip(grad.iter()) {
            *i += *e;
        }
        self.input.store_row(input, input_row);
    }
}

struct Buffers {
    input_row: Vec<f32>,
    output_row: Vec<f32>,
    grad: Vec<f32>,
}

impl Buffers {
    fn new(dim: usize) -> Self {
        Buffers {
            input_row: vec![0.0; dim],
            output_row: vec![0.0; dim],
            grad: vec![0.0; dim],
        }
    }
}

fn sentences(documents: &[&str], vocab: &Vocab) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for doc in documents {
        let mut current = Vec::new();
        text::for_each_token(doc, |t| {
            if let Some(i) = vocab.index_of(t) {
                current.push(i as u32);
                if current.len() == MAX_SENTENCE {
                    out.push(std::mem::take(&mut current));
                }
            }
        });
        if !current.is_empty() {
            out.push(current);
        }
    }
    out
}

fn keep_probabilities(vocab: &Vocab, threshold: f64) -> Vec<f64> {
    let total = vocab.retained_tokens() as f64;
    if threshold <= 0.0 {
        return vec![1.0; vocab.len()];
    }
    let t = threshold * total;
    vocab
        .counts()
        .iter()
        .map(|&c| {
            let c = c as f64;
            ((c / t).sqrt() + 1.0) * t / c
        })
        .collect()
}

/// Trains on a single block of text.
pub fn train(
    corpus_text: &str,
    cfg: &TrainConfig,
    corpus_name: &str,
) -> Result<(EmbeddingSpace, TrainReport)> {
    train_documents(&[corpus_text], cfg, corpus_name)
}

/// Trains skip-gram vectors with negative sampling over `documents`.
///
/// Context windows never cross document boundaries. With `workers == 1` the
/// result depends only on the documents and the config.
pub fn train_documents(
    documents: &[&str],
    cfg: &TrainConfig,
    corpus_name: &str,
) -> Result<(EmbeddingSpace, TrainReport)> {
    cfg.validate()?;
    let vocab = build_vocab(documents.iter().copied(), cfg.min_count)?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocab(cfg.min_count));
    }
    let sentences = sentences(documents, &vocab);
    let tokens_per_epoch: u64 = sentences.iter().map(|s| s.len() as u64).sum();

    let dim = cfg.dim;
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_rng.set_stream(INIT_STREAM);
    let init: Vec<f32> = (0..vocab.len() * dim)
        .map(|_| (init_rng.gen::<f32>() - 0.5) / dim as f32)
        .collect();

    let shared = Shared {
        cfg,
        input: SharedMatrix::from_values(init, dim),
        output: SharedMatrix::from_values(vec![0.0; vocab.len() * dim], dim),
        negatives: NegativeTable::new(vocab.counts()),
        keep_prob: keep_probabilities(&vocab, cfg.subsample_threshold),
        processed: AtomicU64::new(0),
        total_work: (tokens_per_epoch * cfg.epochs as u64) as f64,
    };

    let workers = cfg.workers.min(sentences.len().max(1));
    let mut rngs: Vec<ChaCha8Rng> = (0..workers)
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(w as u64);
            rng
        })
        .collect();

    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let losses: Vec<EpochLoss> = if workers == 1 {
            vec![run_shard(&shared, &sentences, 0, 1, &mut rngs[0])]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = rngs
                    .iter_mut()
                    .enumerate()
                    .map(|(w, rng)| {
                        let shared = &shared;
                        let sentences = &sentences;
                        scope.spawn(move || run_shard(shared, sentences, w, workers, rng))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect()
            })
        };
        let (sum, pairs) = losses
            .iter()
            .fold((0.0, 0u64), |(s, p), l| (s + l.sum, p + l.pairs));
        let mean = if pairs == 0 { 0.0 } else { sum / pairs as f64 };
        if !mean.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        epoch_losses.push(mean);
    }

    let Shared { input, .. } = shared;
    let vectors = input.into_f64();
    if vectors.iter().any(|v| !v.is_finite()) {
        return Err(Error::Diverged {
            epoch: cfg.epochs.saturating_sub(1),
        });
    }
    let report = TrainReport {
        epoch_losses,
        vocab_size: vocab.len(),
        tokens_per_epoch,
    };
    let space = EmbeddingSpace::new(
        corpus_name,
        cfg.seed,
        cfg.clone(),
        vocab.words().to_vec(),
        dim,
        vectors,
    )?;
    Ok((space, report))
}

fn run_shard(
    shared: &Shared<'_>,
    sentences: &[Vec<u32>],
    worker: usize,
    workers: usize,
    rng: &mut ChaCha8Rng,
) -> EpochLoss {
    let mut bufs = Buffers::new(shared.cfg.dim);
    let mut kept = Vec::with_capacity(MAX_SENTENCE);
    let mut loss = EpochLoss::default();
    for sentence in sentences.iter().skip(worker).step_by(workers) {
        shared.train_sentence(sentence, rng, &mut kept, &mut bufs, &mut loss);
    }
    loss
}
