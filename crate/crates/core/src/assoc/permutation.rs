use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How partitions are drawn for the permutation test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Enumerate every partition when that is affordable, sample otherwise.
    #[default]
    Auto,
    /// Always sample. Draws are distinct while `n_perm` is below the number
    /// of partitions and independent (with replacement) beyond it.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PermutationConfig {
    pub n_perm: usize,
    pub seed: u64,
    pub sampling: Sampling,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig {
            n_perm: 1000,
            seed: 0,
            sampling: Sampling::Auto,
        }
    }
}

impl PermutationConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        PermutationConfig { seed, ..self }
    }
}

/// Outcome of comparing permuted statistics against the observed one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tail {
    pub exceeding: u64,
    pub used: u64,
    pub exact: bool,
}

impl Tail {
    pub fn p_value(&self) -> f64 {
        if self.used == 0 {
            return 1.0;
        }
        self.exceeding as f64 / self.used as f64
    }

    /// `(count + 1) / (n + 1)`, never zero.
    pub fn p_value_smoothed(&self) -> f64 {
        (self.exceeding as f64 + 1.0) / (self.used as f64 + 1.0)
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step.
        match acc.checked_mul(n as u128 - k as u128 + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

/// Membership masks of size-`half` subsets of `0..2*half`. A mask marks the
/// positions assigned to the first group.
///
/// All `C(2h, h)` subsets are enumerated when half that count fits in
/// `n_perm`, i.e. when the number of unordered partitions is affordable.
pub fn equal_partitions(half: usize, cfg: &PermutationConfig) -> (Vec<Vec<bool>>, bool) {
    let len = 2 * half;
    let total = binomial(len as u64, half as u64);
    if cfg.sampling == Sampling::Auto && total / 2 <= cfg.n_perm as u128 {
        return (combinations(len, half), true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let mut mask = vec![false; len];
        for i in index::sample(rng, len, half) {
            mask[i] = true;
        }
        mask
    };
    (sample_masks(total, cfg.n_perm, &mut rng, draw), false)
}

/// Sign-flip masks over `len` items; `true` swaps the item's two sides.
pub fn sign_flips(len: usize, cfg: &PermutationConfig) -> (Vec<Vec<bool>>, bool) {
    let total = if len >= 128 { u128::MAX } else { 1u128 << len };
    if cfg.sampling == Sampling::Auto && total <= cfg.n_perm as u128 {
        let masks = (0..total as u64)
            .map(|bits| (0..len).map(|i| bits >> i & 1 == 1).collect())
            .collect();
        return (masks, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draw = |rng: &mut ChaCha8Rng| (0..len).map(|_| rng.gen::<bool>()).collect();
    (sample_masks(total, cfg.n_perm, &mut rng, draw), false)
}

fn sample_masks(
    total: u128,
    n: usize,
    rng: &mut ChaCha8Rng,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Vec<bool>,
) -> Vec<Vec<bool>> {
    let distinct = (n as u128) < total;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let mask = draw(rng);
        if distinct && !seen.insert(mask.clone()) {
            continue;
        }
        out.push(mask);
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut mask = vec![false; n];
        for &i in &idx {
            mask[i] = true;
        }
        out.push(mask);
        // Advance to the next combination in lexicographic order.
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `sum(values in group) - sum(values outside)`, both summed in index order.
pub fn split_difference(values: &[f64], mask: &[bool]) -> f64 {
    let (mut inside, mut outside) = (0.0, 0.0);
    for (v, &m) in values.iter().zip(mask) {
        if m {
            inside += v;
        } else {
            outside += v;
        }
    }
    inside - outside
}

/// Sum of `values`, each negated where the mask is set.
pub fn flipped_sum(values: &[f64], mask: &[bool]) -> f64 {
    values
        .iter()
        .zip(mask)
        .map(|(v, &m)| if m { -v } else { *v })
        .sum()
}

/// Counts masks whose statistic strictly exceeds `observed`.
pub fn count_exceeding<F>(masks: &[Vec<bool>], exact: bool, observed: f64, stat: F) -> Tail
where
    F: Fn(&[bool]) -> f64 + Sync,
{
    let exceeding = masks.par_iter().filter(|m| stat(m) > observed).count() as u64;
    Tail {
        exceeding,
        used: masks.len() as u64,
        exact,
    }
}
