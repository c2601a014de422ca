use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::permutation::{
    count_exceeding, equal_partitions, flipped_sum, sign_flips, split_difference,
    PermutationConfig, Tail,
};
use super::WordSet;
use crate::embeddings::EmbeddingSpace;
use crate::error::{Error, Result};

/// Unit vectors are snapped to multiples of this step before any dot
/// product, so that rescaling a stored vector yields the same unit vector
/// bit for bit.
const UNIT_GRID: f64 = 68_719_476_736.0; // 2^36

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Weat,
    ScWeat,
    Sweat,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Weat => "weat",
            TestKind::ScWeat => "sc_weat",
            TestKind::Sweat => "sweat",
        }
    }
}

/// Names of the word sets a test ran on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetNames {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub test: TestKind,
    pub sets: SetNames,
    /// One partition name, or two for the cross-corpus test.
    pub corpus: Vec<String>,
    /// Training seeds of the embedding spaces, aligned with `corpus`.
    pub embedding_seeds: Vec<u64>,
    /// Effect size for WEAT and SC-WEAT, the raw score for SWEAT.
    pub effect_or_score: f64,
    pub statistic: f64,
    /// Fraction of permutations whose statistic strictly exceeds the
    /// observed one.
    pub p_value: f64,
    /// `(count + 1) / (n + 1)`; never zero, useful for small samples.
    pub p_value_smoothed: f64,
    pub n_permutations_used: u64,
    pub exact_enumeration: bool,
    pub rng_seed: u64,
}

impl AssociationResult {
    fn new(
        test: TestKind,
        sets: SetNames,
        spaces: &[&EmbeddingSpace],
        effect: f64,
        statistic: f64,
        tail: Tail,
        rng_seed: u64,
    ) -> Self {
        AssociationResult {
            test,
            sets,
            corpus: spaces.iter().map(|s| s.corpus_name().to_owned()).collect(),
            embedding_seeds: spaces.iter().map(|s| s.seed()).collect(),
            effect_or_score: effect,
            statistic,
            p_value: tail.p_value(),
            p_value_smoothed: tail.p_value_smoothed(),
            n_permutations_used: tail.used,
            exact_enumeration: tail.exact,
            rng_seed,
        }
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter()
        .map(|x| (x / norm * UNIT_GRID).round() / UNIT_GRID)
        .collect()
}

fn units(space: &EmbeddingSpace, words: &[String]) -> Result<Vec<Vec<f64>>> {
    words.iter().map(|w| space.vector(w).map(unit)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Bessel-corrected sample variance.
fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

fn mean_cosine(w: &[f64], attrs: &[Vec<f64>]) -> f64 {
    attrs.iter().map(|a| dot(w, a)).sum::<f64>() / attrs.len() as f64
}

fn association(w: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    mean_cosine(w, a) - mean_cosine(w, b)
}

fn require_len(set: &WordSet, min: usize) -> Result<()> {
    if set.len() < min {
        return Err(Error::SetTooSmall {
            name: set.name.clone(),
            len: set.len(),
            min,
        });
    }
    Ok(())
}

fn require_disjoint(first: &WordSet, second: &WordSet) -> Result<()> {
    let other: HashSet<&str> = second.words.iter().map(String::as_str).collect();
    let shared: Vec<String> = first
        .words
        .iter()
        .filter(|w| other.contains(w.as_str()))
        .cloned()
        .collect();
    if !shared.is_empty() {
        return Err(Error::OverlappingSets {
            first: first.name.clone(),
            second: second.name.clone(),
            words: shared,
        });
    }
    Ok(())
}

/// Mean cosine of `w` to the words of `a` minus its mean cosine to `b`.
pub fn s_assoc(w: &str, a: &WordSet, b: &WordSet, space: &EmbeddingSpace) -> Result<f64> {
    require_len(a, 1)?;
    require_len(b, 1)?;
    let uw = unit(space.vector(w)?);
    Ok(association(
        &uw,
        &units(space, &a.words)?,
        &units(space, &b.words)?,
    ))
}

fn scores(
    targets: &WordSet,
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    space: &EmbeddingSpace,
) -> Result<Vec<f64>> {
    Ok(units(space, &targets.words)?
        .iter()
        .map(|w| association(w, a, b))
        .collect())
}

/// Effect size, differential statistic and permutation p-value of targets
/// `x`, `y` against attributes `a`, `b`.
pub fn weat(
    x: &WordSet,
    y: &WordSet,
    a: &WordSet,
    b: &WordSet,
    space: &EmbeddingSpace,
    cfg: &PermutationConfig,
) -> Result<AssociationResult> {
    if x.len() != y.len() {
        return Err(Error::UnbalancedTargets {
            x: x.len(),
            y: y.len(),
        });
    }
    require_len(x, 2)?;
    require_len(a, 1)?;
    require_len(b, 1)?;
    require_disjoint(x, y)?;
    let ua = units(space, &a.words)?;
    let ub = units(space, &b.words)?;
    let sx = scores(x, &ua, &ub, space)?;
    let sy = scores(y, &ua, &ub, space)?;

    let n = sx.len();
    let pooled_var =
        ((n - 1) as f64 * variance(&sx) + (n - 1) as f64 * variance(&sy)) / (2 * n - 2) as f64;
    let pooled_std = pooled_var.sqrt();
    let effect = if pooled_std > 0.0 {
        (mean(&sx) - mean(&sy)) / pooled_std
    } else {
        0.0
    };

    let pool: Vec<f64> = sx.iter().chain(&sy).copied().collect();
    let observed_mask: Vec<bool> = (0..2 * n).map(|i| i < n).collect();
    let statistic = split_difference(&pool, &observed_mask);
    let (masks, exact) = equal_partitions(n, cfg);
    let tail = count_exceeding(&masks, exact, statistic, |m| split_difference(&pool, m));

    let sets = SetNames {
        x: Some(x.name.clone()),
        y: Some(y.name.clone()),
        w: None,
        a: a.name.clone(),
        b: b.name.clone(),
    };
    Ok(AssociationResult::new(
        TestKind::Weat,
        sets,
        &[space],
        effect,
        statistic,
        tail,
        cfg.seed,
    ))
}

/// Association of a single target set `w` with attributes `a` versus `b`.
/// Significance permutes the attribute words into equal halves.
pub fn sc_weat(
    w: &WordSet,
    a: &WordSet,
    b: &WordSet,
    space: &EmbeddingSpace,
    cfg: &PermutationConfig,
) -> Result<AssociationResult> {
    if a.len() != b.len() {
        return Err(Error::UnbalancedAttributes {
            a: a.len(),
            b: b.len(),
        });
    }
    require_len(w, 2)?;
    require_len(a, 1)?;
    require_disjoint(a, b)?;
    let uw = units(space, &w.words)?;
    let ua = units(space, &a.words)?;
    let ub = units(space, &b.words)?;

    let s: Vec<f64> = uw.iter().map(|v| association(v, &ua, &ub)).collect();
    let sd = variance(&s).sqrt();
    let effect = if sd > 0.0 { mean(&s) / sd } else { 0.0 };

    // Summing cosines over W per attribute word lets every partition of
    // A ∪ B be scored in O(|A| + |B|).
    let columns: Vec<f64> = ua
        .iter()
        .chain(&ub)
        .map(|attr| uw.iter().map(|v| dot(v, attr)).sum())
        .collect();
    let m = a.len();
    let observed_mask: Vec<bool> = (0..2 * m).map(|i| i < m).collect();
    let raw = split_difference(&columns, &observed_mask);
    let (masks, exact) = equal_partitions(m, cfg);
    let tail = count_exceeding(&masks, exact, raw, |mask| split_difference(&columns, mask));

    let sets = SetNames {
        x: None,
        y: None,
        w: Some(w.name.clone()),
        a: a.name.clone(),
        b: b.name.clone(),
    };
    Ok(AssociationResult::new(
        TestKind::ScWeat,
        sets,
        &[space],
        effect,
        raw / m as f64,
        tail,
        cfg.seed,
    ))
}

/// Difference between two corpora in how strongly `w` leans towards `a`
/// rather than `b`. Significance flips each word's corpus assignment.
pub fn sweat(
    w: &WordSet,
    a: &WordSet,
    b: &WordSet,
    space1: &EmbeddingSpace,
    space2: &EmbeddingSpace,
    cfg: &PermutationConfig,
) -> Result<AssociationResult> {
    require_len(w, 1)?;
    require_len(a, 1)?;
    require_len(b, 1)?;
    let per_space = |space: &EmbeddingSpace| -> Result<Vec<f64>> {
        let ua = units(space, &a.words)?;
        let ub = units(space, &b.words)?;
        scores(w, &ua, &ub, space)
    };
    let s1 = per_space(space1)?;
    let s2 = per_space(space2)?;
    let d: Vec<f64> = s1.iter().zip(&s2).map(|(p, q)| p - q).collect();

    let score = flipped_sum(&d, &vec![false; d.len()]);
    let (masks, exact) = sign_flips(d.len(), cfg);
    let tail = count_exceeding(&masks, exact, score, |m| flipped_sum(&d, m));

    let sets = SetNames {
        x: None,
        y: None,
        w: Some(w.name.clone()),
        a: a.name.clone(),
        b: b.name.clone(),
    };
    Ok(AssociationResult::new(
        TestKind::Sweat,
        sets,
        &[space1, space2],
        score,
        score,
        tail,
        cfg.seed,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::permutation::Sampling;

    fn set(name: &str, words: &[&str]) -> WordSet {
        WordSet::new(name, words).unwrap()
    }

    fn hand_space() -> EmbeddingSpace {
        EmbeddingSpace::from_pairs(
            "hand",
            &[
                ("x1", vec![1.0, 0.0]),
                ("x2", vec![0.9, 0.1]),
                ("y1", vec![0.0, 1.0]),
                ("y2", vec![0.1, 0.9]),
                ("a", vec![1.0, 0.0]),
                ("b", vec![0.0, 1.0]),
            ],
        )
        .unwrap()
    }

    fn cfg() -> PermutationConfig {
        PermutationConfig::default()
    }

    #[test]
    fn s_assoc_examples() {
        let sp = hand_space();
        let (a, b) = (set("A", &["a"]), set("B", &["b"]));
        assert!((s_assoc("x1", &a, &b, &sp).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s_assoc("x2", &a, &a, &sp).unwrap(), 0.0);
        assert_eq!(
            s_assoc("x2", &a, &b, &sp).unwrap(),
            -s_assoc("x2", &b, &a, &sp).unwrap()
        );
        assert!(matches!(
            s_assoc("nope", &a, &b, &sp),
            Err(Error::Oov { word, .. }) if word == "nope"
        ));
    }

    #[test]
    fn weat_hand_instance() {
        let sp = hand_space();
        let r = weat(
            &set("X", &["x1", "x2"]),
            &set("Y", &["y1", "y2"]),
            &set("A", &["a"]),
            &set("B", &["b"]),
            &sp,
            &cfg(),
        )
        .unwrap();
        let c = 0.8 / 0.82f64.sqrt();
        let pooled = (1.0 - c) / 2f64.sqrt();
        assert!((r.effect_or_score - (1.0 + c) / pooled).abs() < 1e-9);
        assert!((r.statistic - 2.0 * (1.0 + c)).abs() < 1e-9);
        assert!(r.exact_enumeration);
        assert_eq!(r.n_permutations_used, 6);
        // The observed split is the most extreme, so nothing strictly exceeds it.
        assert_eq!(r.p_value, 0.0);
        assert!((r.p_value_smoothed - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn weat_degenerate_and_errors() {
        let sp = hand_space();
        let a = set("A", &["a"]);
        let r = weat(
            &set("X", &["x1", "x2"]),
            &set("Y", &["y1", "y2"]),
            &a,
            &a,
            &sp,
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.effect_or_score, 0.0);
        assert!(matches!(
            weat(
                &set("X", &["x1", "x2"]),
                &set("Y", &["y1"]),
                &a,
                &a,
                &sp,
                &cfg()
            ),
            Err(Error::UnbalancedTargets { x: 2, y: 1 })
        ));
        assert!(matches!(
            weat(
                &set("X", &["x1", "x2"]),
                &set("Y", &["x2", "y1"]),
                &a,
                &a,
                &sp,
                &cfg()
            ),
            Err(Error::OverlappingSets { .. })
        ));
    }

    #[test]
    fn sc_weat_hand_instance() {
        let sp = hand_space();
        let w = set("W", &["x1", "x2"]);
        let (a, b) = (set("A", &["a"]), set("B", &["b"]));
        let r = sc_weat(&w, &a, &b, &sp, &cfg()).unwrap();
        let c = 0.8 / 0.82f64.sqrt();
        let sd = (1.0 - c) / 2f64.sqrt();
        assert!((r.effect_or_score - (1.0 + c) / 2.0 / sd).abs() < 1e-9);
        assert!((r.statistic - (1.0 + c)).abs() < 1e-9);
        assert_eq!(r.n_permutations_used, 2);
        assert_eq!(r.p_value, 0.0);
        let back = sc_weat(&w, &b, &a, &sp, &cfg()).unwrap();
        assert_eq!(back.effect_or_score, -r.effect_or_score);
        assert_eq!(back.statistic, -r.statistic);
        assert_eq!(back.p_value, 0.5);
        assert!(matches!(
            sc_weat(&w, &a, &set("B", &["b", "y1"]), &sp, &cfg()),
            Err(Error::UnbalancedAttributes { a: 1, b: 2 })
        ));
    }

    #[test]
    fn sweat_identical_spaces_and_antisymmetry() {
        let sp = hand_space();
        let other = EmbeddingSpace::from_pairs(
            "other",
            &[
                ("x1", vec![0.2, 1.0]),
                ("x2", vec![1.0, 0.3]),
                ("y1", vec![0.5, 0.5]),
                ("a", vec![1.0, 0.0]),
                ("b", vec![0.0, 1.0]),
            ],
        )
        .unwrap();
        let w = set("W", &["x1", "x2", "y1"]);
        let (a, b) = (set("A", &["a"]), set("B", &["b"]));
        let same = sweat(&w, &a, &b, &sp, &sp, &cfg()).unwrap();
        assert_eq!(same.effect_or_score, 0.0);
        let fwd = sweat(&w, &a, &b, &sp, &other, &cfg()).unwrap();
        let rev = sweat(&w, &a, &b, &other, &sp, &cfg()).unwrap();
        assert_eq!(fwd.effect_or_score, -rev.effect_or_score);
        assert_eq!(fwd.corpus, vec!["hand", "other"]);
        assert!(fwd.exact_enumeration);
        assert_eq!(fwd.n_permutations_used, 8);
        assert!(matches!(
            sweat(&set("W", &["y2"]), &a, &b, &sp, &other, &cfg()),
            Err(Error::Oov { word, corpus }) if word == "y2" && corpus == "other"
        ));
    }

    #[test]
    fn sampled_mode_reports_not_exact() {
        let sp = hand_space();
        let c = PermutationConfig {
            n_perm: 100,
            seed: 1,
            sampling: Sampling::Sampled,
        };
        let r = weat(
            &set("X", &["x1", "x2"]),
            &set("Y", &["y1", "y2"]),
            &set("A", &["a"]),
            &set("B", &["b"]),
            &sp,
            &c,
        )
        .unwrap();
        assert!(!r.exact_enumeration);
        assert_eq!(r.n_permutations_used, 100);
    }

    #[test]
    fn unit_snapping_is_scale_free() {
        let v = [0.3, -1.7, 2.25, 1e-3, 0.0];
        let base = unit(&v);
        for k in [0.5, 3.0, 1e-4, 7.25e5] {
            let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
            assert_eq!(unit(&scaled), base);
        }
    }
}
