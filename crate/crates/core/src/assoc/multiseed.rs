use serde::{Deserialize, Serialize};

use super::AssociationResult;
use crate::error::{Error, Result};

pub const SEEDS_PER_TEST: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Significance {
    #[serde(rename = "0.10")]
    pub p10: bool,
    #[serde(rename = "0.05")]
    pub p05: bool,
}

impl Significance {
    fn of<'a>(p_values: impl Iterator<Item = &'a AssociationResult> + Clone) -> Self {
        let all_below = |alpha: f64| p_values.clone().all(|r| r.p_value < alpha);
        Significance {
            p10: all_below(0.10),
            p05: all_below(0.05),
        }
    }

    /// `**` at 0.05, `*` at 0.10, empty otherwise.
    pub fn stars(&self) -> &'static str {
        if self.p05 {
            "**"
        } else if self.p10 {
            "*"
        } else {
            ""
        }
    }
}

/// One test instance repeated over embeddings trained with different seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiSeedResult {
    /// Ordered by embedding seed.
    pub per_seed: Vec<AssociationResult>,
    /// The run on the lowest seed.
    pub reported: AssociationResult,
    /// True at a level when every seed is significant there.
    pub significant_at: Significance,
    /// Significance of the reported run alone.
    pub seed0_significant_at: Significance,
}

/// Combines five runs of the same test on embeddings with distinct seeds.
pub fn aggregate_multiseed(mut results: Vec<AssociationResult>) -> Result<MultiSeedResult> {
    if results.len() != SEEDS_PER_TEST {
        return Err(Error::MixedInstances(format!(
            "expected {SEEDS_PER_TEST} results, got {}",
            results.len()
        )));
    }
    let first = &results[0];
    for r in &results[1..] {
        if r.test != first.test || r.sets != first.sets || r.corpus != first.corpus {
            return Err(Error::MixedInstances(format!(
                "{} {:?} on {:?} vs {} {:?} on {:?}",
                first.test.as_str(),
                first.sets,
                first.corpus,
                r.test.as_str(),
                r.sets,
                r.corpus
            )));
        }
    }
    results.sort_by(|a, b| a.embedding_seeds.cmp(&b.embedding_seeds));
    if results
        .windows(2)
        .any(|w| w[0].embedding_seeds == w[1].embedding_seeds)
    {
        return Err(Error::MixedInstances("repeated embedding seed".into()));
    }
    let reported = results[0].clone();
    Ok(MultiSeedResult {
        significant_at: Significance::of(results.iter()),
        seed0_significant_at: Significance::of(std::iter::once(&reported)),
        reported,
        per_seed: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assoc::{SetNames, TestKind};

    fn result(seed: u64, p: f64) -> AssociationResult {
        AssociationResult {
            test: TestKind::Weat,
            sets: SetNames {
                x: Some("X".into()),
                y: Some("Y".into()),
                w: None,
                a: "A".into(),
                b: "B".into(),
            },
            corpus: vec!["all_solo".into()],
            embedding_seeds: vec![seed],
            effect_or_score: seed as f64,
            statistic: 0.0,
            p_value: p,
            p_value_smoothed: p,
            n_permutations_used: 1000,
            exact_enumeration: false,
            rng_seed: 0,
        }
    }

    fn run(ps: [f64; 5]) -> MultiSeedResult {
        aggregate_multiseed(
            ps.iter()
                .enumerate()
                .map(|(i, p)| result(i as u64, *p))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn significance_levels() {
        let m = run([0.01, 0.02, 0.03, 0.04, 0.06]);
        assert!(m.significant_at.p10 && !m.significant_at.p05);
        assert_eq!(m.significant_at.stars(), "*");
        assert!(m.seed0_significant_at.p05);

        let m = run([0.001; 5]);
        assert!(m.significant_at.p10 && m.significant_at.p05);

        let m = run([0.01, 0.01, 0.5, 0.01, 0.01]);
        assert_eq!(m.significant_at, Significance::default());
    }

    #[test]
    fn reported_is_lowest_seed() {
        let rs = vec![
            result(3, 0.1),
            result(0, 0.2),
            result(4, 0.1),
            result(1, 0.1),
            result(2, 0.1),
        ];
        let m = aggregate_multiseed(rs).unwrap();
        assert_eq!(m.reported.embedding_seeds, vec![0]);
        assert_eq!(m.reported.p_value, 0.2);
    }

    #[test]
    fn mixed_instances_rejected() {
        let mut rs: Vec<_> = (0..5).map(|i| result(i, 0.01)).collect();
        rs[2].sets.a = "other".into();
        assert!(matches!(
            aggregate_multiseed(rs),
            Err(Error::MixedInstances(_))
        ));
        assert!(aggregate_multiseed((0..4).map(|i| result(i, 0.01)).collect()).is_err());
        assert!(aggregate_multiseed((0..5).map(|_| result(1, 0.01)).collect()).is_err());
    }

    #[test]
    fn significance_serializes_with_level_keys() {
        let json = serde_json::to_string(&Significance {
            p10: true,
            p05: false,
        })
        .unwrap();
        assert_eq!(json, r#"{"0.10":true,"0.05":false}"#);
    }
}
