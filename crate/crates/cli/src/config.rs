//! Project configuration loaded from a TOML file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use lyricscope::analytics::{BootstrapConfig, Subset};
use lyricscope::assoc::{BatteryConfig, BatteryRow, PermutationConfig, SEEDS_PER_TEST};
use lyricscope::corpus::FilterConfig;
use lyricscope::embeddings::TrainConfig;
use lyricscope::matching::MatchConfig;
use lyricscope::sexism::LabelConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Song records, one JSON object per line.
    pub corpus: PathBuf,
    pub charts: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    /// Word lists in `[Set name]` format; the built-in lists when absent.
    pub word_sets: Option<PathBuf>,
    pub genre_map: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    /// Precomputed batch probabilities used instead of the lexicon.
    pub external_scores: Option<PathBuf>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("run")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupSettings {
    pub threshold: f64,
}

impl Default for DedupSettings {
    fn default() -> Self {
        DedupSettings {
            threshold: lyricscope::dedup::DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSettings {
    /// One embedding space is trained per seed and partition.
    pub seeds: Vec<u64>,
    #[serde(flatten)]
    pub params: TrainConfig,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            seeds: (0..SEEDS_PER_TEST as u64).collect(),
            params: TrainConfig::default(),
        }
    }
}

impl TrainSettings {
    pub fn for_seed(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            seed,
            ..self.params.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssocSettings {
    pub n_perm: usize,
    pub balance: bool,
    pub min_frequency: u64,
    /// Corpora compared by SWEAT; empty disables it.
    pub sweat_corpora: Vec<String>,
    /// Test rows; the standard battery when empty.
    pub rows: Vec<BatteryRow>,
}

impl Default for AssocSettings {
    fn default() -> Self {
        let d = BatteryConfig::default();
        AssocSettings {
            n_perm: d.permutation.n_perm,
            balance: d.balance,
            min_frequency: d.min_frequency,
            sweat_corpora: d.sweat_corpora.map(|(a, b)| vec![a, b]).unwrap_or_default(),
            rows: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub thresholds: Vec<f64>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            thresholds: vec![0.5, 0.6, 0.7, 0.725, 0.8, 0.9],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticsSettings {
    pub window: usize,
    pub n_boot: usize,
    pub level: f64,
    /// Song subsets the yearly series are computed for.
    pub subsets: Vec<String>,
}

impl Default for AnalyticsSettings {
    fn default() -> Self {
        let b = BootstrapConfig::default();
        AnalyticsSettings {
            window: b.window,
            n_boot: b.n_boot,
            level: b.level,
            subsets: vec!["all".into(), "billboard".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    #[serde(default)]
    pub rng_seed: u64,
    pub paths: Paths,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub dedup: DedupSettings,
    #[serde(default)]
    pub matching: MatchConfig,
    #[serde(default)]
    pub train: TrainSettings,
    #[serde(default)]
    pub label: LabelConfig,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub analytics: AnalyticsSettings,
    #[serde(default)]
    pub assoc: AssocSettings,
}

impl ProjectConfig {
    /// Reads a config file; relative paths are taken from its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ProjectConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let p = &mut self.paths;
        join(&mut p.corpus);
        join(&mut p.out);
        for opt in [
            &mut p.charts,
            &mut p.gold,
            &mut p.word_sets,
            &mut p.genre_map,
            &mut p.lexicon,
            &mut p.external_scores,
        ]
        .into_iter()
        .flatten()
        {
            join(opt);
        }
    }

    /// Checks settings and that every configured input file exists.
    pub fn validate(&self) -> CliResult<()> {
        let p = &self.paths;
        let inputs = [
            ("corpus", Some(&p.corpus)),
            ("charts", p.charts.as_ref()),
            ("gold", p.gold.as_ref()),
            ("word_sets", p.word_sets.as_ref()),
            ("genre_map", p.genre_map.as_ref()),
            ("lexicon", p.lexicon.as_ref()),
            ("external_scores", p.external_scores.as_ref()),
        ];
        for (name, path) in inputs {
            if let Some(path) = path {
                if !path.is_file() {
                    return Err(CliError::Config(format!(
                        "paths.{name}: {} does not exist",
                        path.display()
                    )));
                }
            }
        }

        let seeds = &self.train.seeds;
        if seeds.len() != SEEDS_PER_TEST {
            return Err(CliError::Config(format!(
                "train.seeds must list exactly {SEEDS_PER_TEST} seeds, got {}",
                seeds.len()
            )));
        }
        if seeds.iter().collect::<HashSet<_>>().len() != seeds.len() {
            return Err(CliError::Config("train.seeds must be distinct".into()));
        }
        self.train.params.validate()?;
        self.filter.validate()?;
        self.matching.validate()?;
        self.label.validate()?;
        self.bootstrap().validate()?;
        if !(self.dedup.threshold > 0.0 && self.dedup.threshold <= 1.0) {
            return Err(CliError::Config(format!(
                "dedup.threshold must lie in (0, 1], got {}",
                self.dedup.threshold
            )));
        }
        if self
            .sweep
            .thresholds
            .iter()
            .any(|t| !(0.0..=1.0).contains(t))
        {
            return Err(CliError::Config(
                "sweep.thresholds must lie in [0, 1]".into(),
            ));
        }
        self.subsets()?;
        if !matches!(self.assoc.sweat_corpora.len(), 0 | 2) {
            return Err(CliError::Config(
                "assoc.sweat_corpora must name two corpora or none".into(),
            ));
        }
        if self.assoc.n_perm == 0 {
            return Err(CliError::Config("assoc.n_perm must be >= 1".into()));
        }
        Ok(())
    }

    pub fn subsets(&self) -> CliResult<Vec<Subset>> {
        self.analytics
            .subsets
            .iter()
            .map(|s| {
                Subset::parse(s)
                    .ok_or_else(|| CliError::Config(format!("unknown analytics subset '{s}'")))
            })
            .collect()
    }

    pub fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig {
            n_boot: self.analytics.n_boot,
            level: self.analytics.level,
            window: self.analytics.window,
            seed: self.rng_seed,
        }
    }

    pub fn battery(&self) -> BatteryConfig {
        let s = &self.assoc;
        BatteryConfig {
            permutation: PermutationConfig {
                n_perm: s.n_perm,
                seed: self.rng_seed,
                ..PermutationConfig::default()
            },
            balance: s.balance,
            min_frequency: s.min_frequency,
            sweat_corpora: match s.sweat_corpora.as_slice() {
                [a, b] => Some((a.clone(), b.clone())),
                _ => None,
            },
        }
    }
}
