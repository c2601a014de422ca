use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measures::{sc_weat, sweat, weat};
use super::multiseed::{aggregate_multiseed, MultiSeedResult, SEEDS_PER_TEST};
use super::permutation::PermutationConfig;
use super::wordset::{balance_word_sets, standard, WordSet, MIN_WORD_FREQUENCY};
use crate::embeddings::{EmbeddingSpace, FrequencyTable};
use crate::error::{Error, Result};

/// One battery entry: targets `x`, `y` against attributes `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub a: String,
    pub b: String,
    pub x: String,
    pub y: String,
}

impl BatteryRow {
    pub fn new(a: &str, b: &str, x: &str, y: &str) -> Self {
        BatteryRow {
            a: a.into(),
            b: b.into(),
            x: x.into(),
            y: y.into(),
        }
    }
}

pub fn standard_battery() -> Vec<BatteryRow> {
    standard::BATTERY
        .iter()
        .map(|(a, b, x, y)| BatteryRow::new(a, b, x, y))
        .collect()
}

/// The embedding spaces of one corpus, one per training seed.
pub struct SeededSpaces<'a> {
    pub corpus: String,
    pub spaces: Vec<&'a EmbeddingSpace>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryConfig {
    pub permutation: PermutationConfig,
    /// Drop rare words and equalize set sizes before testing.
    pub balance: bool,
    pub min_frequency: u64,
    /// Corpora compared by the cross-corpus test, as (first, second).
    pub sweat_corpora: Option<(String, String)>,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            permutation: PermutationConfig::default(),
            balance: true,
            min_frequency: MIN_WORD_FREQUENCY,
            sweat_corpora: Some(("male_solo".into(), "female_solo".into())),
        }
    }
}

/// Word sets a row actually ran with, after balancing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparedRow {
    pub row: BatteryRow,
    pub a: WordSet,
    pub b: WordSet,
    pub x: WordSet,
    pub y: WordSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusOutcome {
    pub row: BatteryRow,
    pub corpus: String,
    pub sc_weat_x: MultiSeedResult,
    pub sc_weat_y: MultiSeedResult,
    pub weat: MultiSeedResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweatOutcome {
    pub row: BatteryRow,
    pub corpora: (String, String),
    pub sweat_x: MultiSeedResult,
    pub sweat_y: MultiSeedResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub prepared: Vec<PreparedRow>,
    pub results: Vec<CorpusOutcome>,
    pub sweat: Vec<SweatOutcome>,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix(base), |acc, p| splitmix(acc ^ *p))
}

fn find<'s>(sets: &'s [WordSet], name: &str) -> Result<&'s WordSet> {
    sets.iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Config(format!("unknown word set '{name}'")))
}

fn prepare(
    row: &BatteryRow,
    sets: &[WordSet],
    tables: &[&FrequencyTable],
    cfg: &BatteryConfig,
) -> Result<PreparedRow> {
    let (a, b) = (find(sets, &row.a)?, find(sets, &row.b)?);
    let (x, y) = (find(sets, &row.x)?, find(sets, &row.y)?);
    let ((a, b), (x, y)) = if cfg.balance {
        (
            balance_word_sets(a, b, tables, cfg.min_frequency)?,
            balance_word_sets(x, y, tables, cfg.min_frequency)?,
        )
    } else {
        ((a.clone(), b.clone()), (x.clone(), y.clone()))
    };
    Ok(PreparedRow {
        row: row.clone(),
        a,
        b,
        x,
        y,
    })
}

/// Runs every row on every corpus and seed, plus the cross-corpus test.
///
/// Each corpus must supply exactly five spaces. Word sets are balanced
/// against `tables` when `cfg.balance` is set.
pub fn run_battery(
    rows: &[BatteryRow],
    sets: &[WordSet],
    corpora: &[SeededSpaces<'_>],
    tables: &[&FrequencyTable],
    cfg: &BatteryConfig,
) -> Result<BatteryReport> {
    for c in corpora {
        if c.spaces.len() != SEEDS_PER_TEST {
            return Err(Error::Config(format!(
                "corpus '{}' has {} embedding spaces, need {SEEDS_PER_TEST}",
                c.corpus,
                c.spaces.len()
            )));
        }
    }
    let prepared: Vec<PreparedRow> = rows
        .iter()
        .map(|r| prepare(r, sets, tables, cfg))
        .collect::<Result<_>>()?;
    let perm = |parts: &[u64]| {
        cfg.permutation
            .with_seed(derive_seed(cfg.permutation.seed, parts))
    };

    let mut results = Vec::new();
    for (ri, p) in prepared.iter().enumerate() {
        for (ci, c) in corpora.iter().enumerate() {
            let runs: Vec<_> = c
                .spaces
                .par_iter()
                .enumerate()
                .map(|(si, space)| {
                    let key = [ri as u64, ci as u64, si as u64];
                    let sx = sc_weat(&p.x, &p.a, &p.b, space, &perm(&[key[0], key[1], key[2], 0]))?;
                    let sy = sc_weat(&p.y, &p.a, &p.b, space, &perm(&[key[0], key[1], key[2], 1]))?;
                    let w = weat(
                        &p.x,
                        &p.y,
                        &p.a,
                        &p.b,
                        space,
                        &perm(&[key[0], key[1], key[2], 2]),
                    )?;
                    Ok((sx, sy, w))
                })
                .collect::<Result<_>>()?;
            let (mut sx, mut sy, mut w) = (Vec::new(), Vec::new(), Vec::new());
            for (a, b, c) in runs {
                sx.push(a);
                sy.push(b);
                w.push(c);
            }
            results.push(CorpusOutcome {
                row: p.row.clone(),
                corpus: c.corpus.clone(),
                sc_weat_x: aggregate_multiseed(sx)?,
                sc_weat_y: aggregate_multiseed(sy)?,
                weat: aggregate_multiseed(w)?,
            });
        }
    }

    let mut sweat_out = Vec::new();
    if let Some((first, second)) = &cfg.sweat_corpora {
        let lookup = |name: &str| {
            corpora
                .iter()
                .find(|c| c.corpus == *name)
                .ok_or_else(|| Error::Config(format!("no embeddings for corpus '{name}'")))
        };
        let (d1, d2) = (lookup(first)?, lookup(second)?);
        for (ri, p) in prepared.iter().enumerate() {
            let runs: Vec<_> = (0..SEEDS_PER_TEST)
                .into_par_iter()
                .map(|si| {
                    let (s1, s2) = (d1.spaces[si], d2.spaces[si]);
                    let key = [ri as u64, u64::MAX, si as u64];
                    let x = sweat(
                        &p.x,
                        &p.a,
                        &p.b,
                        s1,
                        s2,
                        &perm(&[key[0], key[1], key[2], 3]),
                    )?;
                    let y = sweat(
                        &p.y,
                        &p.a,
                        &p.b,
                        s1,
                        s2,
                        &perm(&[key[0], key[1], key[2], 4]),
                    )?;
                    Ok((x, y))
                })
                .collect::<Result<_>>()?;
            let (xs, ys): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
            sweat_out.push(SweatOutcome {
                row: p.row.clone(),
                corpora: (first.clone(), second.clone()),
                sweat_x: aggregate_multiseed(xs)?,
                sweat_y: aggregate_multiseed(ys)?,
            });
        }
    }

    Ok(BatteryReport {
        prepared,
        results,
        sweat: sweat_out,
    })
}

fn cell(m: &MultiSeedResult) -> String {
    format!(
        "{:.2}{}",
        m.reported.effect_or_score,
        m.significant_at.stars()
    )
}

fn write_grid(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_owned()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", rule.join("  "));
    for r in rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

/// Plain-text table: one line per row and corpus with SC-WEAT for both
/// targets and the WEAT effect, then the cross-corpus scores.
pub fn render_table(report: &BatteryReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Association tests. Values are from the lowest seed; ** = all five seeds p < 0.05, * = all five seeds p < 0.10.\n"
    );
    let rows: Vec<Vec<String>> = report
        .results
        .iter()
        .map(|r| {
            vec![
                r.row.a.clone(),
                r.row.b.clone(),
                r.row.x.clone(),
                r.row.y.clone(),
                r.corpus.clone(),
                cell(&r.sc_weat_x),
                cell(&r.sc_weat_y),
                cell(&r.weat),
            ]
        })
        .collect();
    write_grid(
        &mut out,
        &[
            "A",
            "B",
            "X",
            "Y",
            "corpus",
            "SC-WEAT X",
            "SC-WEAT Y",
            "WEAT effect",
        ],
        &rows,
    );
    if let Some(first) = report.sweat.first() {
        let _ = writeln!(
            out,
            "\nSWEAT scores, {} relative to {} (positive: more associated with A in {}).\n",
            first.corpora.0, first.corpora.1, first.corpora.0
        );
        let rows: Vec<Vec<String>> = report
            .sweat
            .iter()
            .map(|s| {
                vec![
                    s.row.a.clone(),
                    s.row.b.clone(),
                    s.row.x.clone(),
                    s.row.y.clone(),
                    cell(&s.sweat_x),
                    cell(&s.sweat_y),
                ]
            })
            .collect();
        write_grid(&mut out, &["A", "B", "X", "Y", "SWEAT X", "SWEAT Y"], &rows);
    }
    out
}
