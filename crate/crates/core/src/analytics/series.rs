use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::groups::{GroupKey, SongFacts};
use crate::error::{Error, Result};

/// What a yearly fraction measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Share of the key's songs that are labeled sexist.
    SexistFraction,
    /// Share of all songs in the key's subset that match the key.
    ShareOfSubset,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YearPoint {
    pub year: i32,
    pub numerator: u64,
    pub denominator: u64,
    pub fraction: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedPoint {
    pub year: i32,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupedSeries {
    pub key: GroupKey,
    pub kind: SeriesKind,
    pub points: Vec<YearPoint>,
    pub smoothed: Option<Vec<SmoothedPoint>>,
}

/// Song-level 0/1 outcomes per year for one series.
pub fn yearly_indicators(
    songs: &[SongFacts],
    key: &GroupKey,
    kind: SeriesKind,
    labels: &BTreeMap<String, bool>,
) -> Result<BTreeMap<i32, Vec<bool>>> {
    let mut out: BTreeMap<i32, Vec<bool>> = BTreeMap::new();
    for s in songs {
        let indicator = match kind {
            SeriesKind::SexistFraction => {
                if !key.matches(s) {
                    continue;
                }
                *labels.get(&s.song_id).ok_or_else(|| {
                    Error::IdMismatch(format!("song '{}' has no label", s.song_id))
                })?
            }
            SeriesKind::ShareOfSubset => {
                if !key.subset.contains(s) {
                    continue;
                }
                key.matches(s)
            }
        };
        out.entry(s.year).or_default().push(indicator);
    }
    Ok(out)
}

pub fn year_points(indicators: &BTreeMap<i32, Vec<bool>>) -> Vec<YearPoint> {
    indicators
        .iter()
        .map(|(&year, v)| {
            let numerator = v.iter().filter(|b| **b).count() as u64;
            let denominator = v.len() as u64;
            YearPoint {
                year,
                numerator,
                denominator,
                fraction: (denominator > 0).then(|| numerator as f64 / denominator as f64),
            }
        })
        .collect()
}

fn half_window(window: usize) -> Result<i32> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "median filter window must be odd, got {window}"
        )));
    }
    Ok((window / 2) as i32)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn windowed_median(series: &[(i32, f64)], center: i32, half: i32) -> f64 {
    let mut vals: Vec<f64> = series
        .iter()
        .filter(|(y, _)| (y - center).abs() <= half)
        .map(|(_, v)| *v)
        .collect();
    median(&mut vals)
}

/// Median of the values within `±(window-1)/2` years of each point. Near
/// the ends and around gaps the window holds fewer values.
pub fn median_filter(series: &[(i32, f64)], window: usize) -> Result<Vec<(i32, f64)>> {
    let half = half_window(window)?;
    Ok(series
        .iter()
        .map(|&(year, _)| (year, windowed_median(series, year, half)))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub n_boot: usize,
    /// Confidence level in percent.
    pub level: f64,
    pub window: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_boot: 1000,
            level: 95.0,
            window: 5,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        half_window(self.window)?;
        if self.n_boot == 0 {
            return Err(Error::Config("n_boot must be >= 1".into()));
        }
        if !(self.level > 0.0 && self.level < 100.0) {
            return Err(Error::Config(format!(
                "confidence level {} outside (0, 100)",
                self.level
            )));
        }
        Ok(())
    }
}

/// Linear-interpolated percentile of sorted values, `q` in [0, 100].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q / 100.0 * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn year_seed(seed: u64, year: i32) -> u64 {
    let mut x = seed ^ (year as i64 as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Median-filtered yearly fractions with percentile bootstrap intervals.
///
/// For each year, the songs of all years in the window are pooled and
/// resampled with replacement; each resample yields a median of yearly
/// fractions. The interval is widened when needed so it always contains
/// the point estimate.
pub fn bootstrap_ci(
    indicators: &BTreeMap<i32, Vec<bool>>,
    cfg: &BootstrapConfig,
) -> Result<Vec<SmoothedPoint>> {
    cfg.validate()?;
    let half = half_window(cfg.window)?;
    let raw: Vec<(i32, f64)> = year_points(indicators)
        .into_iter()
        .filter_map(|p| p.fraction.map(|f| (p.year, f)))
        .collect();
    let tail = (100.0 - cfg.level) / 2.0;
    raw.iter()
        .map(|&(center, _)| {
            let value = windowed_median(&raw, center, half);
            let pool: Vec<(i32, bool)> = indicators
                .range(center - half..=center + half)
                .flat_map(|(&y, v)| v.iter().map(move |b| (y, *b)))
                .collect();
            let base = year_seed(cfg.seed, center);
            let mut stats: Vec<f64> = (0..cfg.n_boot)
                .into_par_iter()
                .map(|b| {
                    let mut rng = ChaCha8Rng::seed_from_u64(base);
                    rng.set_stream(b as u64);
                    let mut per_year: BTreeMap<i32, (u64, u64)> = BTreeMap::new();
                    for _ in 0..pool.len() {
                        let (y, hit) = pool[rng.gen_range(0..pool.len())];
                        let e = per_year.entry(y).or_default();
                        e.0 += u64::from(hit);
                        e.1 += 1;
                    }
                    let mut fracs: Vec<f64> = per_year
                        .values()
                        .map(|(n, d)| *n as f64 / *d as f64)
                        .collect();
                    median(&mut fracs)
                })
                .collect();
            stats.sort_by(f64::total_cmp);
            Ok(SmoothedPoint {
                year: center,
                value,
                ci_low: percentile(&stats, tail).min(value),
                ci_high: percentile(&stats, 100.0 - tail).max(value),
            })
        })
        .collect()
}

/// Builds a series and, when `bootstrap` is given, its smoothed band.
pub fn grouped_series(
    songs: &[SongFacts],
    key: &GroupKey,
    kind: SeriesKind,
    labels: &BTreeMap<String, bool>,
    bootstrap: Option<&BootstrapConfig>,
) -> Result<GroupedSeries> {
    let ind = yearly_indicators(songs, key, kind, labels)?;
    let smoothed = bootstrap.map(|cfg| bootstrap_ci(&ind, cfg)).transpose()?;
    Ok(GroupedSeries {
        key: key.clone(),
        kind,
        points: year_points(&ind),
        smoothed,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// CSV with columns key, kind, year, numerator, denominator, raw_fraction,
/// smoothed, ci_low, ci_high.
pub fn write_series_csv<W: Write>(series: &[GroupedSeries], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "key",
        "kind",
        "year",
        "numerator",
        "denominator",
        "raw_fraction",
        "smoothed",
        "ci_low",
        "ci_high",
    ])?;
    for s in series {
        let smooth: BTreeMap<i32, &SmoothedPoint> =
            s.smoothed.iter().flatten().map(|p| (p.year, p)).collect();
        let kind = match s.kind {
            SeriesKind::SexistFraction => "sexist_fraction",
            SeriesKind::ShareOfSubset => "share_of_subset",
        };
        for p in &s.points {
            let sm = smooth.get(&p.year);
            w.write_record([
                s.key.to_string(),
                kind.to_string(),
                p.year.to_string(),
                p.numerator.to_string(),
                p.denominator.to_string(),
                fmt_opt(p.fraction),
                fmt_opt(sm.map(|x| x.value)),
                fmt_opt(sm.map(|x| x.ci_low)),
                fmt_opt(sm.map(|x| x.ci_high)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
