use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::scorer::BatchScore;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelConfig {
    /// A batch is flagged when its probability is strictly above this.
    pub threshold: f64,
    /// Flagged batches needed to label the whole song.
    pub n_b: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            threshold: 0.725,
            n_b: 1,
        }
    }
}

impl LabelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "label threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        if self.n_b < 1 {
            return Err(Error::Config("n_b must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SongLabel {
    pub sexist: bool,
    pub n_flagged: usize,
}

pub fn label_song(probs: &[f64], cfg: &LabelConfig) -> SongLabel {
    let n_flagged = probs.iter().filter(|p| **p > cfg.threshold).count();
    SongLabel {
        sexist: n_flagged >= cfg.n_b,
        n_flagged,
    }
}

/// The `n_b`-th largest probability, or `None` with fewer batches.
/// A song is labeled sexist exactly when this exceeds the threshold.
pub fn song_score(probs: &[f64], n_b: usize) -> Option<f64> {
    if n_b == 0 || probs.len() < n_b {
        return None;
    }
    let mut sorted = probs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Some(sorted[n_b - 1])
}

/// Song-level outcome of labeling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SongPrediction {
    pub song_id: String,
    pub sexist: bool,
    pub n_flagged: usize,
    pub n_batches: usize,
    /// See [`song_score`].
    pub score: Option<f64>,
}

/// Probabilities per song, in batch order.
pub fn group_scores(scores: &[BatchScore]) -> BTreeMap<&str, Vec<f64>> {
    let mut by_song: BTreeMap<&str, Vec<(usize, f64)>> = BTreeMap::new();
    for s in scores {
        by_song
            .entry(s.song_id.as_str())
            .or_default()
            .push((s.batch_index, s.prob));
    }
    by_song
        .into_iter()
        .map(|(id, mut v)| {
            v.sort_by_key(|(i, _)| *i);
            (id, v.into_iter().map(|(_, p)| p).collect())
        })
        .collect()
}

/// Labels every song that has scores, ordered by song id.
pub fn label_songs(scores: &[BatchScore], cfg: &LabelConfig) -> Result<Vec<SongPrediction>> {
    cfg.validate()?;
    Ok(group_scores(scores)
        .into_iter()
        .map(|(id, probs)| {
            let l = label_song(&probs, cfg);
            SongPrediction {
                song_id: id.to_owned(),
                sexist: l.sexist,
                n_flagged: l.n_flagged,
                n_batches: probs.len(),
                score: song_score(&probs, cfg.n_b),
            }
        })
        .collect())
}

pub fn write_predictions_csv<W: Write>(preds: &[SongPrediction], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["song_id", "sexist", "n_flagged", "n_batches", "score"])?;
    for p in preds {
        w.write_record([
            p.song_id.clone(),
            u8::from(p.sexist).to_string(),
            p.n_flagged.to_string(),
            p.n_batches.to_string(),
            p.score.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_bool(field: &str, context: &str) -> Result<bool> {
    match field.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "sexist" => Ok(true),
        "0" | "false" | "no" | "non_sexist" | "not_sexist" => Ok(false),
        other => Err(Error::parse(
            context,
            format!("'{other}' is not a boolean label"),
        )),
    }
}

pub fn read_predictions_csv<R: Read>(input: R) -> Result<Vec<SongPrediction>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let ctx = format!("predictions row {}", i + 1);
        let field = |k: usize| {
            rec.get(k)
                .ok_or_else(|| Error::parse(&ctx, "missing column"))
        };
        let num =
            |k: usize| -> Result<usize> { field(k)?.parse().map_err(|e| Error::parse(&ctx, e)) };
        let score = match field(4)? {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|e| Error::parse(&ctx, e))?),
        };
        out.push(SongPrediction {
            song_id: field(0)?.to_owned(),
            sexist: parse_bool(field(1)?, &ctx)?,
            n_flagged: num(2)?,
            n_batches: num(3)?,
            score,
        });
    }
    Ok(out)
}

/// Reads `song_id,sexist` rows; labels may be 0/1 or true/false.
pub fn read_gold_csv<R: Read>(input: R) -> Result<BTreeMap<String, bool>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse("gold labels", format!("missing '{name}' column")))
    };
    let (id_col, label_col) = (col("song_id")?, col("sexist")?);
    let mut out = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let ctx = format!("gold row {}", i + 1);
        let id = rec.get(id_col).unwrap_or_default().trim().to_owned();
        let label = parse_bool(rec.get(label_col).unwrap_or_default(), &ctx)?;
        if out.insert(id.clone(), label).is_some() {
            return Err(Error::parse(ctx, format!("song '{id}' labeled twice")));
        }
    }
    Ok(out)
}

pub fn write_gold_csv<W: Write>(gold: &BTreeMap<String, bool>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["song_id", "sexist"])?;
    for (id, s) in gold {
        w.write_record([id.as_str(), if *s { "1" } else { "0" }])?;
    }
    w.flush()?;
    Ok(())
}
