use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::batch::LineBatch;
use crate::error::{Error, Result};
use crate::text::tokenize;

/// Probability that one batch contains sexist content.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchScore {
    pub song_id: String,
    pub batch_index: usize,
    pub prob: f64,
    pub scorer_id: String,
}

/// Assigns a probability to a batch. `Ok(None)` means the scorer has no
/// value for it.
pub trait BatchScorer: Sync {
    fn id(&self) -> &str;
    fn score(&self, batch: &LineBatch) -> Result<Option<f64>>;
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Logistic model over term counts: `sigmoid(bias + sum(weight * hits))`.
/// Terms may span several tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct LexiconScorer {
    terms: Vec<(Vec<String>, f64)>,
    bias: f64,
    id: String,
}

impl LexiconScorer {
    pub fn new<S: AsRef<str>>(terms: &[(S, f64)], bias: f64) -> Result<Self> {
        let mut out: Vec<(Vec<String>, f64)> = Vec::with_capacity(terms.len());
        for (term, weight) in terms {
            let tokens = tokenize(term.as_ref());
            if tokens.is_empty() {
                return Err(Error::Config(format!(
                    "lexicon term '{}' has no word characters",
                    term.as_ref()
                )));
            }
            if !weight.is_finite() {
                return Err(Error::Config(format!(
                    "lexicon weight for '{}' is not finite",
                    term.as_ref()
                )));
            }
            if out.iter().any(|(t, _)| *t == tokens) {
                return Err(Error::Config(format!(
                    "lexicon term '{}' listed twice",
                    term.as_ref()
                )));
            }
            out.push((tokens, *weight));
        }
        if !bias.is_finite() {
            return Err(Error::Config("lexicon bias is not finite".into()));
        }
        Ok(LexiconScorer {
            terms: out,
            bias,
            id: "lexicon".into(),
        })
    }

    /// Parses `term = weight` lines plus an optional `@bias = value` line.
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut bias = 0.0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Config(format!("lexicon line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected 'term = weight'"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad(&format!("'{}' is not a number", value.trim())))?;
            match key.trim() {
                "@bias" => bias = value,
                k if k.starts_with('@') => return Err(bad(&format!("unknown directive '{k}'"))),
                k => terms.push((k.to_owned(), value)),
            }
        }
        LexiconScorer::new(&terms, bias)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "@bias = {}", self.bias);
        for (t, w) in &self.terms {
            let _ = writeln!(out, "{} = {w}", t.join(" "));
        }
        out
    }

    pub fn probability(&self, text: &str) -> f64 {
        let tokens = tokenize(text);
        let mut z = self.bias;
        for (term, weight) in &self.terms {
            let hits = tokens
                .windows(term.len())
                .filter(|w| *w == term.as_slice())
                .count();
            z += weight * hits as f64;
        }
        sigmoid(z)
    }
}

impl BatchScorer for LexiconScorer {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, batch: &LineBatch) -> Result<Option<f64>> {
        Ok(Some(self.probability(&batch.text())))
    }
}

#[derive(Deserialize)]
struct ExternalRecord {
    song_id: String,
    batch_index: usize,
    prob: f64,
}

/// Precomputed probabilities keyed by `(song_id, batch_index)`.
#[derive(Clone, Debug, Default)]
pub struct ExternalScores {
    probs: HashMap<(String, usize), f64>,
    id: String,
}

impl ExternalScores {
    pub fn new(id: impl Into<String>) -> Self {
        ExternalScores {
            probs: HashMap::new(),
            id: id.into(),
        }
    }

    pub fn insert(&mut self, song_id: &str, batch_index: usize, prob: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::InvalidValue(format!(
                "probability {prob} for ({song_id}, {batch_index}) outside [0, 1]"
            )));
        }
        if self
            .probs
            .insert((song_id.to_owned(), batch_index), prob)
            .is_some()
        {
            return Err(Error::InvalidValue(format!(
                "duplicate score for ({song_id}, {batch_index})"
            )));
        }
        Ok(())
    }

    /// Reads one JSON object per line with `song_id`, `batch_index`, `prob`.
    pub fn read_jsonl<R: BufRead>(reader: R, id: impl Into<String>) -> Result<Self> {
        let mut out = ExternalScores::new(id);
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let r: ExternalRecord = serde_json::from_str(&line)
                .map_err(|e| Error::parse(format!("scores line {}", i + 1), e))?;
            out.insert(&r.song_id, r.batch_index, r.prob)?;
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl BatchScorer for ExternalScores {
    fn id(&self) -> &str {
        &self.id
    }

    fn score(&self, batch: &LineBatch) -> Result<Option<f64>> {
        Ok(self
            .probs
            .get(&(batch.song_id.clone(), batch.batch_index))
            .copied())
    }
}

/// Scores every batch. All missing keys are reported together.
pub fn score_batches(scorer: &dyn BatchScorer, batches: &[LineBatch]) -> Result<Vec<BatchScore>> {
    let probs: Vec<Option<f64>> = batches
        .par_iter()
        .map(|b| scorer.score(b))
        .collect::<Result<_>>()?;
    let missing: Vec<(String, usize)> = batches
        .iter()
        .zip(&probs)
        .filter(|(_, p)| p.is_none())
        .map(|(b, _)| (b.song_id.clone(), b.batch_index))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingScores(missing));
    }
    batches
        .iter()
        .zip(probs)
        .map(|(b, p)| {
            let prob = p.expect("checked above");
            if !(0.0..=1.0).contains(&prob) {
                return Err(Error::InvalidValue(format!(
                    "scorer returned {prob} for ({}, {})",
                    b.song_id, b.batch_index
                )));
            }
            Ok(BatchScore {
                song_id: b.song_id.clone(),
                batch_index: b.batch_index,
                prob,
                scorer_id: scorer.id().to_owned(),
            })
        })
        .collect()
}

pub fn write_scores_jsonl<W: Write>(scores: &[BatchScore], mut out: W) -> Result<()> {
    for s in scores {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_scores_jsonl<R: BufRead>(reader: R) -> Result<Vec<BatchScore>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let s: BatchScore = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("scores line {}", i + 1), e))?;
        if !(0.0..=1.0).contains(&s.prob) {
            return Err(Error::InvalidValue(format!(
                "probability {} on scores line {} outside [0, 1]",
                s.prob,
                i + 1
            )));
        }
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(id: &str, idx: usize, text: &str) -> LineBatch {
        LineBatch {
            song_id: id.into(),
            batch_index: idx,
            first_line: idx * 2,
            lines: text.lines().map(String::from).collect(),
        }
    }

    #[test]
    fn lexicon_examples() {
        let lex = LexiconScorer::parse("@bias = -1.0\nbad = 2.0\n").unwrap();
        let hit = lex
            .score(&batch("s", 0, "so bad\nx\ny\nz"))
            .unwrap()
            .unwrap();
        assert!((hit - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-12);
        assert!((hit - 0.7311).abs() < 1e-4);
        let miss = lex.score(&batch("s", 0, "good\nx\ny\nz")).unwrap().unwrap();
        assert!((miss - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn lexicon_phrases_and_config() {
        let lex = LexiconScorer::parse("# comment\nshut up = 1.5  # inline\n@bias=0\n").unwrap();
        let z = lex.probability("Shut up, shut up!");
        assert!((z - 1.0 / (1.0 + (-3.0f64).exp())).abs() < 1e-12);
        let again = LexiconScorer::parse(&lex.to_config_string()).unwrap();
        assert_eq!(again, lex);
        for bad in ["x", "x = y", "@temp = 1", "... = 1", "a = 1\na = 2"] {
            assert!(
                matches!(LexiconScorer::parse(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn external_passthrough_and_missing() {
        let ext = ExternalScores::read_jsonl(
            r#"{"song_id":"s1","batch_index":0,"prob":0.9}"#.as_bytes(),
            "ext",
        )
        .unwrap();
        let scores = score_batches(&ext, &[batch("s1", 0, "a")]).unwrap();
        assert_eq!(scores[0].prob, 0.9);
        assert_eq!(scores[0].scorer_id, "ext");
        match score_batches(
            &ext,
            &[
                batch("s1", 0, "a"),
                batch("s1", 1, "b"),
                batch("s2", 0, "c"),
            ],
        ) {
            Err(Error::MissingScores(keys)) => {
                assert_eq!(keys, vec![("s1".to_string(), 1), ("s2".to_string(), 0)])
            }
            other => panic!("{other:?}"),
        }
        assert!(ExternalScores::read_jsonl(
            r#"{"song_id":"s1","batch_index":0,"prob":1.5}"#.as_bytes(),
            "ext"
        )
        .is_err());
    }

    #[test]
    fn scores_round_trip() {
        let s = vec![BatchScore {
            song_id: "a".into(),
            batch_index: 2,
            prob: 0.25,
            scorer_id: "lexicon".into(),
        }];
        let mut buf = Vec::new();
        write_scores_jsonl(&s, &mut buf).unwrap();
        assert_eq!(read_scores_jsonl(buf.as_slice()).unwrap(), s);
    }
}
