use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::error::{Error, Result};

const MAGIC: &str = "#lyricscope-embeddings";

/// Dense word vectors trained on one sub-corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSpace {
    corpus_name: String,
    seed: u64,
    config: TrainConfig,
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    vectors: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    corpus_name: String,
    seed: u64,
    config: TrainConfig,
}

impl EmbeddingSpace {
    /// Builds a space from row-major `vectors` (`words.len() * dim` values).
    pub fn new(
        corpus_name: impl Into<String>,
        seed: u64,
        config: TrainConfig,
        words: Vec<String>,
        dim: usize,
        vectors: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidValue(
                "embedding dimension must be >= 1".into(),
            ));
        }
        if vectors.len() != words.len() * dim {
            return Err(Error::InvalidValue(format!(
                "{} values for {} words of dimension {dim}",
                vectors.len(),
                words.len()
            )));
        }
        if let Some(pos) = vectors.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "non-finite component in vector of '{}'",
                words[pos / dim]
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::InvalidValue(format!("duplicate word '{w}'")));
            }
        }
        Ok(EmbeddingSpace {
            corpus_name: corpus_name.into(),
            seed,
            config,
            words,
            index,
            dim,
            vectors,
        })
    }

    /// Convenience constructor for hand-built spaces.
    pub fn from_pairs<S: AsRef<str>>(corpus_name: &str, pairs: &[(S, Vec<f64>)]) -> Result<Self> {
        let dim = pairs.first().map(|(_, v)| v.len()).unwrap_or(1);
        if pairs.iter().any(|(_, v)| v.len() != dim) {
            return Err(Error::InvalidValue("vectors of unequal length".into()));
        }
        let words = pairs.iter().map(|(w, _)| w.as_ref().to_owned()).collect();
        let vectors = pairs.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        let config = TrainConfig {
            dim,
            ..TrainConfig::default()
        };
        EmbeddingSpace::new(corpus_name, 0, config, words, dim, vectors)
    }

    pub fn corpus_name(&self) -> &str {
        &self.corpus_name
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Vector of `word`, or an `oov` error naming the word and corpus.
    pub fn vector(&self, word: &str) -> Result<&[f64]> {
        self.get(word).ok_or_else(|| Error::Oov {
            word: word.to_owned(),
            corpus: self.corpus_name.clone(),
        })
    }

    /// Multiplies the stored vector of `word` by `factor`.
    pub fn scale_vector(&mut self, word: &str, factor: f64) -> Result<()> {
        let i = *self.index.get(word).ok_or_else(|| Error::Oov {
            word: word.to_owned(),
            corpus: self.corpus_name.clone(),
        })?;
        for v in &mut self.vectors[i * self.dim..(i + 1) * self.dim] {
            *v *= factor;
        }
        Ok(())
    }

    pub fn cosine(&self, w1: &str, w2: &str) -> Result<f64> {
        Ok(cosine_vectors(self.vector(w1)?, self.vector(w2)?))
    }

    /// Text format: a header line, a `rows dim` line, then `word v1 .. vd`
    /// per row. Values use the shortest representation that parses back to
    /// the same bits.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let header = Header {
            corpus_name: self.corpus_name.clone(),
            seed: self.seed,
            config: self.config.clone(),
        };
        writeln!(out, "{MAGIC} {}", serde_json::to_string(&header)?)?;
        writeln!(out, "{} {}", self.words.len(), self.dim)?;
        let mut line = String::new();
        for (i, w) in self.words.iter().enumerate() {
            line.clear();
            line.push_str(w);
            for v in &self.vectors[i * self.dim..(i + 1) * self.dim] {
                line.push(' ');
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let mut next = |what: &str| -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::parse("embedding file", format!("missing {what}")))?
                .map_err(Error::from)
        };
        let header_line = next("header")?;
        let json = header_line
            .strip_prefix(MAGIC)
            .ok_or_else(|| Error::parse("embedding file", "bad magic"))?;
        let header: Header = serde_json::from_str(json.trim())?;
        let shape = next("shape line")?;
        let mut parts = shape.split_whitespace().map(str::parse::<usize>);
        let (rows, dim) = match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(r)), Some(Ok(d)), None) => (r, d),
            _ => return Err(Error::parse("embedding file", "bad shape line")),
        };
        let mut words = Vec::with_capacity(rows);
        let mut vectors = Vec::with_capacity(rows * dim);
        for row in 0..rows {
            let line = next("vector row")?;
            let mut fields = line.split(' ');
            let word = fields.next().unwrap_or_default();
            if word.is_empty() {
                return Err(Error::parse(
                    format!("embedding row {}", row + 1),
                    "empty word",
                ));
            }
            let before = vectors.len();
            for f in fields {
                let v: f64 = f
                    .parse()
                    .map_err(|e| Error::parse(format!("embedding row {}", row + 1), e))?;
                vectors.push(v);
            }
            if vectors.len() - before != dim {
                return Err(Error::parse(
                    format!("embedding row {}", row + 1),
                    format!("expected {dim} values, found {}", vectors.len() - before),
                ));
            }
            words.push(word.to_owned());
        }
        EmbeddingSpace::new(
            header.corpus_name,
            header.seed,
            header.config,
            words,
            dim,
            vectors,
        )
    }
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine_vectors(a: &[f64], b: &[f64]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}
