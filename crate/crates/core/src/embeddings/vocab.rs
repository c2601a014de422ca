use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::text;

/// Corpus frequency of every token, including words below `min_count`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn from_documents<'a>(documents: impl IntoIterator<Item = &'a str>) -> Self {
        let mut table = FrequencyTable::default();
        for doc in documents {
            text::for_each_token(doc, |t| table.add(t, 1));
        }
        table
    }

    pub fn add(&mut self, word: &str, count: u64) {
        match self.counts.get_mut(word) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(word.to_owned(), count);
            }
        }
        self.total += count;
    }

    /// Frequency of `word`, zero when absent.
    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, c)| (w.as_str(), *c))
    }

    /// Tab-separated `word<TAB>count`, sorted by word.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        let sorted: BTreeMap<&str, u64> = self.iter().collect();
        for (w, c) in sorted {
            writeln!(out, "{w}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut table = FrequencyTable::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (w, c) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(format!("frequency line {}", i + 1), "missing tab"))?;
            let c: u64 = c
                .trim()
                .parse()
                .map_err(|e| Error::parse(format!("frequency line {}", i + 1), e))?;
            table.add(w, c);
        }
        Ok(table)
    }
}

/// Words kept for training, ordered by descending count then alphabetically.
#[derive(Clone, Debug)]
pub struct Vocab {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    frequencies: FrequencyTable,
    min_count: u64,
}

impl Vocab {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn frequencies(&self) -> &FrequencyTable {
        &self.frequencies
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Sum of counts of in-vocabulary words.
    pub fn retained_tokens(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Counts tokens and keeps the words that occur at least `min_count` times.
pub fn build_vocab<'a>(
    documents: impl IntoIterator<Item = &'a str>,
    min_count: u64,
) -> Result<Vocab> {
    let frequencies = FrequencyTable::from_documents(documents);
    if frequencies.total_tokens() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut kept: Vec<(&str, u64)> = frequencies
        .iter()
        .filter(|(_, c)| *c >= min_count)
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let words: Vec<String> = kept.iter().map(|(w, _)| (*w).to_owned()).collect();
    let counts = kept.iter().map(|(_, c)| *c).collect();
    let index = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    Ok(Vocab {
        words,
        counts,
        index,
        frequencies,
        min_count,
    })
}
