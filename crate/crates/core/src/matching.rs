//! Linking chart and label datasets to corpus songs.
//!
//! Names are normalized, then an entry is matched on artist first and on
//! title second. Each stage accepts an exact normalized match, or else the
//! best fuzzy candidate whose edit-distance similarity reaches the stage's
//! threshold.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::SongRecord;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartSource {
    BillboardHot100,
    BillboardTop10,
    GoldLabels,
}

impl ChartSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ChartSource::BillboardHot100 => "billboard_hot100",
            ChartSource::BillboardTop10 => "billboard_top10",
            ChartSource::GoldLabels => "gold_labels",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "billboard_hot100" => Some(ChartSource::BillboardHot100),
            "billboard_top10" => Some(ChartSource::BillboardTop10),
            "gold_labels" => Some(ChartSource::GoldLabels),
            _ => None,
        }
    }
}

impl fmt::Display for ChartSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub source: ChartSource,
    pub artist_name: String,
    pub title: String,
    /// Chart week or year, kept verbatim.
    pub week_or_year: Option<String>,
    /// Free-form payload, e.g. a gold label.
    pub payload: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMethod {
    Exact,
    Fuzzy,
    Unmatched,
}

impl MatchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMethod::Exact => "exact",
            MatchMethod::Fuzzy => "fuzzy",
            MatchMethod::Unmatched => "unmatched",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchResult {
    pub entry: ChartEntry,
    pub matched_song_id: Option<String>,
    /// Weaker of the artist and title similarities; 0 when unmatched.
    pub score: f64,
    pub method: MatchMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    pub artist_threshold: f64,
    pub title_threshold: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            artist_threshold: 0.90,
            title_threshold: 0.85,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("artist_threshold", self.artist_threshold),
            ("title_threshold", self.title_threshold),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {t}")));
            }
        }
        Ok(())
    }
}

fn strip_parenthetical(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut stack: Vec<char> = Vec::new();
    let mut pending = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' | '{' => {
                stack.push(c);
                pending.push(c);
            }
            ')' | ']' | '}' if !stack.is_empty() => {
                let open = stack.pop();
                let matches = matches!(
                    (open, c),
                    (Some('('), ')') | (Some('['), ']') | (Some('{'), '}')
                );
                if !matches {
                    // Mismatched closer: treat the whole segment as text.
                    out.push_str(&pending);
                    out.push(c);
                    pending.clear();
                    stack.clear();
                } else if stack.is_empty() {
                    pending.clear();
                    out.push(' ');
                } else {
                    pending.push(c);
                }
            }
            _ if !stack.is_empty() => pending.push(c),
            _ => out.push(c),
        }
    }
    // Unclosed brackets are kept as plain text.
    out.push_str(&pending);
    out
}

/// Canonical form of an artist name or song title.
///
/// Rules, in order: fold diacritics, lowercase, drop bracketed segments,
/// delete apostrophes, turn remaining punctuation into spaces, drop leading
/// `the` articles and collapse whitespace. The result only contains
/// lowercase alphanumerics and single spaces, so the function is idempotent.
pub fn normalize(name: &str) -> String {
    let folded: String = name.nfkd().filter(|c| !is_combining_mark(*c)).collect();
    let lowered = folded.to_lowercase();
    let stripped = strip_parenthetical(&lowered);
    let cleaned: String = stripped
        .chars()
        .filter(|c| !matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '`'))
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    let mut words: Vec<&str> = cleaned.split_whitespace().collect();
    let leading_articles = words
        .iter()
        .take(words.len().saturating_sub(1))
        .take_while(|w| **w == "the")
        .count();
    words.drain(..leading_articles);
    words.join(" ")
}

/// `1 - levenshtein(a, b) / max(len(a), len(b))` over characters; two empty
/// strings are identical.
pub fn similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / max_len as f64
}

struct IndexedSong<'a> {
    title: String,
    year: i32,
    song_id: &'a str,
}

/// Corpus songs grouped by normalized artist name.
pub struct CorpusIndex<'a> {
    by_artist: BTreeMap<String, Vec<IndexedSong<'a>>>,
}

impl<'a> CorpusIndex<'a> {
    pub fn new(corpus: &'a [SongRecord]) -> Self {
        let mut by_artist: BTreeMap<String, Vec<IndexedSong<'a>>> = BTreeMap::new();
        for r in corpus {
            by_artist
                .entry(normalize(&r.artist_name))
                .or_default()
                .push(IndexedSong {
                    title: normalize(&r.title),
                    year: r.year,
                    song_id: &r.song_id,
                });
        }
        CorpusIndex { by_artist }
    }

    /// Artist keys with the best similarity at or above `threshold`.
    fn artist_candidates(&self, artist: &str, threshold: f64) -> (Vec<&str>, f64, bool) {
        if self.by_artist.contains_key(artist) {
            let (k, _) = self.by_artist.get_key_value(artist).expect("checked");
            return (vec![k.as_str()], 1.0, true);
        }
        let mut best = Vec::new();
        let mut best_score = f64::NEG_INFINITY;
        for key in self.by_artist.keys() {
            let s = similarity(artist, key);
            if s < threshold {
                continue;
            }
            if s > best_score {
                best_score = s;
                best.clear();
            }
            if s == best_score {
                best.push(key.as_str());
            }
        }
        (best, best_score, false)
    }

    pub fn match_entry(&self, entry: &ChartEntry, cfg: &MatchConfig) -> MatchResult {
        let unmatched = || MatchResult {
            entry: entry.clone(),
            matched_song_id: None,
            score: 0.0,
            method: MatchMethod::Unmatched,
        };
        let artist = normalize(&entry.artist_name);
        let title = normalize(&entry.title);
        let (artists, artist_score, artist_exact) =
            self.artist_candidates(&artist, cfg.artist_threshold);
        if artists.is_empty() {
            return unmatched();
        }
        let songs = artists.iter().flat_map(|a| self.by_artist[*a].iter());

        let mut exact: Vec<&IndexedSong> = Vec::new();
        let mut fuzzy: Vec<(&IndexedSong, f64)> = Vec::new();
        for song in songs {
            if song.title == title {
                exact.push(song);
            } else if exact.is_empty() {
                let s = similarity(&title, &song.title);
                if s >= cfg.title_threshold {
                    fuzzy.push((song, s));
                }
            }
        }
        let (chosen, title_score) = if !exact.is_empty() {
            (exact, 1.0)
        } else {
            let best = fuzzy
                .iter()
                .map(|(_, s)| *s)
                .fold(f64::NEG_INFINITY, f64::max);
            let chosen: Vec<&IndexedSong> = fuzzy
                .iter()
                .filter(|(_, s)| *s == best)
                .map(|(song, _)| *song)
                .collect();
            (chosen, best)
        };
        let Some(song) = chosen
            .into_iter()
            .min_by(|a, b| a.year.cmp(&b.year).then_with(|| a.song_id.cmp(b.song_id)))
        else {
            return unmatched();
        };
        let method = if artist_exact && title_score == 1.0 && song.title == title {
            MatchMethod::Exact
        } else {
            MatchMethod::Fuzzy
        };
        MatchResult {
            entry: entry.clone(),
            matched_song_id: Some(song.song_id.to_owned()),
            score: artist_score.min(title_score),
            method,
        }
    }
}

/// Matches every entry against the corpus.
pub fn match_records(
    entries: &[ChartEntry],
    corpus: &[SongRecord],
    cfg: &MatchConfig,
) -> Result<Vec<MatchResult>> {
    cfg.validate()?;
    let index = CorpusIndex::new(corpus);
    Ok(entries
        .par_iter()
        .map(|e| index.match_entry(e, cfg))
        .collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MatchRate {
    pub source: String,
    pub entries: usize,
    pub matched_entries: usize,
    /// Distinct normalized (artist, title) pairs.
    pub unique_songs: usize,
    pub unique_matched: usize,
    pub unique_match_rate: f64,
}

/// Per-source match rates over entries and over distinct chart songs.
pub fn match_rates(results: &[MatchResult]) -> Vec<MatchRate> {
    #[derive(Default)]
    struct Acc {
        entries: usize,
        matched: usize,
        songs: BTreeMap<(String, String), bool>,
    }
    let mut acc: BTreeMap<ChartSource, Acc> = BTreeMap::new();
    for r in results {
        let a = acc.entry(r.entry.source).or_default();
        a.entries += 1;
        let hit = r.matched_song_id.is_some();
        if hit {
            a.matched += 1;
        }
        let key = (normalize(&r.entry.artist_name), normalize(&r.entry.title));
        *a.songs.entry(key).or_insert(false) |= hit;
    }
    acc.into_iter()
        .map(|(source, a)| {
            let unique_matched = a.songs.values().filter(|m| **m).count();
            MatchRate {
                source: source.as_str().to_owned(),
                entries: a.entries,
                matched_entries: a.matched,
                unique_songs: a.songs.len(),
                unique_matched,
                unique_match_rate: if a.songs.is_empty() {
                    0.0
                } else {
                    unique_matched as f64 / a.songs.len() as f64
                },
            }
        })
        .collect()
}

/// Reads a chart file with header `source,artist,title,date,payload`.
pub fn read_chart_entries<R: std::io::Read>(reader: R) -> Result<Vec<ChartEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse("chart header", format!("missing column '{name}'")))
    };
    let (c_source, c_artist, c_title) = (col("source")?, col("artist")?, col("title")?);
    let c_date = col("date").ok();
    let c_payload = col("payload").ok();
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let ctx = || format!("chart row {}", i + 2);
        let get = |c: usize| row.get(c).unwrap_or("").trim().to_owned();
        let source = ChartSource::parse(&get(c_source))
            .ok_or_else(|| Error::parse(ctx(), format!("unknown source '{}'", get(c_source))))?;
        let artist_name = get(c_artist);
        let title = get(c_title);
        if artist_name.is_empty() || title.is_empty() {
            return Err(Error::parse(ctx(), "artist and title must be non-empty"));
        }
        let opt = |c: Option<usize>| c.map(get).filter(|s| !s.is_empty());
        out.push(ChartEntry {
            source,
            artist_name,
            title,
            week_or_year: opt(c_date),
            payload: opt(c_payload),
        });
    }
    Ok(out)
}

pub fn write_chart_entries<W: std::io::Write>(entries: &[ChartEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "artist", "title", "date", "payload"])?;
    for e in entries {
        w.write_record([
            e.source.as_str(),
            &e.artist_name,
            &e.title,
            e.week_or_year.as_deref().unwrap_or(""),
            e.payload.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_match_results<W: std::io::Write>(results: &[MatchResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "source", "artist", "title", "date", "payload", "song_id", "score", "method",
    ])?;
    for r in results {
        w.write_record([
            r.entry.source.as_str(),
            &r.entry.artist_name,
            &r.entry.title,
            r.entry.week_or_year.as_deref().unwrap_or(""),
            r.entry.payload.as_deref().unwrap_or(""),
            r.matched_song_id.as_deref().unwrap_or(""),
            &format!("{:.6}", r.score),
            r.method.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads results written by [`write_match_results`].
pub fn read_match_results<R: std::io::Read>(reader: R) -> Result<Vec<MatchResult>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let ctx = || format!("match row {}", i + 2);
        if row.len() != 8 {
            return Err(Error::parse(ctx(), "expected 8 columns"));
        }
        let opt = |s: &str| (!s.is_empty()).then(|| s.to_owned());
        let source = ChartSource::parse(&row[0])
            .ok_or_else(|| Error::parse(ctx(), format!("unknown source '{}'", &row[0])))?;
        let method = match &row[7] {
            "exact" => MatchMethod::Exact,
            "fuzzy" => MatchMethod::Fuzzy,
            "unmatched" => MatchMethod::Unmatched,
            other => return Err(Error::parse(ctx(), format!("unknown method '{other}'"))),
        };
        out.push(MatchResult {
            entry: ChartEntry {
                source,
                artist_name: row[1].to_owned(),
                title: row[2].to_owned(),
                week_or_year: opt(&row[3]),
                payload: opt(&row[4]),
            },
            matched_song_id: opt(&row[5]),
            score: row[6].parse().map_err(|e| Error::parse(ctx(), e))?,
            method,
        });
    }
    Ok(out)
}

/// Song ids matched by entries of `source`.
pub fn matched_ids(results: &[MatchResult], source: ChartSource) -> BTreeSet<String> {
    results
        .iter()
        .filter(|r| r.entry.source == source)
        .filter_map(|r| r.matched_song_id.clone())
        .collect()
}

/// Exact normalized join, used as the reference for threshold 1.0 matching.
pub fn exact_join(entries: &[ChartEntry], corpus: &[SongRecord]) -> Vec<Option<String>> {
    let mut by_key: HashMap<(String, String), (i32, &str)> = HashMap::new();
    for r in corpus {
        let key = (normalize(&r.artist_name), normalize(&r.title));
        let cand = (r.year, r.song_id.as_str());
        by_key
            .entry(key)
            .and_modify(|cur| {
                if cand < *cur {
                    *cur = cand;
                }
            })
            .or_insert(cand);
    }
    entries
        .iter()
        .map(|e| {
            by_key
                .get(&(normalize(&e.artist_name), normalize(&e.title)))
                .map(|(_, id)| (*id).to_owned())
        })
        .collect()
}
