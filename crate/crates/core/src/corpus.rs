//! Song records, ingestion filters, genre top-leveling and corpus partitions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtistType {
    Solo,
    Group,
}

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Male,
    Female,
    Mixed,
    Other,
    #[default]
    Unknown,
}

/// Gender of a single band member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberGender {
    Male,
    Female,
    Other,
    Unknown,
}

impl ArtistType {
    pub fn as_str(self) -> &'static str {
        match self {
            ArtistType::Solo => "solo",
            ArtistType::Group => "group",
        }
    }
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Male => "male",
            Gender::Female => "female",
            Gender::Mixed => "mixed",
            Gender::Other => "other",
            Gender::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ArtistType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One song lyric with its artist and publication metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SongRecord {
    pub song_id: String,
    pub title: String,
    pub artist_id: String,
    pub artist_name: String,
    pub artist_type: ArtistType,
    #[serde(default)]
    pub gender: Gender,
    pub year: i32,
    #[serde(default)]
    pub genre_raw: Option<String>,
    #[serde(default)]
    pub genre_top: Option<String>,
    pub language: String,
    pub lyrics: String,
    /// Band member genders; when present on a group record the group gender
    /// is derived from them during filtering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member_genders: Option<Vec<MemberGender>>,
}

/// Derives a band's gender label from its members.
pub fn assign_group_gender(member_genders: &[MemberGender]) -> Gender {
    if member_genders.is_empty() {
        return Gender::Unknown;
    }
    let mut male = false;
    let mut female = false;
    for g in member_genders {
        match g {
            MemberGender::Male => male = true,
            MemberGender::Female => female = true,
            MemberGender::Other | MemberGender::Unknown => return Gender::Unknown,
        }
    }
    match (male, female) {
        (true, true) => Gender::Mixed,
        (true, false) => Gender::Male,
        (false, true) => Gender::Female,
        (false, false) => Gender::Unknown,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub year_min: i32,
    pub year_max: i32,
    pub min_words: usize,
    pub min_lines: usize,
    /// Artists need strictly more songs than this in the language/year pool.
    pub min_songs_per_artist: usize,
    pub language_allow: Vec<String>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            year_min: 1960,
            year_max: 2009,
            min_words: 10,
            min_lines: 4,
            min_songs_per_artist: 10,
            language_allow: vec!["english".to_owned()],
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.year_min > self.year_max {
            return Err(Error::Config(format!(
                "year_min {} exceeds year_max {}",
                self.year_min, self.year_max
            )));
        }
        if self.min_words < 1 || self.min_lines < 1 {
            return Err(Error::Config("min_words and min_lines must be >= 1".into()));
        }
        Ok(())
    }

    fn language_allowed(&self, language: &str) -> bool {
        let lang = language.trim();
        self.language_allow
            .iter()
            .any(|l| l.trim().eq_ignore_ascii_case(lang))
    }
}

/// Machine-readable reason a record was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    ParseError,
    DuplicateId,
    YearRange,
    Language,
    ArtistSongCount,
    MinWords,
    MinLines,
    GenderUnknown,
    InvalidGender,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::ParseError => "parse_error",
            RejectReason::DuplicateId => "duplicate_id",
            RejectReason::YearRange => "year_range",
            RejectReason::Language => "language",
            RejectReason::ArtistSongCount => "artist_song_count",
            RejectReason::MinWords => "min_words",
            RejectReason::MinLines => "min_lines",
            RejectReason::GenderUnknown => "gender_unknown",
            RejectReason::InvalidGender => "invalid_gender",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub song_id: String,
    pub reasons: Vec<RejectReason>,
}

/// A line of input that could not be decoded into a [`SongRecord`].
#[derive(Clone, Debug, PartialEq)]
pub struct Malformed {
    pub line: usize,
    pub song_id: Option<String>,
    pub message: String,
}

pub type ParsedRecord = std::result::Result<SongRecord, Malformed>;

/// Decodes one JSON object per line. Blank lines are skipped; undecodable
/// lines become [`Malformed`] entries rather than errors.
pub fn parse_records<R: BufRead>(reader: R) -> Result<Vec<ParsedRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record_line(&line, i + 1));
    }
    Ok(out)
}

fn parse_record_line(line: &str, line_no: usize) -> ParsedRecord {
    match serde_json::from_str::<SongRecord>(line) {
        Ok(rec) => Ok(rec),
        Err(err) => {
            let song_id = serde_json::from_str::<serde_json::Value>(line)
                .ok()
                .and_then(|v| v.get("song_id").and_then(|s| s.as_str()).map(str::to_owned));
            Err(Malformed {
                line: line_no,
                song_id,
                message: err.to_string(),
            })
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct FilterOutcome {
    /// Accepted records sorted by `song_id`.
    pub accepted: Vec<SongRecord>,
    /// Rejections sorted by `song_id`.
    pub rejections: Vec<Rejection>,
}

impl FilterOutcome {
    /// Count of rejections carrying each reason.
    pub fn reason_counts(&self) -> BTreeMap<RejectReason, usize> {
        let mut counts = BTreeMap::new();
        for r in &self.rejections {
            for reason in &r.reasons {
                *counts.entry(*reason).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Applies the ingestion filters to parsed records.
///
/// Group records carrying member genders get their gender derived here. The
/// artist song-count threshold is evaluated over the records that pass the
/// language and year filters, before any lyric-length filter. Output order
/// does not depend on input order.
pub fn filter_songs(records: Vec<ParsedRecord>, cfg: &FilterConfig) -> Result<FilterOutcome> {
    cfg.validate()?;

    let mut rejections = Vec::new();
    let mut parsed = Vec::with_capacity(records.len());
    for rec in records {
        match rec {
            Ok(r) => parsed.push(r),
            Err(m) => rejections.push(Rejection {
                song_id: m.song_id.unwrap_or_else(|| format!("line:{}", m.line)),
                reasons: vec![RejectReason::ParseError],
            }),
        }
    }

    // Ties on song_id are resolved by content so that the surviving copy does
    // not depend on stream order.
    let mut keyed: Vec<(String, SongRecord)> = parsed
        .into_par_iter()
        .map(|r| (serde_json::to_string(&r).unwrap_or_default(), r))
        .collect();
    keyed.par_sort_by(|a, b| a.1.song_id.cmp(&b.1.song_id).then_with(|| a.0.cmp(&b.0)));

    let mut unique: Vec<SongRecord> = Vec::with_capacity(keyed.len());
    for (_, rec) in keyed {
        if unique
            .last()
            .is_some_and(|prev| prev.song_id == rec.song_id)
        {
            rejections.push(Rejection {
                song_id: rec.song_id,
                reasons: vec![RejectReason::DuplicateId],
            });
        } else {
            unique.push(rec);
        }
    }

    for rec in unique.iter_mut() {
        if rec.artist_type == ArtistType::Group {
            if let Some(members) = &rec.member_genders {
                rec.gender = assign_group_gender(members);
            }
        }
    }

    let in_pool = |r: &SongRecord| {
        (cfg.year_min..=cfg.year_max).contains(&r.year) && cfg.language_allowed(&r.language)
    };
    let mut artist_counts: HashMap<&str, usize> = HashMap::new();
    for r in unique.iter().filter(|r| in_pool(r)) {
        *artist_counts.entry(r.artist_id.as_str()).or_insert(0) += 1;
    }

    let verdicts: Vec<Vec<RejectReason>> = unique
        .par_iter()
        .map(|r| {
            let mut reasons = Vec::new();
            if !(cfg.year_min..=cfg.year_max).contains(&r.year) {
                reasons.push(RejectReason::YearRange);
            }
            if !cfg.language_allowed(&r.language) {
                reasons.push(RejectReason::Language);
            }
            if in_pool(r)
                && artist_counts
                    .get(r.artist_id.as_str())
                    .copied()
                    .unwrap_or(0)
                    <= cfg.min_songs_per_artist
            {
                reasons.push(RejectReason::ArtistSongCount);
            }
            if text::word_count(&r.lyrics) < cfg.min_words {
                reasons.push(RejectReason::MinWords);
            }
            if text::non_empty_lines(&r.lyrics).len() < cfg.min_lines {
                reasons.push(RejectReason::MinLines);
            }
            match (r.artist_type, r.gender) {
                (_, Gender::Unknown) => reasons.push(RejectReason::GenderUnknown),
                (ArtistType::Solo, Gender::Mixed) => reasons.push(RejectReason::InvalidGender),
                _ => {}
            }
            reasons
        })
        .collect();

    let mut accepted = Vec::new();
    for (rec, reasons) in unique.into_iter().zip(verdicts) {
        if reasons.is_empty() {
            accepted.push(rec);
        } else {
            rejections.push(Rejection {
                song_id: rec.song_id,
                reasons,
            });
        }
    }
    rejections.sort_by(|a, b| {
        a.song_id
            .cmp(&b.song_id)
            .then_with(|| a.reasons.cmp(&b.reasons))
    });

    Ok(FilterOutcome {
        accepted,
        rejections,
    })
}

/// Raw genre string to top-level genre lookup.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenreMap {
    entries: BTreeMap<String, String>,
}

fn genre_key(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

impl GenreMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, raw: &str, top: &str) {
        self.entries.insert(genre_key(raw), top.trim().to_owned());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `raw genre = Top Level` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = GenreMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (raw, top) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("genre map line {}: expected `raw = top`", i + 1))
            })?;
            if raw.trim().is_empty() || top.trim().is_empty() {
                return Err(Error::Config(format!(
                    "genre map line {}: empty key or value",
                    i + 1
                )));
            }
            map.insert(raw, top);
        }
        Ok(map)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn lookup(&self, genre_raw: &str) -> Option<&str> {
        self.entries.get(&genre_key(genre_raw)).map(String::as_str)
    }
}

/// Top-level genre for a raw genre string, if the map knows it.
pub fn map_genre(genre_raw: Option<&str>, map: &GenreMap) -> Option<String> {
    genre_raw.and_then(|g| map.lookup(g)).map(str::to_owned)
}

/// Fills `genre_top` on every record from its `genre_raw`.
pub fn apply_genre_map(records: &mut [SongRecord], map: &GenreMap) {
    for r in records {
        r.genre_top = map_genre(r.genre_raw.as_deref(), map);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionName {
    AllSolo,
    MaleSolo,
    FemaleSolo,
}

impl PartitionName {
    pub const ALL: [PartitionName; 3] = [
        PartitionName::AllSolo,
        PartitionName::MaleSolo,
        PartitionName::FemaleSolo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PartitionName::AllSolo => "all_solo",
            PartitionName::MaleSolo => "male_solo",
            PartitionName::FemaleSolo => "female_solo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

impl fmt::Display for PartitionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPartition {
    pub name: PartitionName,
    /// Sorted ascending.
    pub song_ids: Vec<String>,
}

/// Splits solo-artist songs into the all / male / female sub-corpora.
pub fn partition_corpora(corpus: &[SongRecord]) -> Vec<CorpusPartition> {
    let mut all = Vec::new();
    let mut male = Vec::new();
    let mut female = Vec::new();
    for r in corpus.iter().filter(|r| r.artist_type == ArtistType::Solo) {
        match r.gender {
            Gender::Male => male.push(r.song_id.clone()),
            Gender::Female => female.push(r.song_id.clone()),
            Gender::Other => {}
            Gender::Mixed | Gender::Unknown => continue,
        }
        all.push(r.song_id.clone());
    }
    for ids in [&mut all, &mut male, &mut female] {
        ids.sort();
        ids.dedup();
    }
    vec![
        CorpusPartition {
            name: PartitionName::AllSolo,
            song_ids: all,
        },
        CorpusPartition {
            name: PartitionName::MaleSolo,
            song_ids: male,
        },
        CorpusPartition {
            name: PartitionName::FemaleSolo,
            song_ids: female,
        },
    ]
}

/// Lyrics of the partition's songs in `song_id` order.
pub fn partition_documents<'a>(
    corpus: &'a [SongRecord],
    partition: &CorpusPartition,
) -> Vec<&'a str> {
    let by_id: HashMap<&str, &SongRecord> =
        corpus.iter().map(|r| (r.song_id.as_str(), r)).collect();
    partition
        .song_ids
        .iter()
        .filter_map(|id| by_id.get(id.as_str()).map(|r| r.lyrics.as_str()))
        .collect()
}

/// Concatenated lyric text of a partition, one song after another, each
/// terminated by a newline.
pub fn partition_text(corpus: &[SongRecord], partition: &CorpusPartition) -> String {
    let mut out = String::new();
    for lyrics in partition_documents(corpus, partition) {
        out.push_str(lyrics.trim_end());
        out.push('\n');
    }
    out
}
