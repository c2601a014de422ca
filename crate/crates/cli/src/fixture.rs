//! Synthetic corpus generator with planted associations, planted sexist
//! passages, duplicates, covers and noisy chart listings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use lyricscope::assoc::{
    format_word_sets, standard_battery, standard_word_sets, BatteryRow, WordSet,
};
use lyricscope::corpus::{ArtistType, Gender, MemberGender, SongRecord};
use lyricscope::matching::{write_chart_entries, ChartEntry, ChartSource};
use lyricscope::sexism::write_gold_csv;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ProjectConfig;
use crate::error::{CliError, CliResult};

const FILLER: &[&str] = &[
    "night", "baby", "dream", "road", "light", "time", "heart", "rain", "fire", "sky", "river",
    "dance", "call", "walk", "stay", "gone", "feel", "know", "say", "come", "go", "down", "up",
    "around", "again", "tonight", "forever", "never", "always", "maybe", "just", "still", "only",
    "every", "little", "long", "old", "new", "cold", "warm", "blue", "red", "gold", "silver",
    "city", "town", "street", "window", "door", "train", "car", "highway", "moon", "star", "sun",
    "ocean", "summer", "winter", "morning", "evening", "radio", "song", "sing", "play", "run",
    "hold", "touch", "kiss", "smile", "cry", "tear", "wait", "turn", "burn", "shine", "fall",
    "rise", "fly", "free", "wild", "slow", "fast", "high", "low", "deep", "far", "near", "away",
    "home", "heart", "soul", "mind", "eyes", "hands", "face", "name", "word", "story", "line",
    "we", "you", "i", "me", "my", "your", "our", "they", "the", "a", "and", "in", "on", "to",
    "with", "for", "of", "all", "this", "that", "oh", "yeah", "whoa", "hey",
];

const TITLE_WORDS: &[&str] = &[
    "Midnight",
    "Highway",
    "Silver",
    "Heart",
    "Summer",
    "Rain",
    "Fire",
    "Dream",
    "River",
    "Shadow",
    "Golden",
    "Echo",
    "Blue",
    "Wild",
    "Lonely",
    "Electric",
    "Velvet",
    "Broken",
    "Sweet",
    "Neon",
    "Paper",
    "Honey",
    "Thunder",
    "Crystal",
    "Gentle",
    "Restless",
    "Winter",
    "Morning",
    "Little",
    "Faded",
    "Burning",
    "Hollow",
    "Starlight",
    "Ocean",
    "Whisper",
];

const FIRST_NAMES: &[&str] = &[
    "Aline", "Bram", "Cora", "Dario", "Elin", "Faye", "Gideon", "Hana", "Ivo", "Jolene", "Kasimir",
    "Lena", "Milo", "Nora", "Otis", "Priya", "Quinn", "Rafe", "Selma", "Tobin", "Ulla", "Viggo",
    "Wren", "Xavi", "Yara", "Zeno",
];

const SURNAMES: &[&str] = &[
    "Ashdown",
    "Brightwater",
    "Castellan",
    "Dunmore",
    "Elsworth",
    "Fairbanks",
    "Greymoor",
    "Hollander",
    "Ives",
    "Jarrow",
    "Kestrel",
    "Lindqvist",
    "Marlowe",
    "Northcott",
    "Oakes",
    "Pemberton",
    "Quayle",
    "Rosslyn",
    "Stroud",
    "Thorne",
    "Underhill",
    "Vance",
    "Whitlock",
];

const GROUP_WORDS: &[&str] = &[
    "Lanterns",
    "Foxes",
    "Satellites",
    "Wanderers",
    "Orchards",
    "Ravens",
    "Signals",
    "Tides",
    "Comets",
    "Harbors",
    "Giants",
    "Pilots",
    "Embers",
    "Mirrors",
    "Drifters",
];

/// (raw genre, top-level genre); `None` marks a genre missing from the map.
const GENRES: &[(&str, Option<&str>)] = &[
    ("Rock", Some("Rock")),
    ("hard  rock", Some("Rock")),
    ("Alt Rock", Some("Rock")),
    ("Pop", Some("Pop")),
    ("dance pop", Some("Pop")),
    ("Hip Hop", Some("Rap")),
    ("gangsta rap", Some("Rap")),
    ("Country", Some("Country")),
    ("R&B", Some("R&B")),
    ("Soul", Some("R&B")),
    ("Polka", None),
];

/// Terms of the generated lexicon. Two terms in one batch push its
/// probability above the default threshold; one term does not.
pub const LEXICON_TERMS: &[&str] = &[
    "toy",
    "trophy",
    "obey",
    "property",
    "objectify",
    "submit",
    "shut up",
    "in the kitchen",
];
pub const LEXICON_WEIGHT: f64 = 2.2;
pub const LEXICON_BIAS: f64 = -3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixtureConfig {
    pub seed: u64,
    /// Artists with enough songs to pass the artist filter.
    pub artists: usize,
    pub min_songs_per_artist: usize,
    pub max_songs_per_artist: usize,
    pub min_lines: usize,
    pub max_lines: usize,
    pub female_share: f64,
    pub group_share: f64,
    /// Probability that a lyric line carries planted target and attribute words.
    pub plant_rate: f64,
    /// Probability that a planted line pairs X with A (or Y with B) rather
    /// than the crossed pairing. 0.5 plants no association; 0 reverses it.
    pub bias_strength: f64,
    /// Per battery row overrides of `bias_strength`.
    pub row_strengths: Vec<f64>,
    /// Used instead of `bias_strength` in songs by female artists.
    pub female_bias_strength: Option<f64>,
    pub sexist_share: f64,
    pub duplicate_share: f64,
    pub cover_share: f64,
    /// Fraction of tokens replaced in near-duplicate copies.
    pub edit_rate: f64,
    pub chart_share: f64,
    pub top10_share: f64,
    pub gold_share: f64,
    /// Probability that a gold label is flipped.
    pub gold_noise: f64,
    /// Add records that the ingestion filters must reject.
    pub noise_records: bool,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        FixtureConfig {
            seed: 1,
            artists: 36,
            min_songs_per_artist: 14,
            max_songs_per_artist: 18,
            min_lines: 8,
            max_lines: 14,
            female_share: 0.45,
            group_share: 0.25,
            plant_rate: 0.6,
            bias_strength: 0.85,
            row_strengths: Vec::new(),
            female_bias_strength: None,
            sexist_share: 0.2,
            duplicate_share: 0.04,
            cover_share: 0.04,
            edit_rate: 0.03,
            chart_share: 0.3,
            top10_share: 0.3,
            gold_share: 0.4,
            gold_noise: 0.03,
            noise_records: true,
        }
    }
}

impl FixtureConfig {
    pub fn validate(&self) -> CliResult<()> {
        let probs = [
            ("female_share", self.female_share),
            ("group_share", self.group_share),
            ("plant_rate", self.plant_rate),
            ("bias_strength", self.bias_strength),
            ("sexist_share", self.sexist_share),
            ("duplicate_share", self.duplicate_share),
            ("cover_share", self.cover_share),
            ("edit_rate", self.edit_rate),
            ("chart_share", self.chart_share),
            ("top10_share", self.top10_share),
            ("gold_share", self.gold_share),
            ("gold_noise", self.gold_noise),
        ];
        let extra = self
            .row_strengths
            .iter()
            .map(|s| ("row_strengths", *s))
            .chain(
                self.female_bias_strength
                    .map(|s| ("female_bias_strength", s)),
            );
        for (name, p) in probs.into_iter().chain(extra) {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config(format!(
                    "fixture {name} {p} outside [0, 1]"
                )));
            }
        }
        if self.artists < 2 {
            return Err(CliError::Config("fixture needs at least 2 artists".into()));
        }
        if self.min_songs_per_artist < 11 || self.min_songs_per_artist > self.max_songs_per_artist {
            return Err(CliError::Config(
                "fixture songs per artist must satisfy 11 <= min <= max".into(),
            ));
        }
        if self.min_lines < 4 || self.min_lines > self.max_lines {
            return Err(CliError::Config(
                "fixture lines must satisfy 4 <= min <= max".into(),
            ));
        }
        Ok(())
    }
}

/// Target and attribute words whose co-occurrence is planted.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedPair {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub strength: f64,
}

impl PlantedPair {
    pub fn from_sets(x: &WordSet, y: &WordSet, a: &WordSet, b: &WordSet, strength: f64) -> Self {
        PlantedPair {
            x: x.words.clone(),
            y: y.words.clone(),
            a: a.words.clone(),
            b: b.words.clone(),
            strength,
        }
    }
}

fn pick_two<'a, R: Rng>(rng: &mut R, words: &'a [String]) -> [&'a str; 2] {
    let first = words.choose(rng).expect("non-empty word set");
    let second = words.choose(rng).expect("non-empty word set");
    [first, second]
}

fn filler_words<R: Rng>(rng: &mut R, filler: &[&str], n: usize) -> Vec<String> {
    (0..n)
        .map(|_| filler.choose(rng).expect("filler").to_string())
        .collect()
}

/// A line of `len` words: two targets and two attributes of one side of
/// `pair`, interleaved with filler. `len` must be at least 4.
pub fn planted_line<R: Rng>(
    rng: &mut R,
    pair: &PlantedPair,
    filler: &[&str],
    len: usize,
) -> String {
    let x_side = rng.gen_bool(0.5);
    let congruent = rng.gen_bool(pair.strength);
    let targets = if x_side { &pair.x } else { &pair.y };
    let attrs = if x_side == congruent {
        &pair.a
    } else {
        &pair.b
    };
    let mut words = filler_words(rng, filler, len.max(4) - 4);
    let planted = [pick_two(rng, targets), pick_two(rng, attrs)].concat();
    for w in planted {
        let at = rng.gen_range(0..=words.len());
        words.insert(at, w.to_owned());
    }
    words.join(" ")
}

pub fn filler_line<R: Rng>(rng: &mut R, filler: &[&str], len: usize) -> String {
    filler_words(rng, filler, len).join(" ")
}

/// Documents of `lines_per_doc` lines where each line is planted from a
/// random pair with probability `plant_rate`.
pub fn planted_documents(
    pairs: &[PlantedPair],
    filler: &[&str],
    docs: usize,
    lines_per_doc: usize,
    plant_rate: f64,
    seed: u64,
) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..docs)
        .map(|_| {
            let lines: Vec<String> = (0..lines_per_doc)
                .map(|_| {
                    let len = rng.gen_range(6..=9);
                    if rng.gen_bool(plant_rate) {
                        let pair = pairs.choose(&mut rng).expect("at least one pair");
                        planted_line(&mut rng, pair, filler, len)
                    } else {
                        filler_line(&mut rng, filler, len)
                    }
                })
                .collect();
            lines.join("\n")
        })
        .collect()
}

/// Filler vocabulary with every word of `exclude` removed.
pub fn filler_vocabulary(exclude: &BTreeSet<String>) -> Vec<&'static str> {
    let mut seen = BTreeSet::new();
    FILLER
        .iter()
        .copied()
        .filter(|w| !exclude.contains(*w) && seen.insert(*w))
        .collect()
}

/// Everything `gen-fixture` writes.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub records: Vec<SongRecord>,
    /// Extra raw lines appended to the corpus file, e.g. malformed JSON.
    pub raw_lines: Vec<String>,
    pub charts: Vec<ChartEntry>,
    pub gold: BTreeMap<String, bool>,
    pub genre_map: String,
    pub lexicon: String,
    pub word_sets: Vec<WordSet>,
    pub truth: Truth,
}

/// What was planted, for checking pipeline outputs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub sexist_songs: BTreeSet<String>,
    /// (original, copy) pairs by the same artist.
    pub duplicates: Vec<(String, String)>,
    /// (original, copy) pairs by different artists.
    pub covers: Vec<(String, String)>,
    /// Chart entry index to the song it was derived from.
    pub chart_songs: BTreeMap<usize, String>,
}

struct Artist {
    id: String,
    name: String,
    artist_type: ArtistType,
    gender: Gender,
    members: Option<Vec<MemberGender>>,
    genre: usize,
    start: i32,
}

fn sexist_line<R: Rng>(rng: &mut R, filler: &[&str], terms: usize) -> String {
    let n = rng.gen_range(3..=5);
    let mut words = filler_words(rng, filler, n);
    for _ in 0..terms {
        let t = LEXICON_TERMS.choose(rng).expect("terms");
        let at = rng.gen_range(0..=words.len());
        words.insert(at, t.to_string());
    }
    words.join(" ")
}

struct Generator<'a> {
    cfg: &'a FixtureConfig,
    rng: ChaCha8Rng,
    pairs: Vec<PlantedPair>,
    female_pairs: Vec<PlantedPair>,
    filler: Vec<&'static str>,
    next_song: usize,
}

impl Generator<'_> {
    fn song_id(&mut self) -> String {
        self.next_song += 1;
        format!("s{:05}", self.next_song)
    }

    fn lyrics(&mut self, female: bool, sexist: bool, lines: usize) -> String {
        let pairs = if female {
            &self.female_pairs
        } else {
            &self.pairs
        };
        let rng = &mut self.rng;
        let mut out: Vec<String> = (0..lines)
            .map(|_| {
                let len = rng.gen_range(5..=8);
                if rng.gen_bool(self.cfg.plant_rate) {
                    let pair = pairs.choose(rng).expect("pairs");
                    planted_line(rng, pair, &self.filler, len)
                } else {
                    filler_line(rng, &self.filler, len)
                }
            })
            .collect();
        // Sexist songs mostly get a passage with two terms per line; a few
        // only carry a single term and are hard to detect. Some clean songs
        // mention a single term.
        let roll: f64 = rng.gen();
        let passage: &[usize] = match (sexist, roll) {
            (true, r) if r < 0.1 => &[1],
            (true, _) => &[2, 2],
            (false, r) if r < 0.03 => &[2],
            (false, r) if r < 0.13 => &[1],
            _ => &[],
        };
        if !passage.is_empty() {
            let at = rng.gen_range(0..=out.len() - passage.len());
            for (k, terms) in passage.iter().enumerate() {
                out[at + k] = sexist_line(rng, &self.filler, *terms);
            }
        }
        out.join("\n")
    }

    fn title(&mut self, used: &mut BTreeSet<String>) -> String {
        loop {
            let n = self.rng.gen_range(2..=3);
            let words: Vec<&str> = TITLE_WORDS
                .choose_multiple(&mut self.rng, n)
                .copied()
                .collect();
            let t = words.join(" ");
            if used.insert(t.clone()) {
                return t;
            }
        }
    }

    fn artist(&mut self, idx: usize, used_names: &mut BTreeSet<String>) -> Artist {
        let group = self.rng.gen_bool(self.cfg.group_share);
        let (artist_type, gender, members) = if group {
            let roll: f64 = self.rng.gen();
            let size = self.rng.gen_range(3..=5);
            let members: Vec<MemberGender> = (0..size)
                .map(|k| match roll {
                    r if r < 0.45 => MemberGender::Male,
                    r if r < 0.75 => MemberGender::Female,
                    _ if k % 2 == 0 => MemberGender::Male,
                    _ => MemberGender::Female,
                })
                .collect();
            let g = lyricscope::corpus::assign_group_gender(&members);
            (ArtistType::Group, g, Some(members))
        } else if self.rng.gen_bool(self.cfg.female_share) {
            (ArtistType::Solo, Gender::Female, None)
        } else {
            (ArtistType::Solo, Gender::Male, None)
        };
        let name = loop {
            let name = if group {
                format!(
                    "The {} {}",
                    TITLE_WORDS.choose(&mut self.rng).expect("words"),
                    GROUP_WORDS.choose(&mut self.rng).expect("words")
                )
            } else {
                format!(
                    "{} {}",
                    FIRST_NAMES.choose(&mut self.rng).expect("names"),
                    SURNAMES.choose(&mut self.rng).expect("names")
                )
            };
            if used_names.insert(name.clone()) {
                break name;
            }
        };
        Artist {
            id: format!("a{idx:04}"),
            name,
            artist_type,
            gender,
            members,
            genre: self.rng.gen_range(0..GENRES.len()),
            start: self.rng.gen_range(1960..=2000),
        }
    }

    fn record(&mut self, artist: &Artist, title: String, year: i32, lyrics: String) -> SongRecord {
        SongRecord {
            song_id: self.song_id(),
            title,
            artist_id: artist.id.clone(),
            artist_name: artist.name.clone(),
            artist_type: artist.artist_type,
            gender: if artist.members.is_some() {
                Gender::Unknown
            } else {
                artist.gender
            },
            year,
            genre_raw: Some(GENRES[artist.genre].0.to_owned()),
            genre_top: None,
            language: "english".into(),
            lyrics,
            member_genders: artist.members.clone(),
        }
    }

    /// Replaces about `edit_rate` of the tokens, at least one.
    fn perturb(&mut self, lyrics: &str) -> String {
        let lines: Vec<Vec<String>> = lyrics
            .lines()
            .map(|l| l.split(' ').map(str::to_owned).collect())
            .collect();
        let total: usize = lines.iter().map(Vec::len).sum();
        let edits = ((total as f64 * self.cfg.edit_rate).floor() as usize).max(1);
        let mut lines = lines;
        for _ in 0..edits {
            let li = self.rng.gen_range(0..lines.len());
            let wi = self.rng.gen_range(0..lines[li].len());
            lines[li][wi] = self
                .filler
                .choose(&mut self.rng)
                .expect("filler")
                .to_string();
        }
        lines
            .iter()
            .map(|l| l.join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn chart_name(&mut self, name: &str) -> String {
        match self.rng.gen_range(0..6) {
            0 => name.to_uppercase(),
            1 => name.to_lowercase(),
            2 => format!("{name} (Remastered)"),
            3 => format!("{name}!"),
            4 => name.replacen('e', "é", 1),
            _ => name.to_owned(),
        }
    }
}

fn strength(cfg: &FixtureConfig, row: usize, female: bool) -> f64 {
    match (female, cfg.female_bias_strength) {
        (true, Some(s)) => s,
        _ => cfg
            .row_strengths
            .get(row)
            .copied()
            .unwrap_or(cfg.bias_strength),
    }
}

fn planted_pairs(
    cfg: &FixtureConfig,
    rows: &[BatteryRow],
    sets: &[WordSet],
    female: bool,
) -> Vec<PlantedPair> {
    let find = |n: &str| {
        sets.iter()
            .find(|s| s.name == n)
            .expect("battery set exists")
    };
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            PlantedPair::from_sets(
                find(&r.x),
                find(&r.y),
                find(&r.a),
                find(&r.b),
                strength(cfg, i, female),
            )
        })
        .collect()
}

/// Builds a fixture from `cfg` with the built-in word sets and battery.
pub fn generate(cfg: &FixtureConfig) -> CliResult<Fixture> {
    cfg.validate()?;
    let sets = standard_word_sets();
    let rows = standard_battery();
    let mut exclude: BTreeSet<String> = sets.iter().flat_map(|s| s.words.clone()).collect();
    for t in LEXICON_TERMS {
        exclude.extend(t.split(' ').map(str::to_owned));
    }
    let mut g = Generator {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        pairs: planted_pairs(cfg, &rows, &sets, false),
        female_pairs: planted_pairs(cfg, &rows, &sets, true),
        filler: filler_vocabulary(&exclude),
        next_song: 0,
    };

    let mut used_names = BTreeSet::new();
    let artists: Vec<Artist> = (0..cfg.artists)
        .map(|i| g.artist(i, &mut used_names))
        .collect();
    let mut records = Vec::new();
    let mut truth = Truth::default();
    let mut titles: Vec<BTreeSet<String>> = vec![BTreeSet::new(); artists.len()];
    // Originals eligible for gold labels and charts.
    let mut originals: Vec<usize> = Vec::new();

    for (ai, artist) in artists.iter().enumerate() {
        let n = g
            .rng
            .gen_range(cfg.min_songs_per_artist..=cfg.max_songs_per_artist);
        for _ in 0..n {
            let sexist = g.rng.gen_bool(cfg.sexist_share);
            let lines = g.rng.gen_range(cfg.min_lines..=cfg.max_lines);
            let year = (artist.start + g.rng.gen_range(0..=9)).min(2009);
            let lyrics = g.lyrics(artist.gender == Gender::Female, sexist, lines);
            let title = g.title(&mut titles[ai]);
            let rec = g.record(artist, title, year, lyrics);
            if sexist {
                truth.sexist_songs.insert(rec.song_id.clone());
            }
            originals.push(records.len());
            records.push((ai, rec));
        }
    }

    let n_orig = records.len();
    for i in 0..n_orig {
        let (ai, orig) = records[i].clone();
        if g.rng.gen_bool(cfg.duplicate_share) {
            let lyrics = if g.rng.gen_bool(0.5) {
                orig.lyrics.clone()
            } else {
                g.perturb(&orig.lyrics)
            };
            let year = orig.year + g.rng.gen_range(1..=3);
            let copy = g.record(&artists[ai], orig.title.clone(), year, lyrics);
            if truth.sexist_songs.contains(&orig.song_id) {
                truth.sexist_songs.insert(copy.song_id.clone());
            }
            truth
                .duplicates
                .push((orig.song_id.clone(), copy.song_id.clone()));
            records.push((ai, copy));
        }
        if g.rng.gen_bool(cfg.cover_share) {
            let other = (ai + g.rng.gen_range(1..artists.len())) % artists.len();
            let lyrics = g.perturb(&orig.lyrics);
            let year = orig.year + g.rng.gen_range(1..=10);
            let copy = g.record(&artists[other], orig.title.clone(), year, lyrics);
            if truth.sexist_songs.contains(&orig.song_id) {
                truth.sexist_songs.insert(copy.song_id.clone());
            }
            truth
                .covers
                .push((orig.song_id.clone(), copy.song_id.clone()));
            records.push((other, copy));
        }
    }

    let mut raw_lines = Vec::new();
    if cfg.noise_records {
        // Too few songs, unknown group gender, foreign language, out of
        // range years and too-short lyrics: all rejected at ingestion.
        let mut small = g.artist(artists.len(), &mut used_names);
        small.members = None;
        let mut unknown = g.artist(artists.len() + 1, &mut used_names);
        unknown.artist_type = ArtistType::Group;
        unknown.members = Some(vec![MemberGender::Male, MemberGender::Unknown]);
        let mut extra_titles = BTreeSet::new();
        for (artist, n) in [(&small, 6), (&unknown, 12)] {
            for _ in 0..n {
                let lyrics = g.lyrics(false, false, cfg.min_lines);
                let title = g.title(&mut extra_titles);
                let year = artist.start;
                let rec = g.record(artist, title, year, lyrics);
                records.push((usize::MAX, rec));
            }
        }
        for (k, artist) in artists.iter().enumerate().take(4) {
            let lyrics = g.lyrics(false, false, cfg.min_lines);
            let title = g.title(&mut titles[k]);
            let mut rec = g.record(artist, title, artist.start, lyrics);
            match k {
                0 => rec.language = "spanish".into(),
                1 => rec.year = 1955,
                2 => rec.year = 2012,
                _ => rec.lyrics = "too short\nfor a song".into(),
            }
            records.push((k, rec));
        }
        raw_lines.push(r#"{"song_id": "s99999", "title": "Broken record""#.to_owned());
    }

    // Charts and gold labels come from the originals of regular artists.
    let mut charts = Vec::new();
    let mut gold = BTreeMap::new();
    for &i in &originals {
        let rec = records[i].1.clone();
        if g.rng.gen_bool(cfg.chart_share) {
            for source in [ChartSource::BillboardHot100, ChartSource::BillboardTop10] {
                if source == ChartSource::BillboardTop10 && !g.rng.gen_bool(cfg.top10_share) {
                    break;
                }
                let artist_name = if rec.artist_name.starts_with("The ") && g.rng.gen_bool(0.5) {
                    rec.artist_name["The ".len()..].to_owned()
                } else {
                    g.chart_name(&rec.artist_name)
                };
                let title = g.chart_name(&rec.title);
                truth.chart_songs.insert(charts.len(), rec.song_id.clone());
                charts.push(ChartEntry {
                    source,
                    artist_name,
                    title,
                    week_or_year: Some(rec.year.to_string()),
                    payload: None,
                });
            }
            if g.rng.gen_bool(0.05) {
                let mut none = BTreeSet::new();
                let title = format!("{} Reprise", g.title(&mut none));
                charts.push(ChartEntry {
                    source: ChartSource::BillboardHot100,
                    artist_name: "Nobody Inparticular".into(),
                    title,
                    week_or_year: Some(rec.year.to_string()),
                    payload: None,
                });
            }
        }
        if g.rng.gen_bool(cfg.gold_share) {
            let planted = truth.sexist_songs.contains(&rec.song_id);
            gold.insert(
                rec.song_id.clone(),
                planted ^ g.rng.gen_bool(cfg.gold_noise),
            );
        }
    }

    let mut genre_map = String::from("# raw genre = top-level genre\n");
    for (raw, top) in GENRES {
        if let Some(top) = top {
            genre_map.push_str(&format!("{} = {top}\n", raw.to_lowercase()));
        }
    }
    let mut lexicon = format!("# term = weight\n@bias = {LEXICON_BIAS}\n");
    for t in LEXICON_TERMS {
        lexicon.push_str(&format!("{t} = {LEXICON_WEIGHT}\n"));
    }

    Ok(Fixture {
        records: records.into_iter().map(|(_, r)| r).collect(),
        raw_lines,
        charts,
        gold,
        genre_map,
        lexicon,
        word_sets: sets,
        truth,
    })
}

/// Project config matching the files written by [`write_fixture`], with
/// training and bootstrap sizes small enough for quick runs.
pub fn fixture_project_config() -> ProjectConfig {
    let mut cfg: ProjectConfig = toml::from_str(
        r#"
        [paths]
        corpus = "corpus.jsonl"
        charts = "charts.csv"
        gold = "gold.csv"
        word_sets = "word_sets.txt"
        genre_map = "genres.txt"
        lexicon = "lexicon.txt"
        out = "run"
        "#,
    )
    .expect("static config parses");
    cfg.rng_seed = 7;
    cfg.train.params.dim = 24;
    cfg.train.params.epochs = 5;
    cfg.train.params.window = 4;
    cfg.analytics.n_boot = 200;
    cfg
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(CliError::io(path))
}

/// Writes the fixture inputs and a `lyricscope.toml` into `dir`.
pub fn write_fixture(dir: &Path, fixture: &Fixture) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let mut corpus = Vec::new();
    for r in &fixture.records {
        serde_json::to_writer(&mut corpus, r).map_err(lyricscope::Error::from)?;
        corpus.push(b'\n');
    }
    for l in &fixture.raw_lines {
        corpus.extend_from_slice(l.as_bytes());
        corpus.push(b'\n');
    }
    write_file(&dir.join("corpus.jsonl"), &corpus)?;

    let mut charts = Vec::new();
    write_chart_entries(&fixture.charts, &mut charts)?;
    write_file(&dir.join("charts.csv"), &charts)?;
    let mut gold = Vec::new();
    write_gold_csv(&fixture.gold, &mut gold)?;
    write_file(&dir.join("gold.csv"), &gold)?;
    write_file(&dir.join("genres.txt"), fixture.genre_map.as_bytes())?;
    write_file(&dir.join("lexicon.txt"), fixture.lexicon.as_bytes())?;
    write_file(
        &dir.join("word_sets.txt"),
        format_word_sets(&fixture.word_sets).as_bytes(),
    )?;
    let truth = serde_json::to_vec_pretty(&fixture.truth).map_err(lyricscope::Error::from)?;
    write_file(&dir.join("truth.json"), &truth)?;
    write_file(
        &dir.join("lyricscope.toml"),
        fixture_project_config().to_toml().as_bytes(),
    )?;
    Ok(())
}
