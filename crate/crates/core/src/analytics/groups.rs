use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{ArtistType, Gender, SongRecord};
use crate::error::{Error, Result};

/// Chart-based subset of the corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    All,
    Billboard,
    BillboardTop10,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::All, Subset::Billboard, Subset::BillboardTop10];

    pub fn as_str(self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::Billboard => "billboard",
            Subset::BillboardTop10 => "billboard_top10",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Subset::ALL.into_iter().find(|x| x.as_str() == s)
    }

    pub fn contains(self, song: &SongFacts) -> bool {
        match self {
            Subset::All => true,
            Subset::Billboard => song.billboard,
            Subset::BillboardTop10 => song.billboard_top10,
        }
    }
}

/// The attributes of a song that analytics group on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SongFacts {
    pub song_id: String,
    pub artist_id: String,
    pub year: i32,
    pub artist_type: ArtistType,
    pub gender: Gender,
    pub genre_top: Option<String>,
    pub billboard: bool,
    pub billboard_top10: bool,
}

/// Joins records with chart membership. A top-10 song always counts as a
/// chart song.
pub fn song_facts(
    records: &[SongRecord],
    billboard: &BTreeSet<String>,
    billboard_top10: &BTreeSet<String>,
) -> Vec<SongFacts> {
    records
        .iter()
        .map(|r| {
            let top10 = billboard_top10.contains(&r.song_id);
            SongFacts {
                song_id: r.song_id.clone(),
                artist_id: r.artist_id.clone(),
                year: r.year,
                artist_type: r.artist_type,
                gender: r.gender,
                genre_top: r.genre_top.clone(),
                billboard: top10 || billboard.contains(&r.song_id),
                billboard_top10: top10,
            }
        })
        .collect()
}

/// Selects songs by artist type, gender, genre and subset. `None` fields
/// match anything.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub artist_type: Option<ArtistType>,
    pub gender: Option<Gender>,
    pub genre_top: Option<String>,
    pub subset: Subset,
}

impl GroupKey {
    pub fn new(artist_type: ArtistType, gender: Gender, subset: Subset) -> Self {
        GroupKey {
            artist_type: Some(artist_type),
            gender: Some(gender),
            genre_top: None,
            subset,
        }
    }

    pub fn everything(subset: Subset) -> Self {
        GroupKey {
            artist_type: None,
            gender: None,
            genre_top: None,
            subset,
        }
    }

    pub fn with_genre(self, genre: impl Into<String>) -> Self {
        GroupKey {
            genre_top: Some(genre.into()),
            ..self
        }
    }

    pub fn matches(&self, song: &SongFacts) -> bool {
        self.artist_type.is_none_or(|t| t == song.artist_type)
            && self.gender.is_none_or(|g| g == song.gender)
            && self
                .genre_top
                .as_ref()
                .is_none_or(|g| song.genre_top.as_ref() == Some(g))
            && self.subset.contains(song)
    }
}

impl fmt::Display for GroupKey {
    /// `type/gender/genre/subset`, with `*` for unconstrained fields.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}",
            self.artist_type.map_or("*", |t| t.as_str()),
            self.gender.map_or("*", |g| g.as_str()),
            self.genre_top.as_deref().unwrap_or("*"),
            self.subset.as_str()
        )
    }
}

/// (artist type, gender) pairs present in `songs`, in a fixed order.
pub fn type_gender_pairs(songs: &[SongFacts]) -> Vec<(ArtistType, Gender)> {
    songs
        .iter()
        .map(|s| (s.artist_type, s.gender))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Count {
    pub numerator: u64,
    pub denominator: u64,
}

impl Count {
    /// `numerator / denominator`, absent for an empty group.
    pub fn fraction(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }

    fn add(&mut self, other: Count) {
        self.numerator += other.numerator;
        self.denominator += other.denominator;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionRow {
    pub artist_type: ArtistType,
    pub gender: Gender,
    pub genre_top: Option<String>,
    /// One count per subset, aligned with [`FractionTable::subsets`].
    pub counts: Vec<Count>,
}

/// Share of sexist songs per artist type and gender (optionally per
/// genre), for several subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionTable {
    pub subsets: Vec<Subset>,
    pub rows: Vec<FractionRow>,
    /// Per-subset sums over all rows.
    pub totals: Vec<Count>,
}

fn require_labels(songs: &[SongFacts], labels: &BTreeMap<String, bool>) -> Result<()> {
    let missing: Vec<&str> = songs
        .iter()
        .filter(|s| !labels.contains_key(&s.song_id))
        .map(|s| s.song_id.as_str())
        .take(5)
        .collect();
    if !missing.is_empty() {
        return Err(Error::IdMismatch(format!(
            "songs without a label: {}",
            missing.join(", ")
        )));
    }
    Ok(())
}

pub fn fraction_table(
    songs: &[SongFacts],
    labels: &BTreeMap<String, bool>,
    subsets: &[Subset],
    by_genre: bool,
) -> Result<FractionTable> {
    require_labels(songs, labels)?;
    type RowKey = (ArtistType, Gender, Option<String>);
    let mut rows: BTreeMap<RowKey, Vec<Count>> = BTreeMap::new();
    for s in songs {
        let genre = if by_genre { s.genre_top.clone() } else { None };
        let counts = rows
            .entry((s.artist_type, s.gender, genre))
            .or_insert_with(|| vec![Count::default(); subsets.len()]);
        for (c, subset) in counts.iter_mut().zip(subsets) {
            if subset.contains(s) {
                c.denominator += 1;
                c.numerator += u64::from(labels[&s.song_id]);
            }
        }
    }
    let mut totals = vec![Count::default(); subsets.len()];
    for counts in rows.values() {
        for (t, c) in totals.iter_mut().zip(counts) {
            t.add(*c);
        }
    }
    Ok(FractionTable {
        subsets: subsets.to_vec(),
        rows: rows
            .into_iter()
            .map(|((artist_type, gender, genre_top), counts)| FractionRow {
                artist_type,
                gender,
                genre_top,
                counts,
            })
            .collect(),
        totals,
    })
}

fn pct(c: &Count) -> String {
    c.fraction()
        .map(|f| format!("{:.1}", 100.0 * f))
        .unwrap_or_default()
}

/// CSV with per-subset numerator, denominator and percentage columns and a
/// final `total` row.
pub fn write_fraction_table<W: Write>(table: &FractionTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["artist_type".to_string(), "gender".into(), "genre".into()];
    for s in &table.subsets {
        for col in ["sexist", "songs", "pct"] {
            header.push(format!("{}_{col}", s.as_str()));
        }
    }
    w.write_record(&header)?;
    let cells = |counts: &[Count]| -> Vec<String> {
        counts
            .iter()
            .flat_map(|c| [c.numerator.to_string(), c.denominator.to_string(), pct(c)])
            .collect()
    };
    for r in &table.rows {
        let mut rec = vec![
            r.artist_type.as_str().to_string(),
            r.gender.as_str().to_string(),
            r.genre_top.clone().unwrap_or_default(),
        ];
        rec.extend(cells(&r.counts));
        w.write_record(&rec)?;
    }
    let mut rec = vec!["total".to_string(), String::new(), String::new()];
    rec.extend(cells(&table.totals));
    w.write_record(&rec)?;
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub artist_type: ArtistType,
    pub gender: Gender,
    pub artists: u64,
    pub songs: u64,
    pub billboard: u64,
    pub billboard_top10: u64,
}

/// Artist and song counts per artist type and gender.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountTable {
    pub rows: Vec<CountRow>,
    pub total: CountRow,
}

pub fn count_table(songs: &[SongFacts]) -> CountTable {
    let mut artists: BTreeMap<(ArtistType, Gender), BTreeSet<&str>> = BTreeMap::new();
    let mut counts: BTreeMap<(ArtistType, Gender), [u64; 3]> = BTreeMap::new();
    for s in songs {
        let key = (s.artist_type, s.gender);
        artists.entry(key).or_default().insert(&s.artist_id);
        let c = counts.entry(key).or_default();
        c[0] += 1;
        c[1] += u64::from(s.billboard);
        c[2] += u64::from(s.billboard_top10);
    }
    let rows: Vec<CountRow> = counts
        .iter()
        .map(|(&(artist_type, gender), c)| CountRow {
            artist_type,
            gender,
            artists: artists[&(artist_type, gender)].len() as u64,
            songs: c[0],
            billboard: c[1],
            billboard_top10: c[2],
        })
        .collect();
    let all_artists: BTreeSet<&str> = songs.iter().map(|s| s.artist_id.as_str()).collect();
    let total = CountRow {
        artist_type: ArtistType::Solo,
        gender: Gender::Unknown,
        artists: all_artists.len() as u64,
        songs: rows.iter().map(|r| r.songs).sum(),
        billboard: rows.iter().map(|r| r.billboard).sum(),
        billboard_top10: rows.iter().map(|r| r.billboard_top10).sum(),
    };
    CountTable { rows, total }
}

/// CSV with counts and column shares in percent.
pub fn write_count_table<W: Write>(table: &CountTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "artist_type",
        "gender",
        "artists",
        "artists_pct",
        "songs",
        "songs_pct",
        "billboard",
        "billboard_pct",
        "billboard_top10",
        "billboard_top10_pct",
    ])?;
    let share = |n: u64, d: u64| {
        if d == 0 {
            String::new()
        } else {
            format!("{:.1}", 100.0 * n as f64 / d as f64)
        }
    };
    let t = &table.total;
    for r in &table.rows {
        w.write_record([
            r.artist_type.as_str().to_string(),
            r.gender.as_str().to_string(),
            r.artists.to_string(),
            share(r.artists, t.artists),
            r.songs.to_string(),
            share(r.songs, t.songs),
            r.billboard.to_string(),
            share(r.billboard, t.billboard),
            r.billboard_top10.to_string(),
            share(r.billboard_top10, t.billboard_top10),
        ])?;
    }
    w.write_record([
        "total".to_string(),
        String::new(),
        t.artists.to_string(),
        String::new(),
        t.songs.to_string(),
        String::new(),
        t.billboard.to_string(),
        String::new(),
        t.billboard_top10.to_string(),
        String::new(),
    ])?;
    w.flush()?;
    Ok(())
}
