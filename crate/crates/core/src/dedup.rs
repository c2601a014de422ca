//! Near-duplicate lyric detection with word 3-gram shingles.
//!
//! Candidate pairs come from an inverted index over shingles, so only songs
//! sharing at least one shingle are ever compared. Since a positive Jaccard
//! index needs a shared shingle, the join is exact for any threshold above 0.
//! Linked songs are grouped into connected components; the earliest song of
//! each component is the original, later songs by other artists are covers and
//! later songs by the original's artist are dropped.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::SongRecord;
use crate::error::{Error, Result};
use crate::text;

pub const DEFAULT_THRESHOLD: f64 = 0.80;

pub type Shingle = [String; 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShingleSet {
    pub song_id: String,
    pub shingles: BTreeSet<Shingle>,
}

impl ShingleSet {
    pub fn len(&self) -> usize {
        self.shingles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shingles.is_empty()
    }
}

/// The set of consecutive token triples of `lyrics`.
pub fn shingle(song_id: &str, lyrics: &str) -> ShingleSet {
    let tokens = text::tokenize(lyrics);
    let shingles = tokens
        .windows(3)
        .map(|w| [w[0].clone(), w[1].clone(), w[2].clone()])
        .collect();
    ShingleSet {
        song_id: song_id.to_owned(),
        shingles,
    }
}

/// Jaccard index of two shingle sets; two empty sets score 0.
pub fn jaccard(a: &ShingleSet, b: &ShingleSet) -> f64 {
    let inter = a.shingles.intersection(&b.shingles).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DuplicateCluster {
    /// Sorted ascending.
    pub member_ids: Vec<String>,
    pub canonical_id: String,
    /// Retained later versions by other artists, sorted.
    pub covers: Vec<String>,
    /// Members removed from the corpus, sorted.
    pub duplicates: Vec<String>,
    /// Smallest Jaccard index over all member pairs.
    pub min_similarity: f64,
}

#[derive(Clone, Debug, Default)]
pub struct DedupOutcome {
    /// Clusters with at least two members, ordered by canonical id.
    pub clusters: Vec<DuplicateCluster>,
    /// Songs kept in the corpus, in input order.
    pub retained: Vec<SongRecord>,
    /// Ids of the removed songs, sorted.
    pub dropped: Vec<String>,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Shingle sets with shingles interned to dense ids, each sorted.
fn intern_shingles(corpus: &[SongRecord]) -> Vec<Vec<u32>> {
    let token_lists: Vec<Vec<String>> = corpus
        .par_iter()
        .map(|r| text::tokenize(&r.lyrics))
        .collect();
    let mut token_ids: HashMap<&str, u32> = HashMap::new();
    let mut shingle_ids: HashMap<[u32; 3], u32> = HashMap::new();
    let mut out = Vec::with_capacity(corpus.len());
    for tokens in &token_lists {
        let ids: Vec<u32> = tokens
            .iter()
            .map(|t| {
                let next = token_ids.len() as u32;
                *token_ids.entry(t.as_str()).or_insert(next)
            })
            .collect();
        let mut set: Vec<u32> = ids
            .windows(3)
            .map(|w| {
                let next = shingle_ids.len() as u32;
                *shingle_ids.entry([w[0], w[1], w[2]]).or_insert(next)
            })
            .collect();
        set.sort_unstable();
        set.dedup();
        out.push(set);
    }
    out
}

fn sorted_jaccard(a: &[u32], b: &[u32]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// All pairs `(i, j)` with `i < j` whose Jaccard index exceeds `threshold`.
fn linked_pairs(sets: &[Vec<u32>], threshold: f64) -> Vec<(usize, usize)> {
    let mut postings: HashMap<u32, Vec<u32>> = HashMap::new();
    for (doc, set) in sets.iter().enumerate() {
        for &s in set {
            postings.entry(s).or_default().push(doc as u32);
        }
    }
    let mut links: Vec<(usize, usize)> = (0..sets.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            // Intersection sizes with every later document sharing a shingle.
            let mut shared: HashMap<u32, usize> = HashMap::new();
            for s in &sets[i] {
                for &j in &postings[s] {
                    if j as usize > i {
                        *shared.entry(j).or_insert(0) += 1;
                    }
                }
            }
            let a = sets[i].len();
            shared
                .into_iter()
                .filter_map(move |(j, inter)| {
                    let union = a + sets[j as usize].len() - inter;
                    let sim = inter as f64 / union as f64;
                    (sim > threshold).then_some((i, j as usize))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    links.sort_unstable();
    links
}

/// Groups near-duplicate lyrics and decides which songs stay in the corpus.
pub fn cluster_duplicates(corpus: &[SongRecord], threshold: f64) -> Result<DedupOutcome> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!(
            "dedup threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let sets = intern_shingles(corpus);
    let links = linked_pairs(&sets, threshold);

    let mut dsu = DisjointSet::new(corpus.len());
    for &(i, j) in &links {
        dsu.union(i, j);
    }
    let mut components: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..corpus.len() {
        let root = dsu.find(i);
        components.entry(root).or_default().push(i);
    }

    let mut drop = vec![false; corpus.len()];
    let mut clusters: Vec<DuplicateCluster> = components
        .into_values()
        .filter(|members| members.len() > 1)
        .map(|mut members| {
            members.sort_by(|&a, &b| {
                corpus[a]
                    .year
                    .cmp(&corpus[b].year)
                    .then_with(|| corpus[a].song_id.cmp(&corpus[b].song_id))
            });
            let canonical = members[0];
            let canonical_artist = &corpus[canonical].artist_id;
            let mut seen_artists: BTreeSet<&str> = BTreeSet::new();
            seen_artists.insert(canonical_artist);
            let mut covers = Vec::new();
            let mut duplicates = Vec::new();
            for &m in &members[1..] {
                // First (earliest) version per other artist is that artist's cover.
                if seen_artists.insert(corpus[m].artist_id.as_str()) {
                    covers.push(m);
                } else {
                    duplicates.push(m);
                }
            }
            let mut min_similarity = f64::INFINITY;
            for (x, &a) in members.iter().enumerate() {
                for &b in &members[x + 1..] {
                    min_similarity = min_similarity.min(sorted_jaccard(&sets[a], &sets[b]));
                }
            }
            let ids = |v: &[usize]| {
                let mut ids: Vec<String> = v.iter().map(|&i| corpus[i].song_id.clone()).collect();
                ids.sort();
                ids
            };
            DuplicateCluster {
                member_ids: ids(&members),
                canonical_id: corpus[canonical].song_id.clone(),
                covers: ids(&covers),
                duplicates: ids(&duplicates),
                min_similarity,
            }
        })
        .collect();
    clusters.sort_by(|a, b| a.canonical_id.cmp(&b.canonical_id));

    let dropped_ids: BTreeSet<&str> = clusters
        .iter()
        .flat_map(|c| c.duplicates.iter().map(String::as_str))
        .collect();
    for (i, r) in corpus.iter().enumerate() {
        drop[i] = dropped_ids.contains(r.song_id.as_str());
    }
    let retained = corpus
        .iter()
        .zip(&drop)
        .filter(|(_, &d)| !d)
        .map(|(r, _)| r.clone())
        .collect();
    let dropped = dropped_ids.into_iter().map(str::to_owned).collect();

    Ok(DedupOutcome {
        clusters,
        retained,
        dropped,
    })
}

/// Writes one CSV row per cluster: canonical, members, covers, min similarity.
pub fn write_report<W: std::io::Write>(clusters: &[DuplicateCluster], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "canonical_id",
        "member_ids",
        "cover_ids",
        "duplicate_ids",
        "min_similarity",
    ])?;
    for c in clusters {
        w.write_record([
            c.canonical_id.as_str(),
            &c.member_ids.join(" "),
            &c.covers.join(" "),
            &c.duplicates.join(" "),
            &format!("{:.6}", c.min_similarity),
        ])?;
    }
    w.flush()?;
    Ok(())
}
