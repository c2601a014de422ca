use std::cmp::Reverse;
use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::embeddings::FrequencyTable;
use crate::error::{Error, Result};

/// Minimum across-corpora frequency a word needs to stay in a word set.
pub const MIN_WORD_FREQUENCY: u64 = 5;

/// A named, duplicate-free list of lowercase words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSet {
    pub name: String,
    pub words: Vec<String>,
}

impl WordSet {
    pub fn new<S: AsRef<str>>(name: impl Into<String>, words: &[S]) -> Result<Self> {
        let name = name.into();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(words.len());
        for w in words {
            let w = w.as_ref().trim().to_lowercase();
            if w.is_empty() {
                continue;
            }
            if !seen.insert(w.clone()) {
                return Err(Error::DuplicateWord { name, word: w });
            }
            out.push(w);
        }
        Ok(WordSet { name, words: out })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.iter().any(|w| w == word)
    }

    fn with_words(&self, words: Vec<String>) -> Self {
        WordSet {
            name: self.name.clone(),
            words,
        }
    }
}

/// Parses `[Set name]` headers each followed by one word per line.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_word_sets(text: &str) -> Result<Vec<WordSet>> {
    let mut sets: Vec<(String, Vec<String>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::parse(
                    format!("word sets line {}", i + 1),
                    "empty set name",
                ));
            }
            if sets.iter().any(|(n, _)| n == name) {
                return Err(Error::parse(
                    format!("word sets line {}", i + 1),
                    format!("set '{name}' defined twice"),
                ));
            }
            sets.push((name.to_owned(), Vec::new()));
        } else {
            let (_, words) = sets.last_mut().ok_or_else(|| {
                Error::parse(
                    format!("word sets line {}", i + 1),
                    "word before any [set] header",
                )
            })?;
            words.push(line.to_owned());
        }
    }
    sets.into_iter()
        .map(|(name, words)| WordSet::new(name, &words))
        .collect()
}

pub fn format_word_sets(sets: &[WordSet]) -> String {
    let mut out = String::new();
    for (i, set) in sets.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[{}]", set.name);
        for w in &set.words {
            let _ = writeln!(out, "{w}");
        }
    }
    out
}

/// Smallest frequency of `word` over all tables.
pub fn min_frequency(word: &str, tables: &[&FrequencyTable]) -> u64 {
    tables.iter().map(|t| t.get(word)).min().unwrap_or(0)
}

/// Removes rare words from both sets, then trims the larger set until both
/// have the same size.
///
/// A word's frequency is its minimum frequency over `tables`. Words below
/// `min_freq` are dropped first; the larger set then loses its least
/// frequent word (the alphabetically last one on ties) until sizes match.
pub fn balance_word_sets(
    first: &WordSet,
    second: &WordSet,
    tables: &[&FrequencyTable],
    min_freq: u64,
) -> Result<(WordSet, WordSet)> {
    let keep = |set: &WordSet| -> Vec<(String, u64)> {
        set.words
            .iter()
            .map(|w| (w.clone(), min_frequency(w, tables)))
            .filter(|(_, f)| *f >= min_freq)
            .collect()
    };
    let mut a = keep(first);
    let mut b = keep(second);
    for (set, kept) in [(first, &a), (second, &b)] {
        if kept.is_empty() {
            return Err(Error::SetExhausted(set.name.clone()));
        }
    }
    while a.len() != b.len() {
        let larger = if a.len() > b.len() { &mut a } else { &mut b };
        let victim = larger
            .iter()
            .enumerate()
            .min_by_key(|(_, (w, f))| (*f, Reverse(w.clone())))
            .map(|(i, _)| i)
            .expect("larger set is non-empty");
        larger.remove(victim);
    }
    let words = |v: Vec<(String, u64)>| v.into_iter().map(|(w, _)| w).collect();
    Ok((first.with_words(words(a)), second.with_words(words(b))))
}

/// The `k` candidates with the highest minimum frequency across `tables`,
/// ties broken alphabetically.
pub fn select_proper_names<S: AsRef<str>>(
    name: &str,
    candidates: &[S],
    tables: &[&FrequencyTable],
    k: usize,
) -> Result<WordSet> {
    let mut seen = HashSet::new();
    let mut scored: Vec<(u64, String)> = candidates
        .iter()
        .map(|c| c.as_ref().trim().to_lowercase())
        .filter(|c| !c.is_empty() && seen.insert(c.clone()))
        .map(|c| (min_frequency(&c, tables), c))
        .filter(|(f, _)| *f > 0)
        .collect();
    if scored.len() < k {
        return Err(Error::NotEnoughNames {
            wanted: k,
            found: scored.len(),
        });
    }
    scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    let words: Vec<String> = scored.into_iter().take(k).map(|(_, w)| w).collect();
    WordSet::new(name, &words)
}

pub mod standard {
    //! Target and attribute word lists of the standard gender-bias battery.

    pub const PLEASANT: &str = "Pleasant";
    pub const UNPLEASANT: &str = "Unpleasant";
    pub const CAREER: &str = "Career";
    pub const FAMILY: &str = "Family";
    pub const FEMALE_TERMS: &str = "Female attributes";
    pub const MALE_TERMS: &str = "Male attributes";
    pub const FEMALE_NAMES: &str = "Female names";
    pub const MALE_NAMES: &str = "Male names";
    pub const FLOWERS: &str = "Flowers";
    pub const INSECTS: &str = "Insects";
    pub const INSTRUMENTS: &str = "Musical instruments";
    pub const WEAPONS: &str = "Weapons";
    pub const MATSCI: &str = "MatSci";
    pub const ARTS: &str = "Arts words";
    pub const INTELLIGENCE: &str = "Intelligence";
    pub const APPEARANCE: &str = "Appearance";
    pub const STRENGTH: &str = "Strength";
    pub const WEAKNESS: &str = "Weakness";

    pub const SETS: &[(&str, &[&str])] = &[
        (
            PLEASANT,
            &[
                "family",
                "honest",
                "gift",
                "wonderful",
                "vacation",
                "miracle",
                "loyal",
                "pleasure",
                "gentle",
                "rainbow",
                "love",
                "peace",
                "lucky",
                "honor",
                "freedom",
                "happy",
                "health",
                "friend",
                "laughter",
                "cheer",
                "joy",
                "heaven",
                "diploma",
                "paradise",
                "diamond",
                "caress",
                "sunrise",
            ],
        ),
        (
            UNPLEASANT,
            &[
                "cancer", "agony", "stink", "sickness", "poverty", "accident", "failure", "rotten",
                "hatred", "terrible", "disaster", "tragedy", "grief", "jail", "abuse", "awful",
                "prison", "ugly", "nasty", "murder", "bomb", "poison", "evil", "crash", "death",
                "war", "kill",
            ],
        ),
        (
            CAREER,
            &[
                "corporation",
                "professional",
                "career",
                "office",
                "business",
            ],
        ),
        (
            FAMILY,
            &["family", "marriage", "wedding", "children", "home"],
        ),
        (
            FEMALE_TERMS,
            &[
                "girl",
                "hers",
                "her",
                "aunt",
                "daughter",
                "sister",
                "female",
                "mother",
                "she",
                "grandmother",
                "woman",
            ],
        ),
        (
            MALE_TERMS,
            &[
                "brother",
                "grandfather",
                "his",
                "son",
                "father",
                "man",
                "male",
                "uncle",
                "he",
                "him",
                "boy",
            ],
        ),
        (
            FEMALE_NAMES,
            &[
                "kim", "rose", "mary", "eve", "kelly", "jane", "lisa", "juliet", "jean", "annie",
                "trina", "sarah", "sally", "betty", "lucy", "taylor", "bonnie", "marie", "jenny",
                "dolly", "julia", "anna", "jill", "angie",
            ],
        ),
        (
            MALE_NAMES,
            &[
                "john", "jack", "joe", "johnny", "james", "david", "paul", "billy", "jimmy",
                "simon", "mark", "romeo", "bill", "peter", "bob", "lee", "jim", "bobby", "tom",
                "jackson", "sam", "michael", "charlie", "adam",
            ],
        ),
        (
            FLOWERS,
            &[
                "lilac",
                "bluebell",
                "violet",
                "crocus",
                "buttercup",
                "iris",
                "rose",
                "tulip",
                "daisy",
                "marigold",
                "daffodil",
                "orchid",
                "carnation",
                "magnolia",
                "lily",
                "poppy",
                "clover",
            ],
        ),
        (
            INSECTS,
            &[
                "cockroach",
                "maggot",
                "locust",
                "roach",
                "centipede",
                "caterpillar",
                "weevil",
                "beetle",
                "flea",
                "dragonfly",
                "mosquito",
                "ant",
                "cricket",
                "moth",
                "spider",
                "bee",
                "fly",
            ],
        ),
        (
            INSTRUMENTS,
            &[
                "banjo",
                "mandolin",
                "trombone",
                "cello",
                "fiddle",
                "tuba",
                "harmonica",
                "harp",
                "violin",
                "piano",
                "trumpet",
                "clarinet",
                "oboe",
                "guitar",
                "lute",
                "saxophone",
                "horn",
                "bongo",
                "flute",
                "bell",
                "viola",
                "drum",
            ],
        ),
        (
            WEAPONS,
            &[
                "harpoon", "mace", "hatchet", "grenade", "missile", "spear", "axe", "rifle",
                "cannon", "dagger", "pistol", "shotgun", "dynamite", "tank", "blade", "sword",
                "arrow", "whip", "bomb", "knife", "club", "gun",
            ],
        ),
        (
            MATSCI,
            &[
                "nasa",
                "addition",
                "einstein",
                "technology",
                "experiment",
                "math",
                "chemistry",
                "science",
            ],
        ),
        (
            ARTS,
            &[
                "poetry",
                "novel",
                "symphony",
                "art",
                "dance",
                "shakespeare",
                "sculpture",
                "drama",
            ],
        ),
        (
            INTELLIGENCE,
            &[
                "brilliant",
                "logical",
                "apt",
                "smart",
                "thoughtful",
                "wise",
                "precocious",
                "genius",
                "intelligent",
                "shrewd",
                "clever",
            ],
        ),
        (
            APPEARANCE,
            &[
                "gorgeous",
                "slim",
                "healthy",
                "handsome",
                "ugly",
                "fat",
                "thin",
                "weak",
                "beautiful",
                "pretty",
                "strong",
            ],
        ),
        (
            STRENGTH,
            &[
                "triumph",
                "confident",
                "potent",
                "loud",
                "winner",
                "shout",
                "succeed",
                "strong",
                "bold",
                "leader",
                "dynamic",
                "command",
                "power",
            ],
        ),
        (
            WEAKNESS,
            &[
                "timid",
                "withdraw",
                "yield",
                "failure",
                "fragile",
                "weakness",
                "loser",
                "shy",
                "surrender",
                "weak",
                "afraid",
                "follow",
                "lose",
            ],
        ),
    ];

    /// Rows of the standard battery as `(A, B, X, Y)` set names.
    pub const BATTERY: &[(&str, &str, &str, &str)] = &[
        (PLEASANT, UNPLEASANT, FLOWERS, INSECTS),
        (PLEASANT, UNPLEASANT, INSTRUMENTS, WEAPONS),
        (CAREER, FAMILY, MALE_NAMES, FEMALE_NAMES),
        (MALE_NAMES, FEMALE_NAMES, CAREER, FAMILY),
        (MALE_TERMS, FEMALE_TERMS, CAREER, FAMILY),
        (MALE_TERMS, FEMALE_TERMS, MATSCI, ARTS),
        (MALE_TERMS, FEMALE_TERMS, INTELLIGENCE, APPEARANCE),
        (MALE_TERMS, FEMALE_TERMS, STRENGTH, WEAKNESS),
    ];
}

/// The built-in word lists as [`WordSet`]s.
pub fn standard_word_sets() -> Vec<WordSet> {
    standard::SETS
        .iter()
        .map(|(name, words)| WordSet::new(*name, words).expect("built-in sets are valid"))
        .collect()
}
