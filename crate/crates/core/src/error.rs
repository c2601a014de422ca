use std::io;

use thiserror::Error;

/// Errors raised by the analysis modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("empty_corpus: no tokens to build a vocabulary from")]
    EmptyCorpus,

    #[error("empty vocabulary: no word reaches min_count {0}")]
    EmptyVocab(u64),

    #[error("diverged: non-finite training loss in epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("oov: word '{word}' is not in the vocabulary of corpus '{corpus}'")]
    Oov { word: String, corpus: String },

    #[error("unbalanced_targets: |X| = {x} but |Y| = {y}")]
    UnbalancedTargets { x: usize, y: usize },

    #[error("unbalanced_attributes: |A| = {a} but |B| = {b}")]
    UnbalancedAttributes { a: usize, b: usize },

    #[error("overlapping word sets '{first}' and '{second}': {words:?}")]
    OverlappingSets {
        first: String,
        second: String,
        words: Vec<String>,
    },

    #[error("word set '{name}' needs at least {min} words, has {len}")]
    SetTooSmall {
        name: String,
        len: usize,
        min: usize,
    },

    #[error("duplicate word '{word}' in word set '{name}'")]
    DuplicateWord { name: String, word: String },

    #[error("set_exhausted: word set '{0}' lost all of its words during balancing")]
    SetExhausted(String),

    #[error("only {found} of the {wanted} requested names occur in every corpus")]
    NotEnoughNames { wanted: usize, found: usize },

    #[error("mixed test instances: {0}")]
    MixedInstances(String),

    #[error("too_short: lyric of song '{song_id}' has {lines} non-empty lines, need 4")]
    TooShort { song_id: String, lines: usize },

    #[error("missing external scores for {} batches: {}", .0.len(), format_keys(.0))]
    MissingScores(Vec<(String, usize)>),

    #[error("id mismatch between predictions and gold labels: {0}")]
    IdMismatch(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn format_keys(keys: &[(String, usize)]) -> String {
    const SHOWN: usize = 10;
    let mut out: Vec<String> = keys
        .iter()
        .take(SHOWN)
        .map(|(id, idx)| format!("({id}, {idx})"))
        .collect();
    if keys.len() > SHOWN {
        out.push(format!("... {} more", keys.len() - SHOWN));
    }
    out.join(", ")
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }
}
