use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::non_empty_lines;

pub const BATCH_LINES: usize = 4;
pub const BATCH_STRIDE: usize = 2;

/// Up to four consecutive non-empty lines of one lyric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineBatch {
    pub song_id: String,
    pub batch_index: usize,
    /// Index of the first line among the lyric's non-empty lines.
    pub first_line: usize,
    pub lines: Vec<String>,
}

impl LineBatch {
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

/// Number of batches for a lyric of `lines` non-empty lines (`lines >= 4`).
pub fn batch_count(lines: usize) -> usize {
    (lines - 2).div_ceil(BATCH_STRIDE)
}

/// Splits a lyric into overlapping four-line windows with stride two.
///
/// The last window may hold only two or three lines.
pub fn make_batches(song_id: &str, lyrics: &str) -> Result<Vec<LineBatch>> {
    let lines = non_empty_lines(lyrics);
    if lines.len() < BATCH_LINES {
        return Err(Error::TooShort {
            song_id: song_id.to_owned(),
            lines: lines.len(),
        });
    }
    let batches = (0..lines.len() - 2)
        .step_by(BATCH_STRIDE)
        .enumerate()
        .map(|(batch_index, start)| {
            let end = (start + BATCH_LINES).min(lines.len());
            LineBatch {
                song_id: song_id.to_owned(),
                batch_index,
                first_line: start,
                lines: lines[start..end].iter().map(|l| l.to_string()).collect(),
            }
        })
        .collect();
    Ok(batches)
}
