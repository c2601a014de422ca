//! Word-embedding association tests: WEAT, single-category WEAT and the
//! cross-corpus SWEAT, with permutation significance.

mod battery;
mod measures;
mod multiseed;
pub mod permutation;
mod wordset;

pub use battery::{
    render_table, run_battery, standard_battery, BatteryConfig, BatteryReport, BatteryRow,
    CorpusOutcome, PreparedRow, SeededSpaces, SweatOutcome,
};
pub use measures::{s_assoc, sc_weat, sweat, weat, AssociationResult, SetNames, TestKind};
pub use multiseed::{aggregate_multiseed, MultiSeedResult, Significance, SEEDS_PER_TEST};
pub use permutation::{PermutationConfig, Sampling};
pub use wordset::{
    balance_word_sets, format_word_sets, min_frequency, parse_word_sets, select_proper_names,
    standard, standard_word_sets, WordSet, MIN_WORD_FREQUENCY,
};
