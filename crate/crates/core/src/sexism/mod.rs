//! Sliding-window sexism labeling: batching, batch scoring, song-level
//! label propagation and evaluation against gold labels.

mod batch;
mod eval;
mod label;
mod scorer;

pub use batch::{batch_count, make_batches, LineBatch, BATCH_LINES, BATCH_STRIDE};
pub use eval::{
    always_sexist, evaluate, render_metrics_table, sweep_thresholds, write_roc_csv, ClassMetrics,
    Confusion, EvalReport, RocPoint, SweepReport, SweepRow,
};
pub use label::{
    group_scores, label_song, label_songs, read_gold_csv, read_predictions_csv, song_score,
    write_gold_csv, write_predictions_csv, LabelConfig, SongLabel, SongPrediction,
};
pub use scorer::{
    read_scores_jsonl, score_batches, write_scores_jsonl, BatchScore, BatchScorer, ExternalScores,
    LexiconScorer,
};
