use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::label::{label_songs, LabelConfig, SongPrediction};
use super::scorer::BatchScore;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassMetrics {
    /// Metrics of one class; zero wherever a denominator is zero.
    fn from_counts(hit: u64, false_alarm: u64, missed: u64) -> Self {
        let precision = ratio(hit, hit + false_alarm);
        let recall = ratio(hit, hit + missed);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        ClassMetrics {
            precision,
            recall,
            f1,
        }
    }

    fn mean(a: &Self, b: &Self) -> Self {
        ClassMetrics {
            precision: (a.precision + b.precision) / 2.0,
            recall: (a.recall + b.recall) / 2.0,
            f1: (a.f1 + b.f1) / 2.0,
        }
    }
}

/// One point of the ROC curve. `threshold` is the smallest song score
/// counted as positive; it is absent for the two end points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_songs: u64,
    pub confusion: Confusion,
    pub sexist: ClassMetrics,
    pub non_sexist: ClassMetrics,
    pub macro_avg: ClassMetrics,
    /// Absent when the gold labels contain a single class.
    pub roc: Option<Vec<RocPoint>>,
    pub auc: Option<f64>,
}

fn check_ids(preds: &[SongPrediction], gold: &BTreeMap<String, bool>) -> Result<()> {
    let mut seen = BTreeMap::new();
    for p in preds {
        if seen.insert(p.song_id.as_str(), ()).is_some() {
            return Err(Error::IdMismatch(format!(
                "song '{}' predicted twice",
                p.song_id
            )));
        }
    }
    let only_pred: Vec<&str> = seen
        .keys()
        .filter(|id| !gold.contains_key(**id))
        .copied()
        .collect();
    let only_gold: Vec<&str> = gold
        .keys()
        .map(String::as_str)
        .filter(|id| !seen.contains_key(id))
        .collect();
    if only_pred.is_empty() && only_gold.is_empty() {
        return Ok(());
    }
    let show = |v: &[&str]| {
        let mut s = v.iter().take(5).copied().collect::<Vec<_>>().join(", ");
        if v.len() > 5 {
            s.push_str(&format!(", ... {} more", v.len() - 5));
        }
        s
    };
    Err(Error::IdMismatch(format!(
        "{} predicted but not in gold [{}]; {} in gold but not predicted [{}]",
        only_pred.len(),
        show(&only_pred),
        only_gold.len(),
        show(&only_gold)
    )))
}

/// ROC over song scores; songs without a score are never positive.
fn roc_curve(pairs: &[(Option<f64>, bool)]) -> Option<(Vec<RocPoint>, f64)> {
    let pos = pairs.iter().filter(|(_, g)| *g).count() as u64;
    let neg = pairs.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut scored: Vec<(f64, bool)> = pairs
        .iter()
        .filter_map(|(s, g)| s.map(|s| (s, *g)))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < scored.len() {
        let v = scored[i].0;
        while i < scored.len() && scored[i].0 == v {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: ratio(fp, neg),
            tpr: ratio(tp, pos),
            threshold: Some(v),
        });
    }
    let last = points.last().expect("non-empty");
    if last.fpr < 1.0 || last.tpr < 1.0 {
        points.push(RocPoint {
            fpr: 1.0,
            tpr: 1.0,
            threshold: None,
        });
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Some((points, auc))
}

/// Compares song-level predictions with gold labels.
pub fn evaluate(preds: &[SongPrediction], gold: &BTreeMap<String, bool>) -> Result<EvalReport> {
    check_ids(preds, gold)?;
    let mut c = Confusion::default();
    let mut pairs = Vec::with_capacity(preds.len());
    for p in preds {
        let g = gold[&p.song_id];
        match (p.sexist, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
        pairs.push((p.score, g));
    }
    let sexist = ClassMetrics::from_counts(c.tp, c.fp, c.fn_);
    let non_sexist = ClassMetrics::from_counts(c.tn, c.fn_, c.fp);
    let (roc, auc) = match roc_curve(&pairs) {
        Some((r, a)) => (Some(r), Some(a)),
        None => (None, None),
    };
    Ok(EvalReport {
        n_songs: c.total(),
        confusion: c,
        macro_avg: ClassMetrics::mean(&sexist, &non_sexist),
        sexist,
        non_sexist,
        roc,
        auc,
    })
}

/// Predictions of the naive model that labels every song sexist.
pub fn always_sexist(gold: &BTreeMap<String, bool>) -> Vec<SongPrediction> {
    gold.keys()
        .map(|id| SongPrediction {
            song_id: id.clone(),
            sexist: true,
            n_flagged: 0,
            n_batches: 0,
            score: Some(1.0),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub n_b: usize,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Ordered by ascending threshold.
    pub rows: Vec<SweepRow>,
    pub best_macro_f1_threshold: f64,
    pub best_sexist_f1_threshold: f64,
}

/// Evaluates each candidate threshold; the best one maximizes macro F1,
/// ties going to the lower threshold.
pub fn sweep_thresholds(
    scores: &[BatchScore],
    gold: &BTreeMap<String, bool>,
    thresholds: &[f64],
    n_b: usize,
) -> Result<SweepReport> {
    if thresholds.is_empty() {
        return Err(Error::Config(
            "threshold sweep needs at least one threshold".into(),
        ));
    }
    let mut sorted = thresholds.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rows: Vec<SweepRow> = sorted
        .iter()
        .map(|&threshold| {
            let cfg = LabelConfig { threshold, n_b };
            let preds = label_songs(scores, &cfg)?;
            Ok(SweepRow {
                threshold,
                n_b,
                report: evaluate(&preds, gold)?,
            })
        })
        .collect::<Result<_>>()?;
    let argmax = |key: fn(&EvalReport) -> f64| {
        let mut best = &rows[0];
        for r in &rows[1..] {
            if key(&r.report) > key(&best.report) {
                best = r;
            }
        }
        best.threshold
    };
    Ok(SweepReport {
        best_macro_f1_threshold: argmax(|r| r.macro_avg.f1),
        best_sexist_f1_threshold: argmax(|r| r.sexist.f1),
        rows,
    })
}

pub fn write_roc_csv<W: Write>(points: &[RocPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["fpr", "tpr", "threshold"])?;
    for p in points {
        w.write_record([
            p.fpr.to_string(),
            p.tpr.to_string(),
            p.threshold.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text metrics table: one column per evaluated setting.
pub fn render_metrics_table(columns: &[(String, &EvalReport)]) -> String {
    let mut out = String::new();
    let mut header = format!("{:<10} {:<11}", "metric", "class");
    for (name, _) in columns {
        header.push_str(&format!(" {name:>9}"));
    }
    out.push_str(header.trim_end());
    out.push('\n');
    type Getter = fn(&ClassMetrics) -> f64;
    let metrics: [(&str, Getter); 3] = [
        ("precision", |m| m.precision),
        ("recall", |m| m.recall),
        ("f1", |m| m.f1),
    ];
    for (metric, get) in metrics {
        for class in ["sexist", "non_sexist", "macro"] {
            let mut line = format!("{metric:<10} {class:<11}");
            for (_, r) in columns {
                let m = match class {
                    "sexist" => &r.sexist,
                    "non_sexist" => &r.non_sexist,
                    _ => &r.macro_avg,
                };
                line.push_str(&format!(" {:>9.2}", get(m)));
            }
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}
