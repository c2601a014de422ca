//! One function per pipeline stage. Every stage reads the configured inputs
//! and the artifacts of earlier stages and writes one stage directory.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use lyricscope::analytics::{
    count_table, fraction_table, grouped_series, render_svg, song_facts, type_gender_pairs,
    write_count_table, write_fraction_table, write_series_csv, GroupKey, GroupedSeries, SeriesKind,
    Subset,
};
use lyricscope::assoc::{
    parse_word_sets, render_table, run_battery, standard_battery, standard_word_sets, SeededSpaces,
};
use lyricscope::corpus::{
    apply_genre_map, filter_songs, parse_records, partition_corpora, partition_documents, GenreMap,
    PartitionName, SongRecord,
};
use lyricscope::dedup::{cluster_duplicates, write_report};
use lyricscope::embeddings::{train_documents, EmbeddingSpace, FrequencyTable};
use lyricscope::matching::{
    match_rates, match_records, matched_ids, read_chart_entries, read_match_results,
    write_match_results, ChartSource,
};
use lyricscope::sexism::{
    always_sexist, evaluate, label_songs, make_batches, read_gold_csv, read_predictions_csv,
    read_scores_jsonl, render_metrics_table, score_batches, sweep_thresholds,
    write_predictions_csv, write_roc_csv, write_scores_jsonl, BatchScore, BatchScorer, EvalReport,
    ExternalScores, LexiconScorer, SongPrediction,
};
use lyricscope::Error;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ProjectConfig;
use crate::error::{CliError, CliResult};
use crate::workspace::{Stage, StageOutput, Workspace};

const SONGS: &str = "songs.jsonl";
const PREDICTIONS: &str = "predictions.csv";
const SCORES: &str = "batch_scores.jsonl";
const MATCHES: &str = "matches.csv";
const SUMMARY: &str = "summary.json";

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    let f = File::open(path).map_err(CliError::io(path))?;
    Ok(BufReader::new(f))
}

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(CliError::io(path))
}

fn required<'a>(path: &'a Option<std::path::PathBuf>, key: &str) -> CliResult<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::Config(format!("paths.{key} is not set")))
}

fn read_songs<R: BufRead>(reader: R) -> CliResult<Vec<SongRecord>> {
    parse_records(reader)?
        .into_iter()
        .map(|r| {
            r.map_err(|m| {
                CliError::Module(Error::Parse {
                    context: format!("song line {}", m.line),
                    message: m.message,
                })
            })
        })
        .collect()
}

fn write_songs(out: &StageOutput, name: &str, songs: &[SongRecord]) -> CliResult<()> {
    out.write_with(name, |w| {
        for s in songs {
            serde_json::to_writer(&mut *w, s)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

fn corpus_songs(ws: &Workspace) -> CliResult<Vec<SongRecord>> {
    read_songs(ws.open(Stage::Dedup, SONGS)?)
}

#[derive(Serialize)]
struct IngestSummary {
    records: usize,
    accepted: usize,
    rejected: usize,
    reasons: BTreeMap<String, usize>,
    genre_mapped: usize,
}

pub fn ingest(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let records = parse_records(open_input(&cfg.paths.corpus)?)?;
    let n = records.len();
    let mut outcome = filter_songs(records, &cfg.filter)?;
    if let Some(path) = &cfg.paths.genre_map {
        let map = GenreMap::parse(&read_to_string(path)?)?;
        apply_genre_map(&mut outcome.accepted, &map);
    }
    let summary = IngestSummary {
        records: n,
        accepted: outcome.accepted.len(),
        rejected: outcome.rejections.len(),
        reasons: outcome
            .reason_counts()
            .into_iter()
            .map(|(r, c)| (r.as_str().to_owned(), c))
            .collect(),
        genre_mapped: outcome
            .accepted
            .iter()
            .filter(|r| r.genre_top.is_some())
            .count(),
    };

    let out = ws.begin(Stage::Ingest)?;
    write_songs(&out, SONGS, &outcome.accepted)?;
    out.write_with("rejections.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["song_id", "reasons"])?;
        for r in &outcome.rejections {
            let reasons: Vec<&str> = r.reasons.iter().map(|x| x.as_str()).collect();
            c.write_record([r.song_id.as_str(), &reasons.join(";")])?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.write_json(SUMMARY, &summary)?;
    out.commit()?;
    Ok(format!(
        "ingest: {} of {} records accepted",
        summary.accepted, summary.records
    ))
}

#[derive(Serialize)]
struct DedupSummary {
    songs_in: usize,
    retained: usize,
    dropped: usize,
    clusters: usize,
    covers: usize,
    threshold: f64,
}

pub fn dedup(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let songs = read_songs(ws.open(Stage::Ingest, SONGS)?)?;
    let outcome = cluster_duplicates(&songs, cfg.dedup.threshold)?;
    let summary = DedupSummary {
        songs_in: songs.len(),
        retained: outcome.retained.len(),
        dropped: outcome.dropped.len(),
        clusters: outcome.clusters.len(),
        covers: outcome.clusters.iter().map(|c| c.covers.len()).sum(),
        threshold: cfg.dedup.threshold,
    };
    let out = ws.begin(Stage::Dedup)?;
    write_songs(&out, SONGS, &outcome.retained)?;
    out.write_with("clusters.csv", |w| write_report(&outcome.clusters, w))?;
    out.write_json(SUMMARY, &summary)?;
    out.commit()?;
    Ok(format!(
        "dedup: {} clusters, {} songs dropped, {} covers kept",
        summary.clusters, summary.dropped, summary.covers
    ))
}

pub fn match_charts(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let charts = required(&cfg.paths.charts, "charts")?;
    let entries = read_chart_entries(open_input(charts)?)?;
    let songs = corpus_songs(ws)?;
    let results = match_records(&entries, &songs, &cfg.matching)?;
    let rates = match_rates(&results);
    let matched = results
        .iter()
        .filter(|r| r.matched_song_id.is_some())
        .count();

    let out = ws.begin(Stage::Match)?;
    out.write_with(MATCHES, |w| write_match_results(&results, w))?;
    out.write_with("rates.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        for r in &rates {
            c.serialize(r)?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.commit()?;
    Ok(format!(
        "match: {matched} of {} chart entries matched",
        results.len()
    ))
}

fn space_file(partition: PartitionName, seed: u64) -> String {
    format!("{}/seed-{seed}.vec", partition.as_str())
}

fn freq_file(partition: PartitionName) -> String {
    format!("{}/freq.tsv", partition.as_str())
}

#[derive(Serialize)]
struct PartitionInfo {
    name: String,
    songs: usize,
    tokens: u64,
}

pub fn train_embed(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let songs = corpus_songs(ws)?;
    let partitions = partition_corpora(&songs);
    let docs: Vec<Vec<&str>> = partitions
        .iter()
        .map(|p| partition_documents(&songs, p))
        .collect();
    let jobs: Vec<(usize, u64)> = (0..partitions.len())
        .flat_map(|p| cfg.train.seeds.iter().map(move |s| (p, *s)))
        .collect();
    let trained = jobs
        .par_iter()
        .map(|&(p, seed)| {
            train_documents(
                &docs[p],
                &cfg.train.for_seed(seed),
                partitions[p].name.as_str(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let out = ws.begin(Stage::TrainEmbed)?;
    let mut info = Vec::new();
    for (p, d) in partitions.iter().zip(&docs) {
        let freq = FrequencyTable::from_documents(d.iter().copied());
        out.write_with(&freq_file(p.name), |w| freq.write_tsv(w))?;
        info.push(PartitionInfo {
            name: p.name.as_str().to_owned(),
            songs: p.song_ids.len(),
            tokens: freq.total_tokens(),
        });
    }
    for (&(p, seed), (space, _)) in jobs.iter().zip(&trained) {
        out.write_with(&space_file(partitions[p].name, seed), |w| {
            space.write_text(w)
        })?;
    }
    out.write_with("train_log.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record([
            "partition",
            "seed",
            "epoch",
            "loss",
            "vocab_size",
            "tokens_per_epoch",
        ])?;
        for (&(p, seed), (_, report)) in jobs.iter().zip(&trained) {
            for (epoch, loss) in report.epoch_losses.iter().enumerate() {
                c.write_record([
                    partitions[p].name.as_str().to_owned(),
                    seed.to_string(),
                    (epoch + 1).to_string(),
                    loss.to_string(),
                    report.vocab_size.to_string(),
                    report.tokens_per_epoch.to_string(),
                ])?;
            }
        }
        c.flush()?;
        Ok(())
    })?;
    out.write_json("partitions.json", &info)?;
    out.commit()?;
    Ok(format!(
        "train-embed: {} embedding spaces over {} partitions",
        trained.len(),
        partitions.len()
    ))
}

pub fn assoc(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let sets = match &cfg.paths.word_sets {
        Some(p) => parse_word_sets(&read_to_string(p)?)?,
        None => standard_word_sets(),
    };
    let rows = if cfg.assoc.rows.is_empty() {
        standard_battery()
    } else {
        cfg.assoc.rows.clone()
    };

    let mut tables = Vec::new();
    let mut spaces: Vec<Vec<EmbeddingSpace>> = Vec::new();
    for p in PartitionName::ALL {
        tables.push(FrequencyTable::read_tsv(
            ws.open(Stage::TrainEmbed, &freq_file(p))?,
        )?);
        let mut per_seed = Vec::new();
        for &seed in &cfg.train.seeds {
            per_seed.push(EmbeddingSpace::read_text(
                ws.open(Stage::TrainEmbed, &space_file(p, seed))?,
            )?);
        }
        spaces.push(per_seed);
    }
    let corpora: Vec<SeededSpaces<'_>> = PartitionName::ALL
        .iter()
        .zip(&spaces)
        .map(|(p, s)| SeededSpaces {
            corpus: p.as_str().to_owned(),
            spaces: s.iter().collect(),
        })
        .collect();
    let table_refs: Vec<&FrequencyTable> = tables.iter().collect();
    let report = run_battery(&rows, &sets, &corpora, &table_refs, &cfg.battery())?;

    let out = ws.begin(Stage::Assoc)?;
    out.write_json("results.json", &report)?;
    out.write_str("associations.txt", &render_table(&report))?;
    out.commit()?;
    Ok(format!(
        "assoc: {} rows on {} corpora, {} cross-corpus comparisons",
        rows.len(),
        corpora.len(),
        report.sweat.len()
    ))
}

pub fn score(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let songs = corpus_songs(ws)?;
    let scorer: Box<dyn BatchScorer> = match (&cfg.paths.external_scores, &cfg.paths.lexicon) {
        (Some(p), _) => Box::new(ExternalScores::read_jsonl(open_input(p)?, "external")?),
        (None, Some(p)) => Box::new(LexiconScorer::parse(&read_to_string(p)?)?),
        (None, None) => {
            return Err(CliError::Config(
                "score needs paths.lexicon or paths.external_scores".into(),
            ))
        }
    };
    let mut batches = Vec::new();
    for s in &songs {
        batches.extend(make_batches(&s.song_id, &s.lyrics)?);
    }
    let scores = score_batches(scorer.as_ref(), &batches)?;
    let out = ws.begin(Stage::Score)?;
    out.write_with(SCORES, |w| write_scores_jsonl(&scores, w))?;
    out.commit()?;
    Ok(format!(
        "score: {} batches of {} songs scored by {}",
        scores.len(),
        songs.len(),
        scorer.id()
    ))
}

fn read_scores(ws: &Workspace) -> CliResult<Vec<BatchScore>> {
    Ok(read_scores_jsonl(ws.open(Stage::Score, SCORES)?)?)
}

#[derive(Serialize)]
struct LabelSummary {
    songs: usize,
    sexist: usize,
    threshold: f64,
    n_b: usize,
}

pub fn label(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let preds = label_songs(&read_scores(ws)?, &cfg.label)?;
    let summary = LabelSummary {
        songs: preds.len(),
        sexist: preds.iter().filter(|p| p.sexist).count(),
        threshold: cfg.label.threshold,
        n_b: cfg.label.n_b,
    };
    let out = ws.begin(Stage::Label)?;
    out.write_with(PREDICTIONS, |w| write_predictions_csv(&preds, w))?;
    out.write_json(SUMMARY, &summary)?;
    out.commit()?;
    Ok(format!(
        "label: {} of {} songs labeled sexist",
        summary.sexist, summary.songs
    ))
}

fn read_gold(cfg: &ProjectConfig) -> CliResult<BTreeMap<String, bool>> {
    let gold = read_gold_csv(open_input(required(&cfg.paths.gold, "gold")?)?)?;
    if gold.is_empty() {
        return Err(CliError::Config("gold label file is empty".into()));
    }
    Ok(gold)
}

#[derive(Serialize, Deserialize)]
struct EvaluateSummary {
    threshold: f64,
    n_b: usize,
    model: EvalReport,
    baseline: EvalReport,
}

fn model_column(threshold: f64, n_b: usize) -> String {
    format!("t={threshold},nb={n_b}")
}

pub fn evaluate_gold(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let gold = read_gold(cfg)?;
    let preds: Vec<SongPrediction> = read_predictions_csv(ws.open(Stage::Label, PREDICTIONS)?)?
        .into_iter()
        .filter(|p| gold.contains_key(&p.song_id))
        .collect();
    let model = evaluate(&preds, &gold)?;
    let baseline = evaluate(&always_sexist(&gold), &gold)?;
    let table = render_metrics_table(&[
        ("baseline".to_owned(), &baseline),
        (model_column(cfg.label.threshold, cfg.label.n_b), &model),
    ]);
    let summary = EvaluateSummary {
        threshold: cfg.label.threshold,
        n_b: cfg.label.n_b,
        model,
        baseline,
    };
    let out = ws.begin(Stage::Evaluate)?;
    out.write_json("metrics.json", &summary)?;
    out.write_str("classifier_metrics.txt", &table)?;
    if let Some(roc) = &summary.model.roc {
        out.write_with("roc.csv", |w| write_roc_csv(roc, w))?;
    }
    out.commit()?;
    Ok(format!(
        "evaluate: macro F1 {:.3} on {} gold songs (baseline {:.3})",
        summary.model.macro_avg.f1, summary.model.n_songs, summary.baseline.macro_avg.f1
    ))
}

pub fn sweep(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let gold = read_gold(cfg)?;
    let scores: Vec<BatchScore> = read_scores(ws)?
        .into_iter()
        .filter(|s| gold.contains_key(&s.song_id))
        .collect();
    let report = sweep_thresholds(&scores, &gold, &cfg.sweep.thresholds, cfg.label.n_b)?;
    let baseline = evaluate(&always_sexist(&gold), &gold)?;
    let mut columns = vec![("baseline".to_owned(), &baseline)];
    for r in &report.rows {
        columns.push((model_column(r.threshold, r.n_b), &r.report));
    }
    let table = render_metrics_table(&columns);

    let out = ws.begin(Stage::Sweep)?;
    out.write_with("sweep.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record([
            "threshold",
            "n_b",
            "tp",
            "fp",
            "fn",
            "tn",
            "sexist_precision",
            "sexist_recall",
            "sexist_f1",
            "non_sexist_precision",
            "non_sexist_recall",
            "non_sexist_f1",
            "macro_precision",
            "macro_recall",
            "macro_f1",
        ])?;
        for r in &report.rows {
            let e = &r.report;
            let mut rec = vec![
                r.threshold.to_string(),
                r.n_b.to_string(),
                e.confusion.tp.to_string(),
                e.confusion.fp.to_string(),
                e.confusion.fn_.to_string(),
                e.confusion.tn.to_string(),
            ];
            for m in [&e.sexist, &e.non_sexist, &e.macro_avg] {
                rec.extend([m.precision, m.recall, m.f1].map(|v| format!("{v:.6}")));
            }
            c.write_record(&rec)?;
        }
        c.flush()?;
        Ok(())
    })?;
    out.write_json(SUMMARY, &report)?;
    out.write_str("classifier_metrics.txt", &table)?;
    out.commit()?;
    Ok(format!(
        "sweep: best macro F1 at threshold {}",
        report.best_macro_f1_threshold
    ))
}

fn series_specs(
    facts: &[lyricscope::analytics::SongFacts],
    subsets: &[Subset],
) -> Vec<(GroupKey, SeriesKind)> {
    let pairs = type_gender_pairs(facts);
    let mut specs = Vec::new();
    for &subset in subsets {
        specs.push((GroupKey::everything(subset), SeriesKind::SexistFraction));
        for &(t, g) in &pairs {
            specs.push((GroupKey::new(t, g, subset), SeriesKind::SexistFraction));
        }
        for &(t, g) in &pairs {
            specs.push((GroupKey::new(t, g, subset), SeriesKind::ShareOfSubset));
        }
    }
    specs
}

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::SexistFraction => "sexist_fraction",
        SeriesKind::ShareOfSubset => "group_share",
    }
}

pub fn analyze(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let songs = corpus_songs(ws)?;
    let labels: BTreeMap<String, bool> = read_predictions_csv(ws.open(Stage::Label, PREDICTIONS)?)?
        .into_iter()
        .map(|p| (p.song_id, p.sexist))
        .collect();
    let (billboard, top10) = if cfg.paths.charts.is_some() {
        let results = read_match_results(ws.open(Stage::Match, MATCHES)?)?;
        (
            matched_ids(&results, ChartSource::BillboardHot100),
            matched_ids(&results, ChartSource::BillboardTop10),
        )
    } else {
        (BTreeSet::new(), BTreeSet::new())
    };
    let facts = song_facts(&songs, &billboard, &top10);
    let subsets = cfg.subsets()?;
    let boot = cfg.bootstrap();
    let series: Vec<GroupedSeries> = series_specs(&facts, &subsets)
        .par_iter()
        .map(|(key, kind)| grouped_series(&facts, key, *kind, &labels, Some(&boot)))
        .collect::<Result<_, _>>()?;
    let counts = count_table(&facts);
    let fractions = fraction_table(&facts, &labels, &Subset::ALL, false)?;
    let by_genre = fraction_table(&facts, &labels, &Subset::ALL, true)?;

    let out = ws.begin(Stage::Analyze)?;
    out.write_with("song_counts.csv", |w| write_count_table(&counts, w))?;
    out.write_with("sexist_fractions.csv", |w| {
        write_fraction_table(&fractions, w)
    })?;
    out.write_with("sexist_fractions_by_genre.csv", |w| {
        write_fraction_table(&by_genre, w)
    })?;
    out.write_with("series.csv", |w| write_series_csv(&series, w))?;
    for &subset in &subsets {
        for kind in [SeriesKind::SexistFraction, SeriesKind::ShareOfSubset] {
            let chosen: Vec<GroupedSeries> = series
                .iter()
                .filter(|s| s.kind == kind && s.key.subset == subset && s.key.artist_type.is_some())
                .cloned()
                .collect();
            let title = format!(
                "{} by artist type and gender ({})",
                kind_name(kind),
                subset.as_str()
            );
            out.write_str(
                &format!("{}_{}.svg", kind_name(kind), subset.as_str()),
                &render_svg(&title, &chosen),
            )?;
        }
    }
    out.commit()?;
    Ok(format!(
        "analyze: {} series over {} songs",
        series.len(),
        facts.len()
    ))
}

fn read_json(ws: &Workspace, stage: Stage, name: &str) -> CliResult<serde_json::Value> {
    let v = serde_json::from_reader(ws.open(stage, name)?).map_err(Error::from)?;
    Ok(v)
}

fn read_artifact_text(ws: &Workspace, stage: Stage, name: &str) -> CliResult<String> {
    read_to_string(&ws.artifact(stage, name)?)
}

fn fenced(out: &mut String, text: &str) {
    let _ = writeln!(out, "```\n{}```\n", text);
}

/// Collects the headline tables of the earlier stages into one directory
/// with a markdown summary. Contains no paths or timestamps.
pub fn report(cfg: &ProjectConfig, ws: &Workspace) -> CliResult<String> {
    let ingest = read_json(ws, Stage::Ingest, SUMMARY)?;
    let dedup = read_json(ws, Stage::Dedup, SUMMARY)?;
    let labels = read_json(ws, Stage::Label, SUMMARY)?;
    let assoc_table = read_artifact_text(ws, Stage::Assoc, "associations.txt")?;
    let mut copies: Vec<(Stage, String)> = vec![
        (Stage::Assoc, "associations.txt".into()),
        (Stage::Assoc, "results.json".into()),
        (Stage::Analyze, "song_counts.csv".into()),
        (Stage::Analyze, "sexist_fractions.csv".into()),
        (Stage::Analyze, "sexist_fractions_by_genre.csv".into()),
        (Stage::Analyze, "series.csv".into()),
    ];
    for s in cfg.subsets()? {
        for kind in [SeriesKind::SexistFraction, SeriesKind::ShareOfSubset] {
            copies.push((
                Stage::Analyze,
                format!("{}_{}.svg", kind_name(kind), s.as_str()),
            ));
        }
    }
    let with_gold = cfg.paths.gold.is_some();
    if with_gold {
        copies.push((Stage::Evaluate, "metrics.json".into()));
        copies.push((Stage::Sweep, "sweep.csv".into()));
    }
    if cfg.paths.charts.is_some() {
        copies.push((Stage::Match, "rates.csv".into()));
    }
    let sources: Vec<(String, std::path::PathBuf)> = copies
        .iter()
        .map(|(stage, name)| Ok((name.clone(), ws.artifact(*stage, name)?)))
        .collect::<CliResult<_>>()?;

    let mut md = String::from("# Run report\n\n## Corpus\n\n");
    let _ = writeln!(
        md,
        "- records read: {}\n- accepted after filtering: {}\n- rejected: {}",
        ingest["records"], ingest["accepted"], ingest["rejected"]
    );
    if let Some(reasons) = ingest["reasons"].as_object() {
        for (k, v) in reasons {
            let _ = writeln!(md, "  - {k}: {v}");
        }
    }
    let _ = writeln!(
        md,
        "- duplicate clusters: {}\n- songs dropped as duplicates: {}\n- covers kept: {}\n- songs analysed: {}\n",
        dedup["clusters"], dedup["dropped"], dedup["covers"], dedup["retained"]
    );
    let _ = writeln!(md, "## Association tests\n");
    fenced(&mut md, &assoc_table);
    let _ = writeln!(
        md,
        "## Sexism labels\n\n- songs labeled sexist: {} of {} (threshold {}, N_B {})\n",
        labels["sexist"], labels["songs"], labels["threshold"], labels["n_b"]
    );
    let mut metrics_table = None;
    if with_gold {
        metrics_table = Some(read_artifact_text(
            ws,
            Stage::Sweep,
            "classifier_metrics.txt",
        )?);
        let sweep = read_json(ws, Stage::Sweep, SUMMARY)?;
        let _ = writeln!(md, "## Classifier evaluation\n");
        fenced(&mut md, metrics_table.as_deref().unwrap_or_default());
        let _ = writeln!(
            md,
            "- best macro F1 threshold: {}\n- best sexist-class F1 threshold: {}\n",
            sweep["best_macro_f1_threshold"], sweep["best_sexist_f1_threshold"]
        );
    }
    let _ = writeln!(md, "## Files\n");
    for (name, _) in &sources {
        let _ = writeln!(md, "- {name}");
    }

    let out = ws.begin(Stage::Report)?;
    for (name, src) in &sources {
        out.copy_from(name, src)?;
    }
    if let Some(t) = &metrics_table {
        out.write_str("classifier_metrics.txt", t)?;
    }
    out.write_str("summary.md", &md)?;
    let dest = out.commit()?;
    Ok(format!("report: written to {}", dest.display()))
}
