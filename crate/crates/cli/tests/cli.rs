//! Command-line behaviour: exit codes, write-once stages and a smoke run.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lyricscope::assoc::BatteryRow;
use lyricscope_cli::ProjectConfig;

fn lyricscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyricscope"))
        .args(args)
        .env_remove("LYRICSCOPE_CONFIG")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn fixture(dir: &Path) -> PathBuf {
    let fx = dir.join("fx");
    let out = lyricscope(&[
        "gen-fixture",
        "--artists",
        "24",
        "--out",
        fx.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    fx.join("lyricscope.toml")
}

fn with_config(config: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--config", config.to_str().unwrap()];
    all.extend_from_slice(args);
    lyricscope(&all)
}

#[test]
fn unknown_command_is_a_usage_error() {
    assert_eq!(code(&lyricscope(&["frobnicate"])), 2);
    assert_eq!(code(&lyricscope(&["label", "--threshold", "high"])), 2);
}

#[test]
fn bad_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(code(&with_config(&missing, &["ingest"])), 3);

    let conf = dir.path().join("bad.toml");
    std::fs::write(&conf, "[paths]\ncorpus = \"absent.jsonl\"\n").unwrap();
    let out = with_config(&conf, &["ingest"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("absent.jsonl"));

    std::fs::write(dir.path().join("c.jsonl"), "").unwrap();
    std::fs::write(
        &conf,
        "[paths]\ncorpus = \"c.jsonl\"\n[label]\nthreshold = 1.5\n",
    )
    .unwrap();
    assert_eq!(code(&with_config(&conf, &["label"])), 3);
}

#[test]
fn stages_need_inputs_and_are_write_once() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path());
    let run = dir.path().join("run");
    let run = run.to_str().unwrap();

    let out = with_config(&config, &["--out", run, "dedup"]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("ingest"));

    assert_eq!(code(&with_config(&config, &["--out", run, "ingest"])), 0);
    let again = with_config(&config, &["--out", run, "ingest"]);
    assert_eq!(code(&again), 6);
    assert_eq!(
        code(&with_config(&config, &["--out", run, "--force", "ingest"])),
        0
    );

    let out = with_config(&config, &["--out", run, "dedup", "--threshold", "0.9"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(Path::new(run).join("dedup/clusters.csv").is_file());
    assert!(!Path::new(run).join(".dedup.partial").exists());
}

#[test]
fn unknown_word_without_balancing_names_the_word() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path());
    let mut cfg = ProjectConfig::load(&config).unwrap();
    let sets_path = cfg.paths.word_sets.clone().unwrap();
    let mut sets = std::fs::read_to_string(&sets_path).unwrap();
    sets.push_str("\n[Ghosts]\nzzqxghost\nrose\n\n[Spirits]\nmoth\nspider\n");
    std::fs::write(&sets_path, sets).unwrap();
    cfg.assoc.balance = false;
    cfg.assoc.sweat_corpora.clear();
    cfg.assoc.rows = vec![BatteryRow::new(
        "Pleasant",
        "Unpleasant",
        "Ghosts",
        "Spirits",
    )];
    cfg.train.params.epochs = 1;
    let edited = dir.path().join("edited.toml");
    std::fs::write(&edited, cfg.to_toml()).unwrap();

    for stage in ["ingest", "dedup", "train-embed"] {
        let out = with_config(&edited, &[stage]);
        assert_eq!(code(&out), 0, "{stage}: {}", stderr(&out));
    }
    let out = with_config(&edited, &["assoc"]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("zzqxghost"), "{}", stderr(&out));
}

#[test]
fn pipeline_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture(dir.path());
    let run = dir.path().join("run");
    let out = with_config(
        &config,
        &["--out", run.to_str().unwrap(), "--threads", "2", "pipeline"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for stage in [
        "ingest",
        "dedup",
        "match",
        "train-embed",
        "assoc",
        "score",
        "label",
        "evaluate",
        "sweep",
        "analyze",
        "report",
    ] {
        assert!(run.join(stage).is_dir(), "missing {stage}");
        assert!(stdout.contains(stage), "no message from {stage}");
    }
    let summary = std::fs::read_to_string(run.join("report/summary.md")).unwrap();
    assert!(!summary.contains(dir.path().to_str().unwrap()));
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(run.join("evaluate/metrics.json")).unwrap())
            .unwrap();
    let model_f1 = metrics["model"]["macro_avg"]["f1"].as_f64().unwrap();
    let baseline_f1 = metrics["baseline"]["macro_avg"]["f1"].as_f64().unwrap();
    assert!(model_f1 > baseline_f1, "{model_f1} vs {baseline_f1}");
    let assoc_table = std::fs::read_to_string(run.join("assoc/associations.txt")).unwrap();
    assert!(assoc_table.contains("Flowers"));

    // A later stage can be rerun with an override once forced.
    let out = with_config(
        &config,
        &[
            "--out",
            run.to_str().unwrap(),
            "--force",
            "label",
            "--threshold",
            "0.9",
            "--n-b",
            "2",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}
