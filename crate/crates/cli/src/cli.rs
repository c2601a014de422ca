use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::ProjectConfig;
use crate::error::{CliError, CliResult};
use crate::fixture::{generate, write_fixture, FixtureConfig};
use crate::workspace::Workspace;

#[derive(Debug, Parser)]
#[command(
    name = "lyricscope",
    version,
    about = "Bias and sexism measurement over song-lyric corpora"
)]
pub struct Cli {
    /// Project config file.
    #[arg(
        long,
        global = true,
        env = "LYRICSCOPE_CONFIG",
        default_value = "lyricscope.toml"
    )]
    pub config: PathBuf,
    /// Run directory; overrides `paths.out`. For gen-fixture, the target directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `rng_seed`. For gen-fixture, the generator seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Replace stage directories that already exist.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and filter the raw corpus.
    Ingest,
    /// Cluster near-duplicate lyrics and drop same-artist copies.
    Dedup {
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Link chart entries to corpus songs.
    Match {
        #[arg(long)]
        artist_threshold: Option<f64>,
        #[arg(long)]
        title_threshold: Option<f64>,
    },
    /// Train one embedding space per partition and seed.
    TrainEmbed,
    /// Run the association test battery on every partition and seed.
    Assoc {
        #[arg(long)]
        n_perm: Option<usize>,
    },
    /// Score four-line batches of every song.
    Score,
    /// Turn batch scores into song labels.
    Label(LabelArgs),
    /// Compare song labels with gold labels.
    Evaluate(LabelArgs),
    /// Evaluate a list of thresholds against gold labels.
    Sweep {
        /// Comma-separated thresholds.
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        #[arg(long)]
        n_b: Option<usize>,
    },
    /// Tables and yearly series by artist type, gender and genre.
    Analyze {
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        n_boot: Option<usize>,
    },
    /// Collect the headline outputs into one directory.
    Report,
    /// Run every stage in order.
    Pipeline,
    /// Write a synthetic corpus with matching inputs and config.
    GenFixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub n_b: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    /// Generator settings as TOML; flags override them.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub artists: Option<usize>,
    #[arg(long)]
    pub bias_strength: Option<f64>,
    #[arg(long)]
    pub female_bias_strength: Option<f64>,
    #[arg(long)]
    pub sexist_share: Option<f64>,
    #[arg(long)]
    pub plant_rate: Option<f64>,
}

fn load_config(cli: &Cli) -> CliResult<ProjectConfig> {
    let mut cfg = ProjectConfig::load(&cli.config)?;
    if let Some(out) = &cli.out {
        cfg.paths.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    Ok(cfg)
}

fn apply_overrides(cfg: &mut ProjectConfig, command: &Command) {
    fn set<T: Copy>(slot: &mut T, value: Option<T>) {
        if let Some(v) = value {
            *slot = v;
        }
    }
    match command {
        Command::Dedup { threshold } => set(&mut cfg.dedup.threshold, *threshold),
        Command::Match {
            artist_threshold,
            title_threshold,
        } => {
            set(&mut cfg.matching.artist_threshold, *artist_threshold);
            set(&mut cfg.matching.title_threshold, *title_threshold);
        }
        Command::Assoc { n_perm } => set(&mut cfg.assoc.n_perm, *n_perm),
        Command::Label(a) | Command::Evaluate(a) => {
            set(&mut cfg.label.threshold, a.threshold);
            set(&mut cfg.label.n_b, a.n_b);
        }
        Command::Sweep { thresholds, n_b } => {
            if let Some(t) = thresholds {
                cfg.sweep.thresholds = t.clone();
            }
            set(&mut cfg.label.n_b, *n_b);
        }
        Command::Analyze { window, n_boot } => {
            set(&mut cfg.analytics.window, *window);
            set(&mut cfg.analytics.n_boot, *n_boot);
        }
        _ => {}
    }
}

fn gen_fixture(cli: &Cli, args: &FixtureArgs) -> CliResult<Vec<String>> {
    let mut fc = match &args.params {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(CliError::io(p))?;
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => FixtureConfig::default(),
    };
    if let Some(s) = cli.seed {
        fc.seed = s;
    }
    if let Some(n) = args.artists {
        fc.artists = n;
    }
    if let Some(s) = args.bias_strength {
        fc.bias_strength = s;
    }
    if let Some(s) = args.female_bias_strength {
        fc.female_bias_strength = Some(s);
    }
    if let Some(s) = args.sexist_share {
        fc.sexist_share = s;
    }
    if let Some(s) = args.plant_rate {
        fc.plant_rate = s;
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("fixture"));
    let fixture = generate(&fc)?;
    write_fixture(&dir, &fixture)?;
    Ok(vec![format!(
        "gen-fixture: {} songs, {} chart entries, {} gold labels in {}",
        fixture.records.len(),
        fixture.charts.len(),
        fixture.gold.len(),
        dir.display()
    )])
}

type StageFn = fn(&ProjectConfig, &Workspace) -> CliResult<String>;

fn pipeline_stages(cfg: &ProjectConfig) -> Vec<StageFn> {
    let mut stages: Vec<StageFn> = vec![commands::ingest, commands::dedup];
    if cfg.paths.charts.is_some() {
        stages.push(commands::match_charts);
    }
    stages.extend([
        commands::train_embed as StageFn,
        commands::assoc,
        commands::score,
        commands::label,
    ]);
    if cfg.paths.gold.is_some() {
        stages.extend([commands::evaluate_gold as StageFn, commands::sweep]);
    }
    stages.extend([commands::analyze as StageFn, commands::report]);
    stages
}

/// Executes one parsed command line and returns its progress messages.
pub fn run(cli: &Cli) -> CliResult<Vec<String>> {
    if let Command::GenFixture(args) = &cli.command {
        return gen_fixture(cli, args);
    }
    let mut cfg = load_config(cli)?;
    apply_overrides(&mut cfg, &cli.command);
    cfg.validate()?;
    let ws = Workspace::new(&cfg.paths.out, cli.force);
    std::fs::create_dir_all(ws.root()).map_err(CliError::io(ws.root()))?;
    let stage: StageFn = match &cli.command {
        Command::Ingest => commands::ingest,
        Command::Dedup { .. } => commands::dedup,
        Command::Match { .. } => commands::match_charts,
        Command::TrainEmbed => commands::train_embed,
        Command::Assoc { .. } => commands::assoc,
        Command::Score => commands::score,
        Command::Label(_) => commands::label,
        Command::Evaluate(_) => commands::evaluate_gold,
        Command::Sweep { .. } => commands::sweep,
        Command::Analyze { .. } => commands::analyze,
        Command::Report => commands::report,
        Command::Pipeline => {
            return pipeline_stages(&cfg)
                .into_iter()
                .map(|f| f(&cfg, &ws))
                .collect();
        }
        Command::GenFixture(_) => unreachable!("handled above"),
    };
    Ok(vec![stage(&cfg, &ws)?])
}
