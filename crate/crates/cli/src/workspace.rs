//! Run directory layout. Each stage writes into its own directory, which is
//! staged under a temporary name and renamed into place only on success.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Dedup,
    Match,
    TrainEmbed,
    Assoc,
    Score,
    Label,
    Evaluate,
    Sweep,
    Analyze,
    Report,
}

impl Stage {
    /// Subcommand name, also used as the directory name.
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Dedup => "dedup",
            Stage::Match => "match",
            Stage::TrainEmbed => "train-embed",
            Stage::Assoc => "assoc",
            Stage::Score => "score",
            Stage::Label => "label",
            Stage::Evaluate => "evaluate",
            Stage::Sweep => "sweep",
            Stage::Analyze => "analyze",
            Stage::Report => "report",
        }
    }
}

pub struct Workspace {
    root: PathBuf,
    force: bool,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>, force: bool) -> Self {
        Workspace {
            root: root.into(),
            force,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stage_dir(&self, stage: Stage) -> PathBuf {
        self.root.join(stage.name())
    }

    pub fn has(&self, stage: Stage) -> bool {
        self.stage_dir(stage).is_dir()
    }

    /// Path of an upstream artifact, which must already exist.
    pub fn artifact(&self, stage: Stage, name: &str) -> CliResult<PathBuf> {
        let path = self.stage_dir(stage).join(name);
        if path.is_file() {
            Ok(path)
        } else {
            Err(CliError::MissingArtifact {
                path,
                stage: stage.name(),
            })
        }
    }

    pub fn open(&self, stage: Stage, name: &str) -> CliResult<BufReader<File>> {
        let path = self.artifact(stage, name)?;
        let f = File::open(&path).map_err(CliError::io(&path))?;
        Ok(BufReader::new(f))
    }

    /// Starts writing a stage. Fails if its directory already exists unless
    /// the workspace was opened with `force`.
    pub fn begin(&self, stage: Stage) -> CliResult<StageOutput> {
        let dest = self.stage_dir(stage);
        if dest.exists() {
            if !self.force {
                return Err(CliError::ArtifactExists(dest));
            }
            fs::remove_dir_all(&dest).map_err(CliError::io(&dest))?;
        }
        let tmp = self.root.join(format!(".{}.partial", stage.name()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(CliError::io(&tmp))?;
        }
        fs::create_dir_all(&tmp).map_err(CliError::io(&tmp))?;
        Ok(StageOutput { tmp, dest })
    }
}

pub struct StageOutput {
    tmp: PathBuf,
    dest: PathBuf,
}

impl StageOutput {
    pub fn write_with<F>(&self, name: &str, f: F) -> CliResult<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> lyricscope::Result<()>,
    {
        let path = self.tmp.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(CliError::io(parent))?;
        }
        let file = File::create(&path).map_err(CliError::io(&path))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush().map_err(CliError::io(&path))?;
        Ok(())
    }

    pub fn write_str(&self, name: &str, text: &str) -> CliResult<()> {
        self.write_with(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            Ok(w.write_all(b"\n")?)
        })
    }

    pub fn copy_from(&self, name: &str, src: &Path) -> CliResult<()> {
        let bytes = fs::read(src).map_err(CliError::io(src))?;
        self.write_with(name, |w| Ok(w.write_all(&bytes)?))
    }

    pub fn commit(self) -> CliResult<PathBuf> {
        fs::rename(&self.tmp, &self.dest).map_err(CliError::io(&self.dest))?;
        Ok(self.dest)
    }
}
