//! Experiment drivers for the matrix-free CutFEM solver: convergence
//! studies, single-cell kernel timings, multi-ball throughput and the vmult
//! time breakdown. Each driver returns its rows and writes CSV and SVG files
//! into the configured output directory.

pub mod breakdown;
pub mod config;
pub mod convergence;
pub mod kernelbench;
pub mod multiballs;
pub mod problems;
pub mod svg;
pub mod timing;

use std::path::{Path, PathBuf};

pub use config::{Command, ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] cutfem::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Files written by a run and the number of rows whose solve did not converge.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub not_converged: usize,
}

impl Outcome {
    /// 3 when `strict` is set and some row did not converge, 0 otherwise.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if strict && self.not_converged > 0 {
            3
        } else {
            0
        }
    }
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<Outcome, Error> {
    cfg.validate()?;
    match cfg.command {
        Command::Convergence => convergence::write(cfg, &convergence::run(cfg)?),
        Command::Kernelbench => kernelbench::write(cfg, &kernelbench::run(cfg)?),
        Command::Multiballs => multiballs::write(cfg, &multiballs::run(cfg)?),
        Command::Breakdown => breakdown::write(cfg, &breakdown::run(cfg)?),
    }
}

/// CSV text with LF line ends; floats use the shortest round-trip form.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> Result<String, Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io { path: PathBuf::from("<csv>"), source: e.into_error() })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// `""` for `None`.
pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub(crate) fn write_file(dir: &Path, name: &str, text: &str, out: &mut Outcome) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|source| Error::Io { path: path.clone(), source })?;
    out.files.push(path);
    Ok(())
}
