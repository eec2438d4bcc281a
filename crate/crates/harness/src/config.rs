//! Run configuration: defaults, `key = value` files and flag overrides.

use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    Value { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Convergence,
    Kernelbench,
    Multiballs,
    Breakdown,
}

/// Shape of the physical domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    /// Unit disk or unit sphere, depending on the dimension.
    Ball,
    /// Union of seeded random balls.
    Balls,
    /// `x₀ < offset`.
    HalfSpace,
}

impl FromStr for DomainKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "disk" | "sphere" | "ball" => Ok(Self::Ball),
            "balls" => Ok(Self::Balls),
            "halfspace" => Ok(Self::HalfSpace),
            _ => Err(()),
        }
    }
}

/// Manufactured solution of the convergence study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solution {
    /// `u = −(2/d)(|x|² − 1)`, `f = 4`.
    Quadratic,
    /// `u = cos(π|x|²/2)`.
    Smooth,
}

impl FromStr for Solution {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "quadratic" => Ok(Self::Quadratic),
            "smooth" => Ok(Self::Smooth),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub dim: usize,
    pub degrees: Vec<usize>,
    /// Number of meshes in the convergence study.
    pub refinements: usize,
    /// Cells per axis on the coarsest convergence mesh.
    pub cells0: usize,
    /// Cells per axis for multiballs and breakdown.
    pub cells: usize,
    /// The background box is `[−half_width, half_width]^d`.
    pub half_width: f64,
    pub domain: DomainKind,
    pub offset: f64,
    pub solution: Solution,
    /// Ball counts swept by `multiballs`; the first is used elsewhere.
    pub balls: Vec<usize>,
    pub seed: u64,
    /// A union of `n` balls uses radius `r0 / n`.
    pub r0: f64,
    pub gamma_a: Option<f64>,
    pub gamma_d: Option<f64>,
    pub cut_order: Option<usize>,
    pub error_order: Option<usize>,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub strict: bool,
    pub workers: usize,
    /// Applications per timed batch.
    pub repetitions: usize,
    pub batches: usize,
    pub output: PathBuf,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        let (degrees, domain, cells, repetitions) = match command {
            Command::Convergence => (vec![1, 2, 3], DomainKind::Ball, 32, 50),
            Command::Kernelbench => (vec![1, 2, 3], DomainKind::Ball, 32, 1000),
            Command::Multiballs => (vec![2], DomainKind::Balls, 32, 50),
            Command::Breakdown => (vec![3], DomainKind::Ball, 12, 50),
        };
        let dim = if command == Command::Multiballs { 3 } else { 2 };
        Self {
            command,
            dim,
            degrees,
            refinements: 5,
            cells0: 6,
            cells,
            half_width: 1.26,
            domain,
            offset: 0.5,
            solution: Solution::Smooth,
            balls: vec![1, 2, 4, 8, 16],
            seed: 0,
            r0: 1.0,
            gamma_a: None,
            gamma_d: None,
            cut_order: None,
            error_order: None,
            tol: 1e-8,
            max_iter: None,
            strict: false,
            workers: 1,
            repetitions,
            batches: 3,
            output: PathBuf::from("out"),
        }
    }

    /// Applies one setting; keys use the long flag spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let bad = || ConfigError::Value { key: key.clone(), value: value.to_string() };
        fn num<V: FromStr>(v: &str, bad: impl Fn() -> ConfigError) -> Result<V, ConfigError> {
            v.parse().map_err(|_| bad())
        }
        fn list(v: &str, bad: impl Fn() -> ConfigError) -> Result<Vec<usize>, ConfigError> {
            v.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
        }
        match key.as_str() {
            "dim" => self.dim = num(value, bad)?,
            "degrees" | "degree" => self.degrees = list(value, bad)?,
            "refinements" => self.refinements = num(value, bad)?,
            "cells0" => self.cells0 = num(value, bad)?,
            "cells" => self.cells = num(value, bad)?,
            "box" => self.half_width = num(value, bad)?,
            "domain" => self.domain = num(value, bad)?,
            "offset" => self.offset = num(value, bad)?,
            "solution" => self.solution = num(value, bad)?,
            "balls" => self.balls = list(value, bad)?,
            "seed" => self.seed = num(value, bad)?,
            "r0" => self.r0 = num(value, bad)?,
            "gamma-a" => self.gamma_a = Some(num(value, bad)?),
            "gamma-d" => self.gamma_d = Some(num(value, bad)?),
            "cut-order" => self.cut_order = Some(num(value, bad)?),
            "error-order" => self.error_order = Some(num(value, bad)?),
            "tol" => self.tol = num(value, bad)?,
            "max-iter" => self.max_iter = Some(num(value, bad)?),
            "strict" => self.strict = num(value, bad)?,
            "workers" => self.workers = num(value, bad)?,
            "repetitions" => self.repetitions = num(value, bad)?,
            "batches" => self.batches = num(value, bad)?,
            "output" => self.output = PathBuf::from(value),
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(2..=3).contains(&self.dim) {
            return invalid("dim must be 2 or 3");
        }
        if self.degrees.is_empty() || self.degrees.iter().any(|k| !(1..=4).contains(k)) {
            return invalid("degrees must lie in 1..=4");
        }
        if self.refinements < 1 {
            return invalid("refinements must be at least 1");
        }
        if self.cells0 < 1 || self.cells < 1 {
            return invalid("cell counts must be positive");
        }
        if !(self.half_width > 0.0) {
            return invalid("box must be positive");
        }
        if self.command == Command::Convergence && self.domain != DomainKind::Ball {
            return invalid("convergence runs on the unit disk or sphere");
        }
        if self.balls.is_empty() {
            return invalid("balls must list at least one count");
        }
        if !(self.r0 > 0.0) {
            return invalid("r0 must be positive");
        }
        if !(self.tol > 0.0) {
            return invalid("tol must be positive");
        }
        if self.workers < 1 || self.repetitions < 1 || self.batches < 1 {
            return invalid("workers, repetitions and batches must be positive");
        }
        Ok(())
    }
}
