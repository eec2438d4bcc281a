use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cutfem_harness::config::{Command, ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "cutfem", version, about = "Matrix-free CutFEM experiment drivers")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// L² error against mesh size on the unit disk or sphere.
    Convergence(Opts),
    /// Single-cell kernel timings.
    Kernelbench(Opts),
    /// vmult throughput over unions of random balls.
    Multiballs(Opts),
    /// vmult time split into operator components.
    Breakdown(Opts),
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Opts {
    /// File of `key = value` lines using the flag names below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<String>,
    /// Comma-separated list, e.g. `1,2,3`.
    #[arg(long)]
    degrees: Option<String>,
    /// Number of meshes in a convergence study.
    #[arg(long)]
    refinements: Option<String>,
    /// Cells per axis on the coarsest convergence mesh.
    #[arg(long)]
    cells0: Option<String>,
    /// Cells per axis for multiballs and breakdown.
    #[arg(long)]
    cells: Option<String>,
    /// Half width of the background box.
    #[arg(long = "box")]
    half_width: Option<String>,
    /// disk | sphere | balls | halfspace
    #[arg(long)]
    domain: Option<String>,
    /// Half-space boundary position along the first axis.
    #[arg(long)]
    offset: Option<String>,
    /// smooth | quadratic
    #[arg(long)]
    solution: Option<String>,
    /// Comma-separated ball counts.
    #[arg(long)]
    balls: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// A union of n balls uses radius r0 / n.
    #[arg(long)]
    r0: Option<String>,
    #[arg(long)]
    gamma_a: Option<String>,
    #[arg(long)]
    gamma_d: Option<String>,
    #[arg(long)]
    cut_order: Option<String>,
    #[arg(long)]
    error_order: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
    /// Exit with status 3 if any solve fails to converge.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    workers: Option<String>,
    /// Applications per timed batch.
    #[arg(long)]
    repetitions: Option<String>,
    #[arg(long)]
    batches: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("dim", &self.dim),
            ("degrees", &self.degrees),
            ("refinements", &self.refinements),
            ("cells0", &self.cells0),
            ("cells", &self.cells),
            ("box", &self.half_width),
            ("domain", &self.domain),
            ("offset", &self.offset),
            ("solution", &self.solution),
            ("balls", &self.balls),
            ("seed", &self.seed),
            ("r0", &self.r0),
            ("gamma-a", &self.gamma_a),
            ("gamma-d", &self.gamma_d),
            ("cut-order", &self.cut_order),
            ("error-order", &self.error_order),
            ("tol", &self.tol),
            ("max-iter", &self.max_iter),
            ("workers", &self.workers),
            ("repetitions", &self.repetitions),
            ("batches", &self.batches),
            ("output", &self.output),
        ]
    }
}

fn configure(command: Command, opts: &Opts) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::new(command);
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
        cfg.apply_file_text(&text)?;
    }
    for (key, value) in opts.pairs() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if opts.strict {
        cfg.strict = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Cmd::Convergence(o) => (Command::Convergence, o),
        Cmd::Kernelbench(o) => (Command::Kernelbench, o),
        Cmd::Multiballs(o) => (Command::Multiballs, o),
        Cmd::Breakdown(o) => (Command::Breakdown, o),
    };
    let cfg = match configure(command, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cutfem_harness::run(&cfg) {
        Ok(out) => {
            for f in &out.files {
                println!("{}", f.display());
            }
            ExitCode::from(out.exit_code(cfg.strict) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
