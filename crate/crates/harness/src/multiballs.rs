//! vmult throughput on unions of random balls at a fixed mesh.

use cutfem::operator::Breakdown;

use crate::config::RunConfig;
use crate::problems::{context, level_set};
use crate::timing::time_vmult;
use crate::{csv_string, opt, write_file, Error, Outcome};

pub const HEADER: [&str; 6] = ["n_balls", "seed", "k", "n_dofs", "cut_fraction", "dofs_per_second"];

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub n_balls: usize,
    pub seed: u64,
    pub k: usize,
    pub n_dofs: usize,
    pub cut_fraction: f64,
    /// `None` for a domain without active DoFs.
    pub dofs_per_second: Option<f64>,
    pub breakdown: Option<Breakdown>,
}

pub fn run(cfg: &RunConfig) -> Result<Vec<Row>, Error> {
    let mut rows = Vec::new();
    for &k in &cfg.degrees {
        for &n in &cfg.balls {
            let ctx = context(cfg, k, cfg.cells, level_set(cfg, n))?;
            let mut row = Row {
                n_balls: n,
                seed: cfg.seed,
                k,
                n_dofs: ctx.n_active(),
                cut_fraction: ctx.cut_fraction(),
                dofs_per_second: None,
                breakdown: None,
            };
            if ctx.n_active() == 0 {
                eprintln!("warning: {n} balls (seed {}) leave no active DoFs; skipped", cfg.seed);
            } else {
                let (secs, b) = time_vmult(&ctx, cfg.repetitions, cfg.batches)?;
                row.dofs_per_second = Some(ctx.n_active() as f64 / secs);
                row.breakdown = Some(b);
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[Row]) -> Result<String, Error> {
    let recs: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n_balls.to_string(),
                r.seed.to_string(),
                r.k.to_string(),
                r.n_dofs.to_string(),
                r.cut_fraction.to_string(),
                opt(r.dofs_per_second),
            ]
        })
        .collect();
    csv_string(&HEADER, &recs)
}

pub fn write(cfg: &RunConfig, rows: &[Row]) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    write_file(&cfg.output, &format!("multiballs_{}d.csv", cfg.dim), &to_csv(rows)?, &mut out)?;
    for r in rows {
        if let Some(b) = &r.breakdown {
            let name = format!("multiballs_breakdown_n{}_k{}.csv", r.n_balls, r.k);
            write_file(&cfg.output, &name, &b.to_csv(), &mut out)?;
        }
    }
    Ok(out)
}
