//! L² error against mesh size on the unit disk or sphere.

use cutfem::solver::{cg_run, default_max_iter, l2_error};

use crate::config::RunConfig;
use crate::problems::{context, level_set, Manufactured};
use crate::svg::{self, Point, Series, Slope};
use crate::{csv_string, opt, write_file, Error, Outcome};

pub const HEADER: [&str; 7] = ["k", "refinement", "h", "n_dofs", "iterations", "l2_error", "rate"];

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub k: usize,
    pub refinement: usize,
    pub h: f64,
    pub n_dofs: usize,
    pub iterations: usize,
    /// `None` when CG stopped at `max_iter` above the tolerance.
    pub l2_error: Option<f64>,
    /// `log₂(e_prev / e)`; needs both errors.
    pub rate: Option<f64>,
}

impl Row {
    pub fn converged(&self) -> bool {
        self.l2_error.is_some()
    }
}

/// Solves on `cells0 · 2^r` cells per axis for every degree and `r < refinements`.
pub fn run(cfg: &RunConfig) -> Result<Vec<Row>, Error> {
    let exact = Manufactured::new(cfg.solution, cfg.dim);
    let phi = level_set(cfg, 1);
    let mut rows = Vec::new();
    for &k in &cfg.degrees {
        let mut prev: Option<f64> = None;
        for r in 0..cfg.refinements {
            let cells = cfg.cells0 << r;
            let ctx = context(cfg, k, cells, phi.clone())?;
            let b = ctx.assemble_rhs(&|x| exact.f(x), Some(&|x| exact.u(x)));
            let max_iter = cfg.max_iter.unwrap_or_else(|| default_max_iter(ctx.n_active()));
            let report = cg_run(&ctx, &b, cfg.tol, max_iter)?;
            let l2 = if report.converged { Some(l2_error(&ctx, &report.solution, &|x| exact.u(x))?) } else { None };
            let rate = match (prev, l2) {
                (Some(p), Some(e)) => Some((p / e).log2()),
                _ => None,
            };
            rows.push(Row {
                k,
                refinement: r,
                h: 2.0 * cfg.half_width / cells as f64,
                n_dofs: ctx.n_active(),
                iterations: report.iterations,
                l2_error: l2,
                rate,
            });
            prev = l2;
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[Row]) -> Result<String, Error> {
    let recs: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.refinement.to_string(),
                r.h.to_string(),
                r.n_dofs.to_string(),
                r.iterations.to_string(),
                opt(r.l2_error),
                opt(r.rate),
            ]
        })
        .collect();
    csv_string(&HEADER, &recs)
}

/// Log-log plot of error against `h` with a slope `k+1` guide per degree.
pub fn to_svg(rows: &[Row]) -> String {
    let mut degrees: Vec<usize> = rows.iter().map(|r| r.k).collect();
    degrees.dedup();
    let mut series = Vec::new();
    let mut slopes = Vec::new();
    for k in degrees {
        let points: Vec<Point> = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.k == k)
            .map(|(i, r)| Point { row: i, x: r.h, y: r.l2_error })
            .collect();
        if let Some((x0, y0)) = points.iter().find_map(|p| p.y.map(|y| (p.x, y))) {
            slopes.push(Slope { label: format!("h^{}", k + 1), slope: (k + 1) as f64, x0, y0 });
        }
        series.push(Series { label: format!("k = {k}"), points });
    }
    svg::loglog("L2 error", "h", "error", &series, &slopes)
}

pub fn write(cfg: &RunConfig, rows: &[Row]) -> Result<Outcome, Error> {
    let mut out = Outcome { not_converged: rows.iter().filter(|r| !r.converged()).count(), ..Outcome::default() };
    for r in rows.iter().filter(|r| !r.converged()) {
        eprintln!("warning: k={} refinement={} stopped after {} iterations", r.k, r.refinement, r.iterations);
    }
    let stem = format!("convergence_{}d", cfg.dim);
    write_file(&cfg.output, &format!("{stem}.csv"), &to_csv(rows)?, &mut out)?;
    write_file(&cfg.output, &format!("{stem}.svg"), &to_svg(rows), &mut out)?;
    Ok(out)
}
