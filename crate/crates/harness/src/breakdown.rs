//! Share of vmult time spent in each operator component.

use cutfem::operator::Breakdown;

use crate::config::RunConfig;
use crate::problems::{context, level_set};
use crate::svg::{self, Bar, Segment};
use crate::timing::time_vmult;
use crate::{write_file, Error, Outcome};

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub k: usize,
    pub n_dofs: usize,
    pub breakdown: Breakdown,
}

/// Times `repetitions × batches` vmults for each degree on `cells` cells per axis.
pub fn run(cfg: &RunConfig) -> Result<Vec<Row>, Error> {
    let phi = level_set(cfg, cfg.balls[0]);
    cfg.degrees
        .iter()
        .map(|&k| {
            let ctx = context(cfg, k, cfg.cells, phi.clone())?;
            let (_, breakdown) = time_vmult(&ctx, cfg.repetitions, cfg.batches)?;
            Ok(Row { k, n_dofs: ctx.n_active(), breakdown })
        })
        .collect()
}

/// Index of the largest component in [`Breakdown::COMPONENTS`].
pub fn dominant(b: &Breakdown) -> usize {
    let s = b.seconds();
    (0..s.len()).fold(0, |best, i| if s[i] > s[best] { i } else { best })
}

/// One bar with a segment per CSV row.
pub fn to_svg(row: &Row) -> String {
    let segments = Breakdown::COMPONENTS
        .iter()
        .zip(row.breakdown.percentages())
        .enumerate()
        .map(|(i, (name, p))| Segment { row: i, label: name.to_string(), value: p })
        .collect();
    let bar = Bar { label: format!("k = {}", row.k), segments };
    svg::stacked_bars("vmult time breakdown", "percent", &[bar])
}

pub fn write(cfg: &RunConfig, rows: &[Row]) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    for r in rows {
        write_file(&cfg.output, &format!("breakdown_k{}.csv", r.k), &r.breakdown.to_csv(), &mut out)?;
        write_file(&cfg.output, &format!("breakdown_k{}.svg", r.k), &to_svg(r), &mut out)?;
    }
    Ok(out)
}
