//! Single-cell kernel timings: sum-factorized cell Laplacian, point-wise
//! evaluation at `(k+1)^d` points, and the ghost-penalty face kernel.

use std::hint::black_box;

use cutfem::cutquad::CutCellQuadrature;
use cutfem::gauss::tensor_gauss;
use cutfem::operator::{cut_cell_kernel, ghost_face_kernel, CutCellData, PointScratch, PointTable};
use cutfem::sumfac::{CellLaplacian, Scratch};
use cutfem::tensor1d::{ghost_matrix_1d, mass_matrix_1d, ReferenceElement1D};

use crate::config::RunConfig;
use crate::timing::median_batch_seconds;
use crate::{csv_string, write_file, Error, Outcome};

pub const HEADER: [&str; 5] = ["dim", "k", "kernel", "microseconds", "relative"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    SumFactorized,
    PointEvaluation,
    GhostFace,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::SumFactorized, Kernel::PointEvaluation, Kernel::GhostFace];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::SumFactorized => "sum_factorized",
            Kernel::PointEvaluation => "point_evaluation",
            Kernel::GhostFace => "ghost_face",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub dim: usize,
    pub k: usize,
    pub kernel: Kernel,
    pub microseconds: f64,
    /// Time over the sum-factorized kernel at the lowest listed degree.
    pub relative: f64,
}

fn input(n: usize) -> Vec<f64> {
    (0..n).map(|i| (0.7 * i as f64).cos()).collect()
}

/// Seconds per application of `kernel` on a cell of size 0.1.
pub fn time_kernel(dim: usize, k: usize, kernel: Kernel, reps: usize, batches: usize) -> Result<f64, Error> {
    let h = 0.1;
    let spacing = vec![h; dim];
    let elem = ReferenceElement1D::<f64>::new(k, k + 1)?;
    let n_local = (k + 1).pow(dim as u32);
    let secs = match kernel {
        Kernel::SumFactorized => {
            let lap = CellLaplacian::new(&elem, &spacing)?;
            let u = input(n_local);
            let mut out = vec![0.0; n_local];
            let mut scratch = Scratch::default();
            median_batch_seconds(reps, batches, || {
                lap.apply(black_box(&u), &mut out, &mut scratch);
                black_box(&out);
            })
        }
        Kernel::PointEvaluation => {
            let lo = vec![0.0; dim];
            let (points, weights) = tensor_gauss(&lo, &spacing, k + 1);
            let interior = PointTable::new(elem.basis(), &points, &lo, &spacing);
            let quadrature = CutCellQuadrature {
                dim,
                interior_points: points,
                interior_weights: weights,
                ..CutCellQuadrature::default()
            };
            let data = CutCellData { cell: 0, quadrature, interior, surface: PointTable::default() };
            let u = input(n_local);
            let mut out = vec![0.0; n_local];
            let mut scratch = PointScratch::default();
            median_batch_seconds(reps, batches, || {
                cut_cell_kernel(&data, true, None, black_box(&u), &mut out, &mut scratch);
                black_box(&out);
            })
        }
        Kernel::GhostFace => {
            let mass = mass_matrix_1d(&elem).scaled(h);
            let ghost = ghost_matrix_1d(&elem, h)?;
            let mats: Vec<_> = (0..dim).map(|a| if a == 0 { &ghost } else { &mass }).collect();
            let shape: Vec<usize> = (0..dim).map(|a| if a == 0 { 2 * k + 1 } else { k + 1 }).collect();
            let u = input(shape.iter().product());
            let mut extents = shape.clone();
            let mut data = Vec::with_capacity(u.len());
            let mut tmp = Vec::new();
            median_batch_seconds(reps, batches, || {
                data.clear();
                data.extend_from_slice(black_box(&u));
                extents.copy_from_slice(&shape);
                ghost_face_kernel(&mats, 0.5, &mut extents, &mut data, &mut tmp);
                black_box(&data);
            })
        }
    };
    Ok(secs)
}

pub fn run(cfg: &RunConfig) -> Result<Vec<Row>, Error> {
    let mut rows = Vec::new();
    let mut degrees = cfg.degrees.clone();
    degrees.sort_unstable();
    degrees.dedup();
    let mut base = None;
    for &k in &degrees {
        for kernel in Kernel::ALL {
            let s = time_kernel(cfg.dim, k, kernel, cfg.repetitions, cfg.batches)?;
            let b = *base.get_or_insert(s);
            rows.push(Row { dim: cfg.dim, k, kernel, microseconds: s * 1e6, relative: s / b });
        }
    }
    Ok(rows)
}

/// `t(kernel, k) / t(sum_factorized, k)` for each listed degree.
pub fn ratio(rows: &[Row], kernel: Kernel) -> Vec<(usize, f64)> {
    rows.iter()
        .filter(|r| r.kernel == kernel)
        .filter_map(|r| {
            let a = rows.iter().find(|s| s.k == r.k && s.kernel == Kernel::SumFactorized)?;
            Some((r.k, r.microseconds / a.microseconds))
        })
        .collect()
}

pub fn to_csv(rows: &[Row]) -> Result<String, Error> {
    let recs: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.dim.to_string(),
                r.k.to_string(),
                r.kernel.name().to_string(),
                r.microseconds.to_string(),
                r.relative.to_string(),
            ]
        })
        .collect();
    csv_string(&HEADER, &recs)
}

pub fn write(cfg: &RunConfig, rows: &[Row]) -> Result<Outcome, Error> {
    let mut out = Outcome::default();
    write_file(&cfg.output, &format!("kernelbench_{}d.csv", cfg.dim), &to_csv(rows)?, &mut out)?;
    Ok(out)
}
