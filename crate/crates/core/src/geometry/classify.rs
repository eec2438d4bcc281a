use crate::scalar::Real;

use super::{CartesianMesh, LevelSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellLabel {
    Inside,
    Outside,
    Cut,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellClassification {
    labels: Vec<CellLabel>,
}

impl CellClassification {
    pub fn from_labels(labels: Vec<CellLabel>) -> Self {
        Self { labels }
    }

    #[inline]
    pub fn label(&self, cell: usize) -> CellLabel {
        self.labels[cell]
    }

    pub fn labels(&self) -> &[CellLabel] {
        &self.labels
    }

    pub fn count(&self, label: CellLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Cut cells as a fraction of all cells that intersect the domain.
    pub fn cut_fraction(&self) -> f64 {
        let cut = self.count(CellLabel::Cut);
        let active = cut + self.count(CellLabel::Inside);
        if active == 0 {
            0.0
        } else {
            cut as f64 / active as f64
        }
    }
}

/// Labels every cell by the sign of `phi` on a tensor grid of
/// `samples_per_axis` points per axis that includes the cell corners.
///
/// All samples `>= 0` gives `Inside`, all `< 0` gives `Outside`, anything
/// else `Cut`. A zero sample counts as inside.
pub fn classify_cells<T: Real>(
    mesh: &CartesianMesh<T>,
    phi: &dyn LevelSet<T>,
    samples_per_axis: usize,
) -> CellClassification {
    let s = samples_per_axis.max(2);
    let dim = mesh.dim();
    let n_samples = s.pow(dim as u32);
    let mut idx = vec![0; dim];
    let mut x = vec![T::zero(); dim];
    let denom = T::from_usize_lossy(s - 1);
    let labels = (0..mesh.n_cells())
        .map(|cell| {
            let (lo, hi) = mesh.cell_box(cell);
            let (mut pos, mut neg) = (false, false);
            for flat in 0..n_samples {
                crate::sumfac::unflatten(flat, &vec![s; dim], &mut idx);
                for a in 0..dim {
                    x[a] = lo[a] + (hi[a] - lo[a]) * T::from_usize_lossy(idx[a]) / denom;
                }
                if phi.value(&x) >= T::zero() {
                    pos = true;
                } else {
                    neg = true;
                }
                if pos && neg {
                    return CellLabel::Cut;
                }
            }
            if pos {
                CellLabel::Inside
            } else {
                CellLabel::Outside
            }
        })
        .collect();
    CellClassification { labels }
}

/// Interior face between `lower` and its upper neighbor along `axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GhostFace {
    pub axis: usize,
    pub lower: usize,
    pub upper: usize,
}

/// Faces that carry ghost-penalty stabilization: both neighbors intersect
/// the domain and at least one of them is cut. Sorted by axis, then by the
/// lower cell index.
pub fn ghost_faces<T: Real>(mesh: &CartesianMesh<T>, class: &CellClassification) -> Vec<GhostFace> {
    let mut faces = Vec::new();
    for axis in 0..mesh.dim() {
        for lower in 0..mesh.n_cells() {
            let Some(upper) = mesh.upper_neighbor(lower, axis) else { continue };
            let (a, b) = (class.label(lower), class.label(upper));
            if a == CellLabel::Outside || b == CellLabel::Outside {
                continue;
            }
            if a == CellLabel::Cut || b == CellLabel::Cut {
                faces.push(GhostFace { axis, lower, upper });
            }
        }
    }
    faces
}

/// Load-balancing weight of a cell: 0 outside, 1 inside, `k^(d-1)` cut.
pub fn cell_weight(label: CellLabel, degree: usize, dim: usize) -> usize {
    match label {
        CellLabel::Outside => 0,
        CellLabel::Inside => 1,
        CellLabel::Cut => degree.pow(dim as u32 - 1),
    }
}
