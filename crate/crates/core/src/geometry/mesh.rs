use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform axis-aligned grid of `cells[a]` cells of width `spacing[a]`
/// along each axis, starting at `origin`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartesianMesh<T> {
    origin: Vec<T>,
    cells: Vec<usize>,
    spacing: Vec<T>,
}

impl<T: Real> CartesianMesh<T> {
    pub fn new(origin: Vec<T>, cells: Vec<usize>, spacing: Vec<T>) -> Result<Self> {
        let dim = origin.len();
        if !(dim == 2 || dim == 3) {
            return Err(Error::Dimension(dim));
        }
        if cells.len() != dim || spacing.len() != dim {
            return Err(Error::ExtentMismatch { expected: dim, found: cells.len().min(spacing.len()) });
        }
        if let Some(&c) = cells.iter().find(|&&c| c == 0) {
            return Err(Error::ExtentMismatch { expected: 1, found: c });
        }
        if let Some(&h) = spacing.iter().find(|h| !(**h > T::zero())) {
            return Err(Error::NonPositiveSpacing(h.as_f64()));
        }
        Ok(Self { origin, cells, spacing })
    }

    /// Cube `[lo, hi]^dim` split into `n` cells per axis.
    pub fn cube(dim: usize, lo: T, hi: T, n: usize) -> Result<Self> {
        let h = (hi - lo) / T::from_usize_lossy(n.max(1));
        Self::new(vec![lo; dim], vec![n; dim], vec![h; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[T] {
        &self.origin
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing
    }

    /// Largest cell width.
    pub fn h(&self) -> T {
        self.spacing.iter().fold(T::zero(), |m, &h| m.max(h))
    }

    pub fn diameter(&self) -> T {
        self.spacing.iter().map(|&h| h * h).sum::<T>().sqrt()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.iter().product()
    }

    #[inline]
    pub fn cell_multi_index(&self, cell: usize, idx: &mut [usize]) {
        crate::sumfac::unflatten(cell, &self.cells, idx);
    }

    #[inline]
    pub fn cell_index(&self, idx: &[usize]) -> usize {
        crate::sumfac::flatten(idx, &self.cells)
    }

    /// Lower and upper corners of a cell.
    pub fn cell_box(&self, cell: usize) -> (Vec<T>, Vec<T>) {
        let mut idx = vec![0; self.dim()];
        self.cell_multi_index(cell, &mut idx);
        let lo: Vec<T> = (0..self.dim())
            .map(|a| self.origin[a] + T::from_usize_lossy(idx[a]) * self.spacing[a])
            .collect();
        let hi = lo.iter().zip(&self.spacing).map(|(&l, &h)| l + h).collect();
        (lo, hi)
    }

    /// Neighbor of `cell` across its upper face normal to `axis`.
    pub fn upper_neighbor(&self, cell: usize, axis: usize) -> Option<usize> {
        let mut idx = vec![0; self.dim()];
        self.cell_multi_index(cell, &mut idx);
        if idx[axis] + 1 >= self.cells[axis] {
            return None;
        }
        idx[axis] += 1;
        Some(self.cell_index(&idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_of_cells() {
        let m = CartesianMesh::new(vec![-1.0, 0.0], vec![4, 2], vec![0.5, 1.0]).unwrap();
        assert_eq!(m.n_cells(), 8);
        let (lo, hi) = m.cell_box(5);
        assert_eq!(lo, vec![-0.5, 1.0]);
        assert_eq!(hi, vec![0.0, 2.0]);
        assert_eq!(m.upper_neighbor(5, 0), Some(6));
        assert_eq!(m.upper_neighbor(5, 1), None);
        assert_eq!(m.upper_neighbor(3, 0), None);
    }

    #[test]
    fn rejects_invalid_meshes() {
        assert!(CartesianMesh::new(vec![0.0], vec![1], vec![1.0]).is_err());
        assert!(CartesianMesh::new(vec![0.0, 0.0], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CartesianMesh::new(vec![0.0, 0.0], vec![1, 1], vec![1.0, 0.0]).is_err());
    }
}
