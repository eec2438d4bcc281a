use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sumfac::{flatten, unflatten, TensorField};
use crate::tensor1d::patch_len;

use super::{CartesianMesh, CellClassification, CellLabel, GhostFace};

const INACTIVE: usize = usize::MAX;

/// Global continuous Lagrange numbering on the background grid.
///
/// Global DoFs form a lexicographic grid with `k·n_a + 1` points per axis.
/// Only DoFs touching at least one non-outside cell are active; they are
/// numbered contiguously in increasing global order.
#[derive(Clone, Debug)]
pub struct DofMap {
    degree: usize,
    cells: Vec<usize>,
    extents: Vec<usize>,
    cell_active: Vec<bool>,
    global_to_active: Vec<usize>,
    active_to_global: Vec<usize>,
}

impl DofMap {
    pub fn new<T: Real>(mesh: &CartesianMesh<T>, degree: usize, class: &CellClassification) -> Self {
        let dim = mesh.dim();
        let cells = mesh.cells_per_axis().to_vec();
        let extents: Vec<usize> = cells.iter().map(|&n| degree * n + 1).collect();
        let n_global: usize = extents.iter().product();
        let mut active = vec![false; n_global];
        let cell_active: Vec<bool> = class.labels().iter().map(|&l| l != CellLabel::Outside).collect();
        let mut cidx = vec![0; dim];
        let mut lidx = vec![0; dim];
        let mut gidx = vec![0; dim];
        let local_ext = vec![degree + 1; dim];
        let n_local = (degree + 1).pow(dim as u32);
        for (cell, _) in cell_active.iter().enumerate().filter(|(_, &a)| a) {
            unflatten(cell, &cells, &mut cidx);
            for l in 0..n_local {
                unflatten(l, &local_ext, &mut lidx);
                for a in 0..dim {
                    gidx[a] = degree * cidx[a] + lidx[a];
                }
                active[flatten(&gidx, &extents)] = true;
            }
        }
        let mut global_to_active = vec![INACTIVE; n_global];
        let mut active_to_global = Vec::new();
        for (g, _) in active.iter().enumerate().filter(|(_, &a)| a) {
            global_to_active[g] = active_to_global.len();
            active_to_global.push(g);
        }
        Self { degree, cells, extents, cell_active, global_to_active, active_to_global }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    /// Extents of the global DoF grid.
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn n_active(&self) -> usize {
        self.active_to_global.len()
    }

    pub fn is_active(&self, global: usize) -> bool {
        self.global_to_active[global] != INACTIVE
    }

    pub fn active_index(&self, global: usize) -> Option<usize> {
        let a = self.global_to_active[global];
        (a != INACTIVE).then_some(a)
    }

    pub fn global_index(&self, active: usize) -> usize {
        self.active_to_global[active]
    }

    pub fn global_multi_index(&self, global: usize, idx: &mut [usize]) {
        unflatten(global, &self.extents, idx);
    }

    /// Active indices of a cell's DoFs in cell-local lexicographic order.
    pub fn cell_dofs(&self, cell: usize) -> Result<Vec<usize>> {
        if !self.cell_active[cell] {
            return Err(Error::CellOutsideDomain(cell));
        }
        let ext = vec![self.degree + 1; self.dim()];
        Ok(self.block_dofs(cell, &ext))
    }

    /// Active indices of the two-cell patch of a face: `2k + 1` entries along
    /// the normal axis (lower cell first, shared layer once) and `k + 1`
    /// along the others.
    pub fn face_dofs(&self, face: &GhostFace) -> Result<Vec<usize>> {
        if !self.cell_active[face.lower] || !self.cell_active[face.upper] {
            return Err(Error::FaceOutsideDomain { cell: face.lower, axis: face.axis });
        }
        Ok(self.block_dofs(face.lower, &self.face_extents(face.axis)))
    }

    pub fn face_extents(&self, axis: usize) -> Vec<usize> {
        let mut ext = vec![self.degree + 1; self.dim()];
        ext[axis] = patch_len(self.degree);
        ext
    }

    fn block_dofs(&self, lower_cell: usize, ext: &[usize]) -> Vec<usize> {
        let dim = self.dim();
        let mut cidx = vec![0; dim];
        unflatten(lower_cell, &self.cells, &mut cidx);
        let mut lidx = vec![0; dim];
        let mut gidx = vec![0; dim];
        let n: usize = ext.iter().product();
        (0..n)
            .map(|l| {
                unflatten(l, ext, &mut lidx);
                for a in 0..dim {
                    gidx[a] = self.degree * cidx[a] + lidx[a];
                }
                let a = self.global_to_active[flatten(&gidx, &self.extents)];
                debug_assert_ne!(a, INACTIVE);
                a
            })
            .collect()
    }

    /// Copies the face patch of `u` (active-DoF vector) into a tensor field.
    pub fn gather_face_patch<T: Real>(&self, u: &[T], face: &GhostFace) -> Result<TensorField<T>> {
        let dofs = self.face_dofs(face)?;
        TensorField::new(self.face_extents(face.axis), dofs.iter().map(|&i| u[i]).collect())
    }

    /// Adds patch values back into `w`.
    pub fn scatter_add_face_patch<T: Real>(&self, patch: &TensorField<T>, face: &GhostFace, w: &mut [T]) -> Result<()> {
        let dofs = self.face_dofs(face)?;
        if patch.data().len() != dofs.len() {
            return Err(Error::ExtentMismatch { expected: dofs.len(), found: patch.data().len() });
        }
        for (&i, &v) in dofs.iter().zip(patch.data()) {
            w[i] += v;
        }
        Ok(())
    }
}
