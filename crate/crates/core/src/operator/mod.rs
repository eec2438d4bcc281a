//! Matrix-free CutFEM operator `w = A u`.
//!
//! Inside cells use the sum-factorized Laplacian, cut cells use point-wise
//! basis evaluation on cached implicit-domain quadrature together with the
//! symmetric Nitsche terms, and the ghost penalty is applied face by face
//! as a Kronecker product of 1D matrices, after the cell loop.

mod kernels;

use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;

use crate::cutquad::{cut_cell_quadrature, CutCellQuadrature, QuadratureDiagnostics, QuadratureOptions};
use crate::error::{Error, Result};
use crate::gauss::tensor_gauss;
use crate::geometry::{classify_cells, ghost_faces, CartesianMesh, CellClassification, CellLabel, DofMap, GhostFace, LevelSet};
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::sumfac::{kron_apply, CellLaplacian, Scratch, TensorField};
use crate::tensor1d::{ghost_matrix_1d, mass_matrix_1d, Mass1D, ReferenceElement1D};

pub use kernels::{cut_cell_kernel, ghost_face_kernel, CutCellData, PointScratch, PointTable};

#[derive(Clone, Debug, PartialEq)]
pub struct Parameters<T> {
    pub degree: usize,
    /// Ghost-penalty strength.
    pub gamma_a: T,
    /// Nitsche penalty base; the boundary term uses `gamma_d / h`.
    pub gamma_d: T,
    /// 1D Gauss points on inside cells.
    pub cell_order: usize,
    /// Gauss order of the cut-cell rules used by the operator.
    pub cut_order: usize,
    /// Gauss order for error integration.
    pub error_order: usize,
    /// Classification samples per axis (corners included).
    pub classify_samples: usize,
    pub max_depth: usize,
    /// 1 runs the reference single-threaded loops.
    pub workers: usize,
}

impl<T: Real> Parameters<T> {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            gamma_a: T::lit(0.5),
            gamma_d: T::from_usize_lossy(30 * degree * (degree + 1)),
            cell_order: degree + 1,
            cut_order: degree + 1,
            error_order: degree + 2,
            classify_samples: degree + 2,
            max_depth: 8,
            workers: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::ZeroDegree);
        }
        if self.cell_order < self.degree + 1 {
            return Err(Error::QuadratureTooLow { degree: self.degree, points: self.cell_order });
        }
        if self.cut_order < self.degree + 1 {
            return Err(Error::QuadratureTooLow { degree: self.degree, points: self.cut_order });
        }
        if self.error_order < self.degree + 2 {
            return Err(Error::QuadratureTooLow { degree: self.degree, points: self.error_order });
        }
        Ok(())
    }
}

/// Which contributions [`OperatorContext::vmult_parts`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parts {
    pub interior: bool,
    pub cut_volume: bool,
    pub nitsche: bool,
    pub ghost: bool,
}

impl Parts {
    pub const ALL: Self = Self { interior: true, cut_volume: true, nitsche: true, ghost: true };
    pub const GHOST: Self = Self { interior: false, cut_volume: false, nitsche: false, ghost: true };
    pub const NONE: Self = Self { interior: false, cut_volume: false, nitsche: false, ghost: false };
}

/// Accumulated wall time of the vmult components, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Breakdown {
    pub interior: f64,
    pub intersected: f64,
    pub ghost_penalty: f64,
    pub scatter_other: f64,
    pub total: f64,
    pub applications: usize,
}

impl Breakdown {
    pub const COMPONENTS: [&'static str; 4] = ["interior", "intersected", "ghost_penalty", "scatter_other"];

    pub fn seconds(&self) -> [f64; 4] {
        [self.interior, self.intersected, self.ghost_penalty, self.scatter_other]
    }

    pub fn percentages(&self) -> [f64; 4] {
        let s = self.seconds();
        let total = if self.total > 0.0 { self.total } else { 1.0 };
        s.map(|x| 100.0 * x / total)
    }

    /// `component,seconds,percent` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("component,seconds,percent\n");
        for ((name, s), p) in Self::COMPONENTS.iter().zip(self.seconds()).zip(self.percentages()) {
            out.push_str(&format!("{name},{s},{p}\n"));
        }
        out
    }

    fn add(&mut self, o: &Breakdown) {
        self.interior += o.interior;
        self.intersected += o.intersected;
        self.ghost_penalty += o.ghost_penalty;
        self.scatter_other += o.scatter_other;
        self.total += o.total;
        self.applications += o.applications;
    }
}

/// Everything needed to apply the operator, built once per mesh and domain.
pub struct OperatorContext<T: Real> {
    mesh: CartesianMesh<T>,
    phi: Arc<dyn LevelSet<T>>,
    params: Parameters<T>,
    classification: CellClassification,
    faces: Vec<GhostFace>,
    dofmap: DofMap,
    elem: ReferenceElement1D<T>,
    mass: Mass1D<T>,
    /// `h_a M¹` per axis.
    scaled_mass: Vec<Mat<T>>,
    /// `G¹(h_a)` per axis.
    ghost_1d: Vec<Mat<T>>,
    laplacian: CellLaplacian<T>,
    inside_cells: Vec<usize>,
    inside_dofs: Vec<usize>,
    cut_data: Vec<CutCellData<T>>,
    cut_dofs: Vec<usize>,
    face_dofs: Vec<usize>,
    quad_diagnostics: QuadratureDiagnostics,
    nitsche_penalty: T,
    pool: Option<rayon::ThreadPool>,
    breakdown: Mutex<Breakdown>,
}

impl<T: Real> OperatorContext<T> {
    pub fn new(mesh: CartesianMesh<T>, phi: Arc<dyn LevelSet<T>>, params: Parameters<T>) -> Result<Self> {
        params.validate()?;
        if phi.dim() != mesh.dim() {
            return Err(Error::Dimension(phi.dim()));
        }
        let classification = classify_cells(&mesh, phi.as_ref(), params.classify_samples.max(params.degree + 2));
        Self::with_classification(mesh, phi, params, classification)
    }

    /// Builds the context for a given classification (must be consistent with `phi`).
    pub fn with_classification(
        mesh: CartesianMesh<T>,
        phi: Arc<dyn LevelSet<T>>,
        params: Parameters<T>,
        classification: CellClassification,
    ) -> Result<Self> {
        params.validate()?;
        let k = params.degree;
        let dim = mesh.dim();
        let elem = ReferenceElement1D::new(k, params.cell_order)?;
        let mass = mass_matrix_1d(&elem);
        let spacing = mesh.spacing().to_vec();
        let scaled_mass = spacing.iter().map(|&h| mass.scaled(h)).collect();
        let ghost_1d = spacing.iter().map(|&h| ghost_matrix_1d(&elem, h)).collect::<Result<Vec<_>>>()?;
        let laplacian = CellLaplacian::new(&elem, &spacing)?;
        let faces = ghost_faces(&mesh, &classification);
        let dofmap = DofMap::new(&mesh, k, &classification);

        let inside_cells: Vec<usize> =
            (0..mesh.n_cells()).filter(|&c| classification.label(c) == CellLabel::Inside).collect();
        let cut_cells: Vec<usize> = (0..mesh.n_cells()).filter(|&c| classification.label(c) == CellLabel::Cut).collect();
        let mut inside_dofs = Vec::with_capacity(inside_cells.len() * (k + 1).pow(dim as u32));
        for &c in &inside_cells {
            inside_dofs.extend(dofmap.cell_dofs(c)?);
        }
        let mut cut_dofs = Vec::with_capacity(cut_cells.len() * (k + 1).pow(dim as u32));
        for &c in &cut_cells {
            cut_dofs.extend(dofmap.cell_dofs(c)?);
        }
        let mut face_dofs = Vec::new();
        for f in &faces {
            face_dofs.extend(dofmap.face_dofs(f)?);
        }

        let pool = if params.workers > 1 {
            Some(rayon::ThreadPoolBuilder::new().num_threads(params.workers).build().expect("thread pool"))
        } else {
            None
        };
        let opts = QuadratureOptions {
            order: params.cut_order,
            max_depth: params.max_depth,
            samples_per_axis: (params.cut_order + 1).max(params.degree + 2),
        };
        let build = |&c: &usize| -> Result<(CutCellData<T>, QuadratureDiagnostics)> {
            let (lo, hi) = mesh.cell_box(c);
            let (q, d) = cut_cell_quadrature(&lo, &hi, phi.as_ref(), opts, c)?;
            let interior = PointTable::new(elem.basis(), &q.interior_points, &lo, &spacing);
            let surface = PointTable::new(elem.basis(), &q.surface_points, &lo, &spacing);
            Ok((CutCellData { cell: c, quadrature: q, interior, surface }, d))
        };
        let built: Vec<Result<_>> = match &pool {
            Some(p) => p.install(|| cut_cells.par_iter().map(build).collect()),
            None => cut_cells.iter().map(build).collect(),
        };
        let mut cut_data = Vec::with_capacity(built.len());
        let mut quad_diagnostics = QuadratureDiagnostics::default();
        for r in built {
            let (data, d) = r?;
            quad_diagnostics += d;
            cut_data.push(data);
        }
        let nitsche_penalty = params.gamma_d / mesh.h();
        Ok(Self {
            mesh,
            phi,
            params,
            classification,
            faces,
            dofmap,
            elem,
            mass,
            scaled_mass,
            ghost_1d,
            laplacian,
            inside_cells,
            inside_dofs,
            cut_data,
            cut_dofs,
            face_dofs,
            quad_diagnostics,
            nitsche_penalty,
            pool,
            breakdown: Mutex::new(Breakdown::default()),
        })
    }

    pub fn mesh(&self) -> &CartesianMesh<T> {
        &self.mesh
    }

    pub fn level_set(&self) -> &dyn LevelSet<T> {
        self.phi.as_ref()
    }

    pub fn params(&self) -> &Parameters<T> {
        &self.params
    }

    pub fn classification(&self) -> &CellClassification {
        &self.classification
    }

    pub fn ghost_faces(&self) -> &[GhostFace] {
        &self.faces
    }

    pub fn dofmap(&self) -> &DofMap {
        &self.dofmap
    }

    pub fn element(&self) -> &ReferenceElement1D<T> {
        &self.elem
    }

    pub fn mass(&self) -> &Mass1D<T> {
        &self.mass
    }

    /// `h_a M¹` for axis `a`.
    pub fn scaled_mass(&self, axis: usize) -> &Mat<T> {
        &self.scaled_mass[axis]
    }

    /// `G¹(h_a)` for faces normal to axis `a`.
    pub fn ghost_matrix(&self, axis: usize) -> &Mat<T> {
        &self.ghost_1d[axis]
    }

    pub fn n_active(&self) -> usize {
        self.dofmap.n_active()
    }

    pub fn n_local(&self) -> usize {
        (self.params.degree + 1).pow(self.mesh.dim() as u32)
    }

    pub fn inside_cells(&self) -> &[usize] {
        &self.inside_cells
    }

    pub fn cut_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.cut_data.iter().map(|d| d.cell)
    }

    pub fn cut_cell_data(&self, cell: usize) -> Result<&CutCellData<T>> {
        self.cut_data
            .binary_search_by_key(&cell, |d| d.cell)
            .map(|i| &self.cut_data[i])
            .map_err(|_| Error::MissingQuadrature(cell))
    }

    pub fn cut_quadrature(&self, cell: usize) -> Result<&CutCellQuadrature<T>> {
        self.cut_cell_data(cell).map(|d| &d.quadrature)
    }

    pub fn quadrature_diagnostics(&self) -> QuadratureDiagnostics {
        self.quad_diagnostics
    }

    /// Nitsche penalty actually used, `γ_D / h`.
    pub fn nitsche_penalty(&self) -> T {
        self.nitsche_penalty
    }

    pub fn cut_fraction(&self) -> f64 {
        self.classification.cut_fraction()
    }

    /// `w = A u` over active DoFs.
    pub fn vmult(&self, u: &[T], w: &mut [T]) -> Result<()> {
        self.vmult_parts(u, w, Parts::ALL)
    }

    /// Applies the selected contributions only.
    pub fn vmult_parts(&self, u: &[T], w: &mut [T], parts: Parts) -> Result<()> {
        let n = self.n_active();
        if u.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: u.len() });
        }
        if w.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: w.len() });
        }
        let start = Instant::now();
        w.iter_mut().for_each(|x| *x = T::zero());
        let mut bd = Breakdown { applications: 1, ..Default::default() };
        match &self.pool {
            None => self.vmult_serial(u, w, parts, &mut bd),
            Some(pool) => self.vmult_parallel(pool, u, w, parts, &mut bd),
        }
        bd.total = start.elapsed().as_secs_f64();
        bd.scatter_other = (bd.total - bd.interior - bd.intersected - bd.ghost_penalty).max(0.0);
        bd.total = bd.interior + bd.intersected + bd.ghost_penalty + bd.scatter_other;
        self.breakdown.lock().unwrap().add(&bd);
        Ok(())
    }

    pub fn breakdown(&self) -> Breakdown {
        *self.breakdown.lock().unwrap()
    }

    pub fn reset_breakdown(&self) {
        *self.breakdown.lock().unwrap() = Breakdown::default();
    }

    fn face_mats(&self, axis: usize) -> Vec<&Mat<T>> {
        (0..self.mesh.dim()).map(|b| if b == axis { &self.ghost_1d[b] } else { &self.scaled_mass[b] }).collect()
    }

    fn patch_len(&self) -> usize {
        let k = self.params.degree;
        (2 * k + 1) * (k + 1).pow(self.mesh.dim() as u32 - 1)
    }

    fn nitsche(&self, parts: Parts) -> Option<T> {
        parts.nitsche.then_some(self.nitsche_penalty)
    }

    fn vmult_serial(&self, u: &[T], w: &mut [T], parts: Parts, bd: &mut Breakdown) {
        let nl = self.n_local();
        let mut ul = vec![T::zero(); nl];
        let mut wl = vec![T::zero(); nl];
        if parts.interior && !self.inside_dofs.is_empty() {
            let t = Instant::now();
            let mut scratch = Scratch::default();
            for dofs in self.inside_dofs.chunks_exact(nl) {
                gather(u, dofs, &mut ul);
                self.laplacian.apply(&ul, &mut wl, &mut scratch);
                scatter(&wl, dofs, w);
            }
            bd.interior = t.elapsed().as_secs_f64();
        }
        if (parts.cut_volume || parts.nitsche) && !self.cut_data.is_empty() {
            let t = Instant::now();
            let mut scratch = PointScratch::default();
            for (data, dofs) in self.cut_data.iter().zip(self.cut_dofs.chunks_exact(nl)) {
                gather(u, dofs, &mut ul);
                cut_cell_kernel(data, parts.cut_volume, self.nitsche(parts), &ul, &mut wl, &mut scratch);
                scatter(&wl, dofs, w);
            }
            bd.intersected = t.elapsed().as_secs_f64();
        }
        if parts.ghost && self.params.gamma_a != T::zero() && !self.faces.is_empty() {
            let t = Instant::now();
            let np = self.patch_len();
            let mats: Vec<Vec<&Mat<T>>> = (0..self.mesh.dim()).map(|a| self.face_mats(a)).collect();
            let mut data = vec![T::zero(); np];
            let mut tmp = vec![T::zero(); np];
            for (face, dofs) in self.faces.iter().zip(self.face_dofs.chunks_exact(np)) {
                data.resize(np, T::zero());
                gather(u, dofs, &mut data[..np]);
                let mut ext = self.dofmap.face_extents(face.axis);
                ghost_face_kernel(&mats[face.axis], self.params.gamma_a, &mut ext, &mut data, &mut tmp);
                scatter(&data[..np], dofs, w);
            }
            bd.ghost_penalty = t.elapsed().as_secs_f64();
        }
    }

    fn vmult_parallel(&self, pool: &rayon::ThreadPool, u: &[T], w: &mut [T], parts: Parts, bd: &mut Breakdown) {
        // Local results are computed concurrently into per-item slots and
        // scattered afterwards in the serial order, so the sum is bitwise
        // identical to the single-threaded path.
        let nl = self.n_local();
        let chunk = 64;
        let mut scatter_time = 0.0;
        if parts.interior && !self.inside_dofs.is_empty() {
            let t = Instant::now();
            let mut out = vec![T::zero(); self.inside_dofs.len()];
            pool.install(|| {
                out.par_chunks_mut(nl * chunk).zip(self.inside_dofs.par_chunks(nl * chunk)).for_each(|(o, d)| {
                    let mut scratch = Scratch::default();
                    let mut ul = vec![T::zero(); nl];
                    for (oc, dc) in o.chunks_exact_mut(nl).zip(d.chunks_exact(nl)) {
                        gather(u, dc, &mut ul);
                        self.laplacian.apply(&ul, oc, &mut scratch);
                    }
                })
            });
            bd.interior = t.elapsed().as_secs_f64();
            let t = Instant::now();
            for (oc, dc) in out.chunks_exact(nl).zip(self.inside_dofs.chunks_exact(nl)) {
                scatter(oc, dc, w);
            }
            scatter_time += t.elapsed().as_secs_f64();
        }
        if (parts.cut_volume || parts.nitsche) && !self.cut_data.is_empty() {
            let t = Instant::now();
            let mut out = vec![T::zero(); self.cut_dofs.len()];
            let nitsche = self.nitsche(parts);
            pool.install(|| {
                out.par_chunks_mut(nl).zip(self.cut_data.par_iter()).zip(self.cut_dofs.par_chunks(nl)).for_each_init(
                    || (PointScratch::default(), vec![T::zero(); nl]),
                    |(scratch, ul), ((oc, data), dc)| {
                        gather(u, dc, ul);
                        cut_cell_kernel(data, parts.cut_volume, nitsche, ul, oc, scratch);
                    },
                )
            });
            bd.intersected = t.elapsed().as_secs_f64();
            let t = Instant::now();
            for (oc, dc) in out.chunks_exact(nl).zip(self.cut_dofs.chunks_exact(nl)) {
                scatter(oc, dc, w);
            }
            scatter_time += t.elapsed().as_secs_f64();
        }
        if parts.ghost && self.params.gamma_a != T::zero() && !self.faces.is_empty() {
            let t = Instant::now();
            let np = self.patch_len();
            let mats: Vec<Vec<&Mat<T>>> = (0..self.mesh.dim()).map(|a| self.face_mats(a)).collect();
            let mut out = vec![T::zero(); self.face_dofs.len()];
            let gamma_a = self.params.gamma_a;
            pool.install(|| {
                out.par_chunks_mut(np).zip(self.faces.par_iter()).zip(self.face_dofs.par_chunks(np)).for_each_init(
                    || (vec![T::zero(); np], vec![T::zero(); np]),
                    |(data, tmp), ((oc, face), dc)| {
                        data.resize(np, T::zero());
                        gather(u, dc, &mut data[..np]);
                        let mut ext = self.dofmap.face_extents(face.axis);
                        ghost_face_kernel(&mats[face.axis], gamma_a, &mut ext, data, tmp);
                        oc.copy_from_slice(&data[..np]);
                    },
                )
            });
            bd.ghost_penalty = t.elapsed().as_secs_f64();
            let t = Instant::now();
            for (oc, dc) in out.chunks_exact(np).zip(self.face_dofs.chunks_exact(np)) {
                scatter(oc, dc, w);
            }
            scatter_time += t.elapsed().as_secs_f64();
        }
        let _ = scatter_time; // folded into scatter_other by the caller
    }

    /// Ghost-penalty action on one face patch: `γ_A (hM¹ ⊗ … ⊗ G¹(h) ⊗ …) u`.
    pub fn ghost_face_apply(&self, face: &GhostFace, u_patch: &TensorField<T>) -> Result<TensorField<T>> {
        let expected = self.dofmap.face_extents(face.axis);
        if u_patch.extents() != expected.as_slice() {
            let found = u_patch.extents().iter().product();
            return Err(Error::ExtentMismatch { expected: expected.iter().product(), found });
        }
        let mats: Vec<Option<&Mat<T>>> = self.face_mats(face.axis).into_iter().map(Some).collect();
        let mut out = kron_apply(&mats, u_patch.clone())?;
        for x in out.data_mut() {
            *x *= self.params.gamma_a;
        }
        Ok(out)
    }

    /// Volume and Nitsche contribution of one cut cell on local coefficients.
    pub fn cut_cell_apply(&self, cell: usize, u_local: &[T]) -> Result<Vec<T>> {
        let data = self.cut_cell_data(cell)?;
        if u_local.len() != self.n_local() {
            return Err(Error::SizeMismatch { expected: self.n_local(), found: u_local.len() });
        }
        let mut out = vec![T::zero(); u_local.len()];
        cut_cell_kernel(data, true, Some(self.nitsche_penalty), u_local, &mut out, &mut PointScratch::default());
        Ok(out)
    }

    /// Right-hand side `b_i = ∫_Ω f φ_i`, plus the Nitsche terms
    /// `∫_Γ g (−∂ₙφ_i + γ/h φ_i)` when Dirichlet data `g` is given.
    pub fn assemble_rhs(&self, f: &dyn Fn(&[T]) -> T, dirichlet: Option<&dyn Fn(&[T]) -> T>) -> Vec<T> {
        let dim = self.mesh.dim();
        let nl = self.n_local();
        let mut b = vec![T::zero(); self.n_active()];
        let mut local = vec![T::zero(); nl];
        let mut vals = vec![T::zero(); nl];
        let mut grads = vec![T::zero(); nl * dim];
        for (&cell, dofs) in self.inside_cells.iter().zip(self.inside_dofs.chunks_exact(nl)) {
            let (lo, hi) = self.mesh.cell_box(cell);
            let (pts, wts) = tensor_gauss(&lo, &hi, self.params.cell_order);
            let table = PointTable::new(self.elem.basis(), &pts, &lo, self.mesh.spacing());
            local.iter_mut().for_each(|x| *x = T::zero());
            for (p, &w) in wts.iter().enumerate() {
                table.basis_at(p, &mut vals, &mut grads);
                let fw = f(&pts[p * dim..(p + 1) * dim]) * w;
                for i in 0..nl {
                    local[i] += fw * vals[i];
                }
            }
            scatter(&local, dofs, &mut b);
        }
        for (data, dofs) in self.cut_data.iter().zip(self.cut_dofs.chunks_exact(nl)) {
            let q = &data.quadrature;
            local.iter_mut().for_each(|x| *x = T::zero());
            for p in 0..q.n_interior() {
                data.interior.basis_at(p, &mut vals, &mut grads);
                let fw = f(q.interior_point(p)) * q.interior_weights[p];
                for i in 0..nl {
                    local[i] += fw * vals[i];
                }
            }
            if let Some(g) = dirichlet {
                for p in 0..q.n_surface() {
                    let gv = g(q.surface_point(p));
                    if gv == T::zero() {
                        continue;
                    }
                    data.surface.basis_at(p, &mut vals, &mut grads);
                    let n = q.surface_normal(p);
                    let gw = gv * q.surface_weights[p];
                    for i in 0..nl {
                        let dn: T = (0..dim).map(|a| n[a] * grads[i * dim + a]).sum();
                        local[i] += gw * (self.nitsche_penalty * vals[i] - dn);
                    }
                }
            }
            scatter(&local, dofs, &mut b);
        }
        b
    }

    /// Physical coordinates of an active DoF.
    pub fn dof_point(&self, active: usize, x: &mut [T]) {
        let k = self.params.degree;
        let g = self.dofmap.global_index(active);
        let mut idx = vec![0; self.mesh.dim()];
        self.dofmap.global_multi_index(g, &mut idx);
        let nodes = self.elem.nodes();
        for a in 0..self.mesh.dim() {
            let (c, i) = (idx[a] / k, idx[a] % k);
            x[a] = self.mesh.origin()[a] + self.mesh.spacing()[a] * (T::from_usize_lossy(c) + nodes[i]);
        }
    }

    /// Nodal interpolant of `f` on the active DoFs.
    pub fn interpolate(&self, f: &dyn Fn(&[T]) -> T) -> Vec<T> {
        let mut x = vec![T::zero(); self.mesh.dim()];
        (0..self.n_active())
            .map(|i| {
                self.dof_point(i, &mut x);
                f(&x)
            })
            .collect()
    }

    /// Rules for integrating over `Ω` with order `error_order`: one
    /// `(cell, points, weights)` entry per non-outside cell.
    pub fn domain_quadrature(&self, order: usize) -> Result<Vec<(usize, Vec<T>, Vec<T>)>> {
        let opts = QuadratureOptions {
            order,
            max_depth: self.params.max_depth,
            samples_per_axis: (order + 1).max(self.params.degree + 2),
        };
        let build = |cell: usize| -> Result<(usize, Vec<T>, Vec<T>)> {
            let (lo, hi) = self.mesh.cell_box(cell);
            match self.classification.label(cell) {
                CellLabel::Cut => {
                    let (q, _) = cut_cell_quadrature(&lo, &hi, self.phi.as_ref(), opts, cell)?;
                    Ok((cell, q.interior_points, q.interior_weights))
                }
                _ => {
                    let (p, w) = tensor_gauss(&lo, &hi, order);
                    Ok((cell, p, w))
                }
            }
        };
        let cells: Vec<usize> =
            (0..self.mesh.n_cells()).filter(|&c| self.classification.label(c) != CellLabel::Outside).collect();
        match &self.pool {
            Some(p) => p.install(|| cells.par_iter().map(|&c| build(c)).collect()),
            None => cells.iter().map(|&c| build(c)).collect(),
        }
    }

    /// Basis values of cell `cell` at physical points (flat), `out[p * n_local + i]`.
    pub fn cell_basis_values(&self, cell: usize, points: &[T]) -> Vec<T> {
        let dim = self.mesh.dim();
        let nl = self.n_local();
        let (lo, _) = self.mesh.cell_box(cell);
        let table = PointTable::new(self.elem.basis(), points, &lo, self.mesh.spacing());
        let np = points.len() / dim;
        let mut out = vec![T::zero(); np * nl];
        let mut grads = vec![T::zero(); nl * dim];
        for p in 0..np {
            table.basis_at(p, &mut out[p * nl..(p + 1) * nl], &mut grads);
        }
        out
    }

    /// Active DoF indices of a non-outside cell.
    pub fn cell_dofs(&self, cell: usize) -> Result<Vec<usize>> {
        self.dofmap.cell_dofs(cell)
    }
}

#[inline]
fn gather<T: Copy>(u: &[T], dofs: &[usize], out: &mut [T]) {
    for (o, &i) in out.iter_mut().zip(dofs) {
        *o = u[i];
    }
}

#[inline]
fn scatter<T: Real>(vals: &[T], dofs: &[usize], w: &mut [T]) {
    for (&v, &i) in vals.iter().zip(dofs) {
        w[i] += v;
    }
}
