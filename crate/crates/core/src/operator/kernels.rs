//! Per-cell and per-face kernels of the operator.

use crate::cutquad::CutCellQuadrature;
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::sumfac::kron_apply_raw;
use crate::tensor1d::LagrangeBasis;

/// 1D basis values and physical derivatives at a list of points, per axis.
///
/// Entry `(p, a, i)` sits at `(p * dim + a) * n + i`.
#[derive(Clone, Debug, Default)]
pub struct PointTable<T> {
    pub dim: usize,
    pub n: usize,
    pub values: Vec<T>,
    pub derivs: Vec<T>,
}

impl<T: Real> PointTable<T> {
    pub fn new(basis: &LagrangeBasis<T>, points: &[T], lo: &[T], spacing: &[T]) -> Self {
        let dim = lo.len();
        let n = basis.len();
        let np = points.len() / dim;
        let mut values = vec![T::zero(); np * dim * n];
        let mut derivs = vec![T::zero(); np * dim * n];
        for p in 0..np {
            for a in 0..dim {
                let xi = (points[p * dim + a] - lo[a]) / spacing[a];
                let off = (p * dim + a) * n;
                basis.values_and_derivs(xi, &mut values[off..off + n], &mut derivs[off..off + n]);
                for d in &mut derivs[off..off + n] {
                    *d /= spacing[a];
                }
            }
        }
        Self { dim, n, values, derivs }
    }

    pub fn n_points(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.values.len() / (self.dim * self.n)
        }
    }

    /// Full tensor-product values and gradients at point `p`:
    /// `vals[i]`, `grads[i * dim + a]`.
    #[inline]
    pub fn basis_at(&self, p: usize, vals: &mut [T], grads: &mut [T]) {
        let (d, n) = (self.dim, self.n);
        let v = &self.values[p * d * n..(p + 1) * d * n];
        let g = &self.derivs[p * d * n..(p + 1) * d * n];
        if d == 2 {
            for i1 in 0..n {
                for i0 in 0..n {
                    let i = i0 + n * i1;
                    let (v0, v1) = (v[i0], v[n + i1]);
                    vals[i] = v0 * v1;
                    grads[2 * i] = g[i0] * v1;
                    grads[2 * i + 1] = v0 * g[n + i1];
                }
            }
        } else {
            for i2 in 0..n {
                for i1 in 0..n {
                    for i0 in 0..n {
                        let i = i0 + n * (i1 + n * i2);
                        let (v0, v1, v2) = (v[i0], v[n + i1], v[2 * n + i2]);
                        vals[i] = v0 * v1 * v2;
                        grads[3 * i] = g[i0] * v1 * v2;
                        grads[3 * i + 1] = v0 * g[n + i1] * v2;
                        grads[3 * i + 2] = v0 * v1 * g[2 * n + i2];
                    }
                }
            }
        }
    }
}

/// Cached data of a cut cell.
#[derive(Clone, Debug)]
pub struct CutCellData<T> {
    pub cell: usize,
    pub quadrature: CutCellQuadrature<T>,
    pub interior: PointTable<T>,
    pub surface: PointTable<T>,
}

/// Scratch for [`cut_cell_kernel`].
#[derive(Default)]
pub struct PointScratch<T> {
    vals: Vec<T>,
    grads: Vec<T>,
}

/// Volume Laplacian over `K ∩ Ω` and, if `nitsche_penalty` is given, the
/// symmetric Nitsche terms on `K ∩ ∂Ω`, by point-wise basis evaluation.
///
/// `out` is overwritten.
pub fn cut_cell_kernel<T: Real>(
    data: &CutCellData<T>,
    volume: bool,
    nitsche_penalty: Option<T>,
    u: &[T],
    out: &mut [T],
    scratch: &mut PointScratch<T>,
) {
    let d = data.interior.dim.max(data.surface.dim);
    let n_local = u.len();
    scratch.vals.resize(n_local, T::zero());
    scratch.grads.resize(n_local * d, T::zero());
    out.iter_mut().for_each(|x| *x = T::zero());
    let mut gu = [T::zero(); 3];
    if volume {
        let q = &data.quadrature;
        for p in 0..q.n_interior() {
            data.interior.basis_at(p, &mut scratch.vals, &mut scratch.grads);
            gu[..d].iter_mut().for_each(|x| *x = T::zero());
            for i in 0..n_local {
                for a in 0..d {
                    gu[a] += u[i] * scratch.grads[i * d + a];
                }
            }
            let w = q.interior_weights[p];
            for a in 0..d {
                gu[a] *= w;
            }
            for i in 0..n_local {
                let mut s = T::zero();
                for a in 0..d {
                    s += scratch.grads[i * d + a] * gu[a];
                }
                out[i] += s;
            }
        }
    }
    if let Some(pen) = nitsche_penalty {
        let q = &data.quadrature;
        for p in 0..q.n_surface() {
            data.surface.basis_at(p, &mut scratch.vals, &mut scratch.grads);
            let normal = q.surface_normal(p);
            let mut uval = T::zero();
            gu[..d].iter_mut().for_each(|x| *x = T::zero());
            for i in 0..n_local {
                uval += u[i] * scratch.vals[i];
                for a in 0..d {
                    gu[a] += u[i] * scratch.grads[i * d + a];
                }
            }
            let dn_u: T = (0..d).map(|a| normal[a] * gu[a]).sum();
            let w = q.surface_weights[p];
            // −(∂ₙu) v − u (∂ₙv) + (γ/h) u v
            let c_val = (pen * uval - dn_u) * w;
            let c_grad = -uval * w;
            for i in 0..n_local {
                let mut dn_phi = T::zero();
                for a in 0..d {
                    dn_phi += normal[a] * scratch.grads[i * d + a];
                }
                out[i] += c_val * scratch.vals[i] + c_grad * dn_phi;
            }
        }
    }
}

/// Ghost-penalty face kernel: `γ_A (⊗ tangential hM¹, G¹(h) on the normal axis)`.
///
/// `data` holds the patch on entry and the result on exit; `extents` is
/// restored to the patch shape (the operator is square).
pub fn ghost_face_kernel<T: Real>(
    mats: &[&Mat<T>],
    gamma_a: T,
    extents: &mut [usize],
    data: &mut Vec<T>,
    tmp: &mut Vec<T>,
) {
    kron_apply_raw(mats, extents, data, tmp);
    for x in data.iter_mut() {
        *x *= gamma_a;
    }
}
