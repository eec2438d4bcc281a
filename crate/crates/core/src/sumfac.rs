//! Tensor contractions along single axes of a lexicographically stored
//! coefficient array, and the sum-factorized Laplacian of an axis-aligned cell.
//!
//! Layout: for extents `(n₀, n₁, n₂)` the flat index is `i₀ + i₁ n₀ + i₂ n₀ n₁`.
//! Axes are numbered from zero.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;
use crate::tensor1d::ReferenceElement1D;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorField<T> {
    extents: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> TensorField<T> {
    pub fn new(extents: Vec<usize>, data: Vec<T>) -> Result<Self> {
        check_dim(extents.len())?;
        let len: usize = extents.iter().product();
        if extents.iter().any(|&e| e == 0) || data.len() != len {
            return Err(Error::ExtentMismatch { expected: len, found: data.len() });
        }
        Ok(Self { extents, data })
    }

    pub fn zeros(extents: Vec<usize>) -> Result<Self> {
        let len = extents.iter().product();
        Self::new(extents, vec![T::zero(); len])
    }

    pub fn from_fn(extents: Vec<usize>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let len: usize = extents.iter().product();
        let mut idx = vec![0; extents.len()];
        let mut data = Vec::with_capacity(len);
        for flat in 0..len {
            unflatten(flat, &extents, &mut idx);
            data.push(f(&idx));
        }
        Self::new(extents, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    #[inline]
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.data[flatten(idx, &self.extents)]
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Dimension(dim))
    }
}

#[inline]
pub fn flatten(idx: &[usize], extents: &[usize]) -> usize {
    let mut flat = 0;
    let mut stride = 1;
    for (i, n) in idx.iter().zip(extents) {
        flat += i * stride;
        stride *= n;
    }
    flat
}

#[inline]
pub fn unflatten(mut flat: usize, extents: &[usize], idx: &mut [usize]) {
    for (i, n) in idx.iter_mut().zip(extents) {
        *i = flat % n;
        flat /= n;
    }
}

/// Receives one tick per multiply-add inside the contraction loop.
pub trait FlopCounter {
    fn tick(&mut self);
}

/// Counter that compiles away.
pub struct NoCount;

impl FlopCounter for NoCount {
    #[inline(always)]
    fn tick(&mut self) {}
}

impl FlopCounter for u64 {
    #[inline(always)]
    fn tick(&mut self) {
        *self += 1;
    }
}

/// Core contraction: `dst[o, j, s] = Σ_i a[j, i] src[o, i, s]` where `s`
/// runs over axes below `axis` and `o` over axes above it.
#[inline]
pub(crate) fn contract<T: Real, C: FlopCounter>(
    a: &Mat<T>,
    src: &[T],
    extents: &[usize],
    axis: usize,
    dst: &mut [T],
    counter: &mut C,
) {
    let inner: usize = extents[..axis].iter().product();
    let outer: usize = extents[axis + 1..].iter().product();
    let (m_out, m_in) = (a.rows(), a.cols());
    debug_assert_eq!(extents[axis], m_in);
    debug_assert_eq!(src.len(), inner * m_in * outer);
    debug_assert_eq!(dst.len(), inner * m_out * outer);
    let coeffs = a.as_slice();
    if inner == 1 {
        for o in 0..outer {
            let s = &src[o * m_in..(o + 1) * m_in];
            let d = &mut dst[o * m_out..(o + 1) * m_out];
            for j in 0..m_out {
                let row = &coeffs[j * m_in..(j + 1) * m_in];
                let mut acc = T::zero();
                for i in 0..m_in {
                    acc += row[i] * s[i];
                    counter.tick();
                }
                d[j] = acc;
            }
        }
        return;
    }
    for o in 0..outer {
        let s = &src[o * m_in * inner..(o + 1) * m_in * inner];
        let d = &mut dst[o * m_out * inner..(o + 1) * m_out * inner];
        for j in 0..m_out {
            let dj = &mut d[j * inner..(j + 1) * inner];
            dj.iter_mut().for_each(|x| *x = T::zero());
            for i in 0..m_in {
                let c = coeffs[j * m_in + i];
                let si = &s[i * inner..(i + 1) * inner];
                for (x, y) in dj.iter_mut().zip(si) {
                    *x += c * *y;
                    counter.tick();
                }
            }
        }
    }
}

fn check_axis<T: Real>(a: &Mat<T>, u: &TensorField<T>, axis: usize) -> Result<()> {
    if axis >= u.dim() {
        return Err(Error::AxisOutOfRange { axis, dim: u.dim() });
    }
    if u.extents[axis] != a.cols() {
        return Err(Error::ExtentMismatch { expected: a.cols(), found: u.extents[axis] });
    }
    Ok(())
}

/// Applies `a` (`m_out × m_in`) along `axis`; the input is left untouched.
pub fn apply_axis<T: Real>(a: &Mat<T>, u: &TensorField<T>, axis: usize) -> Result<TensorField<T>> {
    apply_axis_counted(a, u, axis, &mut NoCount)
}

/// As [`apply_axis`], ticking `counter` once per multiply-add performed.
pub fn apply_axis_counted<T: Real, C: FlopCounter>(
    a: &Mat<T>,
    u: &TensorField<T>,
    axis: usize,
    counter: &mut C,
) -> Result<TensorField<T>> {
    check_axis(a, u, axis)?;
    let mut extents = u.extents.clone();
    extents[axis] = a.rows();
    let mut out = vec![T::zero(); extents.iter().product()];
    contract(a, &u.data, &u.extents, axis, &mut out, counter);
    Ok(TensorField { extents, data: out })
}

/// Applies one matrix per axis; `None` stands for the identity and is skipped.
pub fn kron_apply<T: Real>(mats: &[Option<&Mat<T>>], u: TensorField<T>) -> Result<TensorField<T>> {
    if mats.len() != u.dim() {
        return Err(Error::ExtentMismatch { expected: u.dim(), found: mats.len() });
    }
    let mut cur = u;
    for (axis, m) in mats.iter().enumerate() {
        if let Some(m) = m {
            cur = apply_axis(m, &cur, axis)?;
        }
    }
    Ok(cur)
}

/// In-place variant of [`kron_apply`] on raw buffers, used by the operator's
/// face loop. `data` holds the input and receives the output; `tmp` is scratch.
pub(crate) fn kron_apply_raw<T: Real>(
    mats: &[&Mat<T>],
    extents: &mut [usize],
    data: &mut Vec<T>,
    tmp: &mut Vec<T>,
) {
    for (axis, m) in mats.iter().enumerate() {
        let src_len: usize = extents.iter().product();
        let dst_len = src_len / m.cols() * m.rows();
        tmp.resize(dst_len, T::zero());
        contract(m, &data[..src_len], extents, axis, &mut tmp[..dst_len], &mut NoCount);
        std::mem::swap(data, tmp);
        extents[axis] = m.rows();
    }
}

/// Reusable buffers for [`CellLaplacian`].
#[derive(Default)]
pub struct Scratch<T> {
    a: Vec<T>,
    b: Vec<T>,
}

/// Sum-factorized Laplacian on an axis-aligned cell of fixed spacing.
///
/// The quadrature weights, the Jacobian determinant and the inverse metric
/// `1/h_a²` are folded into one table per axis.
#[derive(Clone, Debug)]
pub struct CellLaplacian<T> {
    dim: usize,
    n: usize,
    nq: usize,
    values: Mat<T>,
    grads: Mat<T>,
    values_t: Mat<T>,
    grads_t: Mat<T>,
    // scale[a][q] = J ω_q / h_a²
    scale: Vec<Vec<T>>,
}

impl<T: Real> CellLaplacian<T> {
    pub fn new(elem: &ReferenceElement1D<T>, spacing: &[T]) -> Result<Self> {
        let dim = spacing.len();
        check_dim(dim)?;
        for &h in spacing {
            if !(h > T::zero()) {
                return Err(Error::NonPositiveSpacing(h.as_f64()));
            }
        }
        let nq = elem.n_quad();
        let jac: T = spacing.iter().fold(T::one(), |p, &h| p * h);
        let total = nq.pow(dim as u32);
        let w1 = elem.quad_weights();
        let mut weights = vec![T::zero(); total];
        let mut idx = vec![0; dim];
        let ext = vec![nq; dim];
        for (flat, w) in weights.iter_mut().enumerate() {
            unflatten(flat, &ext, &mut idx);
            *w = idx.iter().fold(jac, |p, &q| p * w1[q]);
        }
        let scale = spacing.iter().map(|&h| weights.iter().map(|&w| w / (h * h)).collect()).collect();
        Ok(Self {
            dim,
            n: elem.n_dofs(),
            nq,
            values: elem.value_matrix().clone(),
            grads: elem.grad_matrix().clone(),
            values_t: elem.value_matrix_t().clone(),
            grads_t: elem.grad_matrix_t().clone(),
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of local coefficients, `(k+1)^d`.
    pub fn n_local(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// `w_i = Σ_q ∇u(x_q)·∇φ_i(x_q) J ω_q`, written into `out`.
    pub fn apply(&self, u: &[T], out: &mut [T], scratch: &mut Scratch<T>) {
        let d = self.dim;
        let (n, nq) = (self.n, self.nq);
        let big = nq.max(n).pow(d as u32);
        scratch.a.resize(big, T::zero());
        scratch.b.resize(big, T::zero());
        out.iter_mut().for_each(|x| *x = T::zero());
        let n_local = u.len();
        let mut ext = vec![n; d];
        for a in 0..d {
            // coefficients -> a-th reference derivative at the quadrature points
            ext.iter_mut().for_each(|e| *e = n);
            scratch.a[..n_local].copy_from_slice(u);
            for b in 0..d {
                let m = if b == a { &self.grads } else { &self.values };
                let src_len: usize = ext.iter().product();
                let dst_len = src_len / n * nq;
                contract(m, &scratch.a[..src_len], &ext, b, &mut scratch.b[..dst_len], &mut NoCount);
                std::mem::swap(&mut scratch.a, &mut scratch.b);
                ext[b] = nq;
            }
            let total = nq.pow(d as u32);
            for (x, s) in scratch.a[..total].iter_mut().zip(&self.scale[a]) {
                *x *= *s;
            }
            // transposed pipeline back to the coefficients
            for b in 0..d {
                let m = if b == a { &self.grads_t } else { &self.values_t };
                let src_len: usize = ext.iter().product();
                let dst_len = src_len / nq * n;
                contract(m, &scratch.a[..src_len], &ext, b, &mut scratch.b[..dst_len], &mut NoCount);
                std::mem::swap(&mut scratch.a, &mut scratch.b);
                ext[b] = n;
            }
            for (o, t) in out.iter_mut().zip(&scratch.a[..n_local]) {
                *o += *t;
            }
        }
    }
}

/// Convenience wrapper of [`CellLaplacian`] on a [`TensorField`].
pub fn cell_laplacian<T: Real>(
    elem: &ReferenceElement1D<T>,
    spacing: &[T],
    u_local: &TensorField<T>,
) -> Result<TensorField<T>> {
    let lap = CellLaplacian::new(elem, spacing)?;
    if u_local.dim() != spacing.len() {
        return Err(Error::ExtentMismatch { expected: spacing.len(), found: u_local.dim() });
    }
    for &e in u_local.extents() {
        if e != elem.n_dofs() {
            return Err(Error::ExtentMismatch { expected: elem.n_dofs(), found: e });
        }
    }
    let mut out = vec![T::zero(); u_local.data().len()];
    lap.apply(u_local.data(), &mut out, &mut Scratch::default());
    TensorField::new(u_local.extents().to_vec(), out)
}
