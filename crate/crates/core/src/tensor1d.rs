//! One-dimensional reference element: Lagrange basis on `[0, 1]`, mass
//! matrix, and the derivative-jump machinery of a two-cell patch that the
//! ghost-penalty face operator is built from.

use crate::error::{Error, Result};
use crate::gauss::{gauss_legendre, gauss_lobatto_points};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Largest degree for which factorial weights are kept exact.
pub const MAX_DEGREE: usize = 20;

/// Lagrange polynomials through a fixed set of nodes.
#[derive(Clone, Debug)]
pub struct LagrangeBasis<T> {
    nodes: Vec<T>,
    // 1 / Π_{j≠i} (x_i - x_j)
    inv_denom: Vec<T>,
}

impl<T: Real> LagrangeBasis<T> {
    pub fn new(nodes: Vec<T>) -> Self {
        let inv_denom = (0..nodes.len())
            .map(|i| {
                let mut d = T::one();
                for (j, &xj) in nodes.iter().enumerate() {
                    if j != i {
                        d *= nodes[i] - xj;
                    }
                }
                T::one() / d
            })
            .collect();
        Self { nodes, inv_denom }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Values and first derivatives of every basis function at `x`.
    #[inline]
    pub fn values_and_derivs(&self, x: T, values: &mut [T], derivs: &mut [T]) {
        let n = self.nodes.len();
        for i in 0..n {
            // product rule over the linear factors
            let mut p = T::one();
            let mut dp = T::zero();
            for j in 0..n {
                if j != i {
                    let f = x - self.nodes[j];
                    dp = dp * f + p;
                    p *= f;
                }
            }
            values[i] = p * self.inv_denom[i];
            derivs[i] = dp * self.inv_denom[i];
        }
    }

    /// `out[m][i]` = m-th derivative of basis `i` at `x`, for `m = 0..=max_order`.
    ///
    /// Each basis polynomial is expanded as a truncated Taylor series around
    /// `x` by multiplying its linear factors; the m-th coefficient times m!
    /// is the m-th derivative.
    pub fn derivatives(&self, x: T, max_order: usize) -> Vec<Vec<T>> {
        let n = self.nodes.len();
        let mut out = vec![vec![T::zero(); n]; max_order + 1];
        let mut coeffs = vec![T::zero(); n];
        for i in 0..n {
            coeffs.iter_mut().for_each(|c| *c = T::zero());
            coeffs[0] = T::one();
            let mut deg = 0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let c0 = x - self.nodes[j];
                // multiply by (c0 + t)
                for p in (0..=deg + 1).rev() {
                    let lower = if p > 0 { coeffs[p - 1] } else { T::zero() };
                    let cur = if p <= deg { coeffs[p] } else { T::zero() };
                    coeffs[p] = cur * c0 + lower;
                }
                deg += 1;
            }
            let mut fact = T::one();
            for m in 0..=max_order.min(n - 1) {
                if m > 0 {
                    fact *= T::from_usize_lossy(m);
                }
                out[m][i] = coeffs[m] * fact * self.inv_denom[i];
            }
        }
        out
    }
}

/// Degree-k Lagrange element on `[0, 1]` with Gauss–Lobatto support points.
#[derive(Clone, Debug)]
pub struct ReferenceElement1D<T> {
    degree: usize,
    basis: LagrangeBasis<T>,
    quad_points: Vec<T>,
    quad_weights: Vec<T>,
    /// `values[(q, i)] = φ_i(x_q)`
    values: Mat<T>,
    /// `grads[(q, i)] = φ_i'(x_q)`
    grads: Mat<T>,
    values_t: Mat<T>,
    grads_t: Mat<T>,
    /// `endpoint_derivs[m][i][side]`, side 0 is ξ = 0 and side 1 is ξ = 1.
    endpoint_derivs: Vec<Vec<[T; 2]>>,
}

impl<T: Real> ReferenceElement1D<T> {
    /// Builds the element of degree `degree` with a `quad_points`-point Gauss rule.
    pub fn new(degree: usize, quad_points: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::ZeroDegree);
        }
        if quad_points < degree + 1 {
            return Err(Error::QuadratureTooLow { degree, points: quad_points });
        }
        let basis = LagrangeBasis::new(gauss_lobatto_points::<T>(degree));
        let (qp, qw) = gauss_legendre::<T>(quad_points);
        let n = degree + 1;
        let mut values = Mat::zeros(quad_points, n);
        let mut grads = Mat::zeros(quad_points, n);
        let mut v = vec![T::zero(); n];
        let mut d = vec![T::zero(); n];
        for (q, &x) in qp.iter().enumerate() {
            basis.values_and_derivs(x, &mut v, &mut d);
            for i in 0..n {
                values[(q, i)] = v[i];
                grads[(q, i)] = d[i];
            }
        }
        let left = basis.derivatives(T::zero(), degree);
        let right = basis.derivatives(T::one(), degree);
        let endpoint_derivs = (0..=degree)
            .map(|m| (0..n).map(|i| [left[m][i], right[m][i]]).collect())
            .collect();
        Ok(Self {
            degree,
            values_t: values.transpose(),
            grads_t: grads.transpose(),
            basis,
            quad_points: qp,
            quad_weights: qw,
            values,
            grads,
            endpoint_derivs,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `k + 1`.
    #[inline]
    pub fn n_dofs(&self) -> usize {
        self.degree + 1
    }

    #[inline]
    pub fn n_quad(&self) -> usize {
        self.quad_points.len()
    }

    pub fn nodes(&self) -> &[T] {
        self.basis.nodes()
    }

    pub fn basis(&self) -> &LagrangeBasis<T> {
        &self.basis
    }

    pub fn quad_points(&self) -> &[T] {
        &self.quad_points
    }

    pub fn quad_weights(&self) -> &[T] {
        &self.quad_weights
    }

    #[inline]
    pub fn shape_value(&self, i: usize, q: usize) -> T {
        self.values[(q, i)]
    }

    #[inline]
    pub fn shape_grad(&self, i: usize, q: usize) -> T {
        self.grads[(q, i)]
    }

    /// Interpolation matrix from coefficients to quadrature values, `n_quad × (k+1)`.
    pub fn value_matrix(&self) -> &Mat<T> {
        &self.values
    }

    pub fn grad_matrix(&self) -> &Mat<T> {
        &self.grads
    }

    pub fn value_matrix_t(&self) -> &Mat<T> {
        &self.values_t
    }

    pub fn grad_matrix_t(&self) -> &Mat<T> {
        &self.grads_t
    }

    /// m-th derivative of basis `i` at ξ = 0 (`side = 0`) or ξ = 1 (`side = 1`).
    #[inline]
    pub fn endpoint_deriv(&self, m: usize, i: usize, side: usize) -> T {
        self.endpoint_derivs[m][i][side]
    }
}

/// Reference mass matrix `M¹_ij = ∫₀¹ φ_i φ_j dξ`.
#[derive(Clone, Debug)]
pub struct Mass1D<T> {
    pub matrix: Mat<T>,
}

impl<T: Real> Mass1D<T> {
    /// Mass matrix of a cell of length `h`, i.e. `h M¹`.
    pub fn scaled(&self, h: T) -> Mat<T> {
        self.matrix.scaled(h)
    }
}

pub fn mass_matrix_1d<T: Real>(elem: &ReferenceElement1D<T>) -> Mass1D<T> {
    let n = elem.n_dofs();
    let w = elem.quad_weights();
    let matrix = Mat::from_fn(n, n, |i, j| {
        (0..elem.n_quad()).map(|q| w[q] * elem.shape_value(i, q) * elem.shape_value(j, q)).sum()
    });
    Mass1D { matrix }
}

/// Size of the two-cell patch basis along the face normal, `2k + 1`.
#[inline]
pub fn patch_len(degree: usize) -> usize {
    2 * degree + 1
}

/// Jump of the m-th derivative of each patch basis function across the
/// shared point of the reference patch `[0,1] ∪ [1,2]`, right minus left.
///
/// Patch functions are numbered left cell first (`0..=k`), then the right
/// cell's remaining `k` functions; the shared node has index `k`.
pub fn jump_vector<T: Real>(elem: &ReferenceElement1D<T>, m: usize) -> Result<Vec<T>> {
    let k = elem.degree();
    if m > k {
        return Err(Error::DerivativeOrder { order: m, degree: k });
    }
    let mut j = vec![T::zero(); patch_len(k)];
    for i in 0..=k {
        j[i] -= elem.endpoint_deriv(m, i, 1);
        j[k + i] += elem.endpoint_deriv(m, i, 0);
    }
    Ok(j)
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Per-face 1D ghost-penalty data for one normal spacing `h`.
#[derive(Clone, Debug)]
pub struct GhostPenalty1D<T> {
    /// `j_m` for `m = 0..=k` on the unit reference patch.
    pub jump_vectors: Vec<Vec<T>>,
    /// `G¹(h) = h⁻¹ Σ_m j_m j_mᵀ / (m!)²`, size `(2k+1) × (2k+1)`.
    pub matrix: Mat<T>,
    /// Tangential mass factor `h M¹`.
    pub tangential_mass: Mat<T>,
}

/// Combined 1D penalty matrix `G¹(h)` for a face with normal spacing `h`.
///
/// The m-th term carries the weight `h^{2m-1} / (m!)²` and the physical
/// jump scales like `h^{-m}` times the reference jump, so every term ends up
/// with the same factor `h⁻¹`.
pub fn ghost_matrix_1d<T: Real>(elem: &ReferenceElement1D<T>, h: T) -> Result<Mat<T>> {
    if !(h > T::zero()) {
        return Err(Error::NonPositiveSpacing(h.as_f64()));
    }
    let k = elem.degree();
    assert!(k <= MAX_DEGREE, "factorial weights only exact up to degree {MAX_DEGREE}");
    let n = patch_len(k);
    let mut g = Mat::zeros(n, n);
    for m in 0..=k {
        let j = jump_vector(elem, m)?;
        let f = factorial(m) as f64;
        let w = T::lit(1.0 / (f * f)) / h;
        for a in 0..n {
            for b in 0..n {
                g[(a, b)] += w * j[a] * j[b];
            }
        }
    }
    Ok(g)
}

impl<T: Real> GhostPenalty1D<T> {
    pub fn new(elem: &ReferenceElement1D<T>, mass: &Mass1D<T>, h: T) -> Result<Self> {
        let matrix = ghost_matrix_1d(elem, h)?;
        let jump_vectors = (0..=elem.degree()).map(|m| jump_vector(elem, m)).collect::<Result<_>>()?;
        Ok(Self { jump_vectors, matrix, tangential_mass: mass.scaled(h) })
    }
}
