//! Dense reference assembly of the CutFEM matrix, written independently of
//! the matrix-free kernels: Lagrange polynomials come from a Vandermonde
//! solve, basis functions are located by DoF coordinates, and the ghost
//! penalty is integrated face by face from physical derivative jumps.
#![allow(dead_code)]

use cutfem::geometry::CellLabel;
use cutfem::operator::{OperatorContext, Parts};
use cutfem::gauss::gauss_legendre;
use cutfem::linalg::Mat;
use nalgebra::{DMatrix, DVector};

/// Monomial coefficients of the Lagrange polynomials through `nodes`.
pub fn lagrange_coeffs(nodes: &[f64]) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let v = DMatrix::from_fn(n, n, |i, j| nodes[i].powi(j as i32));
    let inv = v.try_inverse().expect("Vandermonde");
    (0..n).map(|i| (0..n).map(|p| inv[(p, i)]).collect()).collect()
}

/// `m`-th derivative of the monomial expansion `c` at `x`.
pub fn poly_deriv(c: &[f64], x: f64, m: usize) -> f64 {
    let mut s = 0.0;
    for (p, &cp) in c.iter().enumerate().skip(m) {
        let mut f = 1.0;
        for t in 0..m {
            f *= (p - t) as f64;
        }
        s += cp * f * x.powi((p - m) as i32);
    }
    s
}

fn gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Golub-Welsch on [0, 1]
    let mut j = DMatrix::zeros(n, n);
    for i in 1..n {
        let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (0.5 * (eig.eigenvalues[i] + 1.0), eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Basis functions of one cell: active index and per-axis node index.
struct CellBasis {
    lo: Vec<f64>,
    h: Vec<f64>,
    funcs: Vec<(usize, Vec<usize>)>,
}

struct Oracle<'a> {
    ctx: &'a OperatorContext<f64>,
    dim: usize,
    coeffs: Vec<Vec<f64>>,
    dof_points: Vec<Vec<f64>>,
}

impl<'a> Oracle<'a> {
    fn new(ctx: &'a OperatorContext<f64>) -> Self {
        let dim = ctx.mesh().dim();
        let coeffs = lagrange_coeffs(ctx.element().nodes());
        let dof_points = (0..ctx.n_active())
            .map(|i| {
                let mut x = vec![0.0; dim];
                ctx.dof_point(i, &mut x);
                x
            })
            .collect();
        Self { ctx, dim, coeffs, dof_points }
    }

    fn cell_basis(&self, cell: usize) -> CellBasis {
        let (lo, hi) = self.ctx.mesh().cell_box(cell);
        let h: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
        let nodes = self.ctx.element().nodes();
        let mut funcs = Vec::new();
        'dofs: for (j, x) in self.dof_points.iter().enumerate() {
            let mut idx = Vec::with_capacity(self.dim);
            for a in 0..self.dim {
                let xi = (x[a] - lo[a]) / h[a];
                match nodes.iter().position(|&t| (t - xi).abs() < 1e-9) {
                    Some(m) => idx.push(m),
                    None => continue 'dofs,
                }
            }
            funcs.push((j, idx));
        }
        CellBasis { lo, h, funcs }
    }

    /// Physical mixed derivative `∂^{orders}` of a cell basis function at `x`.
    fn eval(&self, cb: &CellBasis, idx: &[usize], x: &[f64], orders: &[usize]) -> f64 {
        (0..self.dim)
            .map(|a| {
                let xi = (x[a] - cb.lo[a]) / cb.h[a];
                poly_deriv(&self.coeffs[idx[a]], xi, orders[a]) / cb.h[a].powi(orders[a] as i32)
            })
            .product()
    }

    fn grad(&self, cb: &CellBasis, idx: &[usize], x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|a| {
                let mut o = vec![0; self.dim];
                o[a] = 1;
                self.eval(cb, idx, x, &o)
            })
            .collect()
    }

    fn add_stiffness(&self, cb: &CellBasis, pts: &[f64], wts: &[f64], m: &mut DMatrix<f64>) {
        for (p, &w) in wts.iter().enumerate() {
            let x = &pts[p * self.dim..(p + 1) * self.dim];
            let g: Vec<Vec<f64>> = cb.funcs.iter().map(|(_, idx)| self.grad(cb, idx, x)).collect();
            for (a, (i, _)) in cb.funcs.iter().enumerate() {
                for (b, (j, _)) in cb.funcs.iter().enumerate() {
                    let s: f64 = g[a].iter().zip(&g[b]).map(|(u, v)| u * v).sum();
                    m[(*i, *j)] += w * s;
                }
            }
        }
    }

    fn tensor_rule(&self, lo: &[f64], h: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
        let (gp, gw) = gauss(n);
        let total = n.pow(self.dim as u32);
        let mut pts = Vec::with_capacity(total * self.dim);
        let mut wts = Vec::with_capacity(total);
        for p in 0..total {
            let mut r = p;
            let mut w = 1.0;
            for a in 0..self.dim {
                let q = r % n;
                r /= n;
                pts.push(lo[a] + h[a] * gp[q]);
                w *= h[a] * gw[q];
            }
            wts.push(w);
        }
        (pts, wts)
    }
}

/// Blocks of the dense CutFEM matrix over active DoFs.
pub struct DenseBlocks {
    pub interior: DMatrix<f64>,
    pub cut_volume: DMatrix<f64>,
    pub nitsche: DMatrix<f64>,
    /// Includes the factor `γ_A`.
    pub ghost: DMatrix<f64>,
}

impl DenseBlocks {
    pub fn total(&self) -> DMatrix<f64> {
        &self.interior + &self.cut_volume + &self.nitsche + &self.ghost
    }
}

pub fn assemble(ctx: &OperatorContext<f64>) -> DenseBlocks {
    let o = Oracle::new(ctx);
    let n = ctx.n_active();
    let dim = o.dim;
    let k = ctx.params().degree;
    let mut interior = DMatrix::zeros(n, n);
    let mut cut_volume = DMatrix::zeros(n, n);
    let mut nitsche = DMatrix::zeros(n, n);
    let mut ghost = DMatrix::zeros(n, n);
    let hmax = ctx.mesh().spacing().iter().cloned().fold(0.0, f64::max);
    let penalty = ctx.params().gamma_d / hmax;

    for cell in 0..ctx.mesh().n_cells() {
        match ctx.classification().label(cell) {
            CellLabel::Outside => {}
            CellLabel::Inside => {
                let cb = o.cell_basis(cell);
                let (pts, wts) = o.tensor_rule(&cb.lo, &cb.h, k + 2);
                o.add_stiffness(&cb, &pts, &wts, &mut interior);
            }
            CellLabel::Cut => {
                let cb = o.cell_basis(cell);
                let q = ctx.cut_quadrature(cell).unwrap();
                o.add_stiffness(&cb, &q.interior_points, &q.interior_weights, &mut cut_volume);
                for s in 0..q.n_surface() {
                    let x = q.surface_point(s);
                    let nrm = q.surface_normal(s);
                    let w = q.surface_weights[s];
                    let vals: Vec<f64> = cb.funcs.iter().map(|(_, idx)| o.eval(&cb, idx, x, &vec![0; dim])).collect();
                    let dn: Vec<f64> = cb
                        .funcs
                        .iter()
                        .map(|(_, idx)| o.grad(&cb, idx, x).iter().zip(nrm).map(|(g, n)| g * n).sum())
                        .collect();
                    for (a, (i, _)) in cb.funcs.iter().enumerate() {
                        for (b, (j, _)) in cb.funcs.iter().enumerate() {
                            // row i is the test function
                            nitsche[(*i, *j)] += w * (-dn[b] * vals[a] - vals[b] * dn[a] + penalty * vals[b] * vals[a]);
                        }
                    }
                }
            }
        }
    }

    let gamma_a = ctx.params().gamma_a;
    let (gp, gw) = gauss(k + 1);
    let mut fact = 1.0;
    let factorials: Vec<f64> = (0..=k)
        .map(|m| {
            if m > 0 {
                fact *= m as f64;
            }
            fact
        })
        .collect();
    for face in ctx.ghost_faces() {
        let a = face.axis;
        let lower = o.cell_basis(face.lower);
        let upper = o.cell_basis(face.upper);
        let h = ctx.mesh().spacing().to_vec();
        let xf = upper.lo[a];
        let tang: Vec<usize> = (0..dim).filter(|&b| b != a).collect();
        let nq = (k + 1).pow(tang.len() as u32);
        let mut dofs: Vec<usize> = lower.funcs.iter().chain(&upper.funcs).map(|(j, _)| *j).collect();
        dofs.sort();
        dofs.dedup();
        for p in 0..nq {
            let mut x = vec![0.0; dim];
            x[a] = xf;
            let mut w = 1.0;
            let mut r = p;
            for &b in &tang {
                let q = r % (k + 1);
                r /= k + 1;
                x[b] = upper.lo[b] + h[b] * gp[q];
                w *= h[b] * gw[q];
            }
            for m in 0..=k {
                let mut orders = vec![0; dim];
                orders[a] = m;
                let jump: Vec<f64> = dofs
                    .iter()
                    .map(|&j| {
                        let side = |cb: &CellBasis| {
                            cb.funcs.iter().find(|(jj, _)| *jj == j).map_or(0.0, |(_, idx)| o.eval(cb, idx, &x, &orders))
                        };
                        side(&upper) - side(&lower)
                    })
                    .collect();
                let c = gamma_a * w * h[a].powi(2 * m as i32 - 1) / (factorials[m] * factorials[m]);
                for (s, &i) in dofs.iter().enumerate() {
                    for (t, &j) in dofs.iter().enumerate() {
                        ghost[(i, j)] += c * jump[s] * jump[t];
                    }
                }
            }
        }
    }
    DenseBlocks { interior, cut_volume, nitsche, ghost }
}

/// Matrix of `vmult_parts` obtained by applying it to every unit vector.
pub fn probe(ctx: &OperatorContext<f64>, parts: Parts) -> DMatrix<f64> {
    let n = ctx.n_active();
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut w = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        ctx.vmult_parts(&e, &mut w, parts).unwrap();
        m.set_column(j, &DVector::from_column_slice(&w));
        e[j] = 0.0;
    }
    m
}

/// `max |a − b| / max |b|`.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.amax().max(f64::MIN_POSITIVE);
    (a - b).amax() / scale
}

pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    rel_diff(a, &a.transpose())
}

pub fn to_dense(m: &Mat<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// `A_{d−1} ⊗ … ⊗ A_0`, matching the first-axis-fastest layout.
pub fn kron_all(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut out = mats[0].clone();
    for m in &mats[1..] {
        out = m.kronecker(&out);
    }
    out
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// `∫₀¹ φ_i φ_j` from Vandermonde polynomials and a 20-point rule.
pub fn mass_oracle(nodes: &[f64]) -> DMatrix<f64> {
    let c = lagrange_coeffs(nodes);
    let (p, w) = gauss_legendre::<f64>(20);
    DMatrix::from_fn(nodes.len(), nodes.len(), |i, j| {
        p.iter().zip(&w).map(|(&x, &w)| w * poly_deriv(&c[i], x, 0) * poly_deriv(&c[j], x, 0)).sum()
    })
}

/// `h⁻¹ Σ_m j_m j_mᵀ / (m!)²` on the two-cell patch with the shared node once.
pub fn ghost_oracle(nodes: &[f64], h: f64) -> DMatrix<f64> {
    let k = nodes.len() - 1;
    let c = lagrange_coeffs(nodes);
    let mut g = DMatrix::zeros(2 * k + 1, 2 * k + 1);
    for m in 0..=k {
        let mut j = DVector::<f64>::zeros(2 * k + 1);
        for i in 0..=k {
            j[i] -= poly_deriv(&c[i], 1.0, m);
            j[k + i] += poly_deriv(&c[i], 0.0, m);
        }
        g += &j * j.transpose() / (factorial(m).powi(2) * h);
    }
    g
}
