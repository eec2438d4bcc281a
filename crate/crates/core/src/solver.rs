//! Unpreconditioned conjugate gradients and L² error evaluation.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::operator::OperatorContext;
use crate::scalar::{dot, Real};

/// Anything that can compute `w = A u` on vectors of a fixed length.
pub trait LinearOperator<T> {
    fn len(&self) -> usize;
    fn apply(&self, u: &[T], w: &mut [T]) -> Result<()>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<T: Real> LinearOperator<T> for OperatorContext<T> {
    fn len(&self) -> usize {
        self.n_active()
    }

    fn apply(&self, u: &[T], w: &mut [T]) -> Result<()> {
        self.vmult(u, w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<T> {
    pub iterations: usize,
    pub relative_residual: f64,
    pub solution: Vec<T>,
    pub wall_time: f64,
    /// `‖r_j‖ / ‖b‖` for j = 0..=iterations.
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

/// `20 √n + 1000`.
pub fn default_max_iter(n: usize) -> usize {
    (20.0 * (n as f64).sqrt()) as usize + 1000
}

/// Solves `A x = b` from `x = 0`, stopping at `‖r‖ ≤ tol ‖b‖`.
pub fn cg_solve<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[T],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport<T>> {
    let report = cg_run(op, b, tol, max_iter)?;
    if !report.converged {
        return Err(Error::NotConverged {
            iterations: report.iterations,
            relative_residual: report.relative_residual,
            history: report.residual_history,
        });
    }
    Ok(report)
}

/// Like [`cg_solve`] but returns the last iterate when `max_iter` is hit.
pub fn cg_run<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[T],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport<T>> {
    let n = op.len();
    if b.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: b.len() });
    }
    let start = Instant::now();
    let mut x = vec![T::zero(); n];
    let bnorm = dot(b, b).sqrt().as_f64();
    if bnorm == 0.0 {
        return Ok(SolveReport {
            iterations: 0,
            relative_residual: 0.0,
            solution: x,
            wall_time: start.elapsed().as_secs_f64(),
            residual_history: vec![0.0],
            converged: true,
        });
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![T::zero(); n];
    let mut rr = dot(&r, &r);
    let mut history = vec![rr.sqrt().as_f64() / bnorm];
    let mut it = 0;
    while *history.last().unwrap() > tol && it < max_iter {
        op.apply(&p, &mut ap)?;
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        it += 1;
        history.push(rr.sqrt().as_f64() / bnorm);
    }
    let relative_residual = *history.last().unwrap();
    Ok(SolveReport {
        iterations: it,
        relative_residual,
        solution: x,
        wall_time: start.elapsed().as_secs_f64(),
        residual_history: history,
        converged: relative_residual <= tol,
    })
}

/// `‖u_h − u‖_{L²(Ω)}` with the context's error quadrature order.
pub fn l2_error<T: Real>(ctx: &OperatorContext<T>, u_h: &[T], u_exact: &dyn Fn(&[T]) -> T) -> Result<f64> {
    l2_error_with_order(ctx, u_h, u_exact, ctx.params().error_order)
}

pub fn l2_error_with_order<T: Real>(
    ctx: &OperatorContext<T>,
    u_h: &[T],
    u_exact: &dyn Fn(&[T]) -> T,
    order: usize,
) -> Result<f64> {
    if u_h.len() != ctx.n_active() {
        return Err(Error::SizeMismatch { expected: ctx.n_active(), found: u_h.len() });
    }
    let degree = ctx.params().degree;
    if order < degree + 2 {
        return Err(Error::QuadratureTooLow { degree, points: order });
    }
    let dim = ctx.mesh().dim();
    let nl = ctx.n_local();
    let mut sum = 0.0f64;
    for (cell, pts, wts) in ctx.domain_quadrature(order)? {
        let dofs = ctx.cell_dofs(cell)?;
        let vals = ctx.cell_basis_values(cell, &pts);
        for (p, &w) in wts.iter().enumerate() {
            let uh: T = (0..nl).map(|i| vals[p * nl + i] * u_h[dofs[i]]).sum();
            let e = (uh - u_exact(&pts[p * dim..(p + 1) * dim])).as_f64();
            sum += e * e * w.as_f64();
        }
    }
    Ok(sum.sqrt())
}

/// Exact solution and source of the model problem on the unit ball.
pub struct Manufactured<T> {
    pub dim: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real> Manufactured<T> {
    /// `u = −(2/d)(|x|² − 1)`.
    pub fn u(&self, x: &[T]) -> T {
        let r2: T = x.iter().map(|&v| v * v).sum();
        -(T::lit(2.0) / T::from_usize_lossy(self.dim)) * (r2 - T::one())
    }

    /// `f = −Δu = 4`.
    pub fn f(&self, _x: &[T]) -> T {
        T::lit(4.0)
    }
}

pub fn manufactured_problem<T: Real>(dim: usize) -> Result<Manufactured<T>> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Dimension(dim));
    }
    Ok(Manufactured { dim, _marker: std::marker::PhantomData })
}
