//! Domains and manufactured solutions used by the drivers.

use std::f64::consts::PI;
use std::sync::Arc;

use cutfem::geometry::{random_balls, CartesianMesh, HalfSpace, LevelSet, Sphere};
use cutfem::operator::{OperatorContext, Parameters};
use cutfem::solver::manufactured_problem;

use crate::config::{DomainKind, RunConfig, Solution};
use crate::Error;

/// Exact solution and source term of `−Δu = f` on the unit ball.
#[derive(Clone, Copy, Debug)]
pub struct Manufactured {
    pub kind: Solution,
    pub dim: usize,
}

impl Manufactured {
    pub fn new(kind: Solution, dim: usize) -> Self {
        Self { kind, dim }
    }

    pub fn u(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().map(|v| v * v).sum();
        match self.kind {
            Solution::Quadratic => manufactured_problem::<f64>(self.dim).map_or(f64::NAN, |m| m.u(x)),
            Solution::Smooth => (0.5 * PI * s).cos(),
        }
    }

    pub fn f(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().map(|v| v * v).sum();
        match self.kind {
            Solution::Quadratic => 4.0,
            Solution::Smooth => PI * self.dim as f64 * (0.5 * PI * s).sin() + PI * PI * s * (0.5 * PI * s).cos(),
        }
    }
}

/// `[−w, w]^dim` split into `cells` cells per axis.
pub fn box_mesh(dim: usize, half_width: f64, cells: usize) -> Result<CartesianMesh<f64>, Error> {
    Ok(CartesianMesh::cube(dim, -half_width, half_width, cells)?)
}

/// Level set of the configured domain; `n_balls` applies to `balls` only.
pub fn level_set(cfg: &RunConfig, n_balls: usize) -> Arc<dyn LevelSet<f64>> {
    let d = cfg.dim;
    match cfg.domain {
        DomainKind::Ball => Arc::new(Sphere::new(vec![0.0; d], 1.0)),
        DomainKind::Balls => Arc::new(random_balls::<f64>(n_balls, cfg.seed, cfg.r0, -cfg.half_width, cfg.half_width, d)),
        DomainKind::HalfSpace => {
            let mut normal = vec![0.0; d];
            normal[0] = 1.0;
            Arc::new(HalfSpace::new(normal, cfg.offset))
        }
    }
}

/// Operator parameters for degree `k` with the configured overrides.
pub fn parameters(cfg: &RunConfig, k: usize) -> Parameters<f64> {
    let mut p = Parameters::new(k);
    if let Some(g) = cfg.gamma_a {
        p.gamma_a = g;
    }
    if let Some(g) = cfg.gamma_d {
        p.gamma_d = g;
    }
    if let Some(q) = cfg.cut_order {
        p.cut_order = q;
    }
    if let Some(q) = cfg.error_order {
        p.error_order = q;
    }
    p.workers = cfg.workers;
    p
}

pub fn context(
    cfg: &RunConfig,
    k: usize,
    cells: usize,
    phi: Arc<dyn LevelSet<f64>>,
) -> Result<OperatorContext<f64>, Error> {
    let mesh = box_mesh(cfg.dim, cfg.half_width, cells)?;
    Ok(OperatorContext::new(mesh, phi, parameters(cfg, k))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Second differences of `u` reproduce `f`.
    #[test]
    fn smooth_source_matches_laplacian() {
        for dim in [2, 3] {
            let m = Manufactured::new(Solution::Smooth, dim);
            let x: Vec<f64> = [0.3, -0.45, 0.2][..dim].to_vec();
            let h = 1e-4;
            let mut lap = 0.0;
            for a in 0..dim {
                let (mut p, mut q) = (x.clone(), x.clone());
                p[a] += h;
                q[a] -= h;
                lap += (m.u(&p) - 2.0 * m.u(&x) + m.u(&q)) / (h * h);
            }
            assert!((-lap - m.f(&x)).abs() < 1e-5, "{} vs {}", -lap, m.f(&x));
        }
    }

    #[test]
    fn both_solutions_vanish_on_the_unit_sphere() {
        for kind in [Solution::Smooth, Solution::Quadratic] {
            let m = Manufactured::new(kind, 3);
            let x = [0.6, 0.0, 0.8];
            assert!(m.u(&x).abs() < 1e-15);
        }
    }
}
