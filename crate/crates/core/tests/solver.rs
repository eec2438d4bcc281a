use std::f64::consts::PI;
use std::sync::Arc;

use cutfem::geometry::{CartesianMesh, Sphere};
use cutfem::operator::{OperatorContext, Parameters};
use cutfem::solver::{cg_run, cg_solve, default_max_iter, l2_error, manufactured_problem, LinearOperator};

fn ball(dim: usize, k: usize, n: usize) -> OperatorContext<f64> {
    let mesh = CartesianMesh::cube(dim, -1.26, 1.26, n).unwrap();
    OperatorContext::new(mesh, Arc::new(Sphere::new(vec![0.0; dim], 1.0)), Parameters::new(k)).unwrap()
}

#[test]
fn interpolant_of_tensor_polynomial_has_no_error() {
    for k in 1..=3 {
        let ctx = ball(2, k, 7);
        let p = move |x: &[f64]| (1.0 + x[0] - 0.5 * x[0].powi(k as i32)) * (2.0 - x[1].powi(k as i32));
        let u = ctx.interpolate(&p);
        assert!(l2_error(&ctx, &u, &p).unwrap() <= 1e-12);
    }
}

#[test]
fn constant_offset_measures_the_disk() {
    let ctx = ball(2, 2, 24);
    let p = |x: &[f64]| x[0] * x[1];
    let c = 0.3;
    let u: Vec<f64> = ctx.interpolate(&p).iter().map(|v| v + c).collect();
    let e = l2_error(&ctx, &u, &p).unwrap();
    assert!((e - c * PI.sqrt()).abs() <= 1e-8, "{e}");
}

#[test]
fn zero_against_one_measures_the_sphere() {
    let ctx = ball(3, 1, 12);
    let e = l2_error(&ctx, &vec![0.0; ctx.n_active()], &|_| 1.0).unwrap();
    assert!((e - (4.0 * PI / 3.0).sqrt()).abs() <= 1e-5, "{e}");
}

#[test]
fn low_error_order_is_rejected() {
    let ctx = ball(2, 2, 6);
    let u = vec![0.0; ctx.n_active()];
    assert!(cutfem::solver::l2_error_with_order(&ctx, &u, &|_| 0.0, 3).is_err());
    assert!(cutfem::solver::l2_error_with_order(&ctx, &u, &|_| 0.0, 4).is_ok());
}

#[test]
fn interpolation_error_converges_at_k_plus_one() {
    let u = |x: &[f64]| (PI * x[0]).sin() * (0.5 * PI * x[1]).cos() + x[0] * x[1];
    for k in 1..=3 {
        let errs: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| {
                let ctx = ball(2, k, n);
                l2_error(&ctx, &ctx.interpolate(&u), &u).unwrap()
            })
            .collect();
        let rate = (errs[1] / errs[2]).log2();
        assert!(rate >= k as f64 + 0.7, "k={k}: {errs:?}");
    }
}

#[test]
fn cg_error_decreases_in_energy_norm() {
    let ctx = ball(2, 2, 8);
    let m = manufactured_problem::<f64>(2).unwrap();
    let b = ctx.assemble_rhs(&|x| m.f(x), None);
    let exact = cg_solve(&ctx, &b, 1e-14, default_max_iter(ctx.len())).unwrap().solution;
    let energy = |x: &[f64]| {
        let d: Vec<f64> = x.iter().zip(&exact).map(|(a, b)| a - b).collect();
        let mut ad = vec![0.0; d.len()];
        ctx.apply(&d, &mut ad).unwrap();
        d.iter().zip(&ad).map(|(a, b)| a * b).sum::<f64>().sqrt()
    };
    let mut prev = f64::INFINITY;
    for it in 1..40 {
        let r = cg_run(&ctx, &b, 0.0, it).unwrap();
        assert!(!r.converged);
        let e = energy(&r.solution);
        assert!(e <= prev * (1.0 + 1e-12), "iteration {it}");
        prev = e;
    }
}

#[test]
fn residual_envelope_reaches_tolerance() {
    let ctx = ball(2, 1, 16);
    let m = manufactured_problem::<f64>(2).unwrap();
    let b = ctx.assemble_rhs(&|x| m.f(x), None);
    let r = cg_solve(&ctx, &b, 1e-8, default_max_iter(ctx.len())).unwrap();
    assert!(r.converged && r.relative_residual <= 1e-8);
    assert_eq!(r.residual_history.len(), r.iterations + 1);
    // best-so-far residual after the first few steps never stalls for long
    let best: Vec<f64> = r.residual_history.iter().scan(f64::INFINITY, |m, &v| {
        *m = m.min(v);
        Some(*m)
    }).collect();
    for w in best[3..].windows(50) {
        assert!(w[49] < w[0]);
    }
}

#[test]
fn linear_disk_solution_converges_at_second_order() {
    let m = manufactured_problem::<f64>(2).unwrap();
    let errs: Vec<f64> = [12, 24]
        .iter()
        .map(|&n| {
            let ctx = ball(2, 1, n);
            let b = ctx.assemble_rhs(&|x| m.f(x), None);
            let r = cg_solve(&ctx, &b, 1e-10, default_max_iter(ctx.len())).unwrap();
            l2_error(&ctx, &r.solution, &|x| m.u(x)).unwrap()
        })
        .collect();
    assert!((errs[0] / errs[1]).log2() >= 1.7, "{errs:?}");
}
