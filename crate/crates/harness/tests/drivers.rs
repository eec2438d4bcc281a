use std::collections::HashMap;
use std::process::Command as Process;

use cutfem::geometry::{classify_cells, CartesianMesh, Sphere};
use cutfem_harness::config::{Command, DomainKind, RunConfig, Solution};
use cutfem_harness::kernelbench::{self, Kernel};
use cutfem_harness::{breakdown, convergence, multiballs};

fn small_convergence(meshes: usize) -> RunConfig {
    let mut cfg = RunConfig::new(Command::Convergence);
    cfg.degrees = vec![1, 2];
    cfg.refinements = meshes;
    cfg
}

/// `data-row` value → number of elements carrying it.
fn row_refs(svg: &str) -> HashMap<usize, usize> {
    let doc = roxmltree::Document::parse(svg).expect("valid XML");
    let mut refs = HashMap::new();
    for n in doc.descendants().filter(|n| n.is_element()) {
        if let Some(r) = n.attribute("data-row") {
            *refs.entry(r.parse().unwrap()).or_insert(0) += 1;
        }
    }
    refs
}

fn assert_each_row_once(svg: &str, n_rows: usize) {
    let refs = row_refs(svg);
    assert_eq!(refs.len(), n_rows);
    for i in 0..n_rows {
        assert_eq!(refs.get(&i), Some(&1), "row {i}");
    }
}

#[test]
fn convergence_csv_and_plot_cover_every_row() {
    let rows = convergence::run(&small_convergence(3)).unwrap();
    let csv = convergence::to_csv(&rows).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,refinement,h,n_dofs,iterations,l2_error,rate");
    assert_eq!(lines.len(), 7);
    assert!(!csv.contains('\r'));
    assert_each_row_once(&convergence::to_svg(&rows), 6);
    // parsed values round-trip exactly
    let h: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(h, rows[1].h);
}

#[test]
fn single_mesh_leaves_rate_empty() {
    let rows = convergence::run(&small_convergence(1)).unwrap();
    for line in convergence::to_csv(&rows).unwrap().lines().skip(1) {
        assert!(line.ends_with(','), "{line}");
    }
}

#[test]
fn unconverged_rows_keep_a_plot_marker() {
    let mut cfg = small_convergence(2);
    cfg.max_iter = Some(2);
    let rows = convergence::run(&cfg).unwrap();
    assert!(rows.iter().all(|r| !r.converged() && r.rate.is_none() && r.iterations == 2));
    assert_each_row_once(&convergence::to_svg(&rows), rows.len());
}

#[test]
fn linear_rate_approaches_two() {
    let mut cfg = RunConfig::new(Command::Convergence);
    cfg.degrees = vec![1];
    cfg.refinements = 5;
    let rows = convergence::run(&cfg).unwrap();
    let rate = rows[4].rate.unwrap();
    assert!((rate - 2.0).abs() <= 0.3, "{rate}");
}

#[test]
fn convergence_rerun_is_identical() {
    let cfg = small_convergence(2);
    let a = convergence::to_csv(&convergence::run(&cfg).unwrap()).unwrap();
    let b = convergence::to_csv(&convergence::run(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn breakdown_sums_to_one_hundred_and_plots_each_component() {
    let mut cfg = RunConfig::new(Command::Breakdown);
    cfg.cells = 6;
    cfg.degrees = vec![2];
    cfg.repetitions = 5;
    let rows = breakdown::run(&cfg).unwrap();
    let sum: f64 = rows[0].breakdown.percentages().iter().sum();
    assert!((sum - 100.0).abs() <= 0.5, "{sum}");
    let svg = breakdown::to_svg(&rows[0]);
    assert_each_row_once(&svg, rows[0].breakdown.to_csv().lines().count() - 1);
}

#[test]
fn all_inside_domain_has_no_cut_or_ghost_time() {
    let mut cfg = RunConfig::new(Command::Breakdown);
    cfg.domain = DomainKind::HalfSpace;
    cfg.offset = 10.0;
    cfg.cells = 4;
    cfg.degrees = vec![1];
    cfg.repetitions = 3;
    let p = breakdown::run(&cfg).unwrap()[0].breakdown.percentages();
    assert_eq!(p[1], 0.0);
    assert_eq!(p[2], 0.0);
}

#[test]
fn multiball_rows_and_degenerate_domains() {
    let mut cfg = RunConfig::new(Command::Multiballs);
    cfg.dim = 2;
    cfg.cells = 12;
    cfg.balls = vec![1, 3, 5];
    cfg.repetitions = 3;
    let rows = multiballs::run(&cfg).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.cut_fraction));
        assert!(r.dofs_per_second.unwrap() > 0.0);
    }
    assert!(multiballs::to_csv(&rows).unwrap().starts_with("n_balls,seed,k,n_dofs,cut_fraction,dofs_per_second\n"));

    // balls far smaller than the classification sample spacing
    cfg.r0 = 1e-9;
    cfg.balls = vec![1];
    let rows = multiballs::run(&cfg).unwrap();
    assert_eq!(rows[0].n_dofs, 0);
    assert!(rows[0].dofs_per_second.is_none());
    assert!(multiballs::to_csv(&rows).unwrap().lines().nth(1).unwrap().ends_with(','));
}

#[test]
fn single_ball_on_fine_mesh_is_mostly_uncut() {
    let mesh = CartesianMesh::cube(2, -1.26, 1.26, 64).unwrap();
    let class = classify_cells(&mesh, &Sphere::new(vec![0.0, 0.0], 1.0), 4);
    assert!(class.cut_fraction() < 0.15, "{}", class.cut_fraction());
}

#[test]
fn kernel_times_are_normalized_by_the_first_cell_kernel() {
    let mut cfg = RunConfig::new(Command::Kernelbench);
    cfg.repetitions = 20;
    let rows = kernelbench::run(&cfg).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!((rows[0].k, rows[0].kernel, rows[0].relative), (1, Kernel::SumFactorized, 1.0));
    assert!(rows.iter().all(|r| r.microseconds > 0.0));
    assert!(kernelbench::to_csv(&rows).unwrap().starts_with("dim,k,kernel,microseconds,relative\n"));
}

fn cli(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_cutfem")).args(args).output().unwrap()
}

#[test]
fn cli_writes_files_and_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "degrees = 1\nrefinements = 4\nsolution = quadratic\n").unwrap();
    let o = cli(&["convergence", "--config", conf.to_str().unwrap(), "--refinements", "2", "--output", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("convergence_2d.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().all(|l| l.starts_with('k') || l.starts_with("1,")));
    let svg = std::fs::read_to_string(dir.path().join("convergence_2d.svg")).unwrap();
    assert_each_row_once(&svg, 2);

    assert_eq!(cli(&["convergence", "--degrees", "7"]).status.code(), Some(2));
    assert_eq!(cli(&["convergence", "--dim", "x"]).status.code(), Some(2));
    assert_eq!(cli(&["convergence", "--colour", "red"]).status.code(), Some(2));
    std::fs::write(&conf, "refinements 2\n").unwrap();
    assert_eq!(cli(&["convergence", "--config", conf.to_str().unwrap()]).status.code(), Some(2));

    let args = ["convergence", "--degrees", "1", "--refinements", "1", "--max-iter", "3", "--output", out];
    assert_eq!(cli(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(cli(&strict).status.code(), Some(3));
}

#[test]
fn biquadratic_solution_is_reproduced_up_to_cut_quadrature() {
    let mut cfg = small_convergence(2);
    cfg.degrees = vec![2];
    cfg.solution = Solution::Quadratic;
    cfg.tol = 1e-12;
    let coarse = convergence::run(&cfg).unwrap();
    cfg.cut_order = Some(8);
    let fine = convergence::run(&cfg).unwrap();
    // u is in Q_2: what remains is the geometry error of the cut-cell rules
    for (c, f) in coarse.iter().zip(&fine) {
        assert!(f.l2_error.unwrap() < 1e-10, "{f:?}");
        assert!(f.l2_error.unwrap() < 1e-4 * c.l2_error.unwrap());
    }
}
