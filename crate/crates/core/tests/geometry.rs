use std::collections::HashSet;

use cutfem::geometry::{
    classify_cells, ghost_faces, random_balls, CartesianMesh, CellClassification, CellLabel, DofMap, LevelSet, Sphere,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Labels from a dense `m × m` grid of samples per cell.
fn dense_labels(mesh: &CartesianMesh<f64>, phi: &dyn LevelSet<f64>, m: usize) -> Vec<CellLabel> {
    (0..mesh.n_cells())
        .map(|c| {
            let (lo, hi) = mesh.cell_box(c);
            let (mut pos, mut neg) = (false, false);
            for i in 0..m {
                for j in 0..m {
                    let x = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / (m - 1) as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / (m - 1) as f64,
                    ];
                    if phi.value(&x) >= 0.0 {
                        pos = true;
                    } else {
                        neg = true;
                    }
                }
            }
            match (pos, neg) {
                (true, true) => CellLabel::Cut,
                (true, false) => CellLabel::Inside,
                _ => CellLabel::Outside,
            }
        })
        .collect()
}

#[test]
fn circle_labels_match_dense_sampling() {
    let mesh = CartesianMesh::cube(2, -1.26, 1.26, 6).unwrap();
    let phi = Sphere::new(vec![0.0, 0.0], 1.0);
    let class = classify_cells(&mesh, &phi, 4);
    assert_eq!(class.labels(), dense_labels(&mesh, &phi, 100).as_slice());
}

/// Active global DoFs recomputed from grid coordinates: a grid point is
/// active when some non-outside cell contains it.
fn brute_force_active(mesh: &CartesianMesh<f64>, k: usize, class: &CellClassification) -> Vec<usize> {
    let cells = mesh.cells_per_axis();
    let ext: Vec<usize> = cells.iter().map(|&n| k * n + 1).collect();
    let total: usize = ext.iter().product();
    let mut out = Vec::new();
    for g in 0..total {
        let (mut r, mut gi) = (g, Vec::new());
        for &e in &ext {
            gi.push(r % e);
            r /= e;
        }
        let touches = (0..mesh.n_cells()).any(|c| {
            if class.label(c) == CellLabel::Outside {
                return false;
            }
            let (mut r, mut ok) = (c, true);
            for (a, &n) in cells.iter().enumerate() {
                let ci = r % n;
                r /= n;
                ok &= k * ci <= gi[a] && gi[a] <= k * (ci + 1);
            }
            ok
        });
        if touches {
            out.push(g);
        }
    }
    out
}

fn random_classification(n: usize, rng: &mut ChaCha8Rng) -> CellClassification {
    let labels = (0..n)
        .map(|_| match rng.random_range(0..3) {
            0 => CellLabel::Inside,
            1 => CellLabel::Cut,
            _ => CellLabel::Outside,
        })
        .collect();
    CellClassification::from_labels(labels)
}

#[test]
fn face_patches_match_coordinate_lookup() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (dim, k) in [(2, 1), (2, 3), (3, 2)] {
        let mesh = CartesianMesh::new(vec![0.0; dim], [4, 3, 3][..dim].to_vec(), vec![0.5; dim]).unwrap();
        let class = random_classification(mesh.n_cells(), &mut rng);
        let dm = DofMap::new(&mesh, k, &class);
        let active = brute_force_active(&mesh, k, &class);
        assert_eq!(dm.n_active(), active.len());
        let step = 0.5 / k as f64;
        for axis in 0..dim {
            for lower in 0..mesh.n_cells() {
                let Some(upper) = mesh.upper_neighbor(lower, axis) else { continue };
                if class.label(lower) == CellLabel::Outside || class.label(upper) == CellLabel::Outside {
                    continue;
                }
                let face = cutfem::geometry::GhostFace { axis, lower, upper };
                let dofs = dm.face_dofs(&face).unwrap();
                let ext = dm.face_extents(axis);
                let (lo, _) = mesh.cell_box(lower);
                for (l, &got) in dofs.iter().enumerate() {
                    let (mut r, mut g, mut stride) = (l, 0, 1);
                    for a in 0..dim {
                        let x = lo[a] + step * (r % ext[a]) as f64;
                        r /= ext[a];
                        g += (x / step).round() as usize * stride;
                        stride *= dm.extents()[a];
                    }
                    assert_eq!(active.binary_search(&g), Ok(got));
                }
            }
        }
    }
}

#[test]
fn gather_then_scatter_round_trips() {
    let mesh = CartesianMesh::cube(2, 0.0, 1.0, 4).unwrap();
    let phi = Sphere::new(vec![0.5, 0.5], 0.4);
    let class = classify_cells(&mesh, &phi, 4);
    let dm = DofMap::new(&mesh, 2, &class);
    let u: Vec<f64> = (0..dm.n_active()).map(|i| i as f64).collect();
    for face in ghost_faces(&mesh, &class) {
        let patch = dm.gather_face_patch(&u, &face).unwrap();
        let mut w = vec![0.0; dm.n_active()];
        dm.scatter_add_face_patch(&patch, &face, &mut w).unwrap();
        for (&i, &v) in dm.face_dofs(&face).unwrap().iter().zip(patch.data()) {
            assert_eq!(v, u[i]);
            assert_eq!(w[i], u[i]);
        }
    }
}

#[test]
fn active_count_never_grows_when_cells_leave() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mesh = CartesianMesh::cube(2, 0.0, 1.0, 6).unwrap();
    for k in 1..=3 {
        let mut labels = random_classification(mesh.n_cells(), &mut rng).labels().to_vec();
        let mut prev = DofMap::new(&mesh, k, &CellClassification::from_labels(labels.clone())).n_active();
        for _ in 0..20 {
            let c = rng.random_range(0..labels.len());
            labels[c] = CellLabel::Outside;
            let n = DofMap::new(&mesh, k, &CellClassification::from_labels(labels.clone())).n_active();
            assert!(n <= prev);
            prev = n;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ghost_faces_on_random_balls(n in 1usize..12, seed in 0u64..1000, dim in 2usize..=3) {
        let cells = if dim == 2 { 16 } else { 8 };
        let mesh = CartesianMesh::cube(dim, -1.0, 1.0, cells).unwrap();
        let phi = random_balls::<f64>(n, seed, 1.2, -1.0, 1.0, dim);
        let class = classify_cells(&mesh, &phi, 4);
        let faces = ghost_faces(&mesh, &class);
        let mut seen = HashSet::new();
        for f in &faces {
            prop_assert!(seen.insert((f.axis, f.lower.min(f.upper), f.lower.max(f.upper))));
            prop_assert_eq!(mesh.upper_neighbor(f.lower, f.axis), Some(f.upper));
            let (a, b) = (class.label(f.lower), class.label(f.upper));
            prop_assert!(a == CellLabel::Cut || b == CellLabel::Cut);
            prop_assert!(a != CellLabel::Outside && b != CellLabel::Outside);
        }
        prop_assert!(faces.windows(2).all(|w| (w[0].axis, w[0].lower) < (w[1].axis, w[1].lower)));
        // every stabilizable face is listed
        let mut expected = 0;
        for axis in 0..dim {
            for lower in 0..mesh.n_cells() {
                if let Some(upper) = mesh.upper_neighbor(lower, axis) {
                    let (a, b) = (class.label(lower), class.label(upper));
                    if a != CellLabel::Outside && b != CellLabel::Outside && (a == CellLabel::Cut || b == CellLabel::Cut) {
                        expected += 1;
                    }
                }
            }
        }
        prop_assert_eq!(faces.len(), expected);
        prop_assert!((0.0..=1.0).contains(&class.cut_fraction()));
    }
}
