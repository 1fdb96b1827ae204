use num_complex::Complex64;
use std::sync::Arc;
use thermolab::differentials::AutomorphicForm;
use thermolab::geometry::{FuchsianGroup, Octagon};
use thermolab::vortex::io::{read_mesh, write_mesh};
use thermolab::vortex::{build_mesh, curvature_eval, nodal_alpha, solve_dirichlet, solve_vortex, Mesh};

fn manufactured(z: Complex64) -> f64 {
    0.5 + 0.2 * z.re * z.re - 0.1 * z.im * z.im + 0.15 * z.re * z.im
}

/// Data `α` for which `manufactured` solves the degree-`m` equation on the disk.
fn manufactured_alpha(m: u32) -> impl Fn(Complex64) -> f64 {
    let mf = f64::from(m);
    move |z: Complex64| {
        let u = manufactured(z);
        // Euclidean Laplacian 0.2, scaled by the hyperbolic density.
        let laplacian = (1.0 - z.norm_sqr()).powi(2) / 4.0 * 0.2;
        ((2.0 * u).exp() - 1.0 - laplacian) * (2.0 * (mf - 1.0) * u).exp() / (mf - 1.0)
    }
}

/// Nodal error in the hyperbolic L² norm, triangle-wise vertex quadrature.
fn l2_error(mesh: &Mesh, values: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let centroid = tri.iter().map(|&v| mesh.vertices[v]).sum::<Complex64>() / 3.0;
        let density = 4.0 / (1.0 - centroid.norm_sqr()).powi(2);
        let area = 0.5 * mesh.signed_area2(t).abs() * density;
        let e2: f64 = tri.iter().map(|&v| (values(v) - manufactured(mesh.vertices[v])).powi(2)).sum();
        sum += area * e2 / 3.0;
    }
    sum.sqrt()
}

#[test]
fn constant_alpha_has_closed_form() {
    let group = FuchsianGroup::bolza();
    let mesh = Arc::new(build_mesh(&group, 0.2).unwrap());
    let alpha = vec![3.0; mesh.class_count()];
    let sol = solve_vortex(&group, mesh, alpha, 2, 1e-12).unwrap();
    let exact = 0.5 * ((1.0 + 13f64.sqrt()) / 2.0).ln();
    let (lo, hi) = sol.range();
    assert!((lo - exact).abs() < 1e-10 && (hi - exact).abs() < 1e-10, "{lo} {hi} vs {exact}");
}

#[test]
fn zero_alpha_gives_hyperbolic_metric() {
    let group = FuchsianGroup::bolza();
    let mesh = Arc::new(build_mesh(&group, 0.2).unwrap());
    let alpha = vec![0.0; mesh.class_count()];
    let sol = solve_vortex(&group, mesh, alpha, 3, 1e-10).unwrap();
    assert_eq!(sol.range(), (0.0, 0.0));
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let m = 2;
    let errors: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&rings| {
            let mesh = Arc::new(Mesh::geodesic_disk(2.0, rings));
            let sol = solve_dirichlet(mesh.clone(), m, manufactured_alpha(m), manufactured, 1e-12).unwrap();
            l2_error(&mesh, |v| sol.vertex_value(v))
        })
        .collect();
    for pair in errors.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!(order > 1.8, "{errors:?}");
    }
}

#[test]
fn solution_is_periodic_and_bounded() {
    let group = FuchsianGroup::bolza();
    let form = AutomorphicForm::new(&group, 3, &[Complex64::new(1.0, 0.0)], 5).unwrap();
    let mesh = Arc::new(build_mesh(&group, 0.1).unwrap());
    let alpha = nodal_alpha(&mesh, &form).unwrap();
    let sol = solve_vortex(&group, mesh, alpha, 3, 1e-10).unwrap();
    assert!(sol.residual_norm() <= 1e-10);
    let trace = sol.residual_trace();
    assert!(trace.last().unwrap() < trace.first().unwrap());
    // The maximum principle gives u > 0 wherever the solution is not identically zero.
    let (lo, hi) = sol.range();
    assert!(lo > 0.0 && hi < 0.1, "{lo} {hi}");
    let z = Octagon::side_point(5, 0.35) * 0.97;
    let g = group.generator(1);
    let a = sol.eval(z).unwrap();
    let b = sol.eval(g.apply(z)).unwrap();
    assert!((a.u - b.u).abs() < 1e-12);
}

#[test]
fn curvature_routes_agree_and_refine() {
    let group = FuchsianGroup::bolza();
    let form = AutomorphicForm::new(&group, 2, &[Complex64::new(1.0, 0.0)], 5).unwrap();
    let points: Vec<Complex64> = (0..8).map(|k| Octagon::side_point(k, 0.3) * (0.3 + 0.08 * k as f64)).collect();
    let gap = |h: f64| {
        let mesh = Arc::new(build_mesh(&group, h).unwrap());
        let alpha = nodal_alpha(&mesh, &form).unwrap();
        let sol = solve_vortex(&group, mesh, alpha, 2, 1e-11).unwrap();
        points
            .iter()
            .map(|&z| {
                let (k_alg, k_mesh) = curvature_eval(&sol, &form, z).unwrap();
                assert!((-1.0..0.0).contains(&k_alg));
                (k_alg - k_mesh).abs()
            })
            .fold(0.0, f64::max)
    };
    let coarse = gap(0.2);
    let fine = gap(0.1);
    assert!(fine < 1e-3 && fine < coarse / 2.5, "{coarse:e} -> {fine:e}");
}

#[test]
fn mesh_file_round_trip() {
    let group = FuchsianGroup::bolza();
    let mesh = build_mesh(&group, 0.2).unwrap();
    let text = write_mesh(&mesh, None);
    let (parsed, file) = read_mesh(&group, &text).unwrap();
    assert_eq!(parsed.vertices.len(), mesh.vertices.len());
    assert_eq!(parsed.triangles, mesh.triangles);
    assert_eq!(file.triangles.len(), mesh.triangles.len());
    assert_eq!(write_mesh(&parsed, None), text);
}

#[test]
fn invalid_data_is_rejected() {
    let group = FuchsianGroup::bolza();
    let mesh = Arc::new(build_mesh(&group, 0.2).unwrap());
    let mut alpha = vec![0.1; mesh.class_count()];
    alpha[3] = -1.0;
    assert_eq!(solve_vortex(&group, mesh.clone(), alpha, 2, 1e-10).unwrap_err().exit_code(), 4);
    let alpha = vec![0.1; mesh.class_count()];
    assert_eq!(solve_vortex(&group, mesh, alpha, 1, 1e-10).unwrap_err().exit_code(), 2);
    assert!(build_mesh(&group, -0.1).is_err());
}
