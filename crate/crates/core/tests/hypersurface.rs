use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use wulffkit::hypersurface::{
    anisotropic_gauss, camc_check, circle, cube, curvature_csv, curvature_field, curvature_field_unchecked,
    edge_condition, ellipse, ellipsoid, fundamental_forms, graph, graph_amc, hemispheres, normal, parse_tabulated,
    shape_operator, sphere, star_shaped, tabulated_csv, torus, two_arcs, wulff_boundary, Axis, GraphGrid, Mode,
    ParametricPatch, PiecewiseHypersurface,
};
use wulffkit::integrand::{gallery, params, Integrand};
use wulffkit::wulff::xi;
use wulffkit::{Error, Vec3};

fn constant(n: usize) -> Integrand {
    Integrand::constant(n).unwrap()
}

fn reilly(a: [f64; 3]) -> Integrand {
    gallery("reilly", &params(&[("a", &a)])).unwrap()
}

fn lm(m: f64, n: f64) -> Integrand {
    gallery("lm", &params(&[("m", &[m]), ("n", &[n])])).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn normals_are_outward() {
    let c = circle(1.0, 32).unwrap();
    let p = &c.patches[0];
    for i in [0, 5, 17] {
        assert!((normal(p, i).unwrap() - p.points[i]).norm() < 1e-12);
    }
    let s = sphere(1.0, 12).unwrap();
    let p = &s.patches[0];
    for i in [0, 40, 150] {
        assert!((normal(p, i).unwrap() - p.points[i]).norm() < 1e-12);
    }
    let f = |x: f64, y: f64| 0.3 * x * x - 0.2 * x * y + 0.1 * y;
    let gr = graph(f, (-1.0, 1.0), (-1.0, 1.0), 21).unwrap();
    let p = &gr.patches[0];
    let i = p.flat_index(&[7, 13]);
    let u = p.parameters(i);
    let expect = Vec3::new(-(0.6 * u[0] - 0.2 * u[1]), -(-0.2 * u[0] + 0.1), 1.0).normalize();
    assert!((normal(p, i).unwrap() - expect).norm() < 1e-12);
    let flipped = p.clone().with_orientation(false);
    assert!((normal(&flipped, i).unwrap() + expect).norm() < 1e-12);
}

#[test]
fn singular_nodes_are_rejected() {
    // A cone collapses at its apex.
    let axes = vec![Axis::open(9, 0.0, 1.0), Axis::periodic(16, 0.0, 2.0 * PI)];
    let p = ParametricPatch::sample("cone", axes, |u| Vec3::new(u[0] * u[1].cos(), u[0] * u[1].sin(), u[0])).unwrap();
    assert!(matches!(normal(&p, 0), Err(Error::SingularNode(0))));
    assert!(matches!(fundamental_forms(&p, 3), Err(Error::SingularNode(3))));
    assert!(normal(&p, 40).is_ok());
    assert!(matches!(normal(&p, 10_000), Err(Error::InvalidPatch(_))));
}

#[test]
fn fundamental_forms_of_round_objects() {
    let s = sphere(1.0, 16).unwrap();
    let p = &s.patches[0];
    for i in [3, 100, 333] {
        let ff = fundamental_forms(p, i).unwrap();
        assert!((&ff.h + &ff.g).norm() < 1e-10 * ff.g.norm());
        assert!((ff.g.clone() - ff.g.transpose()).norm() < 1e-14);
    }
    let c = circle(1.0, 32).unwrap();
    let ff = fundamental_forms(&c.patches[0], 4).unwrap();
    let kappa = ff.h[(0, 0)] / ff.g[(0, 0)];
    assert!(close(kappa, -1.0, 1e-12));
}

#[test]
fn cylinder_principal_curvatures() {
    let r = 0.7;
    let axes = vec![Axis::periodic(32, 0.0, 2.0 * PI), Axis::open(17, -1.0, 1.0)];
    let p = ParametricPatch::sample("cylinder", axes, |u| Vec3::new(r * u[0].cos(), r * u[0].sin(), u[1])).unwrap();
    let s = PiecewiseHypersurface::single(p);
    assert!(!s.is_closed());
    let field = curvature_field_unchecked(&constant(2), &s).unwrap();
    assert!(field.excluded.is_empty());
    for c in &field.nodes {
        let mut k: Vec<f64> = c.principal.iter().map(|z| z.re).collect();
        k.sort_by(f64::total_cmp);
        assert!(close(k[0], -1.0 / r, 1e-9) && close(k[1], 0.0, 1e-9), "{k:?}");
    }
}

#[test]
fn anisotropic_gauss_examples() {
    let s = sphere(2.0, 12).unwrap();
    let p = &s.patches[0];
    for i in [7, 90] {
        let x = anisotropic_gauss(&constant(2), p, i).unwrap();
        assert!((x - p.points[i] / 2.0).norm() < 1e-12);
        assert!((x - normal(p, i).unwrap()).norm() < 1e-12);
    }
    // Node 1 of the offset grid sits at θ = 3π/12 = π/4.
    let g = lm(2.0, 1.0);
    let w = wulff_boundary(&g, 12).unwrap();
    let p = &w.patches[0];
    assert!(close(p.parameters(1)[0], FRAC_PI_4, 1e-15));
    let x = anisotropic_gauss(&g, p, 1).unwrap();
    assert!((x - p.points[1]).norm() < 1e-14);
}

#[test]
fn shape_operator_examples() {
    for radius in [1.0, 2.5] {
        let s = sphere(radius, 16).unwrap();
        let sh = shape_operator(&constant(2), &s.patches[0], 77).unwrap();
        let expect = -DMatrix::identity(2, 2) / radius;
        assert!((sh - expect).norm() < 1e-10);
    }
    for (g, res) in [(reilly([1.0, 2.0, 3.0]), 32), (lm(2.0, 2.0), 32)] {
        let w = wulff_boundary(&g, res).unwrap();
        let p = &w.patches[0];
        for i in [5, 300, 1000, 1500] {
            let sh = shape_operator(&g, p, i).unwrap();
            assert!((sh + DMatrix::identity(2, 2)).norm() < 1e-6, "{} node {i}", g.name);
        }
    }
    let g = lm(3.0, 1.0);
    let w = wulff_boundary(&g, 64).unwrap();
    for i in [0, 9, 31] {
        assert!(close(shape_operator(&g, &w.patches[0], i).unwrap()[(0, 0)], -1.0, 1e-8));
    }
}

#[test]
fn shape_operator_rejects_non_smooth_normals() {
    let g = gallery("l1", &params(&[("n", &[1.0])])).unwrap();
    // The square's sides have normals on the coordinate axes.
    let axes = vec![Axis::periodic(16, 0.0, 2.0 * PI)];
    let p = ParametricPatch::sample("circle", axes, |u| Vec3::new(u[0].cos(), u[0].sin(), 0.0)).unwrap();
    assert!(matches!(shape_operator(&g, &p, 0), Err(Error::NotDifferentiable(_))));
    assert!(shape_operator(&g, &p, 1).is_ok());
}

#[test]
fn sphere_curvature_field() {
    let field = curvature_field(&constant(2), &sphere(1.0, 24).unwrap()).unwrap();
    assert!(field.excluded.is_empty());
    for c in &field.nodes {
        assert!(close(c.lambda, -1.0, 1e-10));
        assert!(close(c.mean[2], 1.0, 1e-10));
        assert!(c.umbilic_deviation.abs() < 1e-9);
    }
    let area = field.integrate(|_| 1.0);
    assert!(close(area, 4.0 * PI, 1e-10));
}

#[test]
fn wulff_shapes_have_lambda_minus_one() {
    for g in [reilly([1.0, 2.0, 3.0]), reilly([0.5, 1.0, 1.5])] {
        let w = wulff_boundary(&g, 48).unwrap();
        let field = curvature_field(&g, &w).unwrap();
        let (mean, spread) = field.lambda_stats();
        assert!(close(mean, -1.0, 1e-8) && spread < 1e-6, "{mean} {spread}");
        // The prescribed normals agree with the normals of the sampled surface.
        assert!(field.normal_override_deviation.unwrap() < 1e-5);
    }
}

#[test]
fn reilly_lambda_matches_rescaled_mean_curvature() {
    let a = [1.0, 2.0, 3.0];
    let g = reilly(a);
    let iso = constant(2);
    for b in [[1.0, 1.0, 1.0], [1.5, 1.0, 2.0], [0.8, 2.2, 1.1]] {
        let x = ellipsoid(b, 48).unwrap();
        let rescaled = ellipsoid([b[0] / a[0], b[1] / a[1], b[2] / a[2]], 48).unwrap();
        let fa = curvature_field(&g, &x).unwrap();
        let fb = curvature_field(&iso, &rescaled).unwrap();
        assert_eq!(fa.nodes.len(), fb.nodes.len());
        for (p, q) in fa.nodes.iter().zip(&fb.nodes) {
            assert!(close(p.lambda, q.lambda, 1e-6 * p.lambda.abs().max(1.0)), "{} vs {}", p.lambda, q.lambda);
        }
    }
}

#[test]
fn graph_formula_examples() {
    let iso = constant(2);
    let para = GraphGrid::sample(|x, y| (x * x + y * y) / 2.0, (-1.0, 1.0), (-1.0, 1.0), 21).unwrap();
    let centre = para.index(10, 10);
    assert!(close(graph_amc(&iso, &para, centre).unwrap(), 1.0, 1e-12));
    let plane = GraphGrid::sample(|_, _| 0.0, (-1.0, 1.0), (-1.0, 1.0), 11).unwrap();
    assert_eq!(graph_amc(&iso, &plane, 17).unwrap(), 0.0);

    let lorentz = gallery("lorentz", &params(&[])).unwrap();
    let f = |x: f64, y: f64| 0.2 * x * x + 0.15 * x * y - 0.1 * y * y + 0.3 * x;
    let grid = GraphGrid::sample(f, (-0.5, 0.5), (-0.5, 0.5), 21).unwrap();
    for (i, j) in [(10, 10), (4, 15), (17, 3)] {
        let node = grid.index(i, j);
        let (x, y) = (-0.5 + 0.05 * i as f64, -0.5 + 0.05 * j as f64);
        let (fx, fy) = (0.4 * x + 0.15 * y + 0.3, 0.15 * x - 0.2 * y);
        let (fxx, fxy, fyy) = (0.4, 0.15, -0.2);
        let q: f64 = 1.0 - fx * fx - fy * fy;
        let h_l = 0.5 * q.abs().powf(-1.5) * ((1.0 - fy * fy) * fxx + 2.0 * fx * fy * fxy + (1.0 - fx * fx) * fyy);
        // The graph formula with γ̄ = √(z² − x² − y²) produces −H_L.
        assert!(close(graph_amc(&lorentz, &grid, node).unwrap(), -h_l, 1e-6));
    }
}

#[test]
fn graph_formula_agrees_with_curvature_field() {
    let f = |x: f64, y: f64| 0.3 * (x * x) - 0.2 * x * y + 0.25 * (y * y * y) + 0.1 * x;
    let grid = GraphGrid::sample(f, (-0.5, 0.5), (-0.5, 0.5), 41).unwrap();
    let surface = graph(f, (-0.5, 0.5), (-0.5, 0.5), 41).unwrap();
    for g in [reilly([1.0, 2.0, 3.0]), lm(2.0, 2.0), gallery("lorentz", &params(&[])).unwrap()] {
        let field = curvature_field(&g, &surface).unwrap();
        for c in field.nodes.iter().step_by(37) {
            let l = graph_amc(&g, &grid, c.node).unwrap();
            assert!(close(l, c.lambda, 1e-4), "{}: {l} vs {}", g.name, c.lambda);
        }
    }
}

#[test]
fn edge_condition_examples() {
    let iso = constant(2);
    // Normals on the seam come from one-sided differences in φ.
    let halves = hemispheres(|nu| Ok(*nu), false, 33, 32).unwrap();
    assert!(halves.is_closed());
    assert_eq!(halves.edges.len(), 1);
    let report = edge_condition(&iso, &halves, 1e-6).unwrap();
    assert!(report[0].holds && report[0].max_residual < 1e-6);

    let g = reilly([1.0, 2.0, 3.0]);
    let halves = hemispheres(|nu| xi(&g, nu), true, 17, 32).unwrap();
    let report = edge_condition(&g, &halves, 1e-8).unwrap();
    assert!(report[0].holds && report[0].max_residual < 1e-12);

    let g = lm(2.0, 1.0);
    let arcs = two_arcs(|nu| xi(&g, nu), true, 17).unwrap();
    assert_eq!(arcs.edges.len(), 2);
    for r in edge_condition(&g, &arcs, 1e-8).unwrap() {
        assert!(r.holds && r.max_residual < 1e-12);
    }

    // Adjacent cube faces: ξ(e_i) − ξ(e_j) is not along the shared edge.
    let g = lm(2.0, 2.0);
    let c = cube(1.0, 9).unwrap();
    assert!(c.is_closed());
    assert_eq!(c.edges.len(), 12);
    for r in edge_condition(&g, &c, 1e-6).unwrap() {
        assert!(!r.holds);
        for pt in &r.points {
            assert!(close(pt.residual, 2f64.sqrt(), 1e-9), "{}", pt.residual);
        }
    }
}

#[test]
fn edge_condition_reports_non_smooth_points() {
    let l1 = gallery("l1", &params(&[])).unwrap();
    let c = cube(1.0, 7).unwrap();
    let reports = edge_condition(&l1, &c, 1e-6).unwrap();
    assert!(reports.iter().all(|r| !r.failures.is_empty() && !r.holds));
}

#[test]
fn camc_examples() {
    let iso = constant(2);
    let r = camc_check(&iso, &sphere(1.0, 16).unwrap(), 1e-8).unwrap();
    assert!(r.is_camc && close(r.lambda_mean, -1.0, 1e-10));

    let g = reilly([1.0, 2.0, 3.0]);
    let r = camc_check(&g, &wulff_boundary(&g, 32).unwrap(), 1e-6).unwrap();
    assert!(r.is_camc && close(r.lambda_mean, -1.0, 1e-8));

    let r = camc_check(&iso, &ellipsoid([1.0, 1.2, 0.8], 24).unwrap(), 1e-4).unwrap();
    assert!(!r.is_camc && r.lambda_spread > 0.1);

    let r = camc_check(&iso, &ellipse(1.0, 1.3, 64).unwrap(), 1e-4);
    assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    let r = camc_check(&constant(1), &ellipse(1.0, 1.3, 64).unwrap(), 1e-4).unwrap();
    assert!(!r.is_camc);
}

#[test]
fn too_many_excluded_nodes() {
    // Every normal of the cube lies on a coordinate plane of l1.
    let l1 = gallery("l1", &params(&[])).unwrap();
    let c = cube(1.0, 7).unwrap();
    assert!(matches!(curvature_field(&l1, &c), Err(Error::TooManyExcludedNodes { .. })));
    let partial = curvature_field_unchecked(&l1, &c).unwrap();
    assert_eq!(partial.excluded.len(), partial.total);
}

#[test]
fn scaling_halves_curvatures() {
    let g = reilly([1.0, 2.0, 3.0]);
    let s = star_shaped(2, &[Mode { frequency: Vec3::new(1.0, 2.0, 0.5), amplitude: 0.1, phase: 0.3 }], 24).unwrap();
    let f1 = curvature_field(&g, &s).unwrap();
    let f2 = curvature_field(&g, &s.scaled(2.0)).unwrap();
    for (a, b) in f1.nodes.iter().zip(&f2.nodes) {
        for (ka, kb) in a.principal.iter().zip(&b.principal) {
            assert!((ka / 2.0 - kb).norm() < 1e-10 * ka.norm().max(1.0));
        }
    }
}

#[test]
fn torus_quantities() {
    let (big, small) = (2.0, 0.5);
    let field = curvature_field(&constant(2), &torus(big, small, 64, 32).unwrap()).unwrap();
    let area = field.integrate(|_| 1.0);
    assert!(close(area, 4.0 * PI * PI * big * small, 1e-10));
    let total_gauss = field.integrate(|c| c.mean[2]);
    assert!(total_gauss.abs() < 1e-10);
}

#[test]
fn tabulated_round_trip() {
    for s in [torus(2.0, 0.5, 16, 12).unwrap(), sphere(1.0, 8).unwrap(), ellipse(1.0, 2.0, 20).unwrap()] {
        let text = tabulated_csv(&s.patches[0]);
        let back = parse_tabulated("t", &text).unwrap();
        assert_eq!(back.patches[0].points, s.patches[0].points);
        assert_eq!(back.patches[0].axes, s.patches[0].axes);
    }
    let open = graph(|x, y| x * y, (0.0, 1.0), (0.0, 1.0), 6).unwrap();
    let back = parse_tabulated("g", &tabulated_csv(&open.patches[0])).unwrap();
    assert!(!back.is_closed());
}

#[test]
fn tabulated_errors() {
    let good = tabulated_csv(&ellipse(1.0, 2.0, 8).unwrap().patches[0]);
    let bad_kind = good.replace("# axis periodic", "# axis spiral");
    assert!(matches!(parse_tabulated("t", &bad_kind), Err(Error::Parse { line: 1, .. })));
    let short: String = good.lines().take(6).map(|l| format!("{l}\n")).collect();
    assert!(matches!(parse_tabulated("t", &short), Err(Error::Parse { .. })));
    let bad_header = good.replace("u1,x,y", "t,x,y");
    assert!(matches!(parse_tabulated("t", &bad_header), Err(Error::Parse { .. })));
    let mut lines: Vec<String> = good.lines().map(String::from).collect();
    lines[5] = "0.5,1,0".into();
    assert!(matches!(parse_tabulated("t", &lines.join("\n")), Err(Error::Parse { line: 6, .. })));
}

#[test]
fn curvature_csv_layout() {
    let field = curvature_field(&constant(2), &sphere(1.0, 6).unwrap()).unwrap();
    let text = curvature_csv(&field);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "patch,node,x,y,z,nu1,nu2,nu3,xi1,xi2,xi3,H1,H2,k1_re,k1_im,k2_re,k2_im,lambda_trace,umbilic,weight"
    );
    assert_eq!(lines.count(), 72);
}

#[test]
fn closedness() {
    assert!(sphere(1.0, 8).unwrap().is_closed());
    assert!(!graph(|_, _| 0.0, (0.0, 1.0), (0.0, 1.0), 5).unwrap().is_closed());
    let g = lm(2.0, 1.0);
    let arcs = two_arcs(|nu| xi(&g, nu), true, 9).unwrap();
    let only_one = PiecewiseHypersurface::new(arcs.patches[..1].to_vec(), vec![]).unwrap();
    assert!(matches!(only_one.check_closed(), Err(Error::NotClosed(_))));
}

fn star_modes() -> impl Strategy<Value = Vec<Mode>> {
    prop::collection::vec(
        (-1.5..1.5f64, -1.5..1.5f64, -1.5..1.5f64, 0.0..0.05f64, 0.0..6.3f64).prop_map(|(a, b, c, amp, phase)| Mode {
            frequency: Vec3::new(a, b, c),
            amplitude: amp,
            phase,
        }),
        1..4,
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 5, ..ProptestConfig::default() })]

    #[test]
    fn uniformly_convex_gives_real_curvatures(modes in star_modes(), a in prop::array::uniform3(0.5..2.0f64)) {
        let g = reilly(a);
        let field = curvature_field(&g, &star_shaped(2, &modes, 20).unwrap()).unwrap();
        prop_assert!(field.max_imaginary() <= 1e-7 * field.max_principal());
        for c in &field.nodes {
            // Conjugate pairs and real symmetric functions.
            let (s, p) = (c.principal[0] + c.principal[1], c.principal[0] * c.principal[1]);
            prop_assert!(s.im.abs() < 1e-9 && p.im.abs() < 1e-9);
            prop_assert!((s.re - c.sigma[1]).abs() < 1e-9 * (1.0 + s.re.abs()));
        }
    }

    #[test]
    fn trace_consistency(modes in star_modes(), a in prop::array::uniform3(0.7..1.5f64)) {
        let s = star_shaped(2, &modes, 48).unwrap();
        for g in [reilly(a), lm(2.0, 2.0), constant(2)] {
            let field = curvature_field(&g, &s).unwrap();
            prop_assert!(field.max_trace_discrepancy() < 1e-4, "{} {}", g.name, field.max_trace_discrepancy());
        }
    }

    #[test]
    fn isotropic_reduction(modes in star_modes()) {
        let field = curvature_field(&constant(2), &star_shaped(2, &modes, 20).unwrap()).unwrap();
        for c in &field.nodes {
            let classical = &c.h * &c.g_inv;
            prop_assert!((&c.shape - classical).norm() < 1e-9 * (1.0 + c.shape.norm()));
        }
    }

    #[test]
    fn curves_have_real_curvature(modes in star_modes(), m in 1u32..4) {
        let s = star_shaped(1, &modes, 128).unwrap();
        let field = curvature_field(&lm(m as f64, 1.0), &s).unwrap();
        prop_assert_eq!(field.max_imaginary(), 0.0);
        prop_assert!(field.max_trace_discrepancy() < 1e-4);
    }
}
