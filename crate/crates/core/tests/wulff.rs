use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use wulffkit::integrand::{gallery, params, tangent_basis, Integrand};
use wulffkit::numerics::{build_sphere_grid, default_sphere_grid, GridScheme};
use wulffkit::wulff::{
    cahn_hoffman_samples, compare_xi_image_to_wulff, convexify, dual_norm, mean_curvature_integral,
    principal_curvatures_of_xi, singular_set, svg_plot, wulff_construct, wulff_csv, wulff_obj, xi, xi_csv,
};
use wulffkit::{Error, Vec3};

fn circle(t: f64) -> Vec3 {
    Vec3::new(t.cos(), t.sin(), 0.0)
}

fn lm(m: f64) -> Integrand {
    gallery("lm", &params(&[("m", &[m])])).unwrap()
}

fn cubic() -> Integrand {
    gallery("cubic", &params(&[])).unwrap()
}

fn reilly() -> Integrand {
    gallery("reilly", &params(&[("a", &[1.0, 2.0, 3.0])])).unwrap()
}

#[test]
fn xi_examples() {
    let c = Integrand::constant(2).unwrap();
    let nu = Vec3::new(0.36, 0.48, 0.8);
    assert!((xi(&c, &nu).unwrap() - nu).norm() < 1e-15);

    let (r, h) = (1.5, 0.5);
    let cyl = gallery("cylinder", &params(&[("r", &[r]), ("h", &[h])])).unwrap();
    let p = Vec3::new(0.6, 0.8, 0.0);
    for t in [0.3, 1.0, 1.4] {
        let nu = p * f64::cos(t) + Vec3::z() * f64::sin(t);
        let x = xi(&cyl, &nu).unwrap();
        assert!((x - (p * r + Vec3::z() * h)).norm() < 1e-15);
    }

    let x = xi(&lm(2.0), &circle(FRAC_PI_4)).unwrap();
    assert!((x - Vec3::new(2f64.powf(-0.75), 2f64.powf(-0.75), 0.0)).norm() < 1e-15);
}

#[test]
fn xi_rejects_the_lorentz_integrand() {
    let g = gallery("lorentz", &params(&[])).unwrap();
    assert_eq!(xi(&g, &Vec3::z()).unwrap_err(), Error::NonPositiveIntegrand);
}

#[test]
fn principal_curvature_examples() {
    let k = principal_curvatures_of_xi(&Integrand::constant(1).unwrap(), &circle(1.0)).unwrap();
    assert!((k[0] + 1.0).abs() < 1e-15);
    let k = principal_curvatures_of_xi(&Integrand::constant(2).unwrap(), &Vec3::z()).unwrap();
    assert!(k.iter().all(|v| (v + 1.0).abs() < 1e-15));

    // κ_m = -1/((2m-1) c^{2m-2} s^{2m-2} (c^{2m}+s^{2m})^{1/(2m)-2}) at m = 2, θ = π/4.
    let k = principal_curvatures_of_xi(&lm(2.0), &circle(FRAC_PI_4)).unwrap();
    assert!((k[0] + (4.0 / 3.0) * 0.5f64.powf(1.75)).abs() < 1e-14);

    // a(θ) = 2 - 8 cos 3θ equals 2 at θ = π/2.
    let k = principal_curvatures_of_xi(&cubic(), &circle(FRAC_PI_2)).unwrap();
    assert!((k[0] + 0.5).abs() < 1e-9);

    let k = principal_curvatures_of_xi(&lm(2.0), &circle(0.0)).unwrap();
    assert_eq!(k[0], f64::NEG_INFINITY);
}

#[test]
fn singular_set_examples() {
    let grid = default_sphere_grid(1, 720).unwrap();
    assert!(singular_set(&Integrand::constant(1).unwrap(), &grid, None).unwrap().samples.is_empty());

    let s = singular_set(&lm(2.0), &grid, None).unwrap();
    let mut angles: Vec<f64> = s.samples.iter().map(|x| x.nu.y.atan2(x.nu.x).rem_euclid(2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    assert_eq!(angles.len(), 4);
    for (k, a) in angles.iter().enumerate() {
        assert!((a - k as f64 * FRAC_PI_2).abs() < 1e-12);
    }

    for res in [720, 1000, 4096] {
        let grid = default_sphere_grid(1, res).unwrap();
        let s = singular_set(&cubic(), &grid, None).unwrap();
        assert_eq!(s.clusters.len(), 6, "resolution {res}");
        // Each cluster sits next to a zero of 2 - 8 cos 3θ.
        let zeros: Vec<f64> = (0..3)
            .flat_map(|k| {
                let a = (0.25f64).acos() / 3.0;
                let c = 2.0 * PI * k as f64 / 3.0;
                [(c - a).rem_euclid(2.0 * PI), c + a]
            })
            .collect();
        for cl in &s.clusters {
            let t = grid.nodes[cl[0]].y.atan2(grid.nodes[cl[0]].x).rem_euclid(2.0 * PI);
            assert!(zeros.iter().any(|z| (z - t).abs() < 2.0 * grid.spacing));
        }
    }
}

#[test]
fn singular_set_of_the_cylinder_is_everything() {
    let cyl = gallery("cylinder", &params(&[])).unwrap();
    let grid = build_sphere_grid(2, 16, GridScheme::LatLong).unwrap();
    let s = singular_set(&cyl, &grid, None).unwrap();
    assert_eq!(s.samples.len(), grid.len());
}

#[test]
fn total_curvature_of_lm_images() {
    let grid = default_sphere_grid(1, 2048).unwrap();
    for m in [1.0, 2.0, 3.0] {
        let v = mean_curvature_integral(&lm(m), &grid).unwrap();
        assert!((v + 2.0 * PI).abs() < 1e-8, "m = {m}: {v}");
    }
    let v = mean_curvature_integral(&Integrand::constant(1).unwrap(), &grid).unwrap();
    assert!((v + 2.0 * PI).abs() < 1e-12);
}

#[test]
fn total_curvature_of_the_cubic_image_counts_orientation() {
    // κ ds = -sign(a) dθ with a = 2 - 8 cos 3θ, negative on a set of measure 2 arccos(1/4).
    let expect = -(2.0 * PI - 4.0 * 0.25f64.acos());
    let mut last = 0.0;
    for res in [1024, 4096] {
        let grid = default_sphere_grid(1, res).unwrap();
        let v = mean_curvature_integral(&cubic(), &grid).unwrap();
        assert!((v - expect).abs() < 4.0 * grid.spacing, "{v} vs {expect}");
        last = v;
    }
    assert!((last - expect).abs() < 0.01 * expect.abs());
}

#[test]
fn total_mean_curvature_of_the_round_sphere() {
    let grid = build_sphere_grid(2, 32, GridScheme::LatLong).unwrap();
    let v = mean_curvature_integral(&Integrand::constant(2).unwrap(), &grid).unwrap();
    assert!((v + 8.0 * PI).abs() < 1e-9);
}

#[test]
fn wulff_of_constant_is_a_circumscribed_polygon() {
    let g = Integrand::constant(1).unwrap();
    let mut prev = f64::INFINITY;
    for res in [64, 128, 256] {
        let grid = default_sphere_grid(1, res).unwrap();
        let w = wulff_construct(&g, &grid).unwrap();
        let err = w.scale() - 1.0;
        let exact = 1.0 / (PI / res as f64).cos() - 1.0;
        assert!((err - exact).abs() < 1e-13);
        assert!(err < prev / 3.9);
        prev = err;
    }
    let grid = build_sphere_grid(2, 8, GridScheme::Icosphere).unwrap();
    let w = wulff_construct(&Integrand::constant(2).unwrap(), &grid).unwrap();
    assert!(w.scale() - 1.0 < 2.0 * grid.spacing * grid.spacing);
}

#[test]
fn wulff_of_l1_is_the_square() {
    let g = gallery("l1", &params(&[("n", &[1.0])])).unwrap();
    let grid = default_sphere_grid(1, 360).unwrap();
    let w = wulff_construct(&g, &grid).unwrap();
    assert_eq!(w.vertices().len(), 4);
    for v in w.vertices() {
        assert!((v.x.abs() - 1.0).abs() < 1e-9 && (v.y.abs() - 1.0).abs() < 1e-9);
    }
    let g = gallery("l1", &params(&[])).unwrap();
    let mut grid = build_sphere_grid(2, 16, GridScheme::LatLong).unwrap();
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut e = Vec3::zeros();
            e[k] = s;
            grid.nodes.push(e);
        }
    }
    let w = wulff_construct(&g, &grid).unwrap();
    // Planes tight along a cube edge may leave extra collinear vertices.
    for v in w.vertices() {
        assert!((v.amax() - 1.0).abs() < 1e-9);
    }
    for i in 0..8 {
        let s = |bit: i32| if i & bit != 0 { 1.0 } else { -1.0 };
        let corner = Vec3::new(s(1), s(2), s(4));
        assert!(w.vertices().iter().any(|v| (v - corner).norm() < 1e-9));
    }
    assert!((w.measure() - 8.0).abs() < 1e-9);
}

fn ellipsoid_residual(res: usize) -> f64 {
    let grid = build_sphere_grid(2, res, GridScheme::Icosphere).unwrap();
    let w = wulff_construct(&reilly(), &grid).unwrap();
    w.vertices()
        .iter()
        .map(|v| (v.x * v.x + v.y * v.y / 4.0 + v.z * v.z / 9.0 - 1.0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn wulff_of_reilly_converges_to_the_ellipsoid() {
    let coarse = ellipsoid_residual(8);
    let fine = ellipsoid_residual(16);
    assert!(fine < 0.1);
    assert!(coarse / fine > 3.5, "{coarse} {fine}");
}

#[test]
fn dual_norm_examples() {
    let grid = default_sphere_grid(1, 360).unwrap();
    let d = dual_norm(&Integrand::constant(1).unwrap(), &grid, &Vec3::new(0.0, 3.0, 0.0)).unwrap();
    assert!((d.value - 3.0).abs() < 1e-12 && d.even);
    let l1 = gallery("l1", &params(&[("n", &[1.0])])).unwrap();
    let d = dual_norm(&l1, &grid, &Vec3::new(1.0, 1.0, 0.0)).unwrap();
    assert!((d.value - 1.0).abs() < 1e-12);
    let d = dual_norm(&lm(2.0), &grid, &Vec3::x()).unwrap();
    assert!((d.value - 1.0).abs() < 1e-12);
    assert!(!dual_norm(&cubic(), &grid, &Vec3::x()).unwrap().even);
}

#[test]
fn dual_norm_is_one_on_wulff_vertices() {
    let grid = default_sphere_grid(1, 720).unwrap();
    for g in [lm(2.0), lm(3.0), gallery("arc", &params(&[])).unwrap()] {
        let w = wulff_construct(&g, &grid).unwrap();
        for v in w.vertices() {
            let d = dual_norm(&g, &grid, v).unwrap();
            assert!((d.value - 1.0).abs() < 1e-9, "{}: {}", g.name, d.value);
        }
    }
}

#[test]
fn convexify_examples() {
    let grid = default_sphere_grid(1, 720).unwrap();
    let check = default_sphere_grid(1, 997).unwrap();
    let c = convexify(&Integrand::constant(1).unwrap(), &grid).unwrap();
    for nu in &check.nodes {
        assert!((c.evaluate(nu).unwrap() - 1.0).abs() < 1e-4);
    }
    let c = convexify(&lm(2.0), &grid).unwrap();
    for nu in &check.nodes {
        assert!((c.evaluate(nu).unwrap() - lm(2.0).evaluate(nu).unwrap()).abs() < 1e-4);
    }
    let c = convexify(&cubic(), &grid).unwrap();
    let mut strict = false;
    for nu in &check.nodes {
        let (a, b) = (c.evaluate(nu).unwrap(), cubic().evaluate(nu).unwrap());
        assert!(a <= b + 1e-4);
        strict |= a < b - 0.1;
    }
    assert!(strict);
}

#[test]
fn xi_image_comparison() {
    let grid = default_sphere_grid(1, 720).unwrap();
    assert!(compare_xi_image_to_wulff(&Integrand::constant(1).unwrap(), &grid, 1e-6).unwrap().equal);
    assert!(compare_xi_image_to_wulff(&lm(2.0), &grid, 1e-6).unwrap().equal);
    let c = compare_xi_image_to_wulff(&cubic(), &grid, 1e-6).unwrap();
    assert!(!c.equal && c.max_deviation > 0.1);
    let grid = build_sphere_grid(2, 16, GridScheme::Icosphere).unwrap();
    assert!(compare_xi_image_to_wulff(&reilly(), &grid, 1e-6).unwrap().equal);
}

#[test]
fn cylinder_xi_image_is_two_circles() {
    let (r, h) = (1.5, 0.5);
    let cyl = gallery("cylinder", &params(&[("r", &[r]), ("h", &[h])])).unwrap();
    let grid = build_sphere_grid(2, 32, GridScheme::LatLong).unwrap();
    let cloud = cahn_hoffman_samples(&cyl, &grid, None).unwrap();
    assert_eq!(cloud.samples.len(), grid.len());
    for s in &cloud.samples {
        let radial = (s.xi.x.hypot(s.xi.y) - r).abs();
        let height = (s.xi.z.abs() - h).abs();
        assert!(radial.max(height) < 1e-12);
    }
}

#[test]
fn exports_are_well_formed() {
    let grid = default_sphere_grid(1, 64).unwrap();
    let g = cubic();
    let w = wulff_construct(&g, &grid).unwrap();
    let cloud = cahn_hoffman_samples(&g, &grid, None).unwrap();
    let csv = wulff_csv(&w);
    assert_eq!(csv.lines().count(), w.vertices().len() + 1);
    assert!(wulff_obj(&w).is_none());
    let xcsv = xi_csv(&cloud, 1);
    assert!(xcsv.starts_with("index,nu1,nu2,xi1,xi2,rho1,singular\n"));
    let svg = svg_plot(&g, &w, &cloud);
    assert!(svg.contains("stroke-dasharray=\"1,3\"") && svg.ends_with("</svg>\n"));

    let grid = build_sphere_grid(2, 8, GridScheme::Icosphere).unwrap();
    let w = wulff_construct(&Integrand::constant(2).unwrap(), &grid).unwrap();
    let obj = wulff_obj(&w).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), w.vertices().len());
}

#[test]
fn wulff_rejects_a_hemisphere_grid() {
    let mut grid = default_sphere_grid(1, 64).unwrap();
    let keep: Vec<usize> = (0..grid.len()).filter(|&i| grid.nodes[i].y > 0.0).collect();
    grid.nodes = keep.iter().map(|&i| grid.nodes[i]).collect();
    grid.weights = keep.iter().map(|&i| grid.weights[i]).collect();
    grid.neighbors = vec![Vec::new(); keep.len()];
    let err = wulff_construct(&Integrand::constant(1).unwrap(), &grid).unwrap_err();
    assert!(matches!(err, Error::DegenerateIntersection(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_identity_and_tangency(a in 0.0..2.0 * PI, b in 0.05..PI - 0.05) {
        let gs = [lm(2.0), cubic(), reilly(), Integrand::constant(2).unwrap(),
                  gallery("lm", &params(&[("m", &[3.0]), ("n", &[2.0])])).unwrap()];
        for g in gs {
            let nu = if g.dimension == 1 { circle(a) } else { Vec3::new(b.sin() * a.cos(), b.sin() * a.sin(), b.cos()) };
            let x = xi(&g, &nu).unwrap();
            prop_assert!((x.dot(&nu) - g.evaluate(&nu).unwrap()).abs() < 1e-9);
            let h: f64 = 1e-5;
            for u in tangent_basis(&nu, g.dimension) {
                let p = nu * h.cos() + u * h.sin();
                let m = nu * h.cos() - u * h.sin();
                let dxi = (xi(&g, &p).unwrap() - xi(&g, &m).unwrap()) / (2.0 * h);
                prop_assert!(dxi.dot(&nu).abs() < 1e-5, "{}", g.name);
            }
        }
    }
}

#[test]
fn regular_curvatures_do_not_vanish() {
    let grid = default_sphere_grid(1, 4096).unwrap();
    for g in [lm(2.0), cubic(), lm(3.0)] {
        let cloud = cahn_hoffman_samples(&g, &grid, None).unwrap();
        let bound = 1.0 / cloud.rho_scale;
        for s in cloud.samples.iter().filter(|s| !s.singular) {
            assert!(s.principal_curvatures[0].abs() >= bound * (1.0 - 1e-12));
        }
    }
}

#[test]
fn wulff_boundary_lies_near_the_xi_cloud() {
    let grid = default_sphere_grid(1, 720).unwrap();
    let g = lm(2.0);
    let w = wulff_construct(&g, &grid).unwrap();
    let cloud = cahn_hoffman_samples(&g, &grid, None).unwrap();
    for v in w.vertices() {
        let d = cloud.samples.iter().map(|s| (s.xi - v).norm()).fold(f64::INFINITY, f64::min);
        // A vertex sits between two tangency points at most ρ·Δθ/2 away.
        assert!(d < 0.5 * cloud.rho_scale * grid.spacing * 1.01);
    }
}
