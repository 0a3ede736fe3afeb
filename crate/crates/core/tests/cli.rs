use std::path::Path;
use std::process::Command;

use wulffkit::cli::{run, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IDENTITY_FAILED, EXIT_OK};
use wulffkit::hypersurface::{star_shaped, tabulated_csv, Mode};
use wulffkit::Vec3;

fn call(args: &str, out_dir: &Path) -> (i32, String) {
    let mut argv: Vec<String> = vec!["wulffkit".into()];
    argv.extend(args.split_whitespace().map(String::from));
    argv.push("--out".into());
    argv.push(out_dir.to_string_lossy().into_owned());
    let mut buf = Vec::new();
    let code = run(argv, &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

fn bare(args: &str) -> (i32, String) {
    let argv = std::iter::once("wulffkit").chain(args.split_whitespace());
    let mut buf = Vec::new();
    let code = run(argv, &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

#[test]
fn gallery_list_names_every_entry() {
    let (code, text) = bare("gallery-list");
    assert_eq!(code, EXIT_OK);
    for name in ["constant", "reilly", "lorentz", "l1", "cylinder", "lm", "arc", "cubic"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (args, verdict) in [
        ("classify --gallery lm --m 2", "ConvexNotUniform"),
        ("classify --gallery cubic", "NonConvex"),
        ("classify --gallery constant", "UniformlyConvex"),
    ] {
        let (code, text) = call(args, dir.path());
        assert_eq!(code, EXIT_OK);
        assert_eq!(text.lines().next().unwrap().split(": ").nth(1), Some(verdict), "{text}");
    }
}

#[test]
fn wulff_l1_square() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = call("wulff --gallery l1 --n 1", dir.path());
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(text.contains("equal=true"));
    let csv = std::fs::read_to_string(dir.path().join("wulff.csv")).unwrap();
    let mut rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1])
        })
        .collect();
    assert_eq!(rows.len(), 4);
    rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for ((x, y), (ex, ey)) in rows.iter().zip([(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]) {
        assert!((x - ex).abs() < 1e-9 && (y - ey).abs() < 1e-9);
    }
    let svg = std::fs::read_to_string(dir.path().join("wulff.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("stroke-dasharray=\"1,3\""));
    assert!(dir.path().join("xi.csv").is_file());
}

#[test]
fn wulff_cubic_and_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = call("wulff --gallery cubic --n 1", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("equal=false"));
    let xi = std::fs::read_to_string(dir.path().join("xi.csv")).unwrap();
    assert_eq!(xi.lines().filter(|l| l.ends_with(",1")).count(), 6);

    let (code, text) = call("wulff --gallery constant --n 2 --resolution 16", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("equal=true"));
    let obj = std::fs::read_to_string(dir.path().join("wulff.obj")).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("v ")) && obj.lines().any(|l| l.starts_with("f ")));
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = call("verify --gallery constant --surface sphere --n 2 --resolution 16", dir.path());
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(!text.contains("FAIL"));

    let (code, text) = call("verify --gallery reilly --a 1,2,3 --surface wulff --resolution 24", dir.path());
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(text.contains("lambda -1.000000000000e0"));

    let (code, text) = call("verify --gallery constant --surface torus --R 2 --r 0.5 --resolution 32", dir.path());
    assert_eq!(code, EXIT_OK, "{text}");
    assert!(text.contains("camc=false"));
    let csv = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn verify_reports_identity_failures() {
    // Too coarse a grid for a tolerance this tight.
    let dir = tempfile::tempdir().unwrap();
    let (code, text) =
        call("verify --gallery constant --surface torus --R 2 --r 0.5 --resolution 6 --tol 1e-15", dir.path());
    assert_eq!(code, EXIT_IDENTITY_FAILED, "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn stability_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = call("stability --gallery lm --m 2 --surface wulff --n 1", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("verdict StableWulffLike"));
    let (code, text) = call("stability --gallery constant --surface sphere --resolution 16", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("verdict StableWulffLike"));
    let (code, text) = call("stability --gallery constant --surface ellipsoid --a 1,1,1.5 --resolution 16", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("verdict NotCAMC"));
    assert!(std::fs::read_to_string(dir.path().join("stability.csv")).unwrap().contains("verdict,NotCAMC"));
}

#[test]
fn curvature_and_xi_commands() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = call("curvature --gallery reilly --a 1,2,3 --surface ellipsoid --resolution 16", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("camc=true"));
    assert!(dir.path().join("curvature.csv").is_file());
    let (code, text) = call("xi --gallery cubic --resolution 4096", dir.path());
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("6 singular in 6 clusters") || text.contains("in 6 clusters"), "{text}");
}

#[test]
fn tabulated_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let s = star_shaped(2, &[Mode { frequency: Vec3::new(1.0, 0.5, -0.5), amplitude: 0.05, phase: 0.2 }], 24).unwrap();
    let path = dir.path().join("star.csv");
    std::fs::write(&path, tabulated_csv(&s.patches[0])).unwrap();
    let args = format!("verify --gallery reilly --a 1,1.5,2 --surface {}", path.display());
    let (code, text) = call(&args, dir.path());
    assert_eq!(code, EXIT_OK, "{text}");
    let args = format!("verify --gallery constant --surface {}", dir.path().join("missing.csv").display());
    assert_eq!(call(&args, dir.path()).0, EXIT_CONFIG);
}

fn lambda_from_field(report: &str) -> f64 {
    let line = report.lines().find(|l| l.starts_with("lambda_from_field")).unwrap();
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# stability of a sphere\ngallery = constant\nsurface = sphere\nresolution = 12\nr = 3\n").unwrap();
    let (code, text) = call(&format!("stability --config {}", cfg.display()), dir.path());
    assert_eq!(code, EXIT_OK, "{text}");
    assert!((lambda_from_field(&text) + 1.0 / 3.0).abs() < 1e-10, "{text}");
    // The flag wins over the file.
    let (code, text) = call(&format!("stability --config {} --r 2", cfg.display()), dir.path());
    assert_eq!(code, EXIT_OK);
    assert!((lambda_from_field(&text) + 0.5).abs() < 1e-10, "{text}");

    std::fs::write(&cfg, "gallery = constant\nbogus = 1\n").unwrap();
    assert_eq!(call(&format!("classify --config {}", cfg.display()), dir.path()).0, EXIT_CONFIG);
}

#[test]
fn config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        "classify --gallery nope",
        "classify",
        "classify --gallery lm --m 2.5",
        "classify --gallery constant --m 2",
        "verify --gallery constant",
        "verify --gallery constant --surface klein",
        "verify --gallery constant --surface circle",
        "classify --gallery constant --tol -1",
        "classify --gallery reilly --a 1,2,3 --n 1",
        "frobnicate",
    ] {
        let (code, text) = call(args, dir.path());
        assert_eq!(code, EXIT_CONFIG, "{args}: {text}");
    }
}

#[test]
fn degenerate_geometry_exit_code() {
    // The l1 cube has every normal on a coordinate plane.
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = call("curvature --gallery l1 --surface cube --resolution 6", dir.path());
    assert_eq!(code, EXIT_DEGENERATE, "{text}");
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        assert_eq!(call("curvature --gallery lm --m 2 --n 2 --surface torus --resolution 16", dir.path()).0, EXIT_OK);
        assert_eq!(call("wulff --gallery cubic --n 1", dir.path()).0, EXIT_OK);
    }
    for f in ["curvature.csv", "wulff.csv", "xi.csv", "wulff.svg"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn binary_honours_out_dir_variable() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_wulffkit"))
        .args(["wulff", "--gallery", "l1", "--n", "1"])
        .env("WULFFKIT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(dir.path().join("wulff.csv").is_file());
    let status = Command::new(env!("CARGO_BIN_EXE_wulffkit")).args(["classify"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CONFIG));
}
