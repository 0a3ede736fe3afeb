//! Command-line front end.
//!
//! Options may also come from a `key = value` file given with `--config`;
//! flags win over the file. Output files go to `--out`, else to the directory
//! named by `WULFFKIT_OUT_DIR`, else to the working directory.
//!
//! Exit codes: 0 success, 1 an identity exceeded its tolerance, 2 bad
//! configuration, 3 degenerate geometry.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::hypersurface::{
    camc_check, circle, cube, curvature_csv, curvature_field, ellipse, ellipsoid, load_tabulated, sphere, torus,
    wulff_boundary, PiecewiseHypersurface,
};
use crate::integrand::{classify_convexity, gallery, load_spec, Integrand, Params, GALLERY_NAMES};
use crate::numerics::default_sphere_grid;
use crate::variational::{
    dvol_dt_check, energy, first_variation_check, homothety_derivative, minkowski,
    second_variation_volume_preserving, steiner, translation_field, volume,
};
use crate::wulff::{
    cahn_hoffman_samples, compare_xi_image_to_wulff, mean_curvature_integral, singular_set, svg_plot, wulff_construct,
    wulff_csv, wulff_obj, xi_csv,
};
use crate::{Error, Result, Vec3};

pub const OUT_DIR_ENV: &str = "WULFFKIT_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wulffkit", version, about = "Anisotropic surface energies, Wulff shapes and their integral identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the built-in integrands and their parameters.
    GalleryList,
    /// Classify an integrand as uniformly convex, convex or non-convex.
    Classify(Options),
    /// Wulff shape, Cahn-Hoffman image and their comparison.
    Wulff(Options),
    /// Cahn-Hoffman samples with singular points.
    Xi(Options),
    /// Anisotropic curvature field of a surface.
    Curvature(Options),
    /// Steiner, Minkowski, volume-derivative, first-variation and homothety checks.
    Verify(Options),
    /// Second variation and stability verdict.
    Stability(Options),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Options {
    /// Built-in integrand name.
    #[arg(long)]
    pub gallery: Option<String>,
    /// Integrand spec file, instead of --gallery.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<f64>,
    /// Comma-separated values: reilly coefficients or ellipsoid/ellipse semi-axes.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Option<Vec<f64>>,
    /// Radius: cylinder or arc integrand, sphere, circle, or torus tube.
    #[arg(long)]
    pub r: Option<f64>,
    /// Cylinder height or cube half-width.
    #[arg(long)]
    pub h: Option<f64>,
    /// Torus major radius.
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    /// Sphere dimension, 1 or 2.
    #[arg(long)]
    pub n: Option<usize>,
    /// sphere | ellipsoid | torus | circle | ellipse | cube | wulff, or a tabulated CSV path.
    #[arg(long)]
    pub surface: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| config_err(format!("bad value '{v}' for '{key}'")))
}

impl Options {
    /// Fills unset options from a `key = value` file.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, v) = line
                .split_once('=')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| Error::Parse { line: k + 1, msg: "expected key = value".into() })?;
            match key {
                "gallery" => self.gallery = self.gallery.take().or(Some(v.to_string())),
                "spec" => self.spec = self.spec.take().or(Some(PathBuf::from(v))),
                "surface" => self.surface = self.surface.take().or(Some(v.to_string())),
                "out" => self.out = self.out.take().or(Some(PathBuf::from(v))),
                "m" => self.m = self.m.or(Some(parse_value(key, v)?)),
                "r" => self.r = self.r.or(Some(parse_value(key, v)?)),
                "h" => self.h = self.h.or(Some(parse_value(key, v)?)),
                "R" => self.big_r = self.big_r.or(Some(parse_value(key, v)?)),
                "n" => self.n = self.n.or(Some(parse_value(key, v)?)),
                "resolution" => self.resolution = self.resolution.or(Some(parse_value(key, v)?)),
                "tol" => self.tol = self.tol.or(Some(parse_value(key, v)?)),
                "a" => {
                    if self.a.is_none() {
                        self.a = Some(v.split(',').map(|x| parse_value(key, x.trim())).collect::<Result<_>>()?);
                    }
                }
                other => return Err(Error::Parse { line: k + 1, msg: format!("unknown key '{other}'") }),
            }
        }
        Ok(())
    }
}

/// Which parameters a gallery entry takes, besides `n`.
fn gallery_keys(name: &str) -> &'static [&'static str] {
    match name {
        "reilly" => &["a"],
        "cylinder" => &["r", "h"],
        "lm" => &["m"],
        "arc" => &["r"],
        _ => &[],
    }
}

/// Which parameters a surface family takes.
fn surface_keys(name: &str) -> &'static [&'static str] {
    match name {
        "sphere" | "circle" => &["r"],
        "ellipsoid" | "ellipse" => &["a"],
        "torus" => &["R", "r"],
        "cube" => &["h"],
        _ => &[],
    }
}

#[derive(Clone, Debug)]
pub enum SurfaceSpec {
    Family(String),
    Tabulated(PathBuf),
}

/// Fully resolved options for one command.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub integrand: Integrand,
    pub surface: Option<SurfaceSpec>,
    pub options: Options,
    pub tol: Option<f64>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn resolve(mut options: Options) -> Result<Self> {
        if let Some(path) = options.config.clone() {
            options.merge_file(&path)?;
        }
        if let Some(t) = options.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_err(format!("--tol must be positive, got {t}")));
            }
        }
        let surface = options.surface.as_deref().map(|s| {
            if s.ends_with(".csv") || Path::new(s).is_file() {
                SurfaceSpec::Tabulated(PathBuf::from(s))
            } else {
                SurfaceSpec::Family(s.to_string())
            }
        });
        if let Some(SurfaceSpec::Tabulated(p)) = &surface {
            if !p.is_file() {
                return Err(Error::Io(format!("surface file {} not found", p.display())));
            }
        }
        let surface_name = match &surface {
            Some(SurfaceSpec::Family(s)) => s.as_str(),
            _ => "",
        };
        let accepted = options.gallery.as_deref().map_or(&[][..], gallery_keys);
        let given: Vec<(&str, Option<Vec<f64>>)> = vec![
            ("m", options.m.map(|v| vec![v])),
            ("a", options.a.clone()),
            ("r", options.r.map(|v| vec![v])),
            ("h", options.h.map(|v| vec![v])),
            ("R", options.big_r.map(|v| vec![v])),
        ];
        let mut p = Params::new();
        for (key, value) in given {
            let Some(value) = value else { continue };
            let for_gallery = accepted.contains(&key);
            if !for_gallery && !surface_keys(surface_name).contains(&key) {
                return Err(config_err(format!("--{key} is not used by the integrand or the chosen surface")));
            }
            if for_gallery {
                p.insert(key.to_string(), value);
            }
        }
        let integrand = match (&options.gallery, &options.spec) {
            (Some(_), Some(_)) => return Err(config_err("give either --gallery or --spec, not both")),
            (None, Some(path)) => load_spec(path)?,
            (Some(name), None) => {
                if let Some(n) = options.n {
                    p.insert("n".into(), vec![n as f64]);
                }
                gallery(name, &p)?
            }
            (None, None) => return Err(config_err("no integrand: give --gallery or --spec")),
        };
        if let Some(n) = options.n {
            if n != integrand.dimension {
                return Err(Error::DimensionMismatch { expected: integrand.dimension, got: n });
            }
        }
        let out_dir = options
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(RunConfig { integrand, surface, tol: options.tol, options, out_dir })
    }

    fn dimension(&self) -> usize {
        self.integrand.dimension
    }

    fn grid_resolution(&self) -> usize {
        self.options.resolution.unwrap_or(if self.dimension() == 1 { 720 } else { 64 })
    }

    fn surface_resolution(&self) -> usize {
        self.options.resolution.unwrap_or(if self.dimension() == 1 { 256 } else { 32 })
    }

    pub fn build_surface(&self) -> Result<PiecewiseHypersurface> {
        let n = self.dimension();
        let res = self.surface_resolution();
        let o = &self.options;
        let axes = |count: usize, default: &[f64]| -> Result<Vec<f64>> {
            let a = o.a.clone().unwrap_or_else(|| default.to_vec());
            if a.len() != count || a.iter().any(|x| !(*x > 0.0)) {
                return Err(config_err(format!("--a needs {count} positive semi-axes, got {a:?}")));
            }
            Ok(a)
        };
        let family = match &self.surface {
            None => return Err(config_err("this command needs --surface")),
            Some(SurfaceSpec::Tabulated(p)) => return load_tabulated(p),
            Some(SurfaceSpec::Family(f)) => f.as_str(),
        };
        let want = |d: usize| -> Result<()> {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
            Ok(())
        };
        match family {
            "sphere" => want(2).and_then(|_| sphere(o.r.unwrap_or(1.0), res)),
            "ellipsoid" => {
                want(2)?;
                let a = axes(3, &[1.0, 1.0, 1.5])?;
                ellipsoid([a[0], a[1], a[2]], res)
            }
            "torus" => want(2).and_then(|_| torus(o.big_r.unwrap_or(2.0), o.r.unwrap_or(0.5), 2 * res, res)),
            "cube" => want(2).and_then(|_| cube(o.h.unwrap_or(1.0), res + 1)),
            "circle" => want(1).and_then(|_| circle(o.r.unwrap_or(1.0), res)),
            "ellipse" => {
                want(1)?;
                let a = axes(2, &[1.0, 0.6])?;
                ellipse(a[0], a[1], res)
            }
            "wulff" => wulff_boundary(&self.integrand, res),
            other => Err(config_err(format!("unknown surface '{other}'"))),
        }
    }

    fn write_file(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)?;
        Ok(path)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegenerateIntersection(_)
        | Error::UnboundedOrEmpty
        | Error::NonPositiveIntegrand
        | Error::SingularNode(_)
        | Error::TooManyExcludedNodes { .. } => EXIT_DEGENERATE,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    let (opts, f): (Options, fn(&RunConfig, &mut dyn Write) -> Result<i32>) = match command {
        Command::GalleryList => return cmd_gallery_list(out),
        Command::Classify(o) => (o, cmd_classify),
        Command::Wulff(o) => (o, cmd_wulff),
        Command::Xi(o) => (o, cmd_xi),
        Command::Curvature(o) => (o, cmd_curvature),
        Command::Verify(o) => (o, cmd_verify),
        Command::Stability(o) => (o, cmd_stability),
    };
    let cfg = RunConfig::resolve(opts)?;
    f(&cfg, out)
}

fn io(e: std::io::Error) -> Error {
    Error::from(e)
}

pub fn cmd_gallery_list(out: &mut dyn Write) -> Result<i32> {
    for name in GALLERY_NAMES {
        let keys = gallery_keys(name);
        let dims = match name {
            "reilly" | "lorentz" => "2",
            "lm" => "1 (default), 2",
            "arc" | "cubic" => "1",
            _ => "1, 2 (default)",
        };
        let keys = if keys.is_empty() { "-".to_string() } else { keys.join(",") };
        writeln!(out, "{name:<10} n = {dims:<16} params: {keys}").map_err(io)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_classify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = default_sphere_grid(cfg.dimension(), cfg.grid_resolution())?;
    let c = classify_convexity(&cfg.integrand, &grid, cfg.tol)?;
    writeln!(out, "{}: {}", cfg.integrand.name, c.verdict).map_err(io)?;
    writeln!(out, "min eigenvalue {:.6e} (tolerance {:.3e})", c.min_eigenvalue, c.tolerance).map_err(io)?;
    for (nu, v) in &c.witnesses {
        writeln!(out, "witness nu = ({:.6}, {:.6}, {:.6}) eigenvalue {:.6e}", nu.x, nu.y, nu.z, v).map_err(io)?;
    }
    if !c.skipped.is_empty() {
        writeln!(out, "skipped {} declared non-smooth nodes", c.skipped.len()).map_err(io)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_wulff(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let g = &cfg.integrand;
    let grid = default_sphere_grid(cfg.dimension(), cfg.grid_resolution())?;
    let w = wulff_construct(g, &grid)?;
    let cloud = cahn_hoffman_samples(g, &grid, None)?;
    let cmp = compare_xi_image_to_wulff(g, &grid, cfg.tol.unwrap_or(1e-6))?;
    let mut files = vec![cfg.write_file("wulff.csv", &wulff_csv(&w))?, cfg.write_file("xi.csv", &xi_csv(&cloud, g.dimension))?];
    if g.dimension == 1 {
        files.push(cfg.write_file("wulff.svg", &svg_plot(g, &w, &cloud))?);
    } else if let Some(obj) = wulff_obj(&w) {
        files.push(cfg.write_file("wulff.obj", &obj)?);
    }
    writeln!(out, "wulff shape of {}: {} vertices, measure {:.12e}", g.name, w.vertices().len(), w.measure())
        .map_err(io)?;
    writeln!(
        out,
        "xi image equals wulff boundary: equal={} (max deviation {:.3e}, reverse {:.3e})",
        cmp.equal, cmp.max_deviation, cmp.reverse_deviation
    )
    .map_err(io)?;
    for f in files {
        writeln!(out, "wrote {}", f.display()).map_err(io)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_xi(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let g = &cfg.integrand;
    let grid = default_sphere_grid(cfg.dimension(), cfg.grid_resolution())?;
    let cloud = cahn_hoffman_samples(g, &grid, cfg.tol)?;
    let set = singular_set(g, &grid, cfg.tol)?;
    let path = cfg.write_file("xi.csv", &xi_csv(&cloud, g.dimension))?;
    writeln!(out, "{} samples, {} singular in {} clusters", cloud.samples.len(), set.samples.len(), set.clusters.len())
        .map_err(io)?;
    if g.dimension == 1 {
        writeln!(out, "total curvature {:.12e}", mean_curvature_integral(g, &grid)?).map_err(io)?;
    }
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

pub fn cmd_curvature(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let g = &cfg.integrand;
    let x = cfg.build_surface()?;
    let field = curvature_field(g, &x)?;
    let (mean, spread) = field.lambda_stats();
    let camc = camc_check(g, &x, cfg.tol.unwrap_or(1e-6))?;
    let path = cfg.write_file("curvature.csv", &curvature_csv(&field))?;
    writeln!(out, "nodes {} excluded {}", field.total, field.excluded.len()).map_err(io)?;
    writeln!(out, "lambda mean {mean:.12e} spread {spread:.3e}").map_err(io)?;
    writeln!(out, "max |Im k| {:.3e} max |k| {:.6e}", field.max_imaginary(), field.max_principal()).map_err(io)?;
    writeln!(out, "camc={}", camc.is_camc).map_err(io)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}

struct Row {
    name: String,
    value: f64,
    reference: f64,
    residual: f64,
    tolerance: f64,
}

impl Row {
    fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let g = &cfg.integrand;
    let x = cfg.build_surface()?;
    x.check_closed()?;
    let tol = cfg.tol.unwrap_or(1e-5);
    let f = energy(g, &x)?;
    let scale = x.scale();
    let mut rows = Vec::new();

    let st = steiner(g, &x, &[])?;
    for (t, direct) in &st.direct_samples {
        let poly = st.polynomial(*t);
        rows.push(Row {
            name: format!("steiner t={t:+.4}"),
            value: *direct,
            reference: poly,
            residual: (direct - poly).abs(),
            tolerance: tol * f,
        });
    }
    for r in minkowski(g, &x)?.residuals {
        rows.push(Row {
            name: format!("minkowski r={}", r.r),
            value: r.value,
            reference: 0.0,
            residual: r.relative,
            tolerance: tol,
        });
    }
    let dv = dvol_dt_check(g, &x, 0.0, 1e-4)?;
    rows.push(Row { name: "dV/dt".into(), value: dv.lhs, reference: dv.rhs, residual: dv.residual, tolerance: tol * f });
    let e = Vec3::new(1.0, 2.0, 3.0).normalize();
    let e = if x.dimension == 1 { Vec3::new(e.x, e.y, 0.0).normalize() } else { e };
    let fv = first_variation_check(g, &x, &translation_field(&x, &e), 1e-4)?;
    for (name, c) in [("first variation energy", fv.energy), ("first variation volume", fv.volume)] {
        rows.push(Row {
            name: name.into(),
            value: c.lhs,
            reference: c.rhs,
            residual: c.lhs.abs().max(c.rhs.abs()),
            tolerance: 1e-7 * scale,
        });
    }
    let h = homothety_derivative(g, &x)?;
    rows.push(Row {
        name: "homothety".into(),
        value: h.fd_value,
        reference: h.value,
        residual: if h.positivity { h.relative_residual } else { f64::INFINITY },
        tolerance: 1e-8,
    });

    let camc = camc_check(g, &x, 1e-6)?;
    let mut csv = String::from("identity,value,reference,residual,tolerance,pass\n");
    writeln!(out, "{:<26} {:>24} {:>24} {:>11} {:>9}", "identity", "value", "reference", "residual", "tol").map_err(io)?;
    for r in &rows {
        writeln!(
            out,
            "{:<26} {:>24.16e} {:>24.16e} {:>11.3e} {:>9.1e} {}",
            r.name,
            r.value,
            r.reference,
            r.residual,
            r.tolerance,
            if r.pass() { "PASS" } else { "FAIL" }
        )
        .map_err(io)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.name,
            num(r.value),
            num(r.reference),
            num(r.residual),
            num(r.tolerance),
            r.pass()
        );
    }
    writeln!(out, "energy {:.12e} volume {:.12e}", f, volume(&x)?).map_err(io)?;
    writeln!(out, "lambda {:.12e} spread {:.3e} camc={}", camc.lambda_mean, camc.lambda_spread, camc.is_camc).map_err(io)?;
    let path = cfg.write_file("verify.csv", &csv)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(if rows.iter().all(Row::pass) { EXIT_OK } else { EXIT_IDENTITY_FAILED })
}

pub fn cmd_stability(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let g = &cfg.integrand;
    let x = cfg.build_surface()?;
    let r = second_variation_volume_preserving(g, &x, cfg.tol.unwrap_or(1e-6))?;
    let lines = [
        ("F0", r.f0),
        ("V0", r.v0),
        ("lambda_from_minkowski", r.lambda_from_minkowski),
        ("lambda_from_field", r.lambda_from_field),
        ("mu_prime_fd", r.mu_prime_fd),
        ("f_second", r.f_second),
        ("umbilic_deviation_integral", r.umbilic_deviation_integral),
        ("max_umbilic_deviation", r.max_umbilic_deviation),
    ];
    let mut csv = String::from("quantity,value\n");
    for (k, v) in lines {
        writeln!(out, "{k:<28} {v:.16e}").map_err(io)?;
        let _ = writeln!(csv, "{k},{}", num(v));
    }
    if r.lambda_disagreement {
        writeln!(out, "lambda values differ by more than 1%; the surface may be under-resolved or not CAMC").map_err(io)?;
    }
    writeln!(out, "verdict {}", r.verdict).map_err(io)?;
    let _ = writeln!(csv, "verdict,{}", r.verdict);
    let path = cfg.write_file("stability.csv", &csv)?;
    writeln!(out, "wrote {}", path.display()).map_err(io)?;
    Ok(EXIT_OK)
}
