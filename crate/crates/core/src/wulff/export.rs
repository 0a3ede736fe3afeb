//! CSV, OBJ and SVG output for Wulff shapes and Cahn-Hoffman images.

use std::fmt::Write;

use super::{CahnHoffmanCloud, WulffShape};
use crate::integrand::Integrand;
use crate::numerics::ConvexBody;

/// Seventeen significant digits, so CSV regressions diff exactly.
pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Vertex loop (n = 1) or vertex list (n = 2) as CSV.
pub fn wulff_csv(w: &WulffShape) -> String {
    let mut out = String::new();
    if w.dimension == 1 {
        out.push_str("x,y\n");
        for v in w.vertices() {
            let _ = writeln!(out, "{},{}", num(v.x), num(v.y));
        }
    } else {
        out.push_str("x,y,z\n");
        for v in w.vertices() {
            let _ = writeln!(out, "{},{},{}", num(v.x), num(v.y), num(v.z));
        }
    }
    out
}

/// Wavefront OBJ of a polytope boundary; facets are fanned into triangles.
pub fn wulff_obj(w: &WulffShape) -> Option<String> {
    let ConvexBody::Polytope(p) = &w.boundary else { return None };
    let mut out = String::from("# Wulff shape\n");
    for v in &p.vertices {
        let _ = writeln!(out, "v {} {} {}", num(v.x), num(v.y), num(v.z));
    }
    for t in p.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    Some(out)
}

/// Cahn-Hoffman point cloud with eigenvalues and singular flags.
pub fn xi_csv(cloud: &CahnHoffmanCloud, n: usize) -> String {
    let axes = ["1", "2", "3"];
    let mut header: Vec<String> = vec!["index".into()];
    header.extend(axes[..=n].iter().map(|a| format!("nu{a}")));
    header.extend(axes[..=n].iter().map(|a| format!("xi{a}")));
    header.extend(axes[..n].iter().map(|a| format!("rho{a}")));
    header.push("singular".into());
    let mut out = header.join(",");
    out.push('\n');
    for s in &cloud.samples {
        let mut row = vec![s.index.to_string()];
        row.extend((0..=n).map(|i| num(s.nu[i])));
        row.extend((0..=n).map(|i| num(s.xi[i])));
        row.extend((0..n).map(|i| s.a_eigenvalues.get(i).map_or(String::new(), |r| num(*r))));
        row.push(if s.singular { "1".into() } else { "0".into() });
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// SVG for n = 1: Wulff polygon solid, Wulff plot of `γ` dotted, `ξ` image dashed.
pub fn svg_plot(g: &Integrand, w: &WulffShape, cloud: &CahnHoffmanCloud) -> String {
    let size = 480.0;
    let reach = cloud
        .samples
        .iter()
        .map(|s| s.xi.norm())
        .chain(w.offsets.iter().cloned())
        .chain(std::iter::once(w.scale()))
        .fold(0.0f64, f64::max)
        * 1.1;
    let map = |x: f64, y: f64| (size / 2.0 + x / reach * size / 2.0, size / 2.0 - y / reach * size / 2.0);
    let path = |pts: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut d = String::new();
        for (k, (x, y)) in pts.enumerate() {
            let (px, py) = map(x, y);
            let _ = write!(d, "{}{:.3},{:.3} ", if k == 0 { "M" } else { "L" }, px, py);
        }
        d.push('Z');
        d
    };
    let wulff = path(&mut w.vertices().iter().map(|v| (v.x, v.y)));
    let plot = path(&mut w.halfspace_normals.iter().zip(&w.offsets).map(|(nu, r)| (r * nu.x, r * nu.y)));
    let xi = path(&mut cloud.samples.iter().map(|s| (s.xi.x, s.xi.y)));
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", g.name);
    let _ = writeln!(out, r#"<path d="{plot}" fill="none" stroke="gray" stroke-dasharray="1,3"/>"#);
    let _ = writeln!(out, r#"<path d="{xi}" fill="none" stroke="blue" stroke-dasharray="6,4"/>"#);
    let _ = writeln!(out, r#"<path d="{wulff}" fill="none" stroke="black" stroke-width="1.5"/>"#);
    for s in cloud.samples.iter().filter(|s| s.singular) {
        let (px, py) = map(s.xi.x, s.xi.y);
        let _ = writeln!(out, r#"<circle cx="{px:.3}" cy="{py:.3}" r="3" fill="red"/>"#);
    }
    out.push_str("</svg>\n");
    out
}
