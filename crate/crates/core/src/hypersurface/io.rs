//! Tabulated patch input and per-node curvature output.
//!
//! A tabulated patch is a CSV file preceded by axis declarations:
//!
//! ```text
//! # axis periodic 0 6.283185307179586 64
//! # axis open -1 1 33
//! # orientation true
//! u1,u2,x,y,z
//! 0,-1,1.0,0.0,-1.0
//! ...
//! ```
//!
//! Rows run over the grid with axis 0 varying slowest. The `u` columns must
//! match the declared axes. Curves use `u1,x,y`.

use std::fmt::Write;
use std::path::Path;

use crate::numerics::AxisKind;
use crate::wulff::export::num;
use crate::{Error, Result, Vec3};

use super::curvature::CurvatureField;
use super::patch::{Axis, ParametricPatch};
use super::surface::PiecewiseHypersurface;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_axis(line: usize, words: &[&str]) -> Result<Axis> {
    let [kind, lo, hi, count] = words else {
        return Err(parse_err(line, "expected `# axis <kind> <lo> <hi> <count>`"));
    };
    let f = |w: &str| w.parse::<f64>().map_err(|_| parse_err(line, format!("bad number `{w}`")));
    let count: usize = count.parse().map_err(|_| parse_err(line, format!("bad count `{count}`")))?;
    Ok(match *kind {
        "periodic" => Axis::periodic(count, f(lo)?, f(hi)?),
        "open" => Axis::open(count, f(lo)?, f(hi)?),
        "polar" => Axis::polar(count),
        other => return Err(parse_err(line, format!("unknown axis kind `{other}`"))),
    })
}

/// Parses a tabulated patch; see the module docs for the format.
pub fn parse_tabulated(name: &str, text: &str) -> Result<PiecewiseHypersurface> {
    let mut axes = Vec::new();
    let mut orientation = true;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let words: Vec<&str> = rest.split_whitespace().collect();
            match words.first() {
                Some(&"axis") => axes.push(parse_axis(line, &words[1..])?),
                Some(&"orientation") => {
                    orientation = match words.get(1) {
                        Some(&"true") => true,
                        Some(&"false") => false,
                        _ => return Err(parse_err(line, "orientation must be true or false")),
                    }
                }
                _ => {}
            }
            continue;
        }
        if header.is_none() {
            header = Some(trimmed.split(',').map(|s| s.trim().to_string()).collect());
            continue;
        }
        let values = trimmed
            .split(',')
            .map(|w| w.trim().parse::<f64>().map_err(|_| parse_err(line, format!("bad number `{}`", w.trim()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    let n = axes.len();
    if !(1..=2).contains(&n) {
        return Err(parse_err(0, format!("expected 1 or 2 axis declarations, found {n}")));
    }
    let expected: Vec<String> = (1..=n)
        .map(|i| format!("u{i}"))
        .chain(["x", "y", "z"][..=n].iter().map(|s| s.to_string()))
        .collect();
    match &header {
        Some(h) if *h == expected => {}
        Some(h) => return Err(parse_err(0, format!("header {h:?} should be {expected:?}"))),
        None => return Err(parse_err(0, "missing header")),
    }
    let total: usize = axes.iter().map(|a| a.count).product();
    if rows.len() != total {
        return Err(parse_err(0, format!("{} rows for a grid of {total} nodes", rows.len())));
    }
    let coords: Vec<Vec<f64>> = axes.iter().map(|a| a.coords()).collect();
    let mut points = Vec::with_capacity(total);
    for (idx, (line, v)) in rows.iter().enumerate() {
        if v.len() != 2 * n + 1 {
            return Err(parse_err(*line, format!("expected {} columns, found {}", 2 * n + 1, v.len())));
        }
        let multi = if n == 1 { vec![idx] } else { vec![idx / axes[1].count, idx % axes[1].count] };
        for a in 0..n {
            let u = coords[a][multi[a]];
            if (v[a] - u).abs() > 1e-9 * (1.0 + u.abs()) {
                return Err(parse_err(*line, format!("u{} = {} does not match the grid value {u}", a + 1, v[a])));
            }
        }
        let mut x = Vec3::zeros();
        for c in 0..=n {
            x[c] = v[n + c];
        }
        points.push(x);
    }
    let patch = ParametricPatch::from_points(name, axes, points)?.with_orientation(orientation);
    let has_open = patch.axes.iter().any(|a| a.kind == AxisKind::Open);
    if has_open {
        PiecewiseHypersurface::with_matched_sides(vec![patch])
    } else {
        Ok(PiecewiseHypersurface::single(patch))
    }
}

pub fn load_tabulated(path: &Path) -> Result<PiecewiseHypersurface> {
    let text = std::fs::read_to_string(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("tabulated");
    parse_tabulated(name, &text)
}

/// Writes a single-patch surface in the tabulated format.
pub fn tabulated_csv(patch: &ParametricPatch) -> String {
    let n = patch.dimension();
    let mut out = String::new();
    for a in &patch.axes {
        let kind = match a.kind {
            AxisKind::Periodic => "periodic",
            AxisKind::Open => "open",
            AxisKind::Polar => "polar",
        };
        let _ = writeln!(out, "# axis {kind} {} {} {}", num(a.lo), num(a.hi), a.count);
    }
    let _ = writeln!(out, "# orientation {}", patch.orientation);
    let cols: Vec<String> = (1..=n).map(|i| format!("u{i}")).chain(["x", "y", "z"][..=n].iter().map(|s| s.to_string())).collect();
    let _ = writeln!(out, "{}", cols.join(","));
    for (i, x) in patch.points.iter().enumerate() {
        let row: Vec<String> = patch.parameters(i).into_iter().chain((0..=n).map(|c| x[c])).map(num).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// One row per included node.
pub fn curvature_csv(field: &CurvatureField) -> String {
    let n = field.dimension;
    let axes = ["1", "2", "3"];
    let mut header: Vec<String> = vec!["patch".into(), "node".into()];
    header.extend(["x", "y", "z"][..=n].iter().map(|s| s.to_string()));
    header.extend(axes[..=n].iter().map(|a| format!("nu{a}")));
    header.extend(axes[..=n].iter().map(|a| format!("xi{a}")));
    header.extend(axes[..n].iter().map(|a| format!("H{a}")));
    for a in &axes[..n] {
        header.push(format!("k{a}_re"));
        header.push(format!("k{a}_im"));
    }
    header.extend(["lambda_trace", "umbilic", "weight"].iter().map(|s| s.to_string()));
    let mut out = header.join(",");
    out.push('\n');
    for c in &field.nodes {
        let mut row = vec![c.patch.to_string(), c.node.to_string()];
        row.extend((0..=n).map(|i| num(c.position[i])));
        row.extend((0..=n).map(|i| num(c.nu[i])));
        row.extend((0..=n).map(|i| num(c.xi[i])));
        row.extend(c.mean[1..].iter().map(|h| num(*h)));
        for k in &c.principal {
            row.push(num(k.re));
            row.push(num(k.im));
        }
        row.push(c.lambda_trace.map_or(String::new(), num));
        row.push(num(c.umbilic_deviation));
        row.push(num(c.weight));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
