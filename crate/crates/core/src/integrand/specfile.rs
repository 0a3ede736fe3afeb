//! Plain-text description of power-of-polynomial-sum integrands.
//!
//! ```text
//! # gamma = (nu1^2 + 4 nu2^2)^(1/2)
//! dimension = 1
//!
//! coefficient = 1
//! exponent = 0.5
//! monomial = 1 2 0
//! monomial = 4 0 2
//! ```
//!
//! Blocks are separated by blank lines. A block with `monomial` lines is one
//! term `c·(q(ν))^p`; `abs = true` wraps `q` in an absolute value. Monomials
//! list a coefficient followed by one exponent per coordinate. Header keys
//! (`dimension`, `name`, `smoothness`) may appear in any block.

use std::path::Path;

use super::{Form, Integrand, PolyTerm, Smoothness};
use crate::numerics::default_sphere_grid;
use crate::{Error, Result};

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, msg: format!("expected a number, got '{}'", s.trim()) })
}

#[derive(Default)]
struct Block {
    coefficient: Option<f64>,
    exponent: Option<f64>,
    absolute: bool,
    monomials: Vec<(f64, [u32; 3])>,
    first_line: usize,
}

pub fn parse_spec(text: &str) -> Result<Integrand> {
    let mut dimension: Option<usize> = None;
    let mut name = String::from("custom");
    let mut smoothness = Smoothness::CInfinity;
    let mut blocks: Vec<Block> = vec![Block::default()];

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            if raw.trim().is_empty() && !blocks.last().unwrap().monomials.is_empty() {
                blocks.push(Block::default());
            }
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, msg: format!("expected key = value, got '{content}'") })?;
        let (key, value) = (key.trim(), value.trim());
        let block = blocks.last_mut().unwrap();
        if block.first_line == 0 {
            block.first_line = line;
        }
        match key {
            "dimension" => {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| Error::Parse { line, msg: format!("bad dimension '{value}'") })?;
                dimension = Some(n);
            }
            "name" => name = value.to_string(),
            "smoothness" => {
                smoothness = match value.to_ascii_lowercase().as_str() {
                    "c0" => Smoothness::C0,
                    "c1" => Smoothness::C1,
                    "c2" => Smoothness::C2,
                    "cinf" | "c-inf" | "cinfinity" => Smoothness::CInfinity,
                    _ => return Err(Error::Parse { line, msg: format!("unknown smoothness '{value}'") }),
                }
            }
            "coefficient" => block.coefficient = Some(parse_f64(value, line)?),
            "exponent" => block.exponent = Some(parse_f64(value, line)?),
            "abs" => {
                block.absolute = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(Error::Parse { line, msg: format!("abs expects true/false, got '{value}'") }),
                }
            }
            "monomial" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                if parts.len() < 2 || parts.len() > 4 {
                    return Err(Error::Parse { line, msg: "monomial needs a coefficient and 1 to 3 exponents".into() });
                }
                let c = parse_f64(parts[0], line)?;
                let mut e = [0u32; 3];
                for (k, p) in parts[1..].iter().enumerate() {
                    e[k] = p
                        .parse::<u32>()
                        .map_err(|_| Error::Parse { line, msg: format!("bad exponent '{p}'") })?;
                }
                block.monomials.push((c, e));
            }
            _ => return Err(Error::Parse { line, msg: format!("unknown key '{key}'") }),
        }
    }

    let n = dimension.ok_or(Error::Parse { line: 1, msg: "missing 'dimension'".into() })?;
    let mut terms = Vec::new();
    for b in blocks {
        if b.monomials.is_empty() {
            if b.coefficient.is_some() || b.exponent.is_some() {
                return Err(Error::Parse { line: b.first_line, msg: "term has no monomials".into() });
            }
            continue;
        }
        if b.monomials.iter().any(|(_, e)| e[(n + 1)..].iter().any(|x| *x != 0)) {
            return Err(Error::Parse { line: b.first_line, msg: format!("monomial uses a coordinate beyond n+1 = {}", n + 1) });
        }
        terms.push(PolyTerm {
            coefficient: b.coefficient.unwrap_or(1.0),
            exponent: b.exponent.unwrap_or(1.0),
            absolute: b.absolute,
            monomials: b.monomials,
        });
    }
    if terms.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no terms".into() });
    }
    let mut g = Integrand::new(&name, n, Form::PolySum(terms))?;
    g.smoothness = smoothness;

    let probe = default_sphere_grid(n, if n == 1 { 720 } else { 32 })?;
    if let Some(nu) = probe.nodes.iter().find(|nu| !(g.form.value(nu, n) >= 0.0)) {
        return Err(Error::InvalidParams(format!(
            "integrand is negative or undefined at {:?}",
            &nu.as_slice()[..=n]
        )));
    }
    Ok(g)
}

pub fn load_spec(path: &Path) -> Result<Integrand> {
    let text = std::fs::read_to_string(path)?;
    parse_spec(&text)
}
