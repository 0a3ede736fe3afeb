//! Built-in integrands.

use std::collections::BTreeMap;

use super::forms::arc_breakpoints;
use super::{Form, Integrand, NormalSet, Smoothness};
use crate::{Error, Result};

/// Named numeric parameters; every value is a list so `a=1,2,3` fits.
pub type Params = BTreeMap<String, Vec<f64>>;

pub const GALLERY_NAMES: [&str; 8] = ["constant", "reilly", "lorentz", "l1", "cylinder", "lm", "arc", "cubic"];

struct Reader<'a> {
    name: &'a str,
    params: &'a Params,
    allowed: &'static [&'static str],
}

impl Reader<'_> {
    fn check_keys(&self) -> Result<()> {
        for k in self.params.keys() {
            if k != "n" && !self.allowed.contains(&k.as_str()) {
                return Err(Error::InvalidParams(format!("'{}' does not take parameter '{k}'", self.name)));
            }
        }
        Ok(())
    }

    fn scalar(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.params.get(key) {
            Some(v) if v.len() == 1 => Ok(v[0]),
            Some(v) => Err(Error::InvalidParams(format!("'{key}' expects one value, got {}", v.len()))),
            None => default.ok_or_else(|| Error::InvalidParams(format!("'{}' requires '{key}'", self.name))),
        }
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let v = self.scalar(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParams(format!("'{key}' must be positive, got {v}")));
        }
        Ok(v)
    }

    fn dimension(&self, default: usize, allowed: &[usize]) -> Result<usize> {
        let n = self.scalar("n", Some(default as f64))?;
        if n.fract() != 0.0 || !allowed.contains(&(n as usize)) {
            return Err(Error::InvalidParams(format!("'{}' is defined for n in {allowed:?}, got {n}", self.name)));
        }
        Ok(n as usize)
    }
}

/// Looks up a built-in integrand.
///
/// Parameters: `reilly` takes `a` (three positive values), `cylinder` takes `r`
/// and `h`, `lm` takes a positive integer `m`, `arc` takes `r ≥ √2`. Every entry
/// accepts `n` where more than one sphere dimension makes sense.
pub fn gallery(name: &str, params: &Params) -> Result<Integrand> {
    let allowed: &'static [&'static str] = match name {
        "constant" | "lorentz" | "l1" | "cubic" => &[],
        "reilly" => &["a"],
        "cylinder" => &["r", "h"],
        "lm" => &["m"],
        "arc" => &["r"],
        _ => return Err(Error::UnknownGalleryName(name.to_string())),
    };
    let rd = Reader { name, params, allowed };
    rd.check_keys()?;
    let g = match name {
        "constant" => Integrand::constant(rd.dimension(2, &[1, 2])?)?,
        "reilly" => {
            let a = params
                .get("a")
                .ok_or_else(|| Error::InvalidParams("'reilly' requires 'a'".into()))?;
            if a.len() != 3 || a.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidParams(format!("'a' must be three positive values, got {a:?}")));
            }
            Integrand::new("reilly", rd.dimension(2, &[2])?, Form::Reilly([a[0], a[1], a[2]]))?
        }
        "lorentz" => {
            let mut g = Integrand::new("lorentz", rd.dimension(2, &[2])?, Form::Lorentz)?
                .with_regularity(Smoothness::C0, NormalSet::LightCone, 1);
            g.zero_set = NormalSet::LightCone;
            g
        }
        "l1" => Integrand::new("l1", rd.dimension(2, &[1, 2])?, Form::L1)?.with_regularity(
            Smoothness::C0,
            NormalSet::CoordinatePlanes,
            1,
        ),
        "cylinder" => {
            let radius = rd.positive("r", Some(1.0))?;
            let height = rd.positive("h", Some(1.0))?;
            Integrand::new("cylinder", rd.dimension(2, &[1, 2])?, Form::Cylinder { radius, height })?
                .with_regularity(Smoothness::C0, NormalSet::EquatorAndPoles, 1)
        }
        "lm" => {
            let m = rd.positive("m", Some(1.0))?;
            if m.fract() != 0.0 || m > 64.0 {
                return Err(Error::InvalidParams(format!("'m' must be a positive integer, got {m}")));
            }
            Integrand::new("lm", rd.dimension(1, &[1, 2])?, Form::Lm { m: m as u32 })?
        }
        "arc" => {
            let radius = rd.positive("r", Some(2.0))?;
            if radius < std::f64::consts::SQRT_2 {
                return Err(Error::InvalidParams(format!("'r' must be at least sqrt(2), got {radius}")));
            }
            Integrand::new("arc", rd.dimension(1, &[1])?, Form::Arc { radius })?.with_regularity(
                Smoothness::C1,
                NormalSet::Angles(arc_breakpoints(radius)),
                2,
            )
        }
        "cubic" => Integrand::new("cubic", rd.dimension(1, &[1])?, Form::Cubic)?,
        _ => unreachable!(),
    };
    Ok(g)
}

/// Convenience for building [`Params`] in code.
pub fn params(pairs: &[(&str, &[f64])]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_vec())).collect()
}
