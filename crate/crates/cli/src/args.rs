//! Value parsers for command-line flags.

use num_complex::Complex64;
use quaddom::numerics::ToleranceSpec;

use crate::failure::{CmdResult, Failure};

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// `re,im`
pub fn complex(s: &str) -> Result<Complex64, String> {
    match s.split(',').collect::<Vec<_>>()[..] {
        [re, im] => Ok(Complex64::new(number(re)?, number(im)?)),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}

/// `re,im,k`
pub fn test_function(s: &str) -> Result<(Complex64, u32), String> {
    match s.split(',').collect::<Vec<_>>()[..] {
        [re, im, k] => {
            let k: u32 = k.trim().parse().map_err(|_| format!("power `{k}` is not a non-negative integer"))?;
            Ok((Complex64::new(number(re)?, number(im)?), k))
        }
        _ => Err(format!("expected `re,im,k`, got `{s}`")),
    }
}

/// `name=v1,v2,...`
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub name: String,
    pub values: Vec<f64>,
}

pub fn grid(s: &str) -> Result<Grid, String> {
    let (name, rest) = s.split_once('=').ok_or_else(|| format!("expected `name=v1,v2,...`, got `{s}`"))?;
    let values = rest.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(Grid {
        name: name.trim().to_string(),
        values,
    })
}

/// `xmin,xmax,ymin,ymax`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }
}

pub fn window(s: &str) -> Result<Window, String> {
    let v = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    match v[..] {
        [x_min, x_max, y_min, y_max] if x_min < x_max && y_min < y_max => Ok(Window {
            x_min,
            x_max,
            y_min,
            y_max,
        }),
        _ => Err(format!("expected `xmin,xmax,ymin,ymax` with min < max, got `{s}`")),
    }
}

pub const TOL_VAR: &str = "QUADDOM_TOL";
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Integration tolerance, relative part from `QUADDOM_TOL`.
pub fn tolerance() -> CmdResult<ToleranceSpec> {
    let rel = match std::env::var(TOL_VAR) {
        Ok(s) => number(&s)
            .ok()
            .filter(|v| *v > 0.0)
            .ok_or_else(|| Failure::schema(format!("{TOL_VAR}: `{s}` is not a positive number")))?,
        Err(_) => DEFAULT_REL_TOL,
    };
    let tol = ToleranceSpec::default().with_tols(rel * 1e-4, rel);
    tol.validate().map_err(|e| Failure::schema(format!("{TOL_VAR}: {e}")))?;
    Ok(tol)
}
