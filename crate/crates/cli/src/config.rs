//! Flag values, optional TOML defaults and the small parsers behind them.
//!
//! A config file uses the flag names as keys:
//!
//! ```toml
//! colouring = "3_delta:-0.038"
//! method = "quadrature"
//! grid = "0:0.5:101"
//! seed = "0x42D"
//! n = 1e6
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

/// Number or string; lets `n = 1e6` and `n = "1e6"` both work.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub jobs: Option<usize>,
    pub seed: Option<Scalar>,
    pub n: Option<Scalar>,
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
    pub colouring: Option<String>,
    pub method: Option<String>,
    pub grid: Option<String>,
    pub curve: Option<PathBuf>,
    pub family: Option<String>,
    pub delta: Option<Scalar>,
    pub reference: Option<String>,
    pub curves: Option<PathBuf>,
    pub theta: Option<f64>,
    pub l_max: Option<u32>,
    pub restarts: Option<usize>,
    pub iterations: Option<usize>,
    pub state: Option<String>,
    pub h: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }

    pub fn seed_text(&self) -> Option<String> {
        self.seed.as_ref().map(Scalar::text)
    }

    pub fn n_text(&self) -> Option<String> {
        self.n.as_ref().map(Scalar::text)
    }

    pub fn delta_text(&self) -> Option<String> {
        self.delta.as_ref().map(Scalar::text)
    }
}

/// Decimal or `0x` hexadecimal.
pub fn parse_seed(s: &str) -> Result<u64, Failure> {
    let s = s.trim();
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    r.map_err(|_| Failure::Usage(format!("bad seed '{s}'")))
}

/// Positive integer, also in exponent form such as `1e6`.
pub fn parse_count(s: &str) -> Result<u64, Failure> {
    let s = s.trim().replace('_', "");
    if let Ok(n) = s.parse::<u64>() {
        if n > 0 {
            return Ok(n);
        }
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(Failure::Usage(format!("bad sample count '{s}'"))),
    }
}

/// `start:stop:count` in units of π, inclusive of both ends.
pub fn parse_range(s: &str) -> Result<(f64, f64, usize), Failure> {
    let bad = || Failure::Usage(format!("bad grid '{s}', expected start:stop:count"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite()) || a > b || n == 0 {
        return Err(bad());
    }
    Ok((a, b, n))
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    antipodal::search::linspace(a, b, n)
}

/// θ grid in units of π: within `[0, 1]` with at least two points.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let (a, b, n) = parse_range(s)?;
    if a < 0.0 || b > 1.0 || n < 2 {
        return Err(Failure::Usage(format!("grid '{s}' must lie in [0, 1] with count >= 2")));
    }
    Ok(spaced(a, b, n))
}

/// One number, a comma list or a `start:stop:count` grid.
pub fn parse_values(s: &str) -> Result<Vec<f64>, Failure> {
    if s.contains(':') {
        let (a, b, n) = parse_range(s)?;
        return Ok(spaced(a, b, n));
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad number '{v}' in '{s}'"))))
        .collect()
}
