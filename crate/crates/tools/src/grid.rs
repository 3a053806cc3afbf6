//! The `a:b:step` grid syntax.
//!
//! Points are `a + k·step` for `k = 0, 1, …` while `a + k·step <= b`, with a
//! relative slack of `1e-9` steps so that `0:1:0.1` ends at 1. Each point is
//! computed by multiplication, never by repeated addition. A bare number is
//! a one-point grid.

use crate::error::{Result, ToolError};

const SLACK: f64 = 1e-9;
const MAX_POINTS: usize = 10_000_000;

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let err = |reason| ToolError::Grid { spec: spec.to_string(), reason };
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| err("not a number"));
    let (a, b, step) = match parts.as_slice() {
        [x] => {
            let x = num(x)?;
            (x, x, 1.0)
        }
        [a, b, step] => (num(a)?, num(b)?, num(step)?),
        _ => return Err(err("expected a:b:step")),
    };
    if !(a.is_finite() && b.is_finite() && step.is_finite()) {
        return Err(err("values must be finite"));
    }
    if a < 0.0 {
        return Err(err("grid must be non-negative"));
    }
    if step <= 0.0 {
        return Err(err("step must be positive"));
    }
    if b < a {
        return Err(err("end is below start"));
    }
    let last = ((b - a) / step + SLACK).floor();
    if last >= MAX_POINTS as f64 {
        return Err(err("too many points"));
    }
    Ok((0..=last as usize).map(|k| a + k as f64 * step).collect())
}
