//! File formats. Permutations are 1-based on disk; arrays are flat and
//! row-major. Floats are written in shortest round-trip form, so every
//! file reloads bit-identically.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use permconc::bounds::SweepRow;
use permconc::oracle::ExactDistribution;
use permconc::{Array, Permutation};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};
use crate::montecarlo::TailEstimate;

/// Shortest round-trip text for a CSV cell, switching to exponent form
/// outside `[1e-5, 1e16)` so tiny probabilities stay short.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrayFile {
    dims: usize,
    n: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PermutationFile {
    n: usize,
    map: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    total: u64,
    outcomes: Vec<(f64, u64)>,
}

fn json_err(context: impl Into<String>) -> impl FnOnce(serde_json::Error) -> ToolError {
    let context = context.into();
    move |source| ToolError::Json { context, source }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| ToolError::Io { path: path.to_path_buf(), source })
}

/// Writes `contents` to `path`, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|source| ToolError::Io { path: p.to_path_buf(), source }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn array_to_json(array: &Array) -> String {
    let file = ArrayFile { dims: array.dims(), n: array.n(), values: array.values().to_vec() };
    serde_json::to_string(&file).expect("arrays serialize") + "\n"
}

pub fn array_from_json(text: &str) -> Result<Array> {
    let file: ArrayFile = serde_json::from_str(text).map_err(json_err("malformed array file"))?;
    Ok(Array::from_parts(file.dims, file.n, file.values)?)
}

pub fn load_array(path: &Path) -> Result<Array> {
    array_from_json(&read(path)?).map_err(|e| match e {
        ToolError::Json { source, .. } => ToolError::Json { context: path.display().to_string(), source },
        other => other,
    })
}

pub fn store_array(array: &Array, path: &Path) -> Result<()> {
    write_output(Some(path), &array_to_json(array))
}

pub fn permutation_to_json(p: &Permutation) -> String {
    serde_json::to_string(&PermutationFile { n: p.n(), map: p.to_one_based() }).expect("serializes")
}

pub fn permutation_from_json(text: &str) -> Result<Permutation> {
    let file: PermutationFile = serde_json::from_str(text).map_err(json_err("malformed permutation"))?;
    if file.map.len() != file.n {
        return Err(permconc::Error::SizeMismatch { left: file.n, right: file.map.len() }.into());
    }
    Ok(Permutation::from_one_based(&file.map)?)
}

pub fn distribution_to_json(d: &ExactDistribution) -> String {
    let file = DistributionFile { total: d.total(), outcomes: d.outcomes().to_vec() };
    serde_json::to_string(&file).expect("serializes") + "\n"
}

pub fn distribution_from_json(text: &str) -> Result<ExactDistribution> {
    let file: DistributionFile = serde_json::from_str(text).map_err(json_err("malformed distribution"))?;
    Ok(ExactDistribution::from_outcomes(file.outcomes, file.total)?)
}

#[derive(Serialize)]
struct TailMeta<'a> {
    stat: &'a str,
    n: usize,
    seed: u64,
    samples: u64,
    center: f64,
}

/// A `# {json}` metadata line, then `t,point,ci_low,ci_high` rows.
pub fn tails_to_csv(e: &TailEstimate) -> String {
    let meta = TailMeta { stat: &e.stat, n: e.n, seed: e.seed, samples: e.samples, center: e.center };
    let mut out = format!("# {}\nt,point,ci_low,ci_high\n", serde_json::to_string(&meta).expect("serializes"));
    for k in 0..e.t_grid.len() {
        let cells = [e.t_grid[k], e.point[k], e.ci_low[k], e.ci_high[k]].map(fmt_f64);
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

pub fn tails_to_json(e: &TailEstimate) -> String {
    serde_json::to_string_pretty(e).expect("serializes") + "\n"
}

pub fn curve_to_csv(curve: &[(f64, f64)]) -> String {
    let mut out = String::from("t,bound\n");
    for (t, b) in curve {
        writeln!(out, "{},{}", fmt_f64(*t), fmt_f64(*b)).unwrap();
    }
    out
}

pub fn curve_to_json(curve: &[(f64, f64)]) -> String {
    serde_json::to_string(curve).expect("serializes") + "\n"
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,t,mean,exponent,ratio,bound\n");
    for r in rows {
        let cells = [r.t, r.mean, r.exponent, r.ratio, r.bound].map(fmt_f64);
        writeln!(out, "{},{}", r.n, cells.join(",")).unwrap();
    }
    out
}

pub fn sweep_to_json(rows: &[SweepRow]) -> String {
    let rows: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "n": r.n, "t": r.t, "mean": r.mean,
                "exponent": r.exponent, "ratio": r.ratio, "bound": r.bound,
            })
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use permconc::{Array2, Array3};

    #[test]
    fn array_round_trip_is_bit_exact() {
        for a in [Array::from(Array3::uniform(4, 9).unwrap()), Array2::footrule(5).unwrap().into()] {
            let back = array_from_json(&array_to_json(&a)).unwrap();
            assert_eq!(back, a);
            for (x, y) in back.values().iter().zip(a.values()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn array_validation_on_load() {
        let range = array_from_json(r#"{"dims":2,"n":1,"values":[1.5]}"#).unwrap_err();
        assert!(matches!(range, ToolError::Core(permconc::Error::EntryOutOfRange { .. })));
        let shape = array_from_json(r#"{"dims":2,"n":2,"values":[0,0,0,0,0,0,0]}"#).unwrap_err();
        assert!(matches!(shape, ToolError::Core(permconc::Error::Shape { expected: 4, found: 7, .. })));
        assert!(array_from_json(r#"{"dims":4,"n":1,"values":[0]}"#).is_err());
        assert!(matches!(array_from_json("{"), Err(ToolError::Json { .. })));
        assert!(array_from_json(r#"{"dims":2,"n":1}"#).is_err());
    }

    #[test]
    fn permutation_is_one_based() {
        let p = permutation_from_json(r#"{"n": 3, "map": [2,3,1]}"#).unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(permutation_to_json(&p), r#"{"n":3,"map":[2,3,1]}"#);
        assert!(permutation_from_json(r#"{"n": 3, "map": [0,1,2]}"#).is_err());
        assert!(permutation_from_json(r#"{"n": 3, "map": [1,1,2]}"#).is_err());
        assert!(permutation_from_json(r#"{"n": 2, "map": [1,2,3]}"#).is_err());
    }

    #[test]
    fn distribution_round_trip() {
        let d = ExactDistribution::from_values(vec![0.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        let text = distribution_to_json(&d);
        assert_eq!(text.trim(), r#"{"total":6,"outcomes":[[0.0,1],[1.0,2],[2.0,3]]}"#);
        assert_eq!(distribution_from_json(&text).unwrap(), d);
        assert!(distribution_from_json(r#"{"total":5,"outcomes":[[0.0,1]]}"#).is_err());
    }

    #[test]
    fn curve_formats() {
        let c = [(0.0, 1.0), (2.0, 0.5)];
        assert_eq!(curve_to_csv(&c), "t,bound\n0,1\n2,0.5\n");
        assert_eq!(curve_to_json(&c).trim(), "[[0.0,1.0],[2.0,0.5]]");
        assert_eq!(curve_to_csv(&[]), "t,bound\n");
        assert_eq!(curve_to_csv(&[(1e6, 2.5e-300)]), "t,bound\n1000000,2.5e-300\n");
    }

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.0, 1.0, 0.1, 1.0 / 3.0, 6.328534744377258e-22, 2e16, 123456.789, 1e-5, 9.99e-6] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), f64::to_bits(x));
        }
    }
}
