//! Bernstein-type tail bounds.
//!
//! The generic bound: if `v(X) <= C + B f(X)` then
//! `P(|f(X)| >= t) <= 2 exp(-t² / (2C + 2Bt))`. Instantiations:
//!
//! | statistic | `B` | `C`          |
//! |-----------|-----|--------------|
//! | `T3`      | 1   | `2 E[T3]`    |
//! | `T1`      | `n` | `2n E[T1]`   |
//!
//! `T2` only concentrates up to a bounded shift between `f` and
//! `T2 - E[T2]`, see [`bound_t2`].
//!
//! Every bound is clamped to 1 and evaluated in log space.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exchange::T2Correction;

/// How the `O(1/n)` terms of the `T2` bound are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum T2Variant {
    /// All `O(1/n)` terms dropped: shift 3, slope 6.
    #[default]
    Nominal,
    /// Exact finite-`n` shift and slope from [`T2Correction`].
    FiniteN,
}

fn check_non_negative(x: f64, what: &'static str) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(what));
    }
    Ok(())
}

/// `-t² / (2C + 2Bt)`, the exponent of the generic bound before the
/// factor 2 and the clamp.
pub fn bernstein_exponent(t: f64, b: f64, c: f64) -> Result<f64> {
    check_non_negative(t, "t must be finite and >= 0")?;
    check_non_negative(b, "B must be finite and >= 0")?;
    check_non_negative(c, "C must be finite and >= 0")?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let denom = 2.0 * c + 2.0 * b * t;
    if denom == 0.0 {
        return Err(Error::InvalidArgument("B and C cannot both be zero when t > 0"));
    }
    Ok(-(t * t) / denom)
}

fn clamp_from_exponent(exponent: f64) -> f64 {
    let log_bound = core::f64::consts::LN_2 + exponent;
    if log_bound >= 0.0 {
        1.0
    } else {
        libm::exp(log_bound)
    }
}

/// `min(1, 2 exp(-t² / (2C + 2Bt)))`.
pub fn bernstein_lemma(t: f64, b: f64, c: f64) -> Result<f64> {
    bernstein_exponent(t, b, c).map(clamp_from_exponent)
}

/// `min(1, 2 exp(-t² / (4 E[T3] + 2t)))`.
pub fn bound_t3(t: f64, mean: f64) -> Result<f64> {
    check_non_negative(mean, "mean must be finite and >= 0")?;
    bernstein_lemma(t, 1.0, 2.0 * mean)
}

/// `min(1, 2 exp(-t² / (2n (2 E[T1] + t))))`.
pub fn bound_t1(t: f64, n: usize, mean: f64) -> Result<f64> {
    check_non_negative(mean, "mean must be finite and >= 0")?;
    let nf = n as f64;
    bernstein_lemma(t, nf, 2.0 * nf * mean)
}

/// Bound on `P(|T2 - E[T2]| >= t)`.
///
/// * `Nominal`: `1` for `t <= 3`, else
///   `min(1, 2 exp(-(t-3)² / (12 E[T2] + 18 + 6(t-3))))`.
/// * `FiniteN`: with `w`, `B`, `C` from [`T2Correction`], `1` for `t <= w`,
///   else `min(1, 2 exp(-(t-w)² / (2C + 2B(t-w))))`. This is the generic
///   bound applied to the per-state drift, shifted by the sandwich width.
///   With `w = 3`, `B = 3`, `C = 3(2E[T2] + 3)` it reduces to `Nominal`.
pub fn bound_t2(t: f64, n: usize, mean: f64, variant: T2Variant) -> Result<f64> {
    check_non_negative(t, "t must be finite and >= 0")?;
    check_non_negative(mean, "mean must be finite and >= 0")?;
    let corr = T2Correction::new(n, mean)?;
    let (shift, b, c) = match variant {
        T2Variant::Nominal => (3.0, 3.0, 3.0 * (2.0 * mean + 3.0)),
        T2Variant::FiniteN => (corr.width, corr.slope(), corr.intercept(mean)),
    };
    if t <= shift {
        return Ok(1.0);
    }
    bernstein_lemma(t - shift, b, c)
}

/// Threshold at or below which [`bound_t2`] is vacuous (returns 1 by
/// construction).
pub fn t2_shift(n: usize, mean: f64, variant: T2Variant) -> Result<f64> {
    Ok(match variant {
        T2Variant::Nominal => 3.0,
        T2Variant::FiniteN => T2Correction::new(n, mean)?.width,
    })
}

/// Which bound to evaluate along a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundSpec {
    Generic { b: f64, c: f64 },
    T1 { n: usize, mean: f64 },
    T2 { n: usize, mean: f64, variant: T2Variant },
    T3 { mean: f64 },
}

impl BoundSpec {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match *self {
            BoundSpec::Generic { b, c } => bernstein_lemma(t, b, c),
            BoundSpec::T1 { n, mean } => bound_t1(t, n, mean),
            BoundSpec::T2 { n, mean, variant } => bound_t2(t, n, mean, variant),
            BoundSpec::T3 { mean } => bound_t3(t, mean),
        }
    }
}

/// Pointwise evaluation over `grid`.
pub fn bound_curve(spec: &BoundSpec, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&t| spec.eval(t).map(|b| (t, b))).collect()
}

/// One row of the large-`t` sweep for `T1` at `t = n^(1+λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub t: f64,
    pub mean: f64,
    /// `-t² / (2n(2E[T1] + t))`, unclamped.
    pub exponent: f64,
    /// `exponent / (-n^λ / 2)`.
    pub ratio: f64,
    pub bound: f64,
}

/// Evaluates the `T1` bound at `t = n^(1+λ)` with `E[T1] = scale · n^power`.
pub fn t1_sweep(lambda: f64, n: usize, mean_scale: f64, mean_power: f64) -> Result<SweepRow> {
    check_non_negative(lambda, "lambda must be finite and >= 0")?;
    if n == 0 {
        return Err(Error::EmptyArray);
    }
    let nf = n as f64;
    let t = libm::pow(nf, 1.0 + lambda);
    let mean = mean_scale * libm::pow(nf, mean_power);
    check_non_negative(mean, "mean must be finite and >= 0")?;
    let exponent = bernstein_exponent(t, nf, 2.0 * nf * mean)?;
    let ratio = exponent / (-libm::pow(nf, lambda) / 2.0);
    Ok(SweepRow { n, t, mean, exponent, ratio, bound: clamp_from_exponent(exponent) })
}
