//! Exact binomial (Clopper–Pearson) confidence intervals.
//!
//! The regularized incomplete beta function is evaluated by its continued
//! fraction with no practical iteration cap, since at `10^6` trials the
//! fraction needs thousands of terms near the median. Quantiles come from
//! bisection, which is slow but cannot diverge.

use statrs::function::gamma::ln_gamma;

const MAX_TERMS: usize = 1_000_000;
const TINY: f64 = 1e-300;

/// Continued fraction for `I_x(a, b)`, modified Lentz.
fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let step = d * c;
        h *= step;
        if (step - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_fraction(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_fraction(1.0 - x, b, a) / b
    }
}

/// Quantile of `Beta(a, b)` by bisection on the CDF.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..1100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper–Pearson interval for `hits` successes out of `trials`
/// at confidence `1 - alpha`.
pub fn clopper_pearson(hits: u64, trials: u64, alpha: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials, "need 0 <= hits <= trials, trials > 0");
    let (x, n) = (hits as f64, trials as f64);
    let lo = if hits == 0 { 0.0 } else { beta_quantile(alpha / 2.0, x, n - x + 1.0) };
    let hi = if hits == trials { 1.0 } else { beta_quantile(1.0 - alpha / 2.0, x + 1.0, n - x) };
    (lo, hi)
}

/// The 99% interval used for every tail estimate.
pub fn clopper_pearson_99(hits: u64, trials: u64) -> (f64, f64) {
    clopper_pearson(hits, trials, 0.01)
}
