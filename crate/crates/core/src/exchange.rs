//! Exchangeable pairs for `T1` and `T2`, and the exact per-state functionals
//! `f` (conditional drift of the antisymmetric `F`) and `v` (its stochastic
//! bound size).
//!
//! `T1` move: draw `I1, I2` independently and uniformly (with replacement)
//! and set `σ' = σ ∘ (I1 I2)`. With `F = (n/2)(T1 - T1')` the drift is
//! `f = T1 - E[T1]` exactly.
//!
//! `T2` move: draw an ordered triple of distinct indices and a fair coin,
//! then set `(σ', π') = (σ ∘ τ1, π ∘ τ2)` or `(σ ∘ τ2, π ∘ τ1)`, where `τ1`
//! and `τ2 = τ1⁻¹` are the two 3-cycles on the triple. With
//! `F = n(n-1)(n-2) / (3(n²-3n+3)) · (T2 - T2')`,
//!
//! ```text
//! f(σ, π) = T2 - E[T2] - 3(n-1)E[T2]/(n²-3n+3) + Y(σ, π)/(n²-3n+3)
//! ```
//!
//! Everything here conditions on the full state (`σ`, or `(σ, π)`), which
//! is finer than conditioning on the statistic's value. The `oracle` module
//! groups states by value when the coarser quantities are needed.

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::permutations::{
    bounded, cycle_tau, sample_distinct_triple, CycleDir, IndexTriple, Permutation,
};
use crate::statistics::{t2_raw, y_raw, PreparedArray3};

fn check_size(n: usize, p: &Permutation) -> Result<()> {
    if p.n() != n {
        return Err(Error::SizeMismatch { left: n, right: p.n() });
    }
    Ok(())
}

fn check_t2_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::TooSmall { what: "the T2 exchange move", n, min: 3 });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// T1
// ---------------------------------------------------------------------------

/// One draw of the `T1` pair: the state before the move, the transposed
/// indices and `delta = T1 - T1'`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSampleT1 {
    pub sigma: Permutation,
    pub i1: usize,
    pub i2: usize,
    pub delta: f64,
}

impl PairSampleT1 {
    /// `σ' = σ ∘ (I1 I2)`.
    pub fn moved(&self) -> Permutation {
        let mut map = self.sigma.images().to_vec();
        map.swap(self.i1, self.i2);
        Permutation::from_images(map).expect("transposed permutation")
    }
}

/// `T1 - T1'` for the transposition `(i1 i2)`, from the cached row sums:
/// `s[i1][σ(i1)] + s[i2][σ(i2)] - s[i1][σ(i2)] - s[i2][σ(i1)]`.
#[inline]
pub fn delta_t1(p: &PreparedArray3, sigma: &[usize], i1: usize, i2: usize) -> f64 {
    if i1 == i2 {
        return 0.0;
    }
    let (k1, k2) = (sigma[i1], sigma[i2]);
    p.row_sum(i1, k1) + p.row_sum(i2, k2) - p.row_sum(i1, k2) - p.row_sum(i2, k1)
}

/// Draws `(I1, I2)` with two stream values and returns the pair sample.
pub fn step_t1(p: &PreparedArray3, sigma: &Permutation, rng: &mut impl RngCore) -> Result<PairSampleT1> {
    check_size(p.n(), sigma)?;
    let n = p.n();
    let i1 = bounded(rng.next_u64(), n);
    let i2 = bounded(rng.next_u64(), n);
    let delta = delta_t1(p, sigma.images(), i1, i2);
    Ok(PairSampleT1 { sigma: sigma.clone(), i1, i2, delta })
}

/// Scale turning `T1 - T1'` into the antisymmetric `F`.
pub fn f_scale_t1(n: usize) -> f64 {
    n as f64 / 2.0
}

/// `E[T1 - T1' | σ]`, averaged over all `n²` ordered index pairs.
pub fn cond_drift_t1(p: &PreparedArray3, sigma: &Permutation) -> Result<f64> {
    check_size(p.n(), sigma)?;
    let n = p.n();
    let s = sigma.images();
    let mut total = 0.0;
    for i1 in 0..n {
        for i2 in 0..n {
            total += delta_t1(p, s, i1, i2);
        }
    }
    Ok(total / (n * n) as f64)
}

/// The drift identity's right-hand side, `(2/n)(T1 - E[T1])`.
pub fn drift_t1_closed_form(n: usize, t1: f64, mean: f64) -> f64 {
    2.0 / n as f64 * (t1 - mean)
}

/// `f(T1) = T1 - E[T1]`.
pub fn f_t1(p: &PreparedArray3, sigma: &Permutation) -> Result<f64> {
    Ok(p.t1(sigma)? - p.mean_t1())
}

/// `v(T1) = (n/4) E[(T1 - T1')² | σ]`, exact over all `n²` pairs.
pub fn v_t1(p: &PreparedArray3, sigma: &Permutation) -> Result<f64> {
    check_size(p.n(), sigma)?;
    let n = p.n();
    let s = sigma.images();
    let mut total = 0.0;
    for i1 in 0..n {
        for i2 in 0..n {
            let d = delta_t1(p, s, i1, i2);
            total += d * d;
        }
    }
    Ok(n as f64 / 4.0 * total / (n * n) as f64)
}

/// Linear envelope `v(T1) <= n (f(T1) + 2 E[T1])`, i.e. `B = n`,
/// `C = 2n E[T1]`.
pub fn v_t1_envelope(n: usize, f: f64, mean: f64) -> f64 {
    n as f64 * (f + 2.0 * mean)
}

// ---------------------------------------------------------------------------
// T2
// ---------------------------------------------------------------------------

/// Which pair of cycles the fair coin picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coin {
    /// `(σ ∘ τ1, π ∘ τ2)`
    First,
    /// `(σ ∘ τ2, π ∘ τ1)`
    Second,
}

impl Coin {
    pub const BOTH: [Coin; 2] = [Coin::First, Coin::Second];

    /// Cycle directions applied to `σ` and to `π`.
    pub fn directions(self) -> (CycleDir, CycleDir) {
        match self {
            Coin::First => (CycleDir::Forward, CycleDir::Backward),
            Coin::Second => (CycleDir::Backward, CycleDir::Forward),
        }
    }

    /// One stream draw; the top bit decides.
    pub fn sample(rng: &mut impl RngCore) -> Self {
        if rng.next_u64() >> 63 == 0 {
            Coin::First
        } else {
            Coin::Second
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSampleT2 {
    pub sigma: Permutation,
    pub pi: Permutation,
    pub triple: IndexTriple,
    pub coin: Coin,
    pub delta: f64,
}

impl PairSampleT2 {
    /// `(σ', π')` after the move.
    pub fn moved(&self) -> (Permutation, Permutation) {
        moved_pair(&self.sigma, &self.pi, &self.triple, self.coin).expect("validated move")
    }
}

/// Applies the coupled 3-cycles to `(σ, π)`.
pub fn moved_pair(
    sigma: &Permutation,
    pi: &Permutation,
    triple: &IndexTriple,
    coin: Coin,
) -> Result<(Permutation, Permutation)> {
    let n = sigma.n();
    check_size(n, pi)?;
    let (ds, dp) = coin.directions();
    let new_sigma = sigma.compose(&cycle_tau(ds, triple, n)?)?;
    let new_pi = pi.compose(&cycle_tau(dp, triple, n)?)?;
    Ok((new_sigma, new_pi))
}

/// `T2 - T2'`: only the three moved positions contribute.
#[inline]
pub fn delta_t2(
    a: &crate::arrays::Array3,
    sigma: &[usize],
    pi: &[usize],
    triple: &IndexTriple,
    coin: Coin,
) -> f64 {
    let (ds, dp) = coin.directions();
    let idx = triple.indices();
    let ts = triple.cycle_targets(ds);
    let tp = triple.cycle_targets(dp);
    let mut out = 0.0;
    let mut inn = 0.0;
    for m in 0..3 {
        let i = idx[m];
        out += a.get(i, sigma[i], pi[i]);
        inn += a.get(i, sigma[ts[m]], pi[tp[m]]);
    }
    out - inn
}

/// Draws a distinct triple (3 stream values) and a coin (1 value).
pub fn step_t2(
    p: &PreparedArray3,
    sigma: &Permutation,
    pi: &Permutation,
    rng: &mut impl RngCore,
) -> Result<PairSampleT2> {
    let n = p.n();
    check_t2_n(n)?;
    check_size(n, sigma)?;
    check_size(n, pi)?;
    let triple = sample_distinct_triple(n, rng)?;
    let coin = Coin::sample(rng);
    let delta = delta_t2(p.array(), sigma.images(), pi.images(), &triple, coin);
    Ok(PairSampleT2 { sigma: sigma.clone(), pi: pi.clone(), triple, coin, delta })
}

/// Calls `f` on every ordered triple of distinct indices.
pub fn for_each_distinct_triple(n: usize, mut f: impl FnMut(IndexTriple)) {
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            for k in (0..n).filter(|&k| k != i && k != j) {
                f(IndexTriple::new(n, i, j, k).expect("indices in range"));
            }
        }
    }
}

/// Number of equally likely `T2` moves: ordered distinct triples times two
/// coin outcomes.
pub fn t2_move_count(n: usize) -> usize {
    2 * n * (n - 1) * (n - 2)
}

/// `n² - 3n + 3`, the denominator shared by the `T2` formulas.
pub fn t2_denominator(n: usize) -> f64 {
    let n = n as f64;
    n * n - 3.0 * n + 3.0
}

/// Scale turning `T2 - T2'` into the antisymmetric `F`:
/// `n(n-1)(n-2) / (3(n²-3n+3))`.
pub fn f_scale_t2(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) * (nf - 2.0) / (3.0 * t2_denominator(n))
}

fn for_each_t2_move(
    p: &PreparedArray3,
    sigma: &[usize],
    pi: &[usize],
    mut f: impl FnMut(&IndexTriple, Coin, f64),
) {
    for_each_distinct_triple(p.n(), |t| {
        for coin in Coin::BOTH {
            f(&t, coin, delta_t2(p.array(), sigma, pi, &t, coin));
        }
    });
}

fn check_t2_state(p: &PreparedArray3, sigma: &Permutation, pi: &Permutation) -> Result<()> {
    check_t2_n(p.n())?;
    check_size(p.n(), sigma)?;
    check_size(p.n(), pi)
}

/// `E[T2 - T2' | σ, π]`, averaged over every distinct triple and both coins.
pub fn cond_drift_t2(p: &PreparedArray3, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    check_t2_state(p, sigma, pi)?;
    let mut total = 0.0;
    for_each_t2_move(p, sigma.images(), pi.images(), |_, _, d| total += d);
    Ok(total / t2_move_count(p.n()) as f64)
}

/// Closed form of the `T2` drift given `Y`:
///
/// ```text
/// 3(n²-3n+3)/(n(n-1)(n-2)) · (T2 - E[T2]) - 9E[T2]/(n(n-2)) + 3Y/(n(n-1)(n-2))
/// ```
pub fn drift_t2_closed_form(n: usize, t2: f64, mean: f64, y: f64) -> f64 {
    let nf = n as f64;
    let cube = nf * (nf - 1.0) * (nf - 2.0);
    3.0 * t2_denominator(n) / cube * (t2 - mean) - 9.0 * mean / (nf * (nf - 2.0)) + 3.0 * y / cube
}

/// `f = T2 - E[T2] - 3(n-1)E[T2]/(n²-3n+3) + Y/(n²-3n+3)`.
///
/// Feeding it `Y(σ, π)` gives the per-state drift; feeding it `E[Y | T2]`
/// gives the drift conditioned on the value of `T2`.
pub fn f_t2_formula(n: usize, t2: f64, mean: f64, y: f64) -> f64 {
    let d = t2_denominator(n);
    t2 - mean - 3.0 * (n as f64 - 1.0) * mean / d + y / d
}

/// Per-state drift `f(σ, π) = E[F | σ, π]`.
pub fn f_t2_state(p: &PreparedArray3, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    check_t2_state(p, sigma, pi)?;
    let (s, q) = (sigma.images(), pi.images());
    let t2 = t2_raw(p.array(), s, q);
    let y = y_raw(p.array(), s, q);
    Ok(f_t2_formula(p.n(), t2, p.mean_t2(), y))
}

/// Exact first and second absolute moments of `T2 - T2'` given the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Moments {
    /// `E[|T2 - T2'| | σ, π]`
    pub m1: f64,
    /// `E[(T2 - T2')² | σ, π]`
    pub m2: f64,
}

pub fn moment_bounds_t2(p: &PreparedArray3, sigma: &Permutation, pi: &Permutation) -> Result<T2Moments> {
    check_t2_state(p, sigma, pi)?;
    let (mut s1, mut s2) = (0.0, 0.0);
    for_each_t2_move(p, sigma.images(), pi.images(), |_, _, d| {
        s1 += d.abs();
        s2 += d * d;
    });
    let count = t2_move_count(p.n()) as f64;
    Ok(T2Moments { m1: s1 / count, m2: s2 / count })
}

/// Upper bound on `E[|T2 - T2'| | ·]`: `(3/n)T2 + 3n E[T2]/((n-1)(n-2))`.
pub fn m1_bound(n: usize, t2: f64, mean: f64) -> f64 {
    let nf = n as f64;
    3.0 / nf * t2 + 3.0 * nf * mean / ((nf - 1.0) * (nf - 2.0))
}

/// Upper bound on `E[(T2 - T2')² | ·]`: `(9/n)T2 + 9n E[T2]/((n-1)(n-2))`.
pub fn m2_bound(n: usize, t2: f64, mean: f64) -> f64 {
    3.0 * m1_bound(n, t2, mean)
}

/// Coefficients `(c_sq, c_abs)` of the `v(T2)` envelope
/// `v <= c_sq E[(T2-T2')²] + c_abs E[|T2-T2'|]`:
///
/// ```text
/// c_sq  = n(n-1)(n-2) / (6(n²-3n+3))
/// c_abs = n²(n-1)²(n-2) / (2(n²-3n+3)²)
/// ```
pub fn v_t2_coefficients(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let d = t2_denominator(n);
    let c_sq = nf * (nf - 1.0) * (nf - 2.0) / (6.0 * d);
    let c_abs = nf * nf * (nf - 1.0) * (nf - 1.0) * (nf - 2.0) / (2.0 * d * d);
    (c_sq, c_abs)
}

/// The `v(T2)` envelope evaluated at the exact state moments.
pub fn v_t2_state(p: &PreparedArray3, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    let m = moment_bounds_t2(p, sigma, pi)?;
    let (c_sq, c_abs) = v_t2_coefficients(p.n());
    Ok(c_sq * m.m2 + c_abs * m.m1)
}

/// `v(σ, π) = ½ E[|(f(σ,π) - f(σ',π')) · F| | σ, π]` computed directly,
/// with `f` the per-state drift. `O(n⁵)`; meant for small `n`.
pub fn v_t2_exact_state(p: &PreparedArray3, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    check_t2_state(p, sigma, pi)?;
    let n = p.n();
    let f_here = f_t2_state(p, sigma, pi)?;
    let scale = f_scale_t2(n);
    let mut total = 0.0;
    let mut err = None;
    for_each_distinct_triple(n, |t| {
        for coin in Coin::BOTH {
            match moved_pair(sigma, pi, &t, coin).and_then(|(s2, p2)| f_t2_state(p, &s2, &p2)) {
                Ok(f_there) => {
                    let delta = delta_t2(p.array(), sigma.images(), pi.images(), &t, coin);
                    total += ((f_here - f_there) * scale * delta).abs();
                }
                Err(e) => err = Some(e),
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(0.5 * total / t2_move_count(n) as f64)
}

/// Finite-`n` constants for `T2`, replacing the `O(1/n)` terms by exact
/// expressions.
///
/// * `lower`/`upper`: since `0 <= Y <= 3n(n-1)`,
///   `T2 - E[T2] - lower <= f <= T2 - E[T2] + upper` with
///   `lower = 3(n-1)E[T2]/(n²-3n+3)` and
///   `upper = (3n(n-1) - 3(n-1)E[T2])/(n²-3n+3)`.
/// * `width = max(lower, upper)`, so `|T2 - E[T2]| <= |f| + width`.
/// * `eps`: with `B = 3 + eps` and `C = (3 + eps)(2E[T2] + 3 + eps)` the
///   envelope `v <= C + B f` holds for every state. Derivation: the moment
///   bounds give `v <= α T2 + β E[T2]` with
///   `α = (9 c_sq + 3 c_abs)/n`, `β = α n²/((n-1)(n-2))`; substituting
///   `T2 <= f + E[T2] + lower` and using `lower <= 3n(n-1)/(n²-3n+3)`, any
///   `eps >= max(α, β, 3n(n-1)/(n²-3n+3)) - 3` works. `eps -> 0` like `1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Correction {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub eps: f64,
}

impl T2Correction {
    pub fn new(n: usize, mean: f64) -> Result<Self> {
        check_t2_n(n)?;
        let nf = n as f64;
        let d = t2_denominator(n);
        let lower = 3.0 * (nf - 1.0) * mean / d;
        let upper = (3.0 * nf * (nf - 1.0) - 3.0 * (nf - 1.0) * mean) / d;
        Ok(Self { lower, upper, width: lower.max(upper), eps: t2_envelope_eps(n) })
    }

    /// `B` of the linear `v` envelope.
    pub fn slope(&self) -> f64 {
        3.0 + self.eps
    }

    /// `C` of the linear `v` envelope for a given mean.
    pub fn intercept(&self, mean: f64) -> f64 {
        (3.0 + self.eps) * (2.0 * mean + 3.0 + self.eps)
    }

    /// `(3 + eps)(f + 2E[T2] + 3 + eps)`.
    pub fn v_envelope(&self, f: f64, mean: f64) -> f64 {
        self.slope() * f + self.intercept(mean)
    }
}

/// The finite-`n` slack `eps` of [`T2Correction`]; depends on `n` only.
pub fn t2_envelope_eps(n: usize) -> f64 {
    let nf = n as f64;
    let (c_sq, c_abs) = v_t2_coefficients(n);
    let alpha = (9.0 * c_sq + 3.0 * c_abs) / nf;
    let beta = alpha * nf * nf / ((nf - 1.0) * (nf - 2.0));
    let shift = 3.0 * nf * (nf - 1.0) / t2_denominator(n);
    (alpha.max(beta).max(shift) - 3.0).max(0.0)
}
