//! Sequential Monte Carlo kernels over fixed-size batches.
//!
//! Sample `k` always belongs to batch `k / BATCH_SIZE`, and batch `b` draws
//! from ChaCha8 seeded with the run seed on stream `b`. A batch's output
//! depends only on `(seed, b)`, so any scheduler that runs batches in any
//! order and reduces them in batch order reproduces the same result.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arrays::{Array, Array2};
use crate::error::{Error, Result};
use crate::exchange::{
    delta_t1, delta_t2, drift_t1_closed_form, drift_t2_closed_form, m1_bound, m2_bound, Coin,
};
use crate::permutations::{sample_distinct_triple, shuffle, bounded};
use crate::statistics::{t2_raw, t3_raw, y_raw, PreparedArray3, StatKind};

pub const BATCH_SIZE: u64 = 4096;

/// Generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

pub fn batch_count(samples: u64) -> u64 {
    samples.div_ceil(BATCH_SIZE)
}

/// Samples in batch `batch` out of `samples` total.
pub fn batch_len(samples: u64, batch: u64) -> u64 {
    samples.saturating_sub(batch * BATCH_SIZE).min(BATCH_SIZE)
}

/// A statistic bound to its array.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    T1(&'a PreparedArray3),
    T2(&'a PreparedArray3),
    T3(&'a Array2),
}

impl<'a> Target<'a> {
    pub fn kind(&self) -> StatKind {
        match self {
            Target::T1(_) => StatKind::T1,
            Target::T2(_) => StatKind::T2,
            Target::T3(_) => StatKind::T3,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Target::T1(p) | Target::T2(p) => p.n(),
            Target::T3(a) => a.n(),
        }
    }

    /// Closed-form `E[T]`.
    pub fn mean(&self) -> f64 {
        match self {
            Target::T1(p) => p.mean_t1(),
            Target::T2(p) => p.mean_t2(),
            Target::T3(a) => crate::statistics::mean_t3(a),
        }
    }
}

/// Owns a prepared form of a loaded array so a [`Target`] can borrow it.
#[derive(Debug, Clone)]
pub enum PreparedArray {
    Two(Array2),
    Three(PreparedArray3),
}

impl PreparedArray {
    pub fn new(array: Array) -> Self {
        match array {
            Array::Two(a) => PreparedArray::Two(a),
            Array::Three(a) => PreparedArray::Three(PreparedArray3::new(a)),
        }
    }

    pub fn target(&self, kind: StatKind) -> Result<Target<'_>> {
        match (kind, self) {
            (StatKind::T1, PreparedArray::Three(p)) => Ok(Target::T1(p)),
            (StatKind::T2, PreparedArray::Three(p)) => Ok(Target::T2(p)),
            (StatKind::T3, PreparedArray::Two(a)) => Ok(Target::T3(a)),
            (kind, _) => Err(Error::WrongDims(kind, kind.dims())),
        }
    }
}

/// Reusable permutation buffers; each call redraws from the identity.
struct StateBuffers {
    sigma: Vec<usize>,
    pi: Vec<usize>,
}

impl StateBuffers {
    fn new(n: usize) -> Self {
        Self { sigma: (0..n).collect(), pi: (0..n).collect() }
    }

    fn draw_sigma(&mut self, rng: &mut impl RngCore) {
        for (i, v) in self.sigma.iter_mut().enumerate() {
            *v = i;
        }
        shuffle(&mut self.sigma, rng);
    }

    fn draw_pi(&mut self, rng: &mut impl RngCore) {
        for (i, v) in self.pi.iter_mut().enumerate() {
            *v = i;
        }
        shuffle(&mut self.pi, rng);
    }

    /// Draws a fresh state (`σ`, then `π` for `T2`) and evaluates the
    /// statistic.
    fn sample(&mut self, target: &Target<'_>, rng: &mut impl RngCore) -> f64 {
        self.draw_sigma(rng);
        match target {
            Target::T1(p) => p.t1_raw(&self.sigma),
            Target::T2(p) => {
                self.draw_pi(rng);
                t2_raw(p.array(), &self.sigma, &self.pi)
            }
            Target::T3(a) => t3_raw(a, &self.sigma),
        }
    }
}

/// Draws the statistic `count` times from `rng`; used by tests and small
/// tools that do not need batching.
pub fn sample_values(target: &Target<'_>, count: usize, rng: &mut impl RngCore) -> Vec<f64> {
    let mut buf = StateBuffers::new(target.n());
    (0..count).map(|_| buf.sample(target, rng)).collect()
}

/// Checks a grid is non-negative, finite and non-decreasing.
pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidArgument("grid points must be finite and >= 0"));
    }
    if !grid.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidArgument("grid must be ascending"));
    }
    Ok(())
}

/// For each grid point `t`, the number of samples in the batch with
/// `|T - center| >= t`.
pub fn tail_hits_batch(
    target: &Target<'_>,
    grid: &[f64],
    center: f64,
    seed: u64,
    batch: u64,
    samples: u64,
) -> Vec<u64> {
    let mut rng = batch_rng(seed, batch);
    let mut buf = StateBuffers::new(target.n());
    // reach[j]: samples whose deviation clears exactly the first j grid points.
    let mut reach = alloc::vec![0u64; grid.len() + 1];
    for _ in 0..batch_len(samples, batch) {
        let dev = (buf.sample(target, &mut rng) - center).abs();
        reach[grid.partition_point(|&t| t <= dev)] += 1;
    }
    let mut hits = alloc::vec![0u64; grid.len()];
    let mut acc = 0;
    for k in (0..grid.len()).rev() {
        acc += reach[k + 1];
        hits[k] = acc;
    }
    hits
}

/// Additive sums over `(state, move)` draws; see [`pair_moments_batch`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairMomentSums {
    pub count: u64,
    pub abs_delta: f64,
    pub abs_delta_sq: f64,
    pub delta_sq: f64,
    pub delta_sq_sq: f64,
    /// Exact per-state drift `E[T - T' | state]`.
    pub drift: f64,
    pub drift_sq: f64,
    /// Per-state upper bounds on `E[|Δ| | state]` and `E[Δ² | state]`.
    pub abs_bound: f64,
    pub sq_bound: f64,
    pub stat: f64,
}

impl PairMomentSums {
    pub fn merge(&mut self, other: &PairMomentSums) {
        self.count += other.count;
        self.abs_delta += other.abs_delta;
        self.abs_delta_sq += other.abs_delta_sq;
        self.delta_sq += other.delta_sq;
        self.delta_sq_sq += other.delta_sq_sq;
        self.drift += other.drift;
        self.drift_sq += other.drift_sq;
        self.abs_bound += other.abs_bound;
        self.sq_bound += other.sq_bound;
        self.stat += other.stat;
    }
}

/// Fresh state, one exchange move, per sample.
///
/// The per-state bounds are `(2/n)(T1 + E)` and `4(T1 + E)` for `T1`, and
/// the `m1`/`m2` bounds of the `exchange` module for `T2`.
pub fn pair_moments_batch(
    target: &Target<'_>,
    seed: u64,
    batch: u64,
    samples: u64,
) -> Result<PairMomentSums> {
    let n = target.n();
    let mut rng = batch_rng(seed, batch);
    let mut buf = StateBuffers::new(n);
    let mut sums = PairMomentSums::default();
    let nf = n as f64;
    for _ in 0..batch_len(samples, batch) {
        let (stat, delta, drift, abs_bound, sq_bound) = match target {
            Target::T1(p) => {
                buf.draw_sigma(&mut rng);
                let stat = p.t1_raw(&buf.sigma);
                let i1 = bounded(rng.next_u64(), n);
                let i2 = bounded(rng.next_u64(), n);
                let delta = delta_t1(p, &buf.sigma, i1, i2);
                let mean = p.mean_t1();
                let drift = drift_t1_closed_form(n, stat, mean);
                (stat, delta, drift, 2.0 / nf * (stat + mean), 4.0 * (stat + mean))
            }
            Target::T2(p) => {
                if n < 3 {
                    return Err(Error::TooSmall { what: "the T2 exchange move", n, min: 3 });
                }
                buf.draw_sigma(&mut rng);
                buf.draw_pi(&mut rng);
                let stat = t2_raw(p.array(), &buf.sigma, &buf.pi);
                let triple = sample_distinct_triple(n, &mut rng)?;
                let coin = Coin::sample(&mut rng);
                let delta = delta_t2(p.array(), &buf.sigma, &buf.pi, &triple, coin);
                let mean = p.mean_t2();
                let y = y_raw(p.array(), &buf.sigma, &buf.pi);
                let drift = drift_t2_closed_form(n, stat, mean, y);
                (stat, delta, drift, m1_bound(n, stat, mean), m2_bound(n, stat, mean))
            }
            Target::T3(_) => {
                return Err(Error::InvalidArgument("pair moments are defined for t1 and t2 only"))
            }
        };
        let abs = delta.abs();
        let sq = delta * delta;
        sums.count += 1;
        sums.abs_delta += abs;
        sums.abs_delta_sq += abs * abs;
        sums.delta_sq += sq;
        sums.delta_sq_sq += sq * sq;
        sums.drift += drift;
        sums.drift_sq += drift * drift;
        sums.abs_bound += abs_bound;
        sums.sq_bound += sq_bound;
        sums.stat += stat;
    }
    Ok(sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::Array3;

    #[test]
    fn batches_cover_samples() {
        assert_eq!(batch_count(0), 0);
        assert_eq!(batch_count(1), 1);
        assert_eq!(batch_count(BATCH_SIZE), 1);
        assert_eq!(batch_count(BATCH_SIZE + 1), 2);
        let total = 3 * BATCH_SIZE + 17;
        let covered: u64 = (0..batch_count(total)).map(|b| batch_len(total, b)).sum();
        assert_eq!(covered, total);
    }

    #[test]
    fn batch_streams_differ() {
        let mut a = batch_rng(1, 0);
        let mut b = batch_rng(1, 1);
        assert_ne!(a.next_u64(), b.next_u64());
        let mut c = batch_rng(1, 0);
        assert_eq!(batch_rng(1, 0).next_u64(), c.next_u64());
    }

    #[test]
    fn tail_hits_against_direct_count() {
        let p = PreparedArray3::new(Array3::uniform(6, 2).unwrap());
        let target = Target::T2(&p);
        let grid: Vec<f64> = (0..12).map(|k| k as f64 * 0.25).collect();
        let center = target.mean();
        let samples = 1000;
        let hits = tail_hits_batch(&target, &grid, center, 9, 0, samples);
        let mut rng = batch_rng(9, 0);
        let values = sample_values(&target, samples as usize, &mut rng);
        for (k, &t) in grid.iter().enumerate() {
            let direct = values.iter().filter(|v| (*v - center).abs() >= t).count() as u64;
            assert_eq!(hits[k], direct, "t = {t}");
        }
        assert_eq!(hits[0], samples);
        assert!(hits.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[]).is_ok());
        assert!(validate_grid(&[0.0, 0.5, 0.5, 1.0]).is_ok());
        assert!(validate_grid(&[1.0, 0.5]).is_err());
        assert!(validate_grid(&[-0.1]).is_err());
        assert!(validate_grid(&[f64::NAN]).is_err());
    }

    #[test]
    fn pair_moments_on_constant_array() {
        let p = PreparedArray3::new(Array3::constant(5, 0.5).unwrap());
        for target in [Target::T1(&p), Target::T2(&p)] {
            let s = pair_moments_batch(&target, 3, 0, 500).unwrap();
            assert_eq!(s.count, 500);
            assert_eq!((s.abs_delta, s.delta_sq), (0.0, 0.0));
            assert!(s.drift.abs() < 1e-9);
        }
        let a2 = Array2::constant(3, 0.5).unwrap();
        assert!(pair_moments_batch(&Target::T3(&a2), 0, 0, 10).is_err());
    }

    #[test]
    fn prepared_array_targets() {
        let two = PreparedArray::new(Array::Two(Array2::uniform(3, 1).unwrap()));
        assert!(two.target(StatKind::T3).is_ok());
        assert!(matches!(two.target(StatKind::T1), Err(Error::WrongDims(StatKind::T1, 3))));
        let three = PreparedArray::new(Array::Three(Array3::uniform(3, 1).unwrap()));
        assert_eq!(three.target(StatKind::T2).unwrap().kind(), StatKind::T2);
        assert!(three.target(StatKind::T3).is_err());
    }
}
