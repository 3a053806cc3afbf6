//! The statistics `T1`, `T2`, `T3`, their expectations under uniform
//! permutations, and the correction term `Y(σ, π)`.
//!
//! All sums run in ascending index order so identical inputs always give
//! bit-identical results. `T1` is accumulated row by row:
//! `Σ_i (Σ_j a[i][j][σ(i)])`, which is exactly what [`PreparedArray3`]
//! reproduces from its cached row sums.

use core::fmt;

use alloc::vec::Vec;

use crate::arrays::{Array2, Array3};
use crate::error::{Error, Result};
use crate::permutations::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatKind {
    T1,
    T2,
    T3,
}

impl StatKind {
    /// Dimension of the array the statistic is defined on.
    pub fn dims(self) -> usize {
        match self {
            StatKind::T3 => 2,
            StatKind::T1 | StatKind::T2 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StatKind::T1 => "t1",
            StatKind::T2 => "t2",
            StatKind::T3 => "t3",
        }
    }
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_size(n: usize, p: &Permutation) -> Result<()> {
    if p.n() != n {
        return Err(Error::SizeMismatch { left: n, right: p.n() });
    }
    Ok(())
}

pub(crate) fn t3_raw(a: &Array2, sigma: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &s) in sigma.iter().enumerate() {
        total += a.get(i, s);
    }
    total
}

pub(crate) fn t2_raw(a: &Array3, sigma: &[usize], pi: &[usize]) -> f64 {
    let mut total = 0.0;
    for i in 0..sigma.len() {
        total += a.get(i, sigma[i], pi[i]);
    }
    total
}

pub fn t3(a: &Array2, sigma: &Permutation) -> Result<f64> {
    check_size(a.n(), sigma)?;
    Ok(t3_raw(a, sigma.images()))
}

pub fn t1(a: &Array3, sigma: &Permutation) -> Result<f64> {
    check_size(a.n(), sigma)?;
    let n = a.n();
    let mut total = 0.0;
    for i in 0..n {
        let k = sigma.image(i);
        let mut row = 0.0;
        for j in 0..n {
            row += a.get(i, j, k);
        }
        total += row;
    }
    Ok(total)
}

pub fn t2(a: &Array3, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    check_size(a.n(), sigma)?;
    check_size(a.n(), pi)?;
    Ok(t2_raw(a, sigma.images(), pi.images()))
}

fn flat_sum(values: &[f64]) -> f64 {
    values.iter().sum()
}

/// `E[T1] = (1/n) Σ_{i,j,k} a[i][j][k]`.
pub fn mean_t1(a: &Array3) -> f64 {
    flat_sum(a.values()) / a.n() as f64
}

/// `E[T2] = (1/n²) Σ_{i,j,k} a[i][j][k]`.
pub fn mean_t2(a: &Array3) -> f64 {
    let n = a.n() as f64;
    flat_sum(a.values()) / (n * n)
}

/// `E[T3] = (1/n) Σ_{i,j} a[i][j]`.
pub fn mean_t3(a: &Array2) -> f64 {
    flat_sum(a.values()) / a.n() as f64
}

pub(crate) fn y_raw(a: &Array3, sigma: &[usize], pi: &[usize]) -> f64 {
    // Ordered tuples with exactly two distinct entries, in lexicographic
    // (i, j, k) order: for j == i every k != i, otherwise k ∈ {i, j}.
    let n = sigma.len();
    let mut total = 0.0;
    for i in 0..n {
        for (j, &s) in sigma.iter().enumerate() {
            if j == i {
                for k in (0..n).filter(|&k| k != i) {
                    total += a.get(i, s, pi[k]);
                }
            } else {
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                total += a.get(i, s, pi[lo]);
                total += a.get(i, s, pi[hi]);
            }
        }
    }
    total
}

/// `Y(σ, π) = Σ_{(i,j,k) ∈ C2} a[i][σ(j)][π(k)]`, summed over the
/// `3n(n-1)` ordered triples with exactly two distinct entries.
pub fn y_stat(a: &Array3, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
    check_size(a.n(), sigma)?;
    check_size(a.n(), pi)?;
    Ok(y_raw(a, sigma.images(), pi.images()))
}

/// A 3-D array together with the quantities every move and functional
/// needs: the row sums `s[i][k] = Σ_j a[i][j][k]` and both means.
#[derive(Debug, Clone)]
pub struct PreparedArray3 {
    array: Array3,
    row_sums: Vec<f64>,
    mean_t1: f64,
    mean_t2: f64,
}

impl PreparedArray3 {
    pub fn new(array: Array3) -> Self {
        let n = array.n();
        let mut row_sums = alloc::vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    s += array.get(i, j, k);
                }
                row_sums[i * n + k] = s;
            }
        }
        let mean_t1 = mean_t1(&array);
        let mean_t2 = mean_t2(&array);
        Self { array, row_sums, mean_t1, mean_t2 }
    }

    pub fn array(&self) -> &Array3 {
        &self.array
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.array.n()
    }

    #[inline]
    pub fn row_sum(&self, i: usize, k: usize) -> f64 {
        self.row_sums[i * self.n() + k]
    }

    pub fn mean_t1(&self) -> f64 {
        self.mean_t1
    }

    pub fn mean_t2(&self) -> f64 {
        self.mean_t2
    }

    /// `T1` in `O(n)`; bit-identical to [`t1`].
    pub(crate) fn t1_raw(&self, sigma: &[usize]) -> f64 {
        let mut total = 0.0;
        for (i, &k) in sigma.iter().enumerate() {
            total += self.row_sum(i, k);
        }
        total
    }

    pub fn t1(&self, sigma: &Permutation) -> Result<f64> {
        check_size(self.n(), sigma)?;
        Ok(self.t1_raw(sigma.images()))
    }

    pub fn t2(&self, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
        t2(&self.array, sigma, pi)
    }

    pub fn y_stat(&self, sigma: &Permutation, pi: &Permutation) -> Result<f64> {
        y_stat(&self.array, sigma, pi)
    }
}
