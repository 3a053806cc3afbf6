//! Dense coefficient arrays with every entry in `[0, 1]`.
//!
//! Entries are validated once, at construction; everything downstream relies
//! on the range invariant.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

fn validate(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(Error::EntryOutOfRange { index, value: values[index] }),
        None => Ok(()),
    }
}

fn check_shape(n: usize, dims: u32, found: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyArray);
    }
    let expected = n
        .checked_pow(dims)
        .ok_or(Error::InvalidArgument("array side length overflows"))?;
    if expected != found {
        return Err(Error::Shape { n, dims: dims as usize, expected, found });
    }
    Ok(())
}

fn check_constant(n: usize, c: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyArray);
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::EntryOutOfRange { index: 0, value: c });
    }
    Ok(())
}

/// Uniform double in `[0, 1)` from the top 53 bits of one 64-bit draw.
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn uniform_values(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| unit_f64(&mut rng)).collect()
}

/// An `n × n` array `a[i][j]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Array2 {
    n: usize,
    values: Vec<f64>,
}

impl Array2 {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(n, 2, values.len())?;
        validate(&values)?;
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        check_constant(n, c)?;
        Ok(Self { n, values: vec![c; n * n] })
    }

    /// Entries drawn from ChaCha8 seeded with `seed`; bit-identical for equal
    /// `(n, seed)`.
    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyArray);
        }
        Ok(Self { n, values: uniform_values(n * n, seed) })
    }

    /// Spearman's footrule `|i - j|`, divided by `n - 1` so entries land in
    /// `[0, 1]`.
    pub fn footrule(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall { what: "footrule array", n, min: 2 });
        }
        let scale = (n - 1) as f64;
        let values = (0..n)
            .flat_map(|i| (0..n).map(move |j| i.abs_diff(j) as f64 / scale))
            .collect();
        Ok(Self { n, values })
    }

    /// Rank-one array `a[i][j] = c[i] * d[j]`.
    pub fn product(c: &[f64], d: &[f64]) -> Result<Self> {
        if c.len() != d.len() {
            return Err(Error::SizeMismatch { left: c.len(), right: d.len() });
        }
        let n = c.len();
        if n == 0 {
            return Err(Error::EmptyArray);
        }
        let values = c.iter().flat_map(|ci| d.iter().map(move |dj| ci * dj)).collect::<Vec<_>>();
        validate(&values)?;
        Ok(Self { n, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// An `n × n × n` array `a[i][j][k]`, stored in `(i, j, k)` row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Array3 {
    n: usize,
    values: Vec<f64>,
}

impl Array3 {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(n, 3, values.len())?;
        validate(&values)?;
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        check_constant(n, c)?;
        Ok(Self { n, values: vec![c; n * n * n] })
    }

    pub fn uniform(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyArray);
        }
        Ok(Self { n, values: uniform_values(n * n * n, seed) })
    }

    /// Builds an array from a closure over 0-based `(i, j, k)`; the closure's
    /// outputs are validated like any other input.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    values.push(f(i, j, k));
                }
            }
        }
        Self::new(n, values)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Either array shape, as read from or written to a file.
#[derive(Debug, Clone, PartialEq)]
pub enum Array {
    Two(Array2),
    Three(Array3),
}

impl Array {
    /// Validating constructor from a dims tag and a flat value list.
    pub fn from_parts(dims: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        match dims {
            2 => Array2::new(n, values).map(Array::Two),
            3 => Array3::new(n, values).map(Array::Three),
            _ => Err(Error::InvalidArgument("dims must be 2 or 3")),
        }
    }

    pub fn constant(n: usize, c: f64, dims: usize) -> Result<Self> {
        match dims {
            2 => Array2::constant(n, c).map(Array::Two),
            3 => Array3::constant(n, c).map(Array::Three),
            _ => Err(Error::InvalidArgument("dims must be 2 or 3")),
        }
    }

    pub fn uniform(n: usize, seed: u64, dims: usize) -> Result<Self> {
        match dims {
            2 => Array2::uniform(n, seed).map(Array::Two),
            3 => Array3::uniform(n, seed).map(Array::Three),
            _ => Err(Error::InvalidArgument("dims must be 2 or 3")),
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            Array::Two(_) => 2,
            Array::Three(_) => 3,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Array::Two(a) => a.n(),
            Array::Three(a) => a.n(),
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Array::Two(a) => a.values(),
            Array::Three(a) => a.values(),
        }
    }
}

impl From<Array2> for Array {
    fn from(a: Array2) -> Self {
        Array::Two(a)
    }
}

impl From<Array3> for Array {
    fn from(a: Array3) -> Self {
        Array::Three(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_fill() {
        let a = Array3::constant(2, 0.5).unwrap();
        assert_eq!(a.values(), &[0.5; 8]);
        let b = Array2::constant(1, 0.0).unwrap();
        assert_eq!(b.values(), &[0.0]);
        assert!(matches!(Array3::constant(2, 1.5), Err(Error::EntryOutOfRange { .. })));
        assert!(matches!(Array2::constant(2, -0.1), Err(Error::EntryOutOfRange { .. })));
        assert_eq!(Array2::constant(0, 0.5), Err(Error::EmptyArray));
    }

    #[test]
    fn uniform_is_deterministic_and_in_range() {
        let a = Array3::uniform(4, 7).unwrap();
        assert_eq!(a, Array3::uniform(4, 7).unwrap());
        assert_eq!(a.values().len(), 64);
        assert!(a.values().iter().all(|v| (0.0..1.0).contains(v)));
        let b = Array3::uniform(4, 8).unwrap();
        assert_ne!(a.values(), b.values(), "different seeds gave identical arrays");
    }

    #[test]
    fn footrule_values() {
        let f3 = Array2::footrule(3).unwrap();
        assert_eq!(f3.values(), &[0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0]);
        let f2 = Array2::footrule(2).unwrap();
        assert_eq!(f2.values(), &[0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(Array2::footrule(1), Err(Error::TooSmall { .. })));
        let f9 = Array2::footrule(9).unwrap();
        assert!((0..9).all(|i| f9.get(i, i) == 0.0));
    }

    #[test]
    fn product_arrays() {
        let p = Array2::product(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(p.values(), &[1.0, 0.0, 0.0, 0.0]);
        let q = Array2::product(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert_eq!(q.values(), &[0.5; 4]);
        assert!(matches!(
            Array2::product(&[1.0, 2.0], &[1.0, 1.0]),
            Err(Error::EntryOutOfRange { value, .. }) if value == 2.0
        ));
        assert!(matches!(Array2::product(&[1.0], &[1.0, 1.0]), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn shape_and_range_errors() {
        assert_eq!(
            Array::from_parts(2, 2, vec![0.0; 7]),
            Err(Error::Shape { n: 2, dims: 2, expected: 4, found: 7 })
        );
        assert!(matches!(
            Array::from_parts(2, 1, vec![1.5]),
            Err(Error::EntryOutOfRange { index: 0, .. })
        ));
        assert!(matches!(Array::from_parts(2, 1, vec![f64::NAN]), Err(Error::EntryOutOfRange { .. })));
        assert!(Array::from_parts(4, 1, vec![0.0]).is_err());
    }

    proptest! {
        #[test]
        fn generators_respect_range(n in 1usize..7, seed in any::<u64>()) {
            let a = Array3::uniform(n, seed).unwrap();
            prop_assert!(Array3::new(n, a.values().to_vec()).is_ok());
            let b = Array2::uniform(n, seed).unwrap();
            prop_assert!(Array2::new(n, b.values().to_vec()).is_ok());
        }

        #[test]
        fn footrule_is_symmetric(n in 2usize..30) {
            let f = Array2::footrule(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(f.get(i, j), f.get(j, i));
                }
            }
        }
    }
}
