//! Permutations of `{0..n}` and the two random moves the exchangeable pairs
//! are built from: a transposition `(I1 I2)` and the 3-cycles on a triple of
//! distinct indices.
//!
//! Composition follows function notation: `a.compose(&b)` maps `i` to
//! `a(b(i))`, so `σ ∘ (I1 I2)` sends `I1` to `σ(I2)`.
//!
//! Stream consumption is fixed so results are reproducible across
//! implementations of the same generator:
//!
//! * [`Permutation::sample_uniform`] draws exactly `n - 1` values of 64 bits;
//! * [`sample_distinct_triple`] draws exactly 3.
//!
//! Each draw is mapped into `0..m` by the high half of the 128-bit product
//! `x * m`, which never rejects. Its bias is below `m / 2^64`.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};

/// Maps a 64-bit draw into `0..m` with one widening multiply.
#[inline]
pub fn bounded(draw: u64, m: usize) -> usize {
    ((draw as u128 * m as u128) >> 64) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Validates a 0-based image array.
    pub fn from_images(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = alloc::vec![false; n];
        for &v in &map {
            if v >= n || core::mem::replace(&mut seen[v], true) {
                return Err(Error::NotBijection { n });
            }
        }
        Ok(Self { map })
    }

    /// Validates a 1-based image array, the external representation.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        let n = map.len();
        let zero_based = map
            .iter()
            .map(|&v| v.checked_sub(1).ok_or(Error::NotBijection { n }))
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(zero_based)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    /// Fisher–Yates shuffle of the identity, consuming `n - 1` draws.
    pub fn sample_uniform(n: usize, rng: &mut impl RngCore) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        shuffle(&mut map, rng);
        Self { map }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch { left: self.n(), right: other.n() });
        }
        Ok(Permutation { map: other.map.iter().map(|&j| self.map[j]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = alloc::vec![0; self.n()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// The transposition swapping `i1` and `i2`; the identity when they are
    /// equal.
    pub fn transposition(n: usize, i1: usize, i2: usize) -> Result<Permutation> {
        check_index(i1, n)?;
        check_index(i2, n)?;
        let mut p = Permutation::identity(n);
        p.map.swap(i1, i2);
        Ok(p)
    }
}

/// In-place Fisher–Yates over `items`, consuming `len - 1` draws.
pub fn shuffle<T>(items: &mut [T], rng: &mut impl RngCore) {
    for i in (1..items.len()).rev() {
        let j = bounded(rng.next_u64(), i + 1);
        items.swap(i, j);
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(())
}

/// Number of distinct entries of an index triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TupleClass {
    C1,
    C2,
    C3,
}

pub fn classify_tuple(i1: usize, i2: usize, i3: usize) -> TupleClass {
    match (i1 == i2, i2 == i3, i1 == i3) {
        (true, true, _) => TupleClass::C1,
        (false, false, false) => TupleClass::C3,
        _ => TupleClass::C2,
    }
}

/// An ordered index triple `(I1, I2, I3)` tagged with its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexTriple {
    idx: [usize; 3],
    class: TupleClass,
}

impl IndexTriple {
    pub fn new(n: usize, i1: usize, i2: usize, i3: usize) -> Result<Self> {
        for i in [i1, i2, i3] {
            check_index(i, n)?;
        }
        Ok(Self { idx: [i1, i2, i3], class: classify_tuple(i1, i2, i3) })
    }

    pub fn indices(&self) -> [usize; 3] {
        self.idx
    }

    pub fn class(&self) -> TupleClass {
        self.class
    }

    /// Where the 3-cycle sends each of `I1, I2, I3`, in that order.
    pub(crate) fn cycle_targets(&self, dir: CycleDir) -> [usize; 3] {
        let [a, b, c] = self.idx;
        match dir {
            CycleDir::Forward => [b, c, a],
            CycleDir::Backward => [c, a, b],
        }
    }
}

/// The two non-identity cyclic permutations of a C3 triple.
///
/// `Forward` is `(I1 I2 I3)`: `I1 → I2 → I3 → I1`.
/// `Backward` is `(I1 I3 I2)`: `I1 → I3 → I2 → I1`, the inverse of `Forward`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleDir {
    Forward,
    Backward,
}

impl CycleDir {
    pub fn inverse(self) -> Self {
        match self {
            CycleDir::Forward => CycleDir::Backward,
            CycleDir::Backward => CycleDir::Forward,
        }
    }
}

/// The 3-cycle on `triple` as a permutation of `n` elements.
pub fn cycle_tau(dir: CycleDir, triple: &IndexTriple, n: usize) -> Result<Permutation> {
    if triple.class != TupleClass::C3 {
        return Err(Error::InvalidMove(triple.class));
    }
    for i in triple.idx {
        check_index(i, n)?;
    }
    let mut p = Permutation::identity(n);
    for (from, to) in triple.idx.into_iter().zip(triple.cycle_targets(dir)) {
        p.map[from] = to;
    }
    Ok(p)
}

/// Uniform ordered triple of distinct indices, consuming exactly 3 draws.
pub fn sample_distinct_triple(n: usize, rng: &mut impl RngCore) -> Result<IndexTriple> {
    if n < 3 {
        return Err(Error::TooSmall { what: "a distinct index triple", n, min: 3 });
    }
    let i1 = bounded(rng.next_u64(), n);
    let mut i2 = bounded(rng.next_u64(), n - 1);
    if i2 >= i1 {
        i2 += 1;
    }
    let (lo, hi) = if i1 < i2 { (i1, i2) } else { (i2, i1) };
    let mut i3 = bounded(rng.next_u64(), n - 2);
    if i3 >= lo {
        i3 += 1;
    }
    if i3 >= hi {
        i3 += 1;
    }
    Ok(IndexTriple { idx: [i1, i2, i3], class: TupleClass::C3 })
}

/// Lexicographic enumeration of `S_n` by in-place successor steps.
#[derive(Debug, Clone)]
pub struct LexPermutations {
    current: Vec<usize>,
    done: bool,
}

impl LexPermutations {
    pub fn new(n: usize) -> Self {
        Self { current: (0..n).collect(), done: false }
    }

    /// Only the permutations whose first image is `first`, in lexicographic
    /// order. These partition `S_n` as `first` ranges over `0..n`.
    pub fn with_first(n: usize, first: usize) -> Self {
        assert!(first < n, "first image {first} out of range for n = {n}");
        let mut current = Vec::with_capacity(n);
        current.push(first);
        current.extend((0..n).filter(|&v| v != first));
        Self { current, done: false }
    }

    /// The current permutation, or `None` once the enumeration is exhausted.
    pub fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(self.current.as_slice())
    }

    /// Moves to the lexicographic successor, leaving position 0 untouched
    /// when `fixed_prefix` is 1.
    fn advance_from(&mut self, fixed_prefix: usize) {
        let p = &mut self.current;
        let n = p.len();
        let Some(i) = (fixed_prefix..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            self.done = true;
            return;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }

    /// Calls `f` on every permutation in order.
    pub fn for_each(mut self, mut f: impl FnMut(&[usize])) {
        while let Some(p) = self.current() {
            f(p);
            self.advance_from(0);
        }
    }

    /// Like [`for_each`](Self::for_each) but keeps the first image fixed.
    pub fn for_each_with_fixed_first(mut self, mut f: impl FnMut(&[usize])) {
        while let Some(p) = self.current() {
            f(p);
            self.advance_from(1);
        }
    }
}

/// Calls `f` on every element of `S_n`, as 0-based image slices.
pub fn for_each_permutation(n: usize, f: impl FnMut(&[usize])) {
    LexPermutations::new(n).for_each(f)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
