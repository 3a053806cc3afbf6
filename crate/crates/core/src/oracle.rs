//! Ground truth by exhaustive enumeration of `S_n` (or `S_n × S_n`).
//!
//! Outcomes are grouped by bit-exact equality of the canonically summed
//! statistic, and every probability is an integer count over an integer
//! total until the final division.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::arrays::{Array, Array2, Array3};
use crate::error::{Error, Result};
use crate::exchange::{delta_t2, f_t2_formula, for_each_distinct_triple, Coin};
use crate::permutations::{
    factorial, for_each_permutation, IndexTriple, LexPermutations, Permutation,
};
use crate::statistics::{t2_raw, t3_raw, y_raw, PreparedArray3, StatKind};

/// Largest `n` for the `T1` and `T3` pmfs (`8! = 40320` states).
pub const MAX_N_SINGLE: usize = 8;
/// Largest `n` for the `T2` pmf (`(7!)² ≈ 2.5·10⁷` states).
pub const MAX_N_T2: usize = 7;
/// Largest `n` for the joint `(T1, T1')` law (`n!·n²` states).
pub const MAX_N_EXCHANGE_T1: usize = 5;
/// Largest `n` for the joint `(T2, T2')` law (`(n!)²·2n(n-1)(n-2)` states).
pub const MAX_N_EXCHANGE_T2: usize = 4;

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what, n, cap });
    }
    Ok(())
}

/// The full law of a statistic as `(value, count)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    outcomes: Vec<(f64, u64)>,
    total: u64,
}

impl ExactDistribution {
    /// Groups raw per-state values by bit pattern.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_unstable_by(|a, b| a.total_cmp(b));
        let total = values.len() as u64;
        let mut outcomes: Vec<(f64, u64)> = Vec::new();
        for v in values {
            match outcomes.last_mut() {
                Some((last, count)) if last.to_bits() == v.to_bits() => *count += 1,
                _ => outcomes.push((v, 1)),
            }
        }
        Self { outcomes, total }
    }

    /// Validating constructor for deserialized data.
    pub fn from_outcomes(outcomes: Vec<(f64, u64)>, total: u64) -> Result<Self> {
        let sum: u64 = outcomes.iter().map(|o| o.1).sum();
        if sum != total {
            return Err(Error::InvalidArgument("outcome counts do not sum to total"));
        }
        if !outcomes.windows(2).all(|w| w[0].0 < w[1].0) {
            return Err(Error::InvalidArgument("outcome values must be strictly ascending"));
        }
        Ok(Self { outcomes, total })
    }

    /// Merges partial distributions, e.g. from a partition of `S_n` by
    /// first image. Counts add; the result does not depend on the order of
    /// `parts`.
    pub fn merge(parts: impl IntoIterator<Item = ExactDistribution>) -> Self {
        let mut map: BTreeMap<u64, u64> = BTreeMap::new();
        let mut total = 0;
        for part in parts {
            total += part.total;
            for (v, c) in part.outcomes {
                *map.entry(v.to_bits()).or_default() += c;
            }
        }
        let mut outcomes: Vec<(f64, u64)> =
            map.into_iter().map(|(bits, c)| (f64::from_bits(bits), c)).collect();
        outcomes.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        Self { outcomes, total }
    }

    pub fn outcomes(&self) -> &[(f64, u64)] {
        &self.outcomes
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        let weighted: f64 = self.outcomes.iter().map(|&(v, c)| v * c as f64).sum();
        weighted / self.total as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.outcomes.iter().map(|&(v, c)| (v - m) * (v - m) * c as f64).sum();
        ss / self.total as f64
    }

    /// `P(|X - center| >= t)` as an exact count.
    pub fn tail(&self, center: f64, t: f64) -> Result<TailProbability> {
        exact_tail(self, center, t)
    }
}

/// A probability kept as `hits / total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TailProbability {
    pub hits: u64,
    pub total: u64,
}

impl TailProbability {
    pub fn value(&self) -> f64 {
        self.hits as f64 / self.total as f64
    }
}

pub fn exact_tail(dist: &ExactDistribution, center: f64, t: f64) -> Result<TailProbability> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument("tail threshold must be non-negative"));
    }
    let hits = dist
        .outcomes
        .iter()
        .filter(|(v, _)| (v - center).abs() >= t)
        .map(|o| o.1)
        .sum();
    Ok(TailProbability { hits, total: dist.total })
}

pub fn exact_distribution_t3(a: &Array2) -> Result<ExactDistribution> {
    check_cap("the T3 distribution", a.n(), MAX_N_SINGLE)?;
    let mut values = Vec::with_capacity(factorial(a.n()) as usize);
    for_each_permutation(a.n(), |s| values.push(t3_raw(a, s)));
    Ok(ExactDistribution::from_values(values))
}

pub fn exact_distribution_t1(p: &PreparedArray3) -> Result<ExactDistribution> {
    check_cap("the T1 distribution", p.n(), MAX_N_SINGLE)?;
    let mut values = Vec::with_capacity(factorial(p.n()) as usize);
    for_each_permutation(p.n(), |s| values.push(p.t1_raw(s)));
    Ok(ExactDistribution::from_values(values))
}

/// The part of the `T2` law coming from states with `σ(0) = first`.
/// Merging the parts for `first in 0..n` gives [`exact_distribution_t2`].
pub fn exact_distribution_t2_part(a: &Array3, first: usize) -> Result<ExactDistribution> {
    let n = a.n();
    check_cap("the T2 distribution", n, MAX_N_T2)?;
    if first >= n {
        return Err(Error::IndexOutOfRange { index: first, n });
    }
    let mut pis: Vec<Vec<usize>> = Vec::with_capacity(factorial(n) as usize);
    for_each_permutation(n, |q| pis.push(q.to_vec()));
    let mut values = Vec::with_capacity(pis.len() * factorial(n - 1) as usize);
    LexPermutations::with_first(n, first).for_each_with_fixed_first(|s| {
        for q in &pis {
            values.push(t2_raw(a, s, q));
        }
    });
    Ok(ExactDistribution::from_values(values))
}

pub fn exact_distribution_t2(a: &Array3) -> Result<ExactDistribution> {
    let n = a.n();
    check_cap("the T2 distribution", n, MAX_N_T2)?;
    let mut pis: Vec<Vec<usize>> = Vec::with_capacity(factorial(n) as usize);
    for_each_permutation(n, |q| pis.push(q.to_vec()));
    let mut values = Vec::with_capacity(pis.len() * pis.len());
    for s in &pis {
        for q in &pis {
            values.push(t2_raw(a, s, q));
        }
    }
    Ok(ExactDistribution::from_values(values))
}

/// Dispatches on the statistic; the array's dimension must match.
pub fn exact_distribution(a: &Array, kind: StatKind) -> Result<ExactDistribution> {
    match (kind, a) {
        (StatKind::T3, Array::Two(a2)) => exact_distribution_t3(a2),
        (StatKind::T1, Array::Three(a3)) => {
            check_cap("the T1 distribution", a3.n(), MAX_N_SINGLE)?;
            exact_distribution_t1(&PreparedArray3::new(a3.clone()))
        }
        (StatKind::T2, Array::Three(a3)) => exact_distribution_t2(a3),
        (kind, _) => Err(Error::WrongDims(kind, kind.dims())),
    }
}

/// Counts of the joint law of `(X, X')` keyed by bit patterns.
#[derive(Debug, Clone, Default)]
pub struct JointCounter {
    cells: BTreeMap<(u64, u64), u64>,
    total: u64,
}

impl JointCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64, x_moved: f64) {
        *self.cells.entry((x.to_bits(), x_moved.to_bits())).or_default() += 1;
        self.total += 1;
    }

    /// Largest `|count(x, x') - count(x', x)|` over all cells.
    pub fn report(&self) -> ExchangeReport {
        let max_count_diff = self
            .cells
            .iter()
            .map(|(&(x, y), &c)| c.abs_diff(self.cells.get(&(y, x)).copied().unwrap_or(0)))
            .max()
            .unwrap_or(0);
        ExchangeReport { total: self.total, cells: self.cells.len(), max_count_diff }
    }
}

/// Outcome of an exact exchangeability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeReport {
    /// Number of equally likely (state, move) outcomes enumerated.
    pub total: u64,
    /// Distinct `(x, x')` cells observed.
    pub cells: usize,
    pub max_count_diff: u64,
}

impl ExchangeReport {
    /// `max |P(x, x') - P(x', x)|`.
    pub fn discrepancy(&self) -> f64 {
        self.max_count_diff as f64 / self.total as f64
    }

    pub fn is_exchangeable(&self) -> bool {
        self.max_count_diff == 0
    }
}

/// The `T1` move, or a deliberately broken variant for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T1Move {
    /// `σ' = σ ∘ (I1 I2)`.
    Transposition,
    /// Writes `σ(I2)` into position `I1` only; `σ'` is no longer a
    /// permutation.
    OverwriteFirst,
}

/// The `T2` coupling, or a deliberately broken variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum T2Coupling {
    /// Uniform ordered distinct triple, fair coin between `(τ1, τ2)` and
    /// `(τ2, τ1)`.
    Paired,
    /// Only ascending triples `I1 < I2 < I3` and always `(τ1, τ2)`. The set
    /// of moves is no longer closed under inversion, so the pair is not
    /// exchangeable for a generic array.
    OrientedCycle,
}

/// Joint law of `(T1, T1')` over uniform `σ` and independent uniform
/// `(I1, I2)`.
pub fn verify_exchangeable_t1(p: &PreparedArray3, mv: T1Move) -> Result<ExchangeReport> {
    let n = p.n();
    check_cap("the (T1, T1') joint law", n, MAX_N_EXCHANGE_T1)?;
    let mut joint = JointCounter::new();
    let mut moved = alloc::vec![0; n];
    for_each_permutation(n, |s| {
        let x = p.t1_raw(s);
        for i1 in 0..n {
            for i2 in 0..n {
                moved.copy_from_slice(s);
                match mv {
                    T1Move::Transposition => moved.swap(i1, i2),
                    T1Move::OverwriteFirst => moved[i1] = s[i2],
                }
                joint.add(x, p.t1_raw(&moved));
            }
        }
    });
    Ok(joint.report())
}

/// Joint law of `(T2, T2')` over uniform `(σ, π)` and the coupling's moves.
pub fn verify_exchangeable_t2(p: &PreparedArray3, coupling: T2Coupling) -> Result<ExchangeReport> {
    let n = p.n();
    check_cap("the (T2, T2') joint law", n, MAX_N_EXCHANGE_T2)?;
    if n < 3 {
        return Err(Error::TooSmall { what: "the T2 exchange move", n, min: 3 });
    }
    let mut perms: Vec<Permutation> = Vec::new();
    for_each_permutation(n, |q| perms.push(Permutation::from_images(q.to_vec()).expect("valid")));
    let mut moves: Vec<(IndexTriple, Coin)> = Vec::new();
    for_each_distinct_triple(n, |t| match coupling {
        T2Coupling::Paired => moves.extend(Coin::BOTH.map(|c| (t, c))),
        T2Coupling::OrientedCycle => {
            let [a, b, c] = t.indices();
            if a < b && b < c {
                moves.push((t, Coin::First));
            }
        }
    });
    let mut joint = JointCounter::new();
    for s in &perms {
        for q in &perms {
            let x = t2_raw(p.array(), s.images(), q.images());
            for (t, coin) in &moves {
                let (s2, q2) = crate::exchange::moved_pair(s, q, t, *coin)?;
                joint.add(x, t2_raw(p.array(), s2.images(), q2.images()));
            }
        }
    }
    Ok(joint.report())
}

/// One group of `(σ, π)` states sharing a bit-identical `T2` value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Group {
    pub t2: f64,
    pub count: u64,
    /// Sum of the grouped functional over the group, in enumeration order.
    pub sum: f64,
}

impl T2Group {
    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }
}

/// Averages a per-state functional over each `T2` value: the exact
/// `E[g(σ, π) | T2]`. Groups are returned in ascending `T2` order.
pub fn group_by_t2(
    a: &Array3,
    mut g: impl FnMut(&Permutation, &Permutation) -> f64,
) -> Result<Vec<T2Group>> {
    let n = a.n();
    check_cap("grouping by T2", n, MAX_N_T2)?;
    let mut perms: Vec<Permutation> = Vec::new();
    for_each_permutation(n, |q| perms.push(Permutation::from_images(q.to_vec()).expect("valid")));
    let mut groups: BTreeMap<u64, (u64, f64)> = BTreeMap::new();
    for s in &perms {
        for q in &perms {
            let key = t2_raw(a, s.images(), q.images()).to_bits();
            let entry = groups.entry(key).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 += g(s, q);
        }
    }
    let mut out: Vec<T2Group> = groups
        .into_iter()
        .map(|(bits, (count, sum))| T2Group { t2: f64::from_bits(bits), count, sum })
        .collect();
    out.sort_unstable_by(|x, y| x.t2.total_cmp(&y.t2));
    Ok(out)
}

/// `E[Y(σ, π) | T2]` for every attained `T2` value.
pub fn conditional_y(a: &Array3) -> Result<Vec<T2Group>> {
    group_by_t2(a, |s, q| y_raw(a, s.images(), q.images()))
}

/// Looks up `E[Y | T2 = t2]` in a table from [`conditional_y`]; `None` if
/// `t2` is not an attained value.
pub fn cond_mean_y(groups: &[T2Group], t2: f64) -> Option<f64> {
    groups
        .binary_search_by(|g| g.t2.total_cmp(&t2))
        .ok()
        .map(|i| groups[i].mean())
}

/// The drift conditioned on the value of `T2`, `f(T2)`, with the exact
/// `E[Y | T2]`. Returns `(t2, f)` pairs.
pub fn exact_f_t2(p: &PreparedArray3) -> Result<Vec<(f64, f64)>> {
    let groups = conditional_y(p.array())?;
    Ok(groups
        .iter()
        .map(|g| (g.t2, f_t2_formula(p.n(), g.t2, p.mean_t2(), g.mean())))
        .collect())
}

/// `E[T2 - T2' | σ, π]` summed by hand over moves; kept here so the oracle
/// does not lean on `exchange::cond_drift_t2` when checking it.
pub fn brute_force_drift_t2(a: &Array3, s: &Permutation, q: &Permutation) -> f64 {
    let n = a.n();
    let mut total = 0.0;
    let mut count = 0u64;
    for_each_distinct_triple(n, |t| {
        for coin in Coin::BOTH {
            total += delta_t2(a, s.images(), q.images(), &t, coin);
            count += 1;
        }
    });
    total / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{cond_drift_t2, drift_t2_closed_form, f_t2_state};
    use crate::statistics::{mean_t1, mean_t2, mean_t3};
    use alloc::vec;

    #[test]
    fn constant_t2_is_a_point_mass() {
        let c = Array3::constant(3, 0.4).unwrap();
        let d = exact_distribution_t2(&c).unwrap();
        assert_eq!(d.total(), 36);
        assert_eq!(d.outcomes().len(), 1);
        assert_eq!(d.outcomes()[0].1, 36);
        assert!((d.outcomes()[0].0 - 1.2).abs() < 1e-15);
    }

    /// S_3 by hand with the normalized footrule, rows (0, .5, 1), (.5, 0, .5),
    /// (1, .5, 0):
    /// id → 0; (2,1,3) → 1; (1,3,2) → 1; (2,3,1) → .5+.5+1 = 2;
    /// (3,1,2) → 1+.5+.5 = 2; (3,2,1) → 1+0+1 = 2.
    #[test]
    fn footrule_t3_pmf() {
        let f = Array2::footrule(3).unwrap();
        let d = exact_distribution_t3(&f).unwrap();
        assert_eq!(d.outcomes(), &[(0.0, 1), (1.0, 2), (2.0, 3)]);
        assert_eq!(d.total(), 6);
        assert!((d.mean() - 4.0 / 3.0).abs() < 1e-15);
        assert!((d.mean() - mean_t3(&f)).abs() < 1e-15);
        // |0 - 4/3| and |2 - 4/3| reach 0.5; |1 - 4/3| does not.
        assert_eq!(d.tail(4.0 / 3.0, 0.5).unwrap(), TailProbability { hits: 4, total: 6 });
    }

    #[test]
    fn tail_edge_cases() {
        let a = Array3::uniform(3, 1).unwrap();
        let d = exact_distribution_t2(&a).unwrap();
        let m = mean_t2(&a);
        assert_eq!(d.tail(m, 0.0).unwrap().value(), 1.0);
        assert_eq!(d.tail(m, 3.5).unwrap().hits, 0);
        assert!(d.tail(m, -1.0).is_err());
        let mut last = u64::MAX;
        for k in 0..40 {
            let h = d.tail(m, k as f64 * 0.05).unwrap().hits;
            assert!(h <= last);
            last = h;
        }
    }

    #[test]
    fn means_match_closed_forms() {
        for n in 1..=6 {
            let a = Array3::uniform(n, n as u64).unwrap();
            let a2 = Array2::uniform(n, n as u64).unwrap();
            let p = PreparedArray3::new(a.clone());
            assert!((exact_distribution_t1(&p).unwrap().mean() - mean_t1(&a)).abs() <= 1e-10);
            assert!((exact_distribution_t2(&a).unwrap().mean() - mean_t2(&a)).abs() <= 1e-10);
            assert!((exact_distribution_t3(&a2).unwrap().mean() - mean_t3(&a2)).abs() <= 1e-10);
        }
    }

    #[test]
    fn partitions_merge_to_the_whole() {
        let a = Array3::uniform(4, 9).unwrap();
        let whole = exact_distribution_t2(&a).unwrap();
        let parts = (0..4).map(|f| exact_distribution_t2_part(&a, f).unwrap());
        assert_eq!(ExactDistribution::merge(parts), whole);
        let reversed = (0..4).rev().map(|f| exact_distribution_t2_part(&a, f).unwrap());
        assert_eq!(ExactDistribution::merge(reversed), whole);
    }

    #[test]
    fn caps_are_enforced() {
        let a = Array3::constant(9, 0.5).unwrap();
        let p = PreparedArray3::new(a.clone());
        assert!(matches!(exact_distribution_t1(&p), Err(Error::CapExceeded { cap: 8, .. })));
        let a8 = Array3::constant(8, 0.5).unwrap();
        assert!(matches!(exact_distribution_t2(&a8), Err(Error::CapExceeded { cap: 7, .. })));
        let p6 = PreparedArray3::new(Array3::constant(6, 0.5).unwrap());
        assert!(verify_exchangeable_t1(&p6, T1Move::Transposition).is_err());
        let p5 = PreparedArray3::new(Array3::constant(5, 0.5).unwrap());
        assert!(verify_exchangeable_t2(&p5, T2Coupling::Paired).is_err());
        assert!(matches!(
            exact_distribution(&Array::Two(Array2::constant(3, 0.1).unwrap()), StatKind::T1),
            Err(Error::WrongDims(StatKind::T1, 3))
        ));
    }

    #[test]
    fn exchangeability_t1() {
        for n in 1..=4 {
            let p = PreparedArray3::new(Array3::uniform(n, 50 + n as u64).unwrap());
            let r = verify_exchangeable_t1(&p, T1Move::Transposition).unwrap();
            assert!(r.is_exchangeable(), "n = {n}: {r:?}");
            assert_eq!(r.total, factorial(n) * (n * n) as u64);
        }
        let c = PreparedArray3::new(Array3::constant(3, 0.5).unwrap());
        let r = verify_exchangeable_t1(&c, T1Move::Transposition).unwrap();
        assert_eq!((r.cells, r.max_count_diff), (1, 0));
    }

    #[test]
    fn exchangeability_t2_and_negative_controls() {
        let p = PreparedArray3::new(Array3::uniform(3, 5).unwrap());
        assert!(verify_exchangeable_t2(&p, T2Coupling::Paired).unwrap().is_exchangeable());
        let bad = verify_exchangeable_t2(&p, T2Coupling::OrientedCycle).unwrap();
        assert!(bad.max_count_diff > 0);
        let bad1 = verify_exchangeable_t1(&p, T1Move::OverwriteFirst).unwrap();
        assert!(bad1.discrepancy() > 0.0);
        let c = PreparedArray3::new(Array3::constant(3, 0.5).unwrap());
        assert!(verify_exchangeable_t2(&c, T2Coupling::Paired).unwrap().is_exchangeable());
    }

    /// Applying the same 3-cycle direction to both permutations, with the
    /// coin picking the direction, is still a symmetric random walk and so
    /// still exchangeable; it is not a usable negative control.
    #[test]
    fn same_direction_cycles_remain_exchangeable() {
        use crate::permutations::{cycle_tau, CycleDir};
        let n = 3;
        let p = PreparedArray3::new(Array3::uniform(n, 6).unwrap());
        let mut perms = Vec::new();
        for_each_permutation(n, |q| perms.push(Permutation::from_images(q.to_vec()).unwrap()));
        let mut joint = JointCounter::new();
        for s in &perms {
            for q in &perms {
                let x = t2_raw(p.array(), s.images(), q.images());
                for_each_distinct_triple(n, |t| {
                    for dir in [CycleDir::Forward, CycleDir::Backward] {
                        let c = cycle_tau(dir, &t, n).unwrap();
                        let (s2, q2) = (s.compose(&c).unwrap(), q.compose(&c).unwrap());
                        joint.add(x, t2_raw(p.array(), s2.images(), q2.images()));
                    }
                });
            }
        }
        assert!(joint.report().is_exchangeable());
    }

    #[test]
    fn conditional_y_properties() {
        let n = 3;
        let c = Array3::constant(n, 0.25).unwrap();
        let groups = conditional_y(&c).unwrap();
        assert_eq!(groups.len(), 1);
        assert!((groups[0].mean() - 3.0 * 6.0 * 0.25).abs() < 1e-12);

        let a = Array3::uniform(4, 17).unwrap();
        let groups = conditional_y(&a).unwrap();
        assert_eq!(groups.iter().map(|g| g.count).sum::<u64>(), 576);
        for g in &groups {
            assert!((0.0..=36.0).contains(&g.mean()));
            assert_eq!(cond_mean_y(&groups, g.t2), Some(g.mean()));
        }
        assert_eq!(cond_mean_y(&groups, -1.0), None);
    }

    /// Tower property: plugging E[Y | T2] into the drift formula equals the
    /// per-state drift averaged within each T2 group.
    #[test]
    fn grouped_drift_matches_conditional_y() {
        let n = 3;
        let a = Array3::uniform(n, 23).unwrap();
        let p = PreparedArray3::new(a.clone());
        let ys = conditional_y(&a).unwrap();
        let drifts = group_by_t2(&a, |s, q| cond_drift_t2(&p, s, q).unwrap()).unwrap();
        assert_eq!(ys.len(), drifts.len());
        for (y, d) in ys.iter().zip(&drifts) {
            assert_eq!(y.t2.to_bits(), d.t2.to_bits());
            let closed = drift_t2_closed_form(n, y.t2, p.mean_t2(), y.mean());
            assert!((closed - d.mean()).abs() <= 1e-12);
        }
    }

    #[test]
    fn grouped_state_drift_reproduces_exact_f() {
        let n = 4;
        let a = Array3::uniform(n, 31).unwrap();
        let p = PreparedArray3::new(a.clone());
        let exact = exact_f_t2(&p).unwrap();
        let grouped = group_by_t2(&a, |s, q| f_t2_state(&p, s, q).unwrap()).unwrap();
        for ((t, f), g) in exact.iter().zip(&grouped) {
            assert_eq!(t.to_bits(), g.t2.to_bits());
            assert!((f - g.mean()).abs() <= 1e-12);
        }
    }

    #[test]
    fn brute_force_drift_agrees() {
        let a = Array3::uniform(4, 3).unwrap();
        let p = PreparedArray3::new(a.clone());
        let s = Permutation::from_images(vec![2, 0, 3, 1]).unwrap();
        let q = Permutation::from_images(vec![1, 3, 0, 2]).unwrap();
        let d = cond_drift_t2(&p, &s, &q).unwrap();
        assert!((d - brute_force_drift_t2(&a, &s, &q)).abs() <= 1e-15);
    }
}
