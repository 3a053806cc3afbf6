use permconc::exchange::moment_bounds_t2;
use permconc::oracle::exact_distribution_t2;
use permconc::sampling::{batch_rng, PreparedArray};
use permconc::{Array, Array2, Array3, Permutation, StatKind};
use permconc_tools::montecarlo::{estimate_pair_moments, estimate_tail};
use permconc_tools::verify::tail_grid;

#[test]
fn constant_array_has_no_tail() {
    let p = PreparedArray::new(Array::constant(8, 0.3, 2).unwrap());
    let est = estimate_tail(&p.target(StatKind::T3).unwrap(), &[0.0, 0.1, 1.0], 1000, 2).unwrap();
    assert_eq!(est.point, vec![1.0, 0.0, 0.0]);
    assert_eq!(est.hits, vec![1000, 0, 0]);
    assert!(est.ci_high[1] < 0.006);
    assert_eq!(est.ci_low[0], est.ci_low[0].min(1.0));
}

#[test]
fn estimate_invariants() {
    let p = PreparedArray::new(Array2::uniform(9, 3).unwrap().into());
    let grid: Vec<f64> = (0..30).map(|k| k as f64 * 0.1).collect();
    let est = estimate_tail(&p.target(StatKind::T3).unwrap(), &grid, 12_345, 8).unwrap();
    assert_eq!(est.point[0], 1.0);
    for k in 0..grid.len() {
        assert!(est.ci_low[k] <= est.point[k] && est.point[k] <= est.ci_high[k]);
    }
    assert!(est.point.windows(2).all(|w| w[0] >= w[1]));
    assert!(estimate_tail(&p.target(StatKind::T3).unwrap(), &[1.0, 0.5], 10, 0).is_err());
    assert!(estimate_tail(&p.target(StatKind::T3).unwrap(), &[1.0], 0, 0).is_err());
}

#[test]
fn t2_estimates_cover_the_exact_tail_at_n5() {
    let a = Array3::uniform(5, 11).unwrap();
    let dist = exact_distribution_t2(&a).unwrap();
    let p = PreparedArray::new(a.into());
    let target = p.target(StatKind::T2).unwrap();
    let grid = tail_grid(&dist, target.mean());
    let est = estimate_tail(&target, &grid, 1_000_000, 77).unwrap();
    let misses = grid
        .iter()
        .enumerate()
        .filter(|&(k, &t)| {
            let exact = dist.tail(target.mean(), t).unwrap().value();
            exact < est.ci_low[k] || exact > est.ci_high[k]
        })
        .count();
    assert!(misses <= grid.len().div_ceil(100), "{misses} misses on {} points", grid.len());
}

#[test]
fn constant_array_pair_moments_vanish() {
    let p = PreparedArray::new(Array::constant(6, 0.7, 3).unwrap());
    for kind in [StatKind::T1, StatKind::T2] {
        let m = estimate_pair_moments(&p.target(kind).unwrap(), 5000, 1).unwrap();
        assert_eq!(m.abs_delta.mean, 0.0);
        assert_eq!(m.delta_sq.mean, 0.0);
        assert!(m.drift.mean.abs() < 1e-12);
    }
}

#[test]
fn t1_drift_averages_to_zero_at_n50() {
    let p = PreparedArray::new(Array3::uniform(50, 2).unwrap().into());
    let m = estimate_pair_moments(&p.target(StatKind::T1).unwrap(), 200_000, 3).unwrap();
    assert!(m.drift.mean.abs() <= 4.0 * m.drift.se, "{:?}", m.drift);
    // The sampled Δ averages the same drift.
    assert!(m.abs_delta.mean <= m.mean_abs_bound + 4.0 * m.abs_delta.se);
    assert!(m.delta_sq.mean <= m.mean_sq_bound + 4.0 * m.delta_sq.se);
}

#[test]
fn t2_moments_at_n50() {
    let a = Array3::uniform(50, 4).unwrap();
    let p = PreparedArray::new(a.into());
    let target = p.target(StatKind::T2).unwrap();
    let m = estimate_pair_moments(&target, 200_000, 5).unwrap();
    let (n, mean) = (50.0, target.mean());
    let abs_bound = 3.0 / n * mean + 3.0 * n * mean / ((n - 1.0) * (n - 2.0));
    assert!(m.abs_delta.mean <= abs_bound + 4.0 * m.abs_delta.se);
    assert!((m.mean_abs_bound - abs_bound).abs() < 0.05 * abs_bound);

    // Against the exact per-state moments averaged over independent states.
    let PreparedArray::Three(p3) = &p else { unreachable!() };
    let mut rng = batch_rng(99, 0);
    let states = 60;
    let (mut s1, mut s1sq) = (0.0, 0.0);
    for _ in 0..states {
        let s = Permutation::sample_uniform(50, &mut rng);
        let q = Permutation::sample_uniform(50, &mut rng);
        let e = moment_bounds_t2(p3, &s, &q).unwrap().m1;
        s1 += e;
        s1sq += e * e;
    }
    let k = states as f64;
    let exact_mean = s1 / k;
    let exact_se = ((s1sq / k - exact_mean * exact_mean) / (k - 1.0)).sqrt();
    let se = (exact_se * exact_se + m.abs_delta.se * m.abs_delta.se).sqrt();
    assert!((m.abs_delta.mean - exact_mean).abs() <= 4.0 * se, "{} vs {exact_mean} (se {se})", m.abs_delta.mean);
}

#[test]
fn pair_moments_reject_t3() {
    let p = PreparedArray::new(Array2::uniform(5, 1).unwrap().into());
    assert!(estimate_pair_moments(&p.target(StatKind::T3).unwrap(), 10, 0).is_err());
}
