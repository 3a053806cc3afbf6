//! Values computed by a separate exact-rational implementation and frozen
//! here. The arrays hold multiples of 1/8, so every sum below is exact in
//! floating point and the outcome values match bit for bit.

use permconc::bounds::{bound_t1, bound_t2, bound_t3, T2Variant};
use permconc::exchange::{
    cond_drift_t1, cond_drift_t2, f_t2_state, moment_bounds_t2, v_t1, v_t2_exact_state, T2Correction,
};
use permconc::oracle::{exact_distribution_t1, exact_distribution_t2, exact_distribution_t3, ExactDistribution};
use permconc::statistics::{y_stat, PreparedArray3};
use permconc::{Array2, Array3, Permutation};

fn a2(n: usize) -> Array2 {
    let values = (0..n * n).map(|f| ((2 * (f / n) + 3 * (f % n) + (f / n) * (f % n)) % 9) as f64 / 8.0);
    Array2::new(n, values.collect()).unwrap()
}

fn a3(n: usize) -> Array3 {
    Array3::from_fn(n, |i, j, k| ((3 * i + 5 * j + 7 * k + i * j * k) % 9) as f64 / 8.0).unwrap()
}

fn perm(map: &[usize]) -> Permutation {
    Permutation::from_images(map.to_vec()).unwrap()
}

fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * y.abs().max(1.0)
}

/// Checks outcomes, the mean and tails at `t = 0, 0.5, 1, 1.5, 2.5`.
fn check_law(d: &ExactDistribution, outcomes: &[(f64, u64)], mean: f64, tails: [u64; 5]) {
    assert_eq!(d.outcomes(), outcomes);
    assert!((d.mean() - mean).abs() < 1e-12, "mean {} vs {mean}", d.mean());
    for (t, want) in [0.0, 0.5, 1.0, 1.5, 2.5].into_iter().zip(tails) {
        assert_eq!(d.tail(mean, t).unwrap().hits, want, "tail at {t}");
    }
}

#[test]
fn t3_laws() {
    check_law(
        &exact_distribution_t3(&a2(3)).unwrap(),
        &[(0.125, 1), (1.0, 2), (1.25, 1), (1.375, 1), (2.0, 1)],
        1.125,
        [6, 2, 1, 0, 0],
    );
    check_law(
        &exact_distribution_t3(&a2(4)).unwrap(),
        &[
            (0.25, 1), (0.625, 2), (0.75, 1), (0.875, 3), (1.0, 1), (1.25, 2), (1.375, 1), (1.5, 2),
            (1.625, 1), (1.75, 2), (2.0, 1), (2.125, 3), (2.25, 1), (2.375, 2), (2.75, 1),
        ],
        1.5,
        [24, 16, 2, 0, 0],
    );
    check_law(
        &exact_distribution_t3(&a2(5)).unwrap(),
        &[
            (0.25, 2), (0.625, 2), (0.75, 2), (0.875, 5), (1.0, 3), (1.125, 2), (1.25, 6), (1.375, 3),
            (1.5, 8), (1.625, 7), (1.75, 8), (1.875, 6), (2.0, 8), (2.125, 9), (2.25, 10), (2.375, 9),
            (2.5, 4), (2.625, 2), (2.75, 10), (2.875, 1), (3.0, 6), (3.125, 1), (3.25, 2), (3.5, 2),
            (3.625, 1), (4.0, 1),
        ],
        2.0,
        [120, 63, 27, 6, 0],
    );
}

#[test]
fn t1_laws() {
    let law = |n| exact_distribution_t1(&PreparedArray3::new(a3(n))).unwrap();
    check_law(&law(3), &[(3.0, 1), (3.75, 1), (4.125, 1), (4.875, 2), (6.375, 1)], 4.5, [6, 3, 2, 2, 0]);
    check_law(
        &law(4),
        &[(6.0, 2), (6.375, 2), (7.125, 4), (7.5, 8), (7.875, 2), (8.25, 2), (9.0, 2), (9.375, 2)],
        243.0 / 32.0,
        [24, 10, 8, 4, 0],
    );
}

#[test]
fn t2_laws() {
    check_law(
        &exact_distribution_t2(&a3(3)).unwrap(),
        &[
            (0.5, 2), (0.75, 3), (1.0, 2), (1.125, 5), (1.25, 1), (1.375, 7), (1.625, 7), (2.125, 1),
            (2.25, 4), (2.375, 2), (2.5, 2),
        ],
        1.5,
        [36, 16, 4, 0, 0],
    );
    check_law(
        &exact_distribution_t2(&a3(4)).unwrap(),
        &[
            (0.375, 4), (0.5, 5), (0.625, 3), (0.75, 13), (0.875, 6), (1.0, 13), (1.125, 27), (1.25, 18),
            (1.375, 42), (1.5, 57), (1.625, 54), (1.75, 7), (1.875, 76), (2.0, 6), (2.125, 31), (2.25, 65),
            (2.375, 26), (2.5, 30), (2.625, 47), (2.75, 13), (2.875, 2), (3.0, 25), (3.375, 6),
        ],
        243.0 / 128.0,
        [576, 254, 62, 4, 0],
    );
}

#[test]
fn per_state_quantities_at_n5() {
    let p = PreparedArray3::new(a3(5));
    let s = perm(&[2, 0, 4, 1, 3]);
    let q = perm(&[1, 3, 0, 4, 2]);
    assert_eq!(p.t1(&s).unwrap(), 13.375);
    assert!(close(p.mean_t1(), 12.1, 1e-15));
    assert!(close(cond_drift_t1(&p, &s).unwrap(), 0.51, 1e-12));
    assert!(close(v_t1(&p, &s).unwrap(), 1.3515625, 1e-12));

    assert_eq!(p.t2(&s, &q).unwrap(), 3.0);
    assert!(close(p.mean_t2(), 2.42, 1e-15));
    assert_eq!(y_stat(p.array(), &s, &q).unwrap(), 29.75);
    assert!(close(cond_drift_t2(&p, &s, &q).unwrap(), 0.4125, 1e-12));
    assert!(close(f_t2_state(&p, &s, &q).unwrap(), 0.6346153846153846, 1e-12));
    let m = moment_bounds_t2(&p, &s, &q).unwrap();
    assert!(close(m.m1, 0.75, 1e-12) && close(m.m2, 0.75, 1e-12));
}

#[test]
fn v_t2_at_n4() {
    let p = PreparedArray3::new(a3(4));
    let (s, q) = (perm(&[1, 3, 0, 2]), perm(&[2, 0, 3, 1]));
    assert!(close(f_t2_state(&p, &s, &q).unwrap(), -0.9107142857142857, 1e-12));
    assert!(close(v_t2_exact_state(&p, &s, &q).unwrap(), 0.3713329081632653, 1e-12));
}

#[test]
fn bound_values() {
    let cases = [
        (bound_t3(7.0, 4.0 / 3.0).unwrap(), 0.15860545462069067),
        (bound_t3(30.0, 2.5).unwrap(), 5.2148737616507237e-6),
        (bound_t1(200.0, 5, 12.5).unwrap(), 3.8039885958205788e-8),
        (bound_t1(1e4, 100, 5000.0).unwrap(), 2.7775887729928041e-11),
        (bound_t2(40.0, 10, 2.0, T2Variant::Nominal).unwrap(), 0.011193087485153273),
        (bound_t2(100.0, 50, 25.0, T2Variant::Nominal).unwrap(), 5.76397995830973e-5),
        (bound_t2(60.0, 10, 5.0, T2Variant::FiniteN).unwrap(), 0.01261295110741657),
        (bound_t2(400.0, 100, 50.0, T2Variant::FiniteN).unwrap(), 1.9609744894773634e-22),
        (bound_t2(30.0, 10, 3.0, T2Variant::FiniteN).unwrap(), 0.2318464454900063),
    ];
    for (k, (got, want)) in cases.into_iter().enumerate() {
        assert!((got - want).abs() <= 1e-12 * want, "case {k}: {got} vs {want}");
    }
}

#[test]
fn finite_n_constants() {
    let cases: [(usize, f64, [f64; 4]); 6] = [
        (4, 2.0, [2.5714285714285714, 2.5714285714285714, 2.5714285714285714, 6.3061224489795918]),
        (10, 5.0, [1.8493150684931507, 1.8493150684931507, 1.8493150684931507, 1.5881028335522612]),
        (100, 50.0, [1.5304544986086777, 1.5304544986086777, 1.5304544986086777, 0.12321395301316884]),
        (1000, 500.0, [1.5030045044999865, 1.5030045044999865, 1.5030045044999865, 0.012031563094580918]),
        (10, 3.0, [1.1095890410958904, 2.589041095890411, 2.589041095890411, 1.5881028335522612]),
        (7, 6.0, [3.4838709677419355, 0.5806451612903226, 3.4838709677419355, 2.5832466181061394]),
    ];
    for (n, mean, [lower, upper, width, eps]) in cases {
        let c = T2Correction::new(n, mean).unwrap();
        for (got, want) in [(c.lower, lower), (c.upper, upper), (c.width, width), (c.eps, eps)] {
            assert!(close(got, want, 1e-13), "n = {n}: {got} vs {want}");
        }
    }
}
