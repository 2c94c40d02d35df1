mod common;

use common::*;
use delm::elm::{
    solve_orthogonal_procrustes, solve_ridge, solve_ridge_overdetermined,
    solve_ridge_underdetermined, SolveMethod,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

#[test]
fn wide_system_is_stationary() {
    let mut r = rng(1);
    let h = uniform(4, 10, -1.0, 1.0, &mut r);
    let t = uniform(4, 3, -1.0, 1.0, &mut r);
    let b = solve_ridge(&h, &t, 100.0).unwrap().matrix;
    assert_eq!(b.shape(), (10, 3));
    assert!(stationarity_residual(&h, &t, &b, 100.0) <= 1e-8 * (1.0 + b.norm()));
}

#[test]
fn matches_oracle_across_shapes() {
    let mut r = rng(2);
    for (n, nh, q) in [(50, 8, 3), (8, 50, 3), (12, 12, 2), (30, 29, 1), (5, 40, 7)] {
        for c in [1e-2, 1.0, 1e4] {
            let h = uniform(n, nh, -1.0, 1.0, &mut r);
            let t = uniform(n, q, -1.0, 1.0, &mut r);
            let b = solve_ridge(&h, &t, c).unwrap().matrix;
            let oracle = ridge_oracle(&h, &t, c);
            assert!(rel_frobenius(&b, &oracle) < 1e-8, "({n},{nh},{q}) C={c}");
        }
    }
}

#[test]
fn oracle_agrees_with_textbook_solution() {
    // 2x1 least squares by hand: h = [1, 2]ᵀ, t = [1, 1]ᵀ → b = (hᵀt)/(hᵀh + 1/C).
    let h = DMatrix::from_column_slice(2, 1, &[1.0, 2.0]);
    let t = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
    for c in [0.5, 1.0, 1e6] {
        let expected = 3.0 / (5.0 + 1.0 / c);
        assert!((ridge_oracle(&h, &t, c)[(0, 0)] - expected).abs() < 1e-15);
        assert!((solve_ridge(&h, &t, c).unwrap().matrix[(0, 0)] - expected).abs() < 1e-14);
    }
}

#[test]
fn square_well_conditioned_paths_agree() {
    let mut r = rng(3);
    for _ in 0..20 {
        let q = random_orthogonal(15, &mut r);
        let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(15, |i, _| 1.0 + i as f64));
        let h = &q * scale; // condition number 15
        let t = uniform(15, 4, -1.0, 1.0, &mut r);
        for c in [1e-2, 1.0, 1e4, 1e18] {
            let a = solve_ridge_overdetermined(&h, &t, c).unwrap().matrix;
            let b = solve_ridge_underdetermined(&h, &t, c).unwrap().matrix;
            assert!(rel_frobenius(&a, &b) < 1e-8, "C={c}");
        }
    }
}

#[test]
fn procrustes_beats_random_rotations() {
    let mut r = rng(4);
    for _ in 0..5 {
        let h = uniform(30, 6, -1.0, 1.0, &mut r);
        let t = uniform(30, 6, -1.0, 1.0, &mut r);
        let b = solve_orthogonal_procrustes(&h, &t).unwrap();
        assert_eq!(b.diagnostics.method, SolveMethod::Procrustes);
        let best = (&h * &b.matrix - &t).norm();
        for _ in 0..200 {
            assert!((&h * random_orthogonal(6, &mut r) - &t).norm() >= best);
        }
    }
}

#[test]
fn rank_deficient_procrustes_is_flagged() {
    let mut h = DMatrix::zeros(5, 3);
    h.column_mut(0).fill(1.0);
    let t = DMatrix::from_fn(5, 3, |i, j| (i + j) as f64);
    let b = solve_orthogonal_procrustes(&h, &t).unwrap();
    assert!(b.diagnostics.non_unique);
    assert!((b.matrix.transpose() * &b.matrix - DMatrix::identity(3, 3)).amax() < 1e-10);
}

fn system() -> impl Strategy<Value = (DMatrix<f64>, DMatrix<f64>, f64)> {
    (
        1usize..25,
        1usize..25,
        1usize..5,
        0u64..u64::MAX,
        prop::sample::select(vec![1e-2, 1.0, 1e2, 1e4]),
    )
        .prop_map(|(n, nh, q, seed, c)| {
            let mut r = rng(seed);
            (
                uniform(n, nh, -1.0, 1.0, &mut r),
                uniform(n, q, -1.0, 1.0, &mut r),
                c,
            )
        })
}

proptest! {
    #[test]
    fn ridge_is_stationary((h, t, c) in system()) {
        let b = solve_ridge(&h, &t, c).unwrap().matrix;
        prop_assert!(stationarity_residual(&h, &t, &b, c) <= 1e-8 * (1.0 + b.norm()));
    }

    #[test]
    fn ridge_is_a_global_minimum((h, t, c) in system(), seed in any::<u64>()) {
        let b = solve_ridge(&h, &t, c).unwrap().matrix;
        let base = ridge_objective(&h, &t, &b, c);
        let mut r = rng(seed);
        for _ in 0..10 {
            let d = uniform(b.nrows(), b.ncols(), -1.0, 1.0, &mut r);
            let d = d.scale(1e-3 / d.norm());
            prop_assert!(ridge_objective(&h, &t, &(&b + d), c) >= base);
        }
    }

    #[test]
    fn procrustes_is_orthogonal(n in 1usize..30, d in 1usize..10, seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = uniform(n, d, -1.0, 1.0, &mut r);
        let t = uniform(n, d, -1.0, 1.0, &mut r);
        let b = solve_orthogonal_procrustes(&h, &t).unwrap().matrix;
        prop_assert!((b.transpose() * &b - DMatrix::identity(d, d)).amax() <= 1e-10);
    }

    #[test]
    fn solves_are_pure((h, t, c) in system()) {
        prop_assert_eq!(solve_ridge(&h, &t, c).unwrap(), solve_ridge(&h, &t, c).unwrap());
    }
}
