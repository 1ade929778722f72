mod common;

use common::{brute_almost_tu, brute_delta, brute_tu, leibniz};
use num_bigint::BigInt;
use proptest::prelude::*;
use tuhyper::linalg::{
    det_exact, is_almost_tu, is_tu_bruteforce, is_tu_bruteforce_with, max_abs_subdet, max_abs_subdet_with, Limits,
};
use tuhyper::{Exec, IntMatrix};

fn matrix(
    max_rows: usize,
    max_cols: usize,
    entries: std::ops::RangeInclusive<i64>,
) -> impl Strategy<Value = IntMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(proptest::collection::vec(entries.clone(), c), r)
            .prop_map(|rows| IntMatrix::from_rows(&rows).unwrap())
    })
}

fn square(max: usize) -> impl Strategy<Value = IntMatrix> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), n)
            .prop_map(|rows| IntMatrix::from_rows(&rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn determinant_matches_permutation_expansion(m in square(6)) {
        prop_assert_eq!(det_exact(&m).unwrap(), BigInt::from(leibniz(&m.to_rows())));
    }

    #[test]
    fn delta_matches_exhaustive_minors(m in matrix(5, 5, -1..=1)) {
        let got = max_abs_subdet(&m, None).unwrap();
        prop_assert_eq!(got.delta, brute_delta(&m));
        if got.delta > 0 {
            let sub = m.submatrix(&got.rows, &got.cols);
            prop_assert_eq!(leibniz(&sub.to_rows()).unsigned_abs() as u64, got.delta);
        }
    }

    #[test]
    fn tu_and_almost_tu_match_oracles(m in matrix(5, 5, -1..=1)) {
        prop_assert_eq!(is_tu_bruteforce(&m).unwrap(), brute_tu(&m));
        prop_assert_eq!(is_almost_tu(&m).unwrap(), brute_almost_tu(&m));
    }

    #[test]
    fn serial_and_parallel_agree(m in matrix(6, 6, 0..=1)) {
        let limits = Limits::default();
        let a = max_abs_subdet_with(&m, None, limits, Exec::Serial).unwrap();
        let b = max_abs_subdet_with(&m, None, limits, Exec::Parallel).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(
            is_tu_bruteforce_with(&m, limits, Exec::Serial).unwrap(),
            is_tu_bruteforce_with(&m, limits, Exec::Parallel).unwrap()
        );
    }

    #[test]
    fn transpose_preserves_delta(m in matrix(5, 5, -1..=1)) {
        prop_assert_eq!(max_abs_subdet(&m, None).unwrap().delta, max_abs_subdet(&m.transpose(), None).unwrap().delta);
    }
}

#[test]
fn oversized_matrices_are_refused() {
    let m = IntMatrix::zeros(12, 12);
    let err = max_abs_subdet_with(&m, None, Limits { max_dim_sum: 20 }, Exec::Serial).unwrap_err();
    assert!(err.is_limit());
}
