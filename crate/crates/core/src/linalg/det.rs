use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Runs in `i128` and restarts with big integers if any step overflows.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::pre(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match det_i128(m) {
        Some(d) => BigInt::from(d),
        None => det_bigint(m),
    })
}

/// Determinant as `i128`, or `None` when an intermediate value overflows.
pub(crate) fn det_i128(m: &IntMatrix) -> Option<i128> {
    let n = m.rows();
    let mut a: Vec<i128> = (0..n * n).map(|i| m.get(i / n, i % n) as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return Some(0);
            };
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i * n + j].checked_mul(pivot)?;
                let rhs = a[i * n + k].checked_mul(a[k * n + j])?;
                // Exact by Sylvester's identity.
                a[i * n + j] = lhs.checked_sub(rhs)? / prev;
            }
            a[i * n + k] = 0;
        }
        prev = pivot;
    }
    Some(if n == 0 { 1 } else { sign * a[n * n - 1] })
}

fn det_bigint(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    let mut a: Vec<BigInt> = (0..n * n).map(|i| BigInt::from(m.get(i / n, i % n))).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(p) => {
                    for c in 0..n {
                        a.swap(k * n + c, p * n + c);
                    }
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = a[k * n + k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    let d = a[n * n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    /// Permutation expansion; independent of elimination.
    fn leibniz(m: &IntMatrix) -> i128 {
        fn rec(m: &IntMatrix, row: usize, used: &mut Vec<bool>, sign: i128, acc: i128, out: &mut i128) {
            let n = m.rows();
            if row == n {
                *out += sign * acc;
                return;
            }
            for c in 0..n {
                if used[c] {
                    continue;
                }
                // Unused smaller columns will be taken by later rows: one inversion each.
                let inv = (0..c).filter(|&j| !used[j]).count();
                let s = if inv % 2 == 0 { sign } else { -sign };
                let v = m.get(row, c) as i128;
                if v != 0 {
                    used[c] = true;
                    rec(m, row + 1, used, s, acc * v, out);
                    used[c] = false;
                }
            }
        }
        let mut out = 0;
        rec(m, 0, &mut vec![false; m.rows()], 1, 1, &mut out);
        out
    }

    #[test]
    fn fixtures_match_oracle() {
        let fig1 = fixtures::fig1().incidence_matrix();
        let fig2 = fixtures::fig2().incidence_matrix();
        assert_eq!(leibniz(&fig1), 2);
        assert_eq!(det_exact(&fig1).unwrap(), BigInt::from(2));
        assert_eq!(leibniz(&fig2), -2);
        assert_eq!(det_exact(&fig2).unwrap(), BigInt::from(-2));
        assert_eq!(det_exact(&IntMatrix::identity(3)).unwrap(), BigInt::one());
        assert_eq!(det_exact(&IntMatrix::zeros(0, 0)).unwrap(), BigInt::one());
    }

    #[test]
    fn non_square_rejected() {
        assert!(det_exact(&IntMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn singular_and_pivoting() {
        let m = IntMatrix::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(det_exact(&m).unwrap(), BigInt::from(-1));
        let s = IntMatrix::from_rows(&[vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(det_exact(&s).unwrap(), BigInt::zero());
        let z = IntMatrix::from_rows(&[vec![1, 2], vec![0, 0]]).unwrap();
        assert_eq!(det_exact(&z).unwrap(), BigInt::zero());
    }

    #[test]
    fn bigint_path_agrees() {
        let m = IntMatrix::from_rows(&[
            vec![i64::MAX / 2, 3, 1],
            vec![7, i64::MAX / 3, 2],
            vec![1, 5, i64::MAX / 5],
        ])
        .unwrap();
        assert!(det_i128(&m).is_none());
        let expected = {
            let g = |r: usize, c: usize| BigInt::from(m.get(r, c));
            &g(0, 0) * (&g(1, 1) * &g(2, 2) - &g(1, 2) * &g(2, 1))
                - &g(0, 1) * (&g(1, 0) * &g(2, 2) - &g(1, 2) * &g(2, 0))
                + &g(0, 2) * (&g(1, 0) * &g(2, 1) - &g(1, 1) * &g(2, 0))
        };
        assert_eq!(det_exact(&m).unwrap(), expected);
    }

    #[test]
    fn random_small_matrices_match_oracle() {
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..300 {
            let n = (state % 6) as usize;
            let mut rows = vec![vec![0i64; n]; n];
            for row in rows.iter_mut() {
                for x in row.iter_mut() {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    *x = (state % 3) as i64 - 1;
                }
            }
            let m = IntMatrix::from_rows(&rows).unwrap();
            assert_eq!(det_exact(&m).unwrap(), BigInt::from(leibniz(&m)), "{m:?}");
        }
    }
}
