//! Reference oracles written without the library's algorithms: Leibniz
//! expansion for determinants and exhaustive minors for TU and Δ.

#![allow(dead_code)]

use tuhyper::IntMatrix;

/// Determinant by permutation expansion. Only for small orders.
pub fn leibniz(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i128;
    permute(&mut perm, 0, rows, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, rows: &[Vec<i64>], total: &mut i128) {
    let n = perm.len();
    if k == n {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    inversions += 1;
                }
            }
        }
        let prod: i128 = (0..n).map(|i| rows[i][perm[i]] as i128).product();
        *total += if inversions % 2 == 0 { prod } else { -prod };
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, rows, total);
        perm.swap(k, i);
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Largest |det| over all square submatrices (0 for an empty matrix).
/// Determinant by Laplace expansion along rows, memoized on the set of used columns.
pub fn laplace_det(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut sums = vec![0i128; 1 << n];
    sums[0] = 1;
    for mask in 0usize..1 << n {
        let r = mask.count_ones() as usize;
        if r == n || sums[mask] == 0 {
            continue;
        }
        for c in (0..n).filter(|&c| mask & (1 << c) == 0) {
            let a = rows[r][c] as i128;
            if a == 0 {
                continue;
            }
            // Sign of moving column `c` past the unused columns before it.
            let skipped = (0..c).filter(|&j| mask & (1 << j) == 0).count();
            let term = if skipped % 2 == 0 { a } else { -a };
            sums[mask | 1 << c] += term * sums[mask];
        }
    }
    sums[(1 << n) - 1]
}

pub fn brute_delta(m: &IntMatrix) -> u64 {
    let rows = m.to_rows();
    let (r, c) = (m.rows(), m.cols());
    let mut best = 0u64;
    for k in 1..=r.min(c) {
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| rows[i][j]).collect()).collect();
                best = best.max(leibniz(&sub).unsigned_abs() as u64);
            }
        }
    }
    best
}

pub fn brute_tu(m: &IntMatrix) -> bool {
    brute_delta(m) <= 1
}

/// Whether every proper square submatrix is TU while the whole is square with |det| ≥ 2.
pub fn brute_almost_tu(m: &IntMatrix) -> bool {
    if m.rows() != m.cols() || m.rows() == 0 {
        return false;
    }
    let n = m.rows();
    let whole = leibniz(&m.to_rows()).unsigned_abs();
    whole >= 2 && (0..n).all(|r| (0..n).all(|c| brute_tu(&m.without_row(r).without_col(c))))
}

/// Bit `i` of `mask` as vertex `i`.
pub fn mask_to_verts(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}
