//! Exhaustive square-minor enumeration by cofactor expansion.
//!
//! Row sets are grown in ascending order. For a row set `R` the nonzero
//! `|R|`-minors are kept as a sparse list keyed by column bitmask; adding a row
//! `r > max R` expands every `(|R|+1)`-minor along its last row. A row set whose
//! minors all vanish is linearly dependent, so its whole subtree is skipped.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::verts_of;
use crate::matrix::IntMatrix;
use crate::par::{self, Exec};

/// Size guards for exhaustive enumerations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest accepted `rows + cols`.
    pub max_dim_sum: usize,
}

impl Limits {
    pub const DEFAULT_MAX_DIM_SUM: usize = 22;

    pub fn check(&self, m: &IntMatrix) -> Result<()> {
        let wide = m.rows().max(m.cols());
        if wide > 64 {
            return Err(Error::GuardExceeded {
                what: "larger matrix dimension",
                actual: wide,
                limit: 64,
            });
        }
        let sum = m.rows() + m.cols();
        if sum > self.max_dim_sum {
            return Err(Error::GuardExceeded {
                what: "rows + cols",
                actual: sum,
                limit: self.max_dim_sum,
            });
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_dim_sum: Self::DEFAULT_MAX_DIM_SUM,
        }
    }
}

/// Largest absolute subdeterminant and a submatrix attaining it.
///
/// Among all maximizers the witness is the least by (order, rows, cols)
/// compared lexicographically. A zero matrix has `delta == 0` and an empty witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaResult {
    pub delta: u64,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

type Minors = Vec<(u64, i128)>;

struct Prepared {
    /// Sparse rows of the enumerated side.
    rows: Vec<Vec<(usize, i64)>>,
    transposed: bool,
}

impl Prepared {
    fn new(m: &IntMatrix) -> Self {
        let transposed = m.rows() > m.cols();
        let work = if transposed { m.transpose() } else { m.clone() };
        let rows = (0..work.rows())
            .map(|r| {
                (0..work.cols())
                    .filter_map(|c| {
                        let v = work.get(r, c);
                        (v != 0).then_some((c, v))
                    })
                    .collect()
            })
            .collect();
        Prepared { rows, transposed }
    }

    /// Row and column index lists in the caller's orientation.
    fn orient(&self, chosen: &[usize], mask: u64) -> (Vec<usize>, Vec<usize>) {
        let other = verts_of(mask);
        if self.transposed {
            (other, chosen.to_vec())
        } else {
            (chosen.to_vec(), other)
        }
    }
}

fn overflow() -> Error {
    Error::GuardExceeded {
        what: "minor magnitude bits",
        actual: 128,
        limit: 127,
    }
}

fn extend(minors: &[(u64, i128)], row: &[(usize, i64)], k: usize) -> Result<Minors> {
    let mut out: Minors = Vec::with_capacity(minors.len() * row.len());
    for &(mask, val) in minors {
        for &(j, a) in row {
            if mask >> j & 1 == 1 {
                continue;
            }
            let p = (mask & ((1u64 << j) - 1)).count_ones() as usize;
            let term = val.checked_mul(a as i128).ok_or_else(overflow)?;
            let term = if (k + p).is_multiple_of(2) { term } else { -term };
            out.push((mask | 1u64 << j, term));
        }
    }
    out.sort_unstable_by_key(|e| e.0);
    let mut merged: Minors = Vec::with_capacity(out.len());
    for (mask, val) in out {
        match merged.last_mut() {
            Some(last) if last.0 == mask => last.1 = last.1.checked_add(val).ok_or_else(overflow)?,
            _ => merged.push((mask, val)),
        }
    }
    merged.retain(|e| e.1 != 0);
    Ok(merged)
}

enum Flow {
    Continue,
    Stop,
}

/// Depth-first walk over row sets starting with `first`; `visit` sees every
/// nonzero minor `(rows, column mask, value)`.
fn walk<F>(p: &Prepared, first: usize, cap: usize, stop: &AtomicBool, visit: &mut F) -> Result<()>
where
    F: FnMut(&[usize], u64, i128) -> Flow,
{
    fn rec<F>(
        p: &Prepared,
        minors: &[(u64, i128)],
        chosen: &mut Vec<usize>,
        cap: usize,
        stop: &AtomicBool,
        visit: &mut F,
    ) -> Result<bool>
    where
        F: FnMut(&[usize], u64, i128) -> Flow,
    {
        if chosen.len() >= cap {
            return Ok(true);
        }
        let start = chosen.last().map_or(0, |&r| r + 1);
        for r in start..p.rows.len() {
            if stop.load(AtomicOrdering::Relaxed) {
                return Ok(false);
            }
            let next = extend(minors, &p.rows[r], chosen.len())?;
            if next.is_empty() {
                continue;
            }
            chosen.push(r);
            for &(mask, val) in &next {
                if let Flow::Stop = visit(chosen, mask, val) {
                    stop.store(true, AtomicOrdering::Relaxed);
                    chosen.pop();
                    return Ok(false);
                }
            }
            let go_on = rec(p, &next, chosen, cap, stop, visit)?;
            chosen.pop();
            if !go_on {
                return Ok(false);
            }
        }
        Ok(true)
    }

    let root = [(0u64, 1i128)];
    let next = extend(&root, &p.rows[first], 0)?;
    if next.is_empty() || cap == 0 {
        return Ok(());
    }
    let mut chosen = vec![first];
    for &(mask, val) in &next {
        if let Flow::Stop = visit(&chosen, mask, val) {
            stop.store(true, AtomicOrdering::Relaxed);
            return Ok(());
        }
    }
    rec(p, &next, &mut chosen, cap, stop, visit).map(|_| ())
}

fn key_cmp(a: &DeltaResult, b: &DeltaResult) -> Ordering {
    a.rows
        .len()
        .cmp(&b.rows.len())
        .then_with(|| a.rows.cmp(&b.rows))
        .then_with(|| a.cols.cmp(&b.cols))
}

fn better(a: &DeltaResult, b: &DeltaResult) -> bool {
    a.delta > b.delta || (a.delta == b.delta && key_cmp(a, b) == Ordering::Less)
}

pub fn max_abs_subdet(m: &IntMatrix, cap: Option<usize>) -> Result<DeltaResult> {
    max_abs_subdet_with(m, cap, Limits::default(), Exec::default())
}

/// Δ over all square submatrices of order at most `cap`.
pub fn max_abs_subdet_with(m: &IntMatrix, cap: Option<usize>, limits: Limits, exec: Exec) -> Result<DeltaResult> {
    limits.check(m)?;
    let p = Prepared::new(m);
    let cap = cap.unwrap_or(usize::MAX);
    let stop = AtomicBool::new(false);
    let empty = DeltaResult {
        delta: 0,
        rows: vec![],
        cols: vec![],
    };
    let branches = par::map_range(exec, p.rows.len(), |first| -> Result<DeltaResult> {
        let mut best = empty.clone();
        let mut best_abs: i128 = 0;
        walk(&p, first, cap, &stop, &mut |chosen, mask, val| {
            let a = val.abs();
            if a < best_abs || (a == best_abs && chosen.len() > best.rows.len()) {
                return Flow::Continue;
            }
            {
                let (rows, cols) = p.orient(chosen, mask);
                let cand = DeltaResult {
                    delta: u64::try_from(a).unwrap_or(u64::MAX),
                    rows,
                    cols,
                };
                if a > best_abs || better(&cand, &best) {
                    best = cand;
                    best_abs = a;
                }
            }
            Flow::Continue
        })?;
        if best_abs > u64::MAX as i128 {
            return Err(overflow());
        }
        Ok(best)
    });
    let mut best = empty;
    for b in branches {
        let b = b?;
        if better(&b, &best) {
            best = b;
        }
    }
    Ok(best)
}

pub fn is_tu_bruteforce(m: &IntMatrix) -> Result<bool> {
    is_tu_bruteforce_with(m, Limits::default(), Exec::default())
}

/// True iff every square subdeterminant lies in {0, ±1}.
pub fn is_tu_bruteforce_with(m: &IntMatrix, limits: Limits, exec: Exec) -> Result<bool> {
    limits.check(m)?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(true);
    }
    if !m.is_signed_incidence() {
        return Ok(false);
    }
    let p = Prepared::new(m);
    let stop = AtomicBool::new(false);
    let failed = AtomicBool::new(false);
    let errors = par::map_range(exec, p.rows.len(), |first| {
        walk(&p, first, usize::MAX, &stop, &mut |_, _, val| {
            if val.abs() >= 2 {
                failed.store(true, AtomicOrdering::Relaxed);
                Flow::Stop
            } else {
                Flow::Continue
            }
        })
    });
    if failed.load(AtomicOrdering::Relaxed) {
        return Ok(false);
    }
    for e in errors {
        e?;
    }
    Ok(true)
}

pub fn is_almost_tu(m: &IntMatrix) -> Result<bool> {
    is_almost_tu_with(m, Limits::default(), Exec::default())
}

/// Not TU, while deleting any single row or column leaves a TU matrix.
pub fn is_almost_tu_with(m: &IntMatrix, limits: Limits, exec: Exec) -> Result<bool> {
    if is_tu_bruteforce_with(m, limits, exec)? {
        return Ok(false);
    }
    for r in 0..m.rows() {
        if !is_tu_bruteforce_with(&m.without_row(r), limits, exec)? {
            return Ok(false);
        }
    }
    for c in 0..m.cols() {
        if !is_tu_bruteforce_with(&m.without_col(c), limits, exec)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::det_exact;
    use num_bigint::BigInt;

    /// Every pair of equal-size index subsets, determinant by elimination.
    fn oracle_delta(m: &IntMatrix) -> u64 {
        let subsets = |n: usize, k: usize| -> Vec<Vec<usize>> {
            (0u32..1 << n)
                .filter(|s| s.count_ones() as usize == k)
                .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
                .collect()
        };
        let mut best = 0u64;
        for k in 1..=m.rows().min(m.cols()) {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let d = det_exact(&m.submatrix(&rs, &cs)).unwrap();
                    let d: i64 = d.try_into().unwrap();
                    best = best.max(d.unsigned_abs());
                }
            }
        }
        best
    }

    fn lcg_matrix(seed: &mut u64, rows: usize, cols: usize, signed: bool) -> IntMatrix {
        let mut data = vec![vec![0i64; cols]; rows];
        for row in data.iter_mut() {
            for x in row.iter_mut() {
                *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = (*seed >> 33) % 3;
                *x = match (v, signed) {
                    (0, _) => 0,
                    (1, _) => 1,
                    (_, true) => -1,
                    (_, false) => 0,
                };
            }
        }
        IntMatrix::from_rows(&data).unwrap()
    }

    #[test]
    fn fixture_deltas() {
        let d = max_abs_subdet(&fixtures::fig1().incidence_matrix(), None).unwrap();
        assert_eq!(d.delta, 2);
        assert_eq!((d.rows.clone(), d.cols.clone()), (vec![0, 1, 2, 3], vec![0, 1, 2, 3]));
        let c4 = max_abs_subdet(&fixtures::c4().incidence_matrix(), None).unwrap();
        assert_eq!(c4.delta, 1);
        let two_triangles = crate::Hypergraph::unnamed(
            6,
            vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4], vec![4, 5], vec![3, 5]],
        )
        .unwrap();
        assert_eq!(
            max_abs_subdet(&two_triangles.incidence_matrix(), None).unwrap().delta,
            4
        );
    }

    #[test]
    fn witness_reproduces_delta() {
        let mut seed = 7;
        for _ in 0..60 {
            let m = lcg_matrix(&mut seed, 5, 6, true);
            let d = max_abs_subdet(&m, None).unwrap();
            assert_eq!(d.delta, oracle_delta(&m), "{m:?}");
            if d.delta > 0 {
                let det = det_exact(&m.submatrix(&d.rows, &d.cols)).unwrap();
                assert_eq!(det.magnitude(), BigInt::from(d.delta).magnitude());
            }
        }
    }

    #[test]
    fn transposed_orientation_matches() {
        let mut seed = 99;
        for _ in 0..40 {
            let m = lcg_matrix(&mut seed, 7, 4, false);
            let a = max_abs_subdet(&m, None).unwrap();
            let b = max_abs_subdet(&m.transpose(), None).unwrap();
            assert_eq!(a.delta, b.delta);
        }
    }

    #[test]
    fn cap_limits_order() {
        let m = fixtures::fig1().incidence_matrix();
        assert_eq!(max_abs_subdet(&m, Some(3)).unwrap().delta, 1);
        assert_eq!(max_abs_subdet(&m, Some(0)).unwrap().delta, 0);
    }

    #[test]
    fn tu_examples() {
        assert!(!is_tu_bruteforce(&fixtures::fig1().incidence_matrix()).unwrap());
        assert!(is_tu_bruteforce(&fixtures::c4().incidence_matrix()).unwrap());
        assert!(!is_tu_bruteforce(&fixtures::fig5().incidence_matrix()).unwrap());
        assert!(is_tu_bruteforce(&IntMatrix::zeros(0, 3)).unwrap());
    }

    #[test]
    fn almost_tu_examples() {
        assert!(is_almost_tu(&fixtures::fig2().incidence_matrix()).unwrap());
        assert!(is_almost_tu(&fixtures::fig5().incidence_matrix()).unwrap());
        assert!(!is_almost_tu(&fixtures::c4().incidence_matrix()).unwrap());
    }

    #[test]
    fn guard_rejects_large_inputs() {
        let m = IntMatrix::zeros(12, 11);
        match max_abs_subdet(&m, None) {
            Err(Error::GuardExceeded { .. }) => {}
            other => panic!("expected guard error, got {other:?}"),
        }
        let relaxed = Limits { max_dim_sum: 30 };
        assert!(is_tu_bruteforce_with(&m, relaxed, Exec::Serial).unwrap());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut seed = 3;
        for _ in 0..30 {
            let m = lcg_matrix(&mut seed, 6, 7, true);
            let s = max_abs_subdet_with(&m, None, Limits::default(), Exec::Serial).unwrap();
            let p = max_abs_subdet_with(&m, None, Limits::default(), Exec::Parallel).unwrap();
            assert_eq!(s, p);
            assert_eq!(
                is_tu_bruteforce_with(&m, Limits::default(), Exec::Serial).unwrap(),
                is_tu_bruteforce_with(&m, Limits::default(), Exec::Parallel).unwrap()
            );
        }
    }
}
