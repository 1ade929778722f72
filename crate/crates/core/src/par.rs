//! Data-parallel execution with a serial fallback.
//!
//! Every helper returns results in input order, so parallel and serial runs
//! produce identical output. Without the `parallel` feature, [`Exec::Parallel`]
//! silently runs serially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Serial,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Serial
        }
    }
}

impl Exec {
    #[cfg(feature = "parallel")]
    fn is_parallel(self) -> bool {
        self == Exec::Parallel
    }
}

/// `f(0), ..., f(n-1)` in order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = exec;
    (0..n).map(f).collect()
}

/// Applies `f` to every item, preserving order.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_range(exec, items.len(), |i| f(&items[i]))
}

/// Smallest index `i < n` with `f(i)` returning `Some`, and its value.
pub fn find_first<R, F>(exec: Exec, n: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_map_first(f);
    }
    #[cfg(not(feature = "parallel"))]
    let _ = exec;
    (0..n).find_map(f)
}

/// True if `f(i)` holds for some `i < n`; stops early.
pub fn any<F>(exec: Exec, n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().any(f);
    }
    #[cfg(not(feature = "parallel"))]
    let _ = exec;
    (0..n).any(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_and_parallel_agree() {
        let a = map_range(Exec::Serial, 100, |i| i * i);
        let b = map_range(Exec::Parallel, 100, |i| i * i);
        assert_eq!(a, b);
        let f = |i: usize| (i % 7 == 6 && i > 20).then_some(i);
        assert_eq!(find_first(Exec::Serial, 100, f), Some(27));
        assert_eq!(find_first(Exec::Parallel, 100, f), Some(27));
        assert!(any(Exec::Parallel, 50, |i| i == 49));
        assert!(!any(Exec::Serial, 50, |i| i == 50));
    }
}
