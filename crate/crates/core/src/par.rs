//! Index-ordered data parallelism.
//!
//! With the `parallel` feature these helpers fan work out over rayon; without
//! it they run the same closures in a plain loop. Either way results come back
//! in index order, so callers are bit-stable regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Number of worker threads available to [`map_indexed`].
pub fn workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads().max(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Outcome of [`find_first`]: the winning index and value, plus everything that
/// was evaluated before the winner was known.
pub struct Search<T> {
    pub found: Option<(usize, T)>,
    /// Evaluated results (index, value) that did not qualify, in index order.
    pub rejected: Vec<(usize, T)>,
}

/// Finds the smallest index `i < n` with `accept(&f(i))`.
///
/// Work is evaluated in chunks of `workers()` indices; within a chunk the
/// smallest qualifying index wins, and later chunks are never started once a
/// winner exists. The sequential build evaluates one index at a time, so the
/// winner is identical in both builds.
pub fn find_first<T, F, P>(n: usize, f: F, accept: P) -> Search<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    P: Fn(&T) -> bool,
{
    let chunk = workers();
    let mut rejected = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let results = map_indexed(end - start, |i| f(start + i));
        let mut found = None;
        for (offset, value) in results.into_iter().enumerate() {
            let idx = start + offset;
            if found.is_none() && accept(&value) {
                found = Some((idx, value));
            } else if found.is_none() {
                rejected.push((idx, value));
            }
        }
        if found.is_some() {
            return Search { found, rejected };
        }
        start = end;
    }
    Search {
        found: None,
        rejected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let v = map_indexed(100, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn find_first_returns_smallest_index() {
        let s = find_first(50, |i| i, |&v| v % 7 == 3 && v > 5);
        assert_eq!(s.found.map(|(i, _)| i), Some(10));
        assert!(s.rejected.iter().all(|(i, _)| *i < 10));
        let none = find_first(10, |i| i, |_| false);
        assert!(none.found.is_none());
        assert_eq!(none.rejected.len(), 10);
    }
}
