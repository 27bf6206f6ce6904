//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) the hot loops run on the rayon
//! global pool. Without it, [`Strategy::Parallel`] quietly degrades to the
//! sequential path, so callers never need their own `cfg` gates. Every
//! parallel loop collects results in input order before any floating-point
//! reduction, which keeps both strategies bit-identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    Parallel,
}

impl Default for Strategy {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

impl Strategy {
    /// True when this strategy will actually fan out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Order-preserving map over a slice.
pub(crate) fn map<T, U, F>(strategy: Strategy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Order-preserving map over index range `0..len`.
pub(crate) fn map_range<U, F>(strategy: Strategy, len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = strategy;
    (0..len).map(f).collect()
}

/// Order-preserving map over contiguous chunks of a slice. Chunk size is
/// picked so each worker gets a few chunks; the sequential path uses one.
pub(crate) fn map_chunks<T, U, F>(strategy: Strategy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&[T]) -> U + Sync + Send,
{
    if items.is_empty() {
        return Vec::new();
    }
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        let workers = rayon::current_num_threads().max(1);
        let chunk = items.len().div_ceil(workers * 4).max(1);
        return items.par_chunks(chunk).map(f).collect();
    }
    let _ = strategy;
    vec![f(items)]
}
