//! Thin data-parallel layer. With the `parallel` feature the helpers run on
//! rayon; without it they fall back to plain iterators. Every helper returns
//! results in index order, so callers see identical output either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "PPC_THREADS";

pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}

/// Maps `f` over `0..len` and collects the results in index order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    return (0..len).into_par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    return (0..len).map(f).collect();
}

/// Integer sum of `f(i)` over `0..len`. Integer addition is associative, so
/// the result does not depend on how the range is split.
pub fn sum_indexed<F>(len: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Send + Sync,
{
    #[cfg(feature = "parallel")]
    return (0..len).into_par_iter().with_min_len(1024).map(f).sum();

    #[cfg(not(feature = "parallel"))]
    return (0..len).map(f).sum();
}

pub fn sort_f64(values: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if values.len() > 1 << 15 {
        values.par_sort_unstable_by(f64::total_cmp);
        return;
    }
    values.sort_unstable_by(f64::total_cmp);
}

/// Runs `f` with at most `threads` workers. `None` or `Some(0)` uses the
/// global pool.
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(n) = threads.filter(|&n| n > 0) {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    f()
}

/// Reads the thread cap from `PPC_THREADS`, ignoring unparsable values.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok()
}
