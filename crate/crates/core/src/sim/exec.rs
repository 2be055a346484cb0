//! Ordered map over frame indices: rayon when the `parallel` feature is on,
//! a plain loop otherwise. Results always come back in index order.

use std::ops::Range;

#[cfg(feature = "parallel")]
pub(crate) fn map_ordered<T, F>(range: Range<u64>, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        range.into_par_iter().map(f).collect()
    } else {
        range.map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_ordered<T, F>(range: Range<u64>, _parallel: bool, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    range.map(f).collect()
}

/// Runs `f` on a pool of `threads` workers (the global pool when `None`).
#[cfg(feature = "parallel")]
pub(crate) fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn with_threads<T>(_threads: Option<usize>, f: impl FnOnce() -> T) -> T {
    f()
}
