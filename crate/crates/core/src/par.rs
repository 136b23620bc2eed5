//! Order-preserving map over independent work items. Runs on the rayon pool
//! with the `parallel` feature and on the calling thread otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(f).collect();

    #[cfg(not(feature = "parallel"))]
    return map_sequential(items, f);
}

/// Always single-threaded; the reference path for benchmarks and tests.
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
