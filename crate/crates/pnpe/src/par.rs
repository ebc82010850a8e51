//! Data-parallel map with a sequential fallback.
//!
//! With the default `parallel` feature the work items are dispatched through
//! rayon; without it the same API runs sequentially. Output order always
//! follows input order, so results are deterministic either way.

/// Map `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn pmap<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Map `f` over `items`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn pmap<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Always-sequential map, kept available so benchmarks can compare the two
/// code paths within a single build.
pub fn map_sequential<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
