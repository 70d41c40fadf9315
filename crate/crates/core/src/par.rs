//! Data-parallel map with results landing in pre-indexed slots.
//!
//! Sweeps fan out over grid points or row indices; every result is written to
//! the slot of its input index and reports are folded in index order, so the
//! output is independent of thread count. The `parallel` feature selects
//! rayon; without it [`map_indexed`] degrades to the sequential path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sequential reference path, always available (used by benches to compare).
pub fn map_indexed_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    map_indexed_seq(items, f)
}
