//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the rayon pool; without it every helper runs sequentially. The mode can also
//! be switched at runtime, which the benches use to compare both paths.

use std::sync::atomic::{AtomicBool, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

pub fn set_mode(mode: ExecMode) {
    FORCE_SEQUENTIAL.store(mode == ExecMode::Sequential, Ordering::Relaxed);
}

pub fn mode() -> ExecMode {
    if parallel_available() && !FORCE_SEQUENTIAL.load(Ordering::Relaxed) {
        ExecMode::Parallel
    } else {
        ExecMode::Sequential
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == ExecMode::Parallel && items.len() > 1 {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Splits `items` into chunks, folds each chunk with `fold`, then merges the
/// partial results with `merge`.
pub fn chunked_fold<T, A, Init, Fold, Merge>(items: &[T], min_chunk: usize, init: Init, fold: Fold, merge: Merge) -> A
where
    T: Sync,
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Fold: Fn(A, &T) -> A + Sync + Send,
    Merge: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == ExecMode::Parallel && items.len() >= 2 * min_chunk.max(1) {
        use rayon::prelude::*;
        return items
            .par_chunks(min_chunk.max(1))
            .map(|chunk| chunk.iter().fold(init(), &fold))
            .reduce(&init, &merge);
    }
    let _ = (&merge, min_chunk);
    items.iter().fold(init(), fold)
}
