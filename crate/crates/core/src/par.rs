//! Execution backend for the data-parallel inner loops.
//!
//! Every hot loop in the crate is a map over independent indices (cells or
//! cubes) followed by either a collect or a max reduction. With the
//! `parallel` feature those maps run on rayon; without it, or when the
//! sequential backend is selected at runtime, they run on a plain iterator.
//! Both paths produce bit-identical output: per-index work is sequential and
//! reductions are maxima.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    Parallel,
}

const SEQUENTIAL: u8 = 0;
const PARALLEL: u8 = 1;

static BACKEND: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") {
    PARALLEL
} else {
    SEQUENTIAL
});

/// Selects the backend for subsequent calls. `Parallel` is ignored when the
/// crate was built without the `parallel` feature.
pub fn set_backend(backend: Backend) {
    let v = match backend {
        Backend::Parallel if cfg!(feature = "parallel") => PARALLEL,
        _ => SEQUENTIAL,
    };
    BACKEND.store(v, Ordering::Relaxed);
}

pub fn backend() -> Backend {
    match BACKEND.load(Ordering::Relaxed) {
        PARALLEL => Backend::Parallel,
        _ => Backend::Sequential,
    }
}

/// `(0..len).map(f).collect()`, in parallel when enabled.
pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend() == Backend::Parallel {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    (0..len).map(f).collect()
}

/// Maps every item of a slice, in parallel when enabled.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if backend() == Backend::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Runs two closures, potentially concurrently.
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if backend() == Backend::Parallel {
        return rayon::join(a, b);
    }
    (a(), b())
}
