//! Data-parallel helpers with a sequential fallback.
//!
//! Compiled with the `parallel` feature (the default) these fan out over
//! rayon; without it they run sequentially. Results are returned in input
//! order in both builds, and all reductions used elsewhere are
//! order-insensitive (max over f64 with no NaN), so the two builds produce
//! bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over the index range `0..n`, preserving order.
pub fn par_map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
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

/// Stack size for the recursive construction stages. Partition trees can
/// chain one node per arc vertex, so recursion depth grows with the
/// refined vertex count and outruns default thread stacks.
const DEEP_STACK_BYTES: usize = 256 << 20;

/// Runs `f` on a thread with a large stack and waits for it.
pub fn with_deep_stack<R, F>(f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(DEEP_STACK_BYTES)
            .spawn_scoped(scope, f)
            .expect("spawn deep-stack thread")
            .join()
            .expect("deep-stack thread panicked")
    })
}
