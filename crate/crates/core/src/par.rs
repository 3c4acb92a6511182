//! Order-preserving data-parallel helpers and splittable random streams.
//!
//! With the `parallel` feature the helpers dispatch to rayon; without it, or
//! inside [`sequential`], they run on the calling thread. Callers only ever
//! see results in index order, so any reduction they perform afterwards is
//! independent of the number of worker threads.

use std::cell::Cell;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of Monte Carlo samples drawn from one random stream.
pub const SAMPLE_BLOCK: usize = 1024;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper in this module forced onto the calling thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    struct Reset(bool);
    impl Drop for Reset {
        fn drop(&mut self) {
            FORCE_SEQUENTIAL.with(|c| c.set(self.0));
        }
    }
    let _reset = Reset(FORCE_SEQUENTIAL.with(|c| c.replace(true)));
    f()
}

/// True when the helpers would currently dispatch to rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(Cell::get)
}

/// Evaluates `f(0), f(1), ..., f(n-1)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Like [`map_indexed`] for fallible work; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(n, f).into_iter().collect()
}

/// Applies `f` to consecutive chunks of `0..len` of size `chunk` (the last
/// one possibly shorter), returning per-chunk results in order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    assert!(chunk > 0, "chunk size must be positive");
    let blocks = len.div_ceil(chunk);
    map_indexed(blocks, |b| {
        let lo = b * chunk;
        f(lo..(lo + chunk).min(len))
    })
}

/// Sorts floats in ascending total order (parallel when enabled).
pub fn sort_floats(v: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        v.par_sort_unstable_by(f64::total_cmp);
        return;
    }
    v.sort_unstable_by(f64::total_cmp);
}

/// The random stream for block `block` under master seed `seed`.
///
/// Streams are independent ChaCha8 streams of one key, so a block's draws do
/// not depend on which thread evaluates it.
pub fn stream_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}
