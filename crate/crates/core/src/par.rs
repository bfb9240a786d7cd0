//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the reductions below run on the
//! current rayon pool. Without it, or inside [`sequential`], they run on the
//! calling thread. Every reduction used by the engines is an integer sum or
//! an order-independent extremum, so results never depend on the schedule.

use std::cell::Cell;
use std::ops::Range;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper in this module pinned to the calling thread.
pub fn sequential<T>(f: impl FnOnce() -> T) -> T {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

fn is_sequential() -> bool {
    !cfg!(feature = "parallel") || FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Runs `f` on a pool capped at `threads` workers (`None` keeps the default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("failed to build thread pool");
        return pool.install(f);
    }
    let _ = threads;
    f()
}

/// Splits `range` into contiguous blocks of `block` items, maps each block
/// with `map`, and combines the partial results with `reduce`.
pub fn map_reduce_blocks<T, M, R>(range: Range<u64>, block: u64, identity: T, map: M, reduce: R) -> T
where
    T: Send + Sync + Clone,
    M: Fn(Range<u64>) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let block = block.max(1);
    let start = range.start;
    let len = range.end.saturating_sub(start);
    let nblocks = len.div_ceil(block);
    let block_range = move |b: u64| {
        let lo = start + b * block;
        lo..(lo + block).min(range.end)
    };
    if is_sequential() {
        return (0..nblocks).fold(identity, |acc, b| reduce(acc, map(block_range(b))));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..nblocks)
            .into_par_iter()
            .map(|b| map(block_range(b)))
            .reduce(|| identity.clone(), &reduce)
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!()
}

/// Fills `out[i] = f(i)` for every index, in parallel when enabled.
pub fn fill_indexed<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    if is_sequential() {
        for (c, part) in out.chunks_mut(chunk).enumerate() {
            f(c * chunk, part);
        }
        return;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(c, part)| f(c * chunk, part));
    }
}

/// Maps every element of `items` with `f`, preserving order.
pub fn map_collect<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    if is_sequential() {
        return items.iter().map(f).collect();
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!()
}
