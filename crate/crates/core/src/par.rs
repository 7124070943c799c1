//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper here produces results in index order, so output is identical
//! whether the `parallel` feature is enabled or not and independent of the
//! number of worker threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n` and collects in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Maps over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
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

/// Runs `f(chunk_index, chunk)` over disjoint mutable chunks of `data`.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }
}

/// Runs `f(a_chunk, b_chunk)` over matching chunks of two equal-length slices.
pub fn for_each_zip_chunks_mut<T, F>(a: &mut [T], b: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T], &mut [T]) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    {
        a.par_chunks_mut(chunk_len)
            .zip(b.par_chunks_mut(chunk_len))
            .for_each(|(x, y)| f(x, y));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(chunk_len)
            .zip(b.chunks_mut(chunk_len))
            .for_each(|(x, y)| f(x, y));
    }
}

/// Sums `f` over fixed-size blocks of `0..n`, then adds block totals in order.
///
/// Block boundaries depend only on `n`, never on the thread count.
pub fn blocked_sum<T, F>(n: usize, block: usize, f: F) -> T
where
    T: Send + std::iter::Sum<T>,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let blocks = n.div_ceil(block.max(1));
    map_range(blocks, |b| {
        let start = b * block;
        f(start..(start + block).min(n))
    })
    .into_iter()
    .sum()
}

/// Sets the global worker count. A no-op without the `parallel` feature.
///
/// Fails if the global pool was already initialised with a different size.
pub fn configure_threads(threads: usize) -> crate::Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .or_else(|e| {
                if rayon::current_num_threads() == threads {
                    Ok(())
                } else {
                    Err(crate::Error::Usage(format!("cannot set worker count: {e}")))
                }
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        Ok(())
    }
}

/// Number of workers the helpers above will use.
pub fn worker_count() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
