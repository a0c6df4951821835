//! Thin switch between rayon and sequential execution.
//!
//! Every helper here is order-fixed: the sequential and parallel builds
//! produce identical results, so callers may rely on bit-exact outputs
//! regardless of the `parallel` feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, collecting results in index order.
pub(crate) fn map_range<U, F>(n: usize, f: F) -> Vec<U>
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

/// Maps `f` over a slice, collecting results in input order.
pub(crate) fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
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

/// Unstable sort by a total-order comparator. The comparator must be a total
/// order for the result to be deterministic; all call sites tie-break fully.
pub(crate) fn sort_by<T, F>(items: &mut [T], cmp: F)
where
    T: Send,
    F: Fn(&T, &T) -> std::cmp::Ordering + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_sort_unstable_by(cmp);
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.sort_unstable_by(cmp);
    }
}

/// Runs `f` over mutable row chunks of four equally shaped planes.
///
/// `f` receives the row index and one row slice from each plane. Used by the
/// wavelet transform where each output row depends only on its own inputs.
/// Rows are batched so each task covers a few thousand elements; small planes
/// degrade to a single task rather than paying per-row scheduling overhead.
pub(crate) fn for_each_quad_rows<F>(
    width: usize,
    a: &mut [f64],
    b: &mut [f64],
    c: &mut [f64],
    d: &mut [f64],
    f: F,
) where
    F: Fn(usize, &mut [f64], &mut [f64], &mut [f64], &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let min_rows = (16 * 1024 / width.max(1)).max(1);
        a.par_chunks_mut(width)
            .zip(b.par_chunks_mut(width))
            .zip(c.par_chunks_mut(width))
            .zip(d.par_chunks_mut(width))
            .enumerate()
            .with_min_len(min_rows)
            .for_each(|(i, (((ra, rb), rc), rd))| f(i, ra, rb, rc, rd));
    }
    #[cfg(not(feature = "parallel"))]
    {
        a.chunks_mut(width)
            .zip(b.chunks_mut(width))
            .zip(c.chunks_mut(width))
            .zip(d.chunks_mut(width))
            .enumerate()
            .for_each(|(i, (((ra, rb), rc), rd))| f(i, ra, rb, rc, rd));
    }
}
