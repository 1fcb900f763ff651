//! Data-parallel helpers with a sequential fallback.
//!
//! Results are always collected in index order and reduced sequentially, so
//! `Execution::Parallel` and `Execution::Sequential` produce bit-identical
//! output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise falls back
    /// to sequential execution.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f)` collected in order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Splits `0..total` into contiguous chunks, maps each chunk, and returns the
/// per-chunk results in chunk order.
pub fn map_chunks<T, F>(exec: Execution, total: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let count = total.div_ceil(chunk) as usize;
    map_indexed(exec, count, |c| {
        let start = c as u64 * chunk;
        f(start, (start + chunk).min(total))
    })
}
