//! Block-parallel execution with a sequential fallback.
//!
//! Work over an index range is cut into blocks of a fixed size. Each block is
//! computed independently (rolling kernels re-sum at the block start), so the
//! output is identical whichever way the blocks are scheduled.

use std::cell::Cell;

/// Outputs computed per block. Also bounds rolling-sum drift: every block
/// starts from a fresh summation.
pub const BLOCK: usize = 4096;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with block parallelism disabled on the current thread.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    struct Restore(bool);
    impl Drop for Restore {
        fn drop(&mut self) {
            FORCE_SEQUENTIAL.with(|c| c.set(self.0));
        }
    }
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let _restore = Restore(prev);
    f()
}

/// Whether block work issued from this thread may fan out.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Fills `len` outputs, calling `kernel(start, out)` on each block where
/// `out` covers indices `start..start + out.len()`.
pub fn fill_blocks<F>(len: usize, kernel: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let mut out = vec![0.0; len];
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        out.par_chunks_mut(BLOCK)
            .enumerate()
            .for_each(|(b, chunk)| kernel(b * BLOCK, chunk));
        return out;
    }
    for (b, chunk) in out.chunks_mut(BLOCK).enumerate() {
        kernel(b * BLOCK, chunk);
    }
    out
}

/// Maps `f` over `items`, in parallel when allowed. Output order follows input.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_every_index_once() {
        let n = BLOCK * 2 + 17;
        let out = fill_blocks(n, |start, chunk| {
            for (k, v) in chunk.iter_mut().enumerate() {
                *v = (start + k) as f64;
            }
        });
        assert!(out.iter().enumerate().all(|(i, &v)| v == i as f64));
    }

    #[test]
    fn sequential_scope_restores_flag() {
        let before = is_parallel();
        sequential(|| assert!(!is_parallel()));
        assert_eq!(is_parallel(), before);
    }
}
