//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it everything runs on the calling thread. Results always come
//! back in index order, so the output never depends on scheduling.

/// Evaluates `f(0), …, f(count - 1)` on the current thread.
pub fn map_indexed_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Evaluates `f(0), …, f(count - 1)` on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_indexed_par<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_indexed_par(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_seq(count, f)
    }
}

/// Runs `op` with at most `jobs` worker threads. `jobs = 0` keeps the
/// global pool. Without the `parallel` feature this just calls `op`.
pub fn with_jobs<R, F>(jobs: usize, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs == 0 {
            return op();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(op),
            Err(_) => op(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        op()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indexed_seq(100, |i| i * i);
        let dispatched = map_indexed(100, |i| i * i);
        assert_eq!(seq, dispatched);
        let pooled = with_jobs(3, || map_indexed(100, |i| i * i));
        assert_eq!(seq, pooled);
    }
}
