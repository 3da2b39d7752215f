//! Index-ordered batch execution, parallel with the `parallel` feature.

#[cfg(feature = "parallel")]
use crate::error::Error;
use crate::error::Result;

/// How replicate batches are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Executor {
    /// One thread, replicates in index order.
    Sequential,
    /// Rayon; `None` uses the global pool, `Some(k)` a dedicated pool of `k` threads.
    #[cfg(feature = "parallel")]
    Parallel(Option<usize>),
    /// `Parallel(None)` when the feature is enabled, otherwise `Sequential`.
    #[default]
    Auto,
}

impl Executor {
    /// Executor capped at `workers` threads; `1` is sequential.
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 {
            return Executor::Sequential;
        }
        #[cfg(feature = "parallel")]
        {
            Executor::Parallel(Some(workers))
        }
        #[cfg(not(feature = "parallel"))]
        {
            Executor::Sequential
        }
    }

    /// Runs `op` with any dedicated pool built once; `op` receives an
    /// executor that reuses it.
    pub fn install<R, F>(&self, op: F) -> Result<R>
    where
        R: Send,
        F: FnOnce(&Executor) -> R + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Executor::Parallel(Some(k)) => {
                let pool = build_pool(*k)?;
                Ok(pool.install(|| op(&Executor::Parallel(None))))
            }
            _ => Ok(op(self)),
        }
    }

    /// Evaluates `f(0..count)` and returns results in index order. Fails only
    /// if a dedicated thread pool cannot be built.
    pub fn map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Executor::Sequential => Ok((0..count).map(f).collect()),
            #[cfg(feature = "parallel")]
            Executor::Parallel(None) | Executor::Auto => par_map(count, &f),
            #[cfg(feature = "parallel")]
            Executor::Parallel(Some(k)) => {
                let pool = build_pool(*k)?;
                pool.install(|| par_map(count, &f))
            }
            #[cfg(not(feature = "parallel"))]
            Executor::Auto => Ok((0..count).map(f).collect()),
        }
    }
}

#[cfg(feature = "parallel")]
fn build_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(count: usize, f: &F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    // collect() on an indexed parallel iterator keeps index order
    Ok((0..count).into_par_iter().map(f).collect())
}
