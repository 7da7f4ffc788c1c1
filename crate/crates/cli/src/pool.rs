//! Sample-level parallelism. Workers compute `(index, record)` pairs from the
//! index alone; results come back in index order, so output bytes never
//! depend on the thread count.

use rayon::prelude::*;

use crate::error::{CliError, Result};

pub struct Pool {
    inner: rayon::ThreadPool,
    threads: usize,
}

impl Pool {
    pub fn new(threads: usize) -> Result<Self> {
        let inner = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {threads} worker threads: {e}")))?;
        Ok(Self { inner, threads: threads.max(1) })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// `f(0), ..., f(count - 1)` in index order; the first error by index wins.
    pub fn map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync,
    {
        let out: Vec<Result<T>> = self.inner.install(|| (0..count).into_par_iter().map(&f).collect());
        out.into_iter().collect()
    }
}
