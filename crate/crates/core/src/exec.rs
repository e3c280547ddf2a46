//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (default) work fans out over rayon; without it,
//! or when [`Exec::Sequential`] is requested, every loop runs on the calling
//! thread. Both paths produce identical, order-preserving results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `items`, preserving input order in the output.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps `f` over `0..n`, preserving index order.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Runs `f` inside a pool of `jobs` workers. `jobs == 0` uses the global pool.
    pub fn install<R, F>(self, jobs: usize, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel if jobs > 0 => match rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
            {
                Ok(pool) => pool.install(f),
                Err(e) => {
                    log::warn!("falling back to global pool: {e}");
                    f()
                }
            },
            _ => {
                let _ = jobs;
                f()
            }
        }
    }
}
