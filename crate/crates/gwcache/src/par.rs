//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) `Exec::Parallel` runs on the rayon
//! pool; without it every call runs sequentially. Results are always returned
//! in input order, and reductions break ties by lowest index, so output does
//! not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    /// True when this strategy will actually use worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Index and value of the maximum of `f` over `0..n`; ties go to the lowest index.
    pub fn argmax_range<F>(self, n: usize, f: F) -> Option<(usize, f64)>
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let pick = |a: Option<(usize, f64)>, b: Option<(usize, f64)>| match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => {
                if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                    Some(y)
                } else {
                    Some(x)
                }
            }
        };
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(|i| Some((i, f(i)))).reduce(|| None, pick);
        }
        (0..n).map(|i| Some((i, f(i)))).fold(None, pick)
    }
}
