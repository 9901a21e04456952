//! Execution policy for the data-parallel loops.
//!
//! Every parallel loop in the crate goes through these helpers. With the
//! `parallel` feature disabled, [`Execution::Parallel`] silently runs the
//! sequential path, so results never depend on how the crate was built.
//! Reductions are always done per chunk and then summed in chunk order,
//! which keeps floating-point results independent of the thread schedule.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this policy will actually fan out to the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Calls `f(row_index, row)` for each `row_len`-sized chunk of `data`.
    pub fn for_each_row<T, F>(self, data: &mut [T], row_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            data.par_chunks_mut(row_len).enumerate().for_each(|(r, row)| f(r, row));
            return;
        }
        data.chunks_mut(row_len).enumerate().for_each(|(r, row)| f(r, row));
    }

    /// Ordered map over `0..n`.
    pub fn map_indices<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Ordered map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.map_indices(items.len(), |k| f(&items[k]))
    }

    /// Sum of `f(k)` over `0..n`, accumulated left to right regardless of policy.
    pub fn sum_indices<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map_indices(n, f).into_iter().fold(0.0, |acc, x| acc + x)
    }
}
