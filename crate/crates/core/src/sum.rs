//! Pairwise summation and index-ordered parallel reduction.
//!
//! Every reduction in the crate goes through these helpers so that results do
//! not depend on the number of worker threads.

use std::ops::Add;

use rayon::prelude::*;

const BLOCK: usize = 32;

/// Sums `f(0) + ... + f(n-1)` by recursive halving with sequential leaves.
pub fn pairwise_sum_by<T, F>(n: usize, f: F) -> T
where
    T: Copy + Default + Add<Output = T>,
    F: Fn(usize) -> T,
{
    fn rec<T, F>(lo: usize, hi: usize, f: &F) -> T
    where
        T: Copy + Default + Add<Output = T>,
        F: Fn(usize) -> T,
    {
        if hi - lo <= BLOCK {
            let mut acc = T::default();
            for i in lo..hi {
                acc = acc + f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, &f)
}

pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    pairwise_sum_by(values.len(), |i| values[i])
}

/// Evaluates `f` over `0..n` in parallel and returns the results in index order.
pub fn ordered_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Parallel map followed by a sequential pairwise reduction in index order.
pub fn ordered_sum<T, F>(n: usize, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Send,
    F: Fn(usize) -> T + Sync + Send,
{
    pairwise_sum(&ordered_map(n, f))
}
