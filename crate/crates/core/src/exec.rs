//! Order-preserving map helpers for data-parallel inner loops.
//!
//! With the `parallel` feature (default) [`map_collect`] fans out over the
//! rayon thread pool; without it, both functions are plain sequential maps.
//! Outputs are collected in input order and all floating-point reductions in
//! this crate happen sequentially over the collected vectors, so results are
//! byte-identical regardless of thread count or scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    items.par_iter().map(f).collect()
}

/// Map `f` over `items`, in parallel when the `parallel` feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Always-sequential map, kept for determinism checks and the comparison
/// benchmarks.
pub fn map_collect_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let xs: Vec<f64> = (0..10_000).map(|i| i as f64 * 1e-3).collect();
        let par = map_collect(&xs, |x| (x.sin() * x.cosh()).to_bits());
        let seq = map_collect_seq(&xs, |x| (x.sin() * x.cosh()).to_bits());
        assert_eq!(par, seq);
    }
}
