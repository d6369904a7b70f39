//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they run sequentially. Callers that need bit-identical results across both
//! modes combine `par_map` with an ordered sequential reduction — the output
//! `Vec` preserves input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map over a slice, preserving order.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Map over indices `0..n`, preserving order.
pub fn par_map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Always-sequential variants, kept for benchmark comparison.
pub fn seq_map<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

pub fn seq_map_indices<U, F: Fn(usize) -> U>(n: usize, f: F) -> Vec<U> {
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_matches_seq_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = par_map(&xs, |x| x * 3 + 1);
        let b = seq_map(&xs, |x| x * 3 + 1);
        assert_eq!(a, b);
        assert_eq!(par_map_indices(100, |i| i * i), seq_map_indices(100, |i| i * i));
    }
}
