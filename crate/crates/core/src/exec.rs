//! Execution strategy for the exhaustive loops (coset enumeration, Haar
//! averages, normality searches).
//!
//! Every parallel path returns exactly what the sequential path returns:
//! searches pick the first hit in enumeration order and sums are exact.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// rayon; degrades to [`Exec::Sequential`] without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn map<T, F>(self, range: Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }

    /// First `Some` in index order.
    pub fn find_first<T, F>(self, range: Range<usize>, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range.into_par_iter().find_map_first(f);
        }
        range.into_iter().find_map(f)
    }

    pub fn all<F>(self, range: Range<usize>, f: F) -> bool
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        self.find_first(range, |i| (!f(i)).then_some(())).is_none()
    }

    /// Fold-then-combine reduction; `combine` must be associative and
    /// commutative for the result to be order independent.
    pub fn reduce<T, F, C>(self, range: Range<usize>, identity: T, f: F, combine: C) -> T
    where
        T: Send + Sync + Clone,
        F: Fn(usize) -> T + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return range
                .into_par_iter()
                .map(f)
                .reduce(|| identity.clone(), &combine);
        }
        range.map(f).fold(identity, combine)
    }

    /// Strategy for a worker count: one worker runs sequentially, more size
    /// the global rayon pool (first call wins).
    pub fn with_jobs(jobs: usize) -> Exec {
        if jobs <= 1 {
            return Exec::Sequential;
        }
        #[cfg(feature = "parallel")]
        {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
        }
        Exec::Parallel
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map(0..5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(exec.find_first(0..1000, |i| (i % 97 == 96).then_some(i)), Some(96));
            assert!(exec.all(0..100, |i| i < 100));
            assert!(!exec.all(0..100, |i| i != 50));
            assert_eq!(exec.reduce(0..101, 0u64, |i| i as u64, |a, b| a + b), 5050);
        }
    }
}
