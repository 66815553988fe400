//! Order-preserving parallel map over trial indices.
//!
//! Results come back in index order whatever the thread count, so every
//! reduction downstream sees the serial sequence.

use rayon::prelude::*;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "MRZ_THREADS";

pub fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse().ok().filter(|&n| n > 0)
}

/// Runs `f` inside a pool sized by `MRZ_THREADS` (rayon's default otherwise).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match thread_count().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

pub fn ordered_map<T: Send>(count: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let out = ordered_map(1000, |i| i * i);
        assert!(out.iter().enumerate().all(|(i, &v)| v == (i as u64) * (i as u64)));
    }
}
