//! Seed derivation and order-preserving parallel execution.
//!
//! Work item `i` of a run with base seed `s` always draws from a ChaCha8
//! stream seeded with `s + i`, so serial and parallel execution produce the
//! same results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type ShotRng = ChaCha8Rng;

pub fn shot_rng(seed_base: u64, index: u64) -> ShotRng {
    ChaCha8Rng::seed_from_u64(seed_base.wrapping_add(index))
}

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Serial,
    /// Rayon's global pool.
    #[default]
    Auto,
    /// A dedicated pool with this many workers.
    Threads(usize),
}

impl Parallelism {
    /// `0` means serial, as with the `CVD_THREADS` variable.
    pub fn from_thread_cap(cap: usize) -> Self {
        if cap == 0 {
            Parallelism::Serial
        } else {
            Parallelism::Threads(cap)
        }
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
pub fn map_indexed<T, F>(n: u64, par: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match par {
        Parallelism::Serial => (0..n).map(f).collect(),
        Parallelism::Auto => (0..n).into_par_iter().map(f).collect(),
        Parallelism::Threads(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
            Err(_) => (0..n).map(f).collect(),
        },
    }
}
