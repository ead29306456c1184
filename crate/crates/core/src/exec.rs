//! Execution strategy for the data-parallel loops (Monte Carlo sampling and
//! forward level dynamic programming).
//!
//! With the `parallel` feature enabled, [`Execution::Parallel`] runs on the
//! current rayon pool. Without it, every strategy runs sequentially. Results
//! never depend on the strategy or on the number of workers: per-sample
//! randomness comes from [`substream`], and partial results are merged with
//! commutative, associative reductions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this strategy actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Independent random stream for sample `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Folds `visit` over `0..count`, giving each worker its own scratch state,
/// then merges the per-worker accumulators.
pub(crate) fn fold_indices<S, A>(
    exec: Execution,
    count: u64,
    scratch: impl Fn() -> S + Sync + Send,
    identity: impl Fn() -> A + Sync + Send,
    visit: impl Fn(&mut S, &mut A, u64) + Sync + Send,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> A
where
    S: Send,
    A: Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..count)
            .into_par_iter()
            .fold(
                || (scratch(), identity()),
                |(mut s, mut acc), i| {
                    visit(&mut s, &mut acc, i);
                    (s, acc)
                },
            )
            .map(|(_, acc)| acc)
            .reduce(&identity, &merge);
    }
    let _ = (exec, &merge);
    let mut s = scratch();
    let mut acc = identity();
    for i in 0..count {
        visit(&mut s, &mut acc, i);
    }
    acc
}

/// Folds `visit` over a slice and merges the partial accumulators.
pub(crate) fn fold_slice<T, A>(
    exec: Execution,
    items: &[T],
    identity: impl Fn() -> A + Sync + Send,
    visit: impl Fn(&mut A, &T) + Sync + Send,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> A
where
    T: Sync,
    A: Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .fold(&identity, |mut acc, item| {
                visit(&mut acc, item);
                acc
            })
            .reduce(&identity, &merge);
    }
    let _ = (exec, &merge);
    let mut acc = identity();
    for item in items {
        visit(&mut acc, item);
    }
    acc
}
