//! Execution helpers: data-parallel inner loops with a sequential fallback.
//!
//! With the `parallel` feature (default) the parallel mode fans work out over
//! rayon; without it both modes run sequentially. Hot entry points that want
//! to be benchmarked in both modes take an [`ExecMode`].

/// How a data-parallel loop should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Use rayon when the `parallel` feature is enabled.
    Parallel,
    /// Always run on the calling thread.
    Sequential,
}

impl Default for ExecMode {
    fn default() -> Self {
        ExecMode::Parallel
    }
}

/// Maps `0..n` and reduces the results with `reduce`, which must be
/// associative. `identity` is the reduction identity.
pub fn map_reduce<T, M, R, I>(mode: ExecMode, n: usize, map: M, identity: I, reduce: R) -> T
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
    I: Fn() -> T + Sync + Send,
{
    match mode {
        ExecMode::Parallel => par_map_reduce(n, &map, &identity, &reduce),
        ExecMode::Sequential => (0..n).map(map).fold(identity(), reduce),
    }
}

/// Maps `0..n` into a vector, preserving index order.
pub fn map_collect<T, M>(mode: ExecMode, n: usize, map: M) -> Vec<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Parallel => par_map_collect(n, &map),
        ExecMode::Sequential => (0..n).map(map).collect(),
    }
}

#[cfg(feature = "parallel")]
fn par_map_reduce<T, M, R, I>(n: usize, map: &M, identity: &I, reduce: &R) -> T
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
    I: Fn() -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(map).reduce(identity, reduce)
}

#[cfg(not(feature = "parallel"))]
fn par_map_reduce<T, M, R, I>(n: usize, map: &M, identity: &I, reduce: &R) -> T
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
    I: Fn() -> T + Sync + Send,
{
    (0..n).map(map).fold(identity(), reduce)
}

#[cfg(feature = "parallel")]
fn par_map_collect<T, M>(n: usize, map: &M) -> Vec<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(map).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map_collect<T, M>(n: usize, map: &M) -> Vec<T>
where
    T: Send,
    M: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(map).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i * i) as u64;
        let par = map_reduce(ExecMode::Parallel, 1000, f, || 0u64, |a, b| a + b);
        let seq = map_reduce(ExecMode::Sequential, 1000, f, || 0u64, |a, b| a + b);
        assert_eq!(par, seq);
        assert_eq!(
            map_collect(ExecMode::Parallel, 17, |i| i),
            map_collect(ExecMode::Sequential, 17, |i| i)
        );
    }
}
