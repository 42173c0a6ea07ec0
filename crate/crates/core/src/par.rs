//! Data-parallel scan helpers.
//!
//! Every exhaustive or sampled verification in the crate reduces to an indexed
//! scan over `0..len`. With the `parallel` feature these run on rayon; without
//! it (or with [`Exec::Sequential`]) they run as plain loops. Results never
//! depend on the mode: searches report the lowest failing index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution mode for scans.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    /// Parallel when the `parallel` feature is compiled in.
    #[default]
    Auto,
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self != Exec::Sequential
    }
}

/// Sizes the global worker pool. Returns false when the pool already exists
/// or the crate was built without the `parallel` feature.
pub fn set_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    return rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_ok();
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

/// Lowest index in `0..len` for which `pred` holds.
pub fn find_first<F>(exec: Exec, len: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..len).into_par_iter().find_first(|&i| pred(i));
    }
    let _ = exec;
    (0..len).find(|&i| pred(i))
}

/// `f(i)` for every `i` in `0..len`, in index order.
pub fn map_collect<T, F>(exec: Exec, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Lowest index whose `f` returns `Some`, together with the payload.
pub fn find_map_first<T, F>(exec: Exec, len: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..len).into_par_iter().filter_map(|i| f(i).map(|t| (i, t))).find_first(|_| true);
    }
    let _ = exec;
    (0..len).find_map(|i| f(i).map(|t| (i, t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        for exec in [Exec::Sequential, Exec::Parallel, Exec::Auto] {
            assert_eq!(find_first(exec, 1000, |i| i * i > 500), Some(23));
            assert_eq!(find_first(exec, 10, |_| false), None);
            assert_eq!(map_collect(exec, 5, |i| i * 2), vec![0, 2, 4, 6, 8]);
            assert_eq!(find_map_first(exec, 100, |i| (i % 7 == 6).then_some(i + 1)), Some((6, 7)));
        }
    }
}
