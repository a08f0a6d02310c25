use rayon::prelude::*;
use rayon::ThreadPool;

/// Records handed to the pool at a time; bounds memory for streamed corpora.
pub const CHUNK: usize = 4096;

pub fn pool(workers: Option<u32>) -> anyhow::Result<ThreadPool> {
    let n = match workers {
        Some(n) => n as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?)
}

/// Order-preserving parallel map.
pub fn map<T, U, F>(pool: &ThreadPool, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    pool.install(|| items.par_iter().map(&f).collect())
}
