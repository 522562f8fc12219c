//! Rayon-backed executor for the subdivision engine. Output is identical
//! to Serial: the engine normalizes assembly order itself.

use pvsubdiv_core::subdivide::Parallelism;
use rayon::iter::{IntoParallelIterator, ParallelIterator};

pub struct Pool(rayon::ThreadPool);

pub fn pool(jobs: usize) -> Result<Pool, String> {
    if jobs == 0 {
        return Err(String::from("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Pool)
        .map_err(|e| e.to_string())
}

impl Parallelism for Pool {
    fn run<T, U, F>(&self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync,
    {
        let fr = &f;
        self.0.install(|| items.into_par_iter().map(move |t| fr(t)).collect())
    }
}
