use std::num::NonZeroUsize;
use std::thread;

use bellbound_core::optimizer::WorkerPool;

/// Runs each worker job on its own scoped thread.
#[derive(Clone, Copy, Debug)]
pub struct Threads {
    workers: usize,
}

impl Threads {
    pub fn new(workers: usize) -> Self {
        Threads {
            workers: workers.max(1),
        }
    }

    /// One worker per available core.
    pub fn available() -> Self {
        Threads::new(thread::available_parallelism().map_or(1, NonZeroUsize::get))
    }
}

impl WorkerPool for Threads {
    fn workers(&self) -> usize {
        self.workers
    }

    fn run<R: Send>(&self, job: &(dyn Fn(usize) -> R + Sync)) -> Vec<R> {
        if self.workers == 1 {
            return vec![job(0)];
        }
        thread::scope(|s| {
            let handles: Vec<_> = (0..self.workers).map(|w| s.spawn(move || job(w))).collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
                .collect()
        })
    }
}
