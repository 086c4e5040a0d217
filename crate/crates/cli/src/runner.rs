use ambc_noma::montecarlo::{ChunkRunner, Sequential};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Runs Monte Carlo chunks on a fixed number of scoped threads.
///
/// Threads pull chunk indices from a shared counter, so completion order is
/// arbitrary; results are slotted back by index.
#[derive(Debug, Clone, Copy)]
pub struct Workers(usize);

impl Workers {
    pub fn new(threads: usize) -> Self {
        Self(threads.max(1))
    }

    pub fn available() -> Self {
        Self::new(std::thread::available_parallelism().map_or(1, usize::from))
    }

    pub fn threads(&self) -> usize {
        self.0
    }
}

impl ChunkRunner for Workers {
    fn map_chunks<T, F>(&self, chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let threads = self.0.min(chunks);
        if threads <= 1 {
            return Sequential.map_chunks(chunks, job);
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..chunks).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= chunks {
                        break;
                    }
                    let out = job(i);
                    slots.lock().expect("worker panicked")[i] = Some(out);
                });
            }
        });
        slots
            .into_inner()
            .expect("worker panicked")
            .into_iter()
            .map(|s| s.expect("every chunk runs exactly once"))
            .collect()
    }
}
