//! Deterministic per-trial parallelism: trials are mapped independently and
//! the results are returned in trial order, so callers that fold them
//! sequentially get the same bits for any worker count.

use crate::timeline::Trial;

#[cfg(not(target_arch = "wasm32"))]
pub(crate) fn map_trials<T, F>(trials: &[Trial], workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Trial) -> T + Sync,
{
    if workers <= 1 || trials.len() < 2 {
        return trials.iter().map(f).collect();
    }
    let chunk = trials.len().div_ceil(workers.min(trials.len()));
    let mut out: Vec<Vec<T>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = trials
            .chunks(chunk)
            .map(|block| scope.spawn(|| block.iter().map(&f).collect::<Vec<T>>()))
            .collect();
        out = handles.into_iter().map(|h| h.join().expect("worker panicked")).collect();
    });
    out.into_iter().flatten().collect()
}

#[cfg(target_arch = "wasm32")]
pub(crate) fn map_trials<T, F>(trials: &[Trial], _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Trial) -> T + Sync,
{
    trials.iter().map(f).collect()
}
