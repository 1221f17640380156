//! Scoped-thread fan-out over independent work items.
//!
//! All heavy operations in this crate are pure functions of immutable inputs,
//! so parallelism is a plain index-partitioned map; results are collected in
//! input order, which keeps every report deterministic regardless of the
//! thread count.

/// Default worker count used when a caller passes `0`.
pub fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Applies `f` to every index in `0..len`, using up to `threads` workers
/// (0 = auto). Output order matches input order.
pub fn par_map_indexed<R, F>(len: usize, threads: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let threads = if threads == 0 {
        default_threads()
    } else {
        threads
    };
    let threads = threads.clamp(1, len.max(1));
    if threads == 1 || len < 2 {
        return (0..len).map(f).collect();
    }

    let mut out: Vec<Option<R>> = Vec::with_capacity(len);
    out.resize_with(len, || None);
    let chunk = len.div_ceil(threads);
    std::thread::scope(|scope| {
        let mut rest = out.as_mut_slice();
        let mut start = 0;
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            let base = start;
            let f = &f;
            scope.spawn(move || {
                for (i, slot) in head.iter_mut().enumerate() {
                    *slot = Some(f(base + i));
                }
            });
            rest = tail;
            start += take;
        }
    });
    out.into_iter()
        .map(|r| r.expect("worker filled slot"))
        .collect()
}
