//! Maybe-parallel iteration.
//!
//! With the `parallel` feature (the default) the macro yields a rayon
//! parallel iterator; without it, a plain sequential one. All call sites
//! are written so the result does not depend on the schedule.

#[cfg(feature = "parallel")]
#[macro_export]
macro_rules! maybe_par_iter {
    ($e:expr) => {
        ($e).into_par_iter()
    };
}

#[cfg(not(feature = "parallel"))]
#[macro_export]
macro_rules! maybe_par_iter {
    ($e:expr) => {
        ($e).into_iter()
    };
}

/// Pin the global thread pool size. Returns false when the pool was
/// already built or the crate runs sequentially.
#[cfg(feature = "parallel")]
pub fn set_thread_count(n: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_thread_count(_n: usize) -> bool {
    false
}
