//! Order-preserving parallel maps gated by `MIXCERT_THREADS`.
//!
//! Unset: rayon's default pool. `0`: fully sequential (no pool at all).
//! `n >= 1`: a process-wide pool with exactly `n` threads. Results are
//! collected in input order, so outputs never depend on the setting.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::Result;

pub const THREADS_ENV: &str = "MIXCERT_THREADS";

enum Mode {
    Sequential,
    Default,
    Pool(rayon::ThreadPool),
}

fn mode() -> &'static Mode {
    static MODE: OnceLock<Mode> = OnceLock::new();
    MODE.get_or_init(|| match parse_threads(std::env::var(THREADS_ENV).ok().as_deref()) {
        Some(0) => Mode::Sequential,
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(p) => Mode::Pool(p),
            Err(_) => Mode::Default,
        },
        None => Mode::Default,
    })
}

/// `None` means "use the default"; malformed values are ignored rather than
/// failing a run over an environment typo.
pub fn parse_threads(raw: Option<&str>) -> Option<usize> {
    raw.and_then(|s| s.trim().parse::<usize>().ok())
}

/// Maps `f` over `items`, in parallel when allowed, preserving order and
/// propagating the first error.
pub fn try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    match mode() {
        Mode::Sequential => items.iter().map(f).collect(),
        Mode::Default => items.par_iter().map(f).collect(),
        Mode::Pool(p) => p.install(|| items.par_iter().map(f).collect()),
    }
}
