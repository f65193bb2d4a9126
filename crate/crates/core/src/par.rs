//! Data-parallel helpers. With the `parallel` feature the `Parallel` mode
//! fans out over rayon; without it every mode runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

impl Mode {
    /// Parallel when compiled in, sequential otherwise.
    pub fn default_mode() -> Mode {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

pub fn map<T, R, F>(mode: Mode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn map_range<R, F>(mode: Mode, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// True iff `f` holds on every index.
pub fn all<F>(mode: Mode, n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n).into_par_iter().all(f),
        _ => (0..n).all(f),
    }
}
