pub mod angular;
pub mod catalog;
pub mod criticality;
pub mod distribution;
pub mod error;
pub mod geometry;
pub mod haar;
pub mod halfint;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod optimize;
pub mod oracle;
pub mod schmidt;
pub mod verify;

pub use error::{Result, SpinError};
pub use halfint::HalfInt;

/// Caps the global rayon pool at `SPINPOW_THREADS` when that variable holds a
/// positive integer. Returns the cap that was applied.
pub fn init_threads_from_env() -> Option<usize> {
    let n = std::env::var("SPINPOW_THREADS").ok()?.trim().parse::<usize>().ok().filter(|&n| n > 0)?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok().map(|_| n)
}
