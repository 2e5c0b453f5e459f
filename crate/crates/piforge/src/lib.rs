//! Certificates for connectivity, Poincaré and modulus estimates on finite
//! metric measure spaces, and the thickening of compact sets into
//! well-connected spaces.

pub mod corpus;
pub mod connectivity;
pub mod covers;
pub mod fragments;
pub mod io;
pub mod oracle;
pub mod poincare;
pub mod error;
pub(crate) mod graph;
pub mod space;
pub mod thickening;

pub use error::{Error, Result};
pub use space::{Ball, Edge, Space};

/// Caps rayon's global pool at `PIFORGE_THREADS` when that variable is set.
/// Safe to call more than once.
pub fn init_threads() {
    if let Some(n) = std::env::var("PIFORGE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
