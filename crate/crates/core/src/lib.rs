//! Spectral discrepancy lab for compact manifolds with explicit
//! Laplace–Beltrami spectra.
//!
//! The crate computes the Cassels–Montgomery spectral functional
//! `S = sum_{m<=X} |sum_j a_j phi_m(x_j)|^2` for weighted point sets on
//! flat tori and the 2-sphere, certifies its lower bounds empirically,
//! implements the radial-transform and smoothed-kernel machinery behind
//! the sharp bound, builds equal-measure partitions with certified ball
//! radii, and audits quadrature rules against the node-count corollary
//! (`N >= c X` nodes for exactness index X).
//!
//! Manifolds and point families are trait objects behind name-indexed
//! registries, so experiments select them at runtime (`torus:2`,
//! `sphere2`; `random`, `lattice`, `jittered`, `clustered`).

pub mod error;
pub mod families;
pub mod functional;
pub mod gauss;
pub mod io;
pub mod manifold;
pub mod partition;
pub mod quadrature;
pub mod radial;
pub mod sum;

pub use error::{Error, Result};

use std::sync::Once;

/// Cap rayon's global pool from `CM_LAB_THREADS` (first call wins; results
/// never depend on thread count, only runtime does).
pub fn init_thread_pool_from_env() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        if let Ok(v) = std::env::var("CM_LAB_THREADS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}
