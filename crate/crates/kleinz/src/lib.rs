//! Dimer and Ising partition functions for weighted graphs embedded in the
//! Klein bottle (periodic-antiperiodic boundary conditions) and the torus.
//!
//! The library computes
//!
//! * exact partition functions, either by direct matching enumeration, by a
//!   Pfaffian-style determinant formula, or by product formulas over roots of
//!   unity that scale to covers with thousands of fundamental domains,
//! * characteristic (Laurent) polynomials of twisted Kasteleyn matrices,
//! * the spectral data controlling the model's phase (zeros on the unit
//!   torus, shape parameters, mod-4 root invariants),
//! * universal finite-size corrections expressed through Jacobi theta and
//!   Dedekind eta functions, including the Ising specialisation via the
//!   Fisher correspondence.
//!
//! Graphs are described combinatorially by their fundamental-domain crossing
//! data; see [`graph::EmbeddedGraph`] and the bundled lattices in
//! [`graph::lattices`]. The `kleinz` binary exposes the same functionality as
//! subcommands (`verify`, `charpoly`, `z`, `f0`, `fsc`, `ising`, `ratio`,
//! `sweep`), and the `examples/` directory contains one runnable example per
//! major capability.

pub mod asympt;
pub mod cli;
pub mod exact;
pub mod graph;
pub mod linalg;
pub mod orient;
pub mod poly;
pub mod specfun;
pub mod spectra;

pub use graph::{EmbeddedGraph, Edge, Surface, ValidationReport};
pub use orient::Orientation;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum KleinError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("missing rotation system: {0}")]
    MissingRotation(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("{0}")]
    BadArgument(String),
    #[error("interpolation residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    InterpolationResidual { residual: f64, tol: f64 },
    #[error("root finding did not converge after {0} iterations")]
    RootConvergence(usize),
    #[error("spectral-curve zero off the z=-1 slice at ({z:?},{w:?}); analysis aborted")]
    ConjectureViolation {
        z: num_complex::Complex64,
        w: num_complex::Complex64,
    },
    #[error("branch calibration failed: neither branch matches the Pfaffian oracle")]
    CalibrationFailed,
    #[error("no criticality bracket found in ({0}, {1})")]
    NoBracket(f64, f64),
    #[error("overflow converting log-scale value (log modulus {0:.3e}) to f64")]
    LogOverflow(f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KleinError>;

/// Rayon pool sized from `KLEINZ_THREADS` (defaults to the rayon heuristic).
pub fn thread_pool() -> &'static rayon::ThreadPool {
    use once_cell::sync::Lazy;
    static POOL: Lazy<rayon::ThreadPool> = Lazy::new(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Ok(s) = std::env::var("KLEINZ_THREADS") {
            if let Ok(n) = s.parse::<usize>() {
                if n > 0 {
                    builder = builder.num_threads(n);
                }
            }
        }
        builder.build().expect("thread pool")
    });
    &POOL
}
