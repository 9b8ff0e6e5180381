//! Walk-class analysis for simple undirected graphs.
//!
//! The crate bundles the machinery needed to study when matrix-function
//! centralities assign identical scores to structurally distinct nodes:
//!
//! - [`graph`]: construction of the graph families under study (cliques,
//!   cycles, matched-clique graphs, spiders, spider cycles/tori, Cartesian
//!   and tensor products) plus edge-list serialization.
//! - [`spectral`]: dense symmetric eigendecomposition (cyclic Jacobi) and
//!   evaluation of `diag(f(beta * A))` for positive power-series coefficient
//!   (PPSC) functions.
//! - [`walks`]: exact big-integer walk counts, the walk matrix, and the
//!   walk-class partition.
//! - [`entropy`]: walk entropy, search for parameter values where the
//!   centrality diagonal becomes constant, and verification of the Cartesian
//!   and tensor product constructions.
//! - [`kks`]: closed-form eigensystem and score functions for the
//!   matched-clique family `kks(c, m)`, including the entropic-parameter
//!   locator for `m = c + 1`.
//! - [`certify`]: LP feasibility certificates for centrality collisions,
//!   explicit PPSC coefficient construction, and SAFF/Farkas refutations.
//!
//! All analysis is deterministic; with the `parallel` feature (on by
//! default) the data-parallel inner loops run on rayon, otherwise the same
//! code runs sequentially.

pub mod acceptance;
pub mod certify;
pub mod entropy;
pub mod exact;
pub mod graph;
pub mod kks;
mod par;
pub mod simplex;
pub mod spectral;
pub mod walks;

pub use graph::Graph;
pub use spectral::{PpscFunction, Spectrum};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resolvent radius violated: alpha * beta * lambda_max = {value} must be < 1")]
    ResolventRadius { value: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("{op}: size {size} exceeds cap {cap}; pass the override to proceed")]
    SizeCap {
        op: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("input graph is walk-regular: the diagonal is uniform for every beta")]
    WalkRegularInput,

    #[error("no sign change in bracket: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoSignChange { f_lo: f64, f_hi: f64 },

    #[error("numerical check failed: {what} residual {residual:.3e} exceeds {tolerance:.3e}")]
    ResidualCheck {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
