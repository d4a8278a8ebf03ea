//! Stability bounds for generalized phase retrieval with matrix frames and
//! the Bures-Wasserstein geometry of low-rank positive semidefinite
//! matrices.
//!
//! The library computes, at desk scale:
//!
//! * quotient metrics on C^{n x r} / U(r) with closed forms and the polar
//!   aligner ([`quotient`]);
//! * the isometric realifications that turn trace inner products into real
//!   dot products ([`realify`]);
//! * frames of Hermitian measurement matrices and their alpha/beta analysis
//!   maps ([`frame`]);
//! * horizontal/vertical bundles, the Bures-Wasserstein submersion metric,
//!   explicit geodesics, and stratification diagnostics ([`tangent`]);
//! * the eigenvalue formulas for every local/global Lipschitz constant of
//!   the analysis maps ([`stability`]);
//! * multistart searches for the global constants and phase-retrievability
//!   certification ([`search`]);
//! * JSON interchange documents ([`io`]).
//!
//! Inner loops (multistart descents, sampling, geodesic evaluation) fan out
//! over rayon when the default `parallel` feature is enabled and fall back
//! to sequential loops without it; outputs are identical either way.

pub mod error;
pub mod exec;
pub mod frame;
pub mod io;
pub mod quotient;
pub mod realify;
pub mod search;
pub mod stability;
pub mod tangent;
pub mod tol;
pub mod types;

pub use error::{Error, Result};
pub use frame::{alpha_map, beta_map, frame_bounds, generate_frame, GeneratorKind, HermitianFrame};
pub use quotient::{align, canonical_factor, distance, embed, numerical_rank, EmbeddingKind, MetricKind};
pub use realify::{jmap, mu, tau, RealVector, RealifiedOperator};
pub use search::{
    bracket_a0, certify, estimate_a0, estimate_a0_seq, estimate_b0, Certificate, SearchConfig,
    Verdict,
};
pub use stability::{
    alpha_local_bounds, assemble_alpha_forms, assemble_qhat, assemble_qz, assemble_qz_unweighted,
    beta_local_bounds, beta_upper_local, global_upper_bounds, local_bounds, GlobalUpperBounds,
    LocalBounds, QuadForm, QuadFormKind,
};
pub use tangent::{
    bw_metric, geodesic, hat_reduce, stratification_limit_check, subspace_projectors, GeodesicPath,
    SubspaceProjectors, TangentVector,
};
pub use types::{ComplexMatrix, PsdPoint, QuotientPoint, C64};
