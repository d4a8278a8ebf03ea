//! Centralized numerical tolerances.
//!
//! Every threshold used by validation and by the eigenvalue formulas is
//! named here so that the same gate is applied everywhere.

/// Relative cutoff on singular values when counting numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Relative Hermitian-symmetry tolerance at construction time.
pub const HERMITIAN_REL: f64 = 1e-12;

/// Relative Hermitian-symmetry tolerance when loading external documents.
pub const HERMITIAN_LOAD_REL: f64 = 1e-10;

/// A PSD matrix may have eigenvalues as negative as `-PSD_REL * lambda_max`.
pub const PSD_REL: f64 = 1e-10;

/// Looser PSD gate for sampled geodesic path points.
pub const PATH_PSD_REL: f64 = 1e-9;

/// Tangent-space membership: `P_perp W P_perp` must vanish to this level.
pub const TANGENT_MEMBERSHIP_REL: f64 = 1e-10;

/// Unitarity tolerance for `[U1|U2]` blocks (scaled by sqrt(n)).
pub const UNITARY_TOL: f64 = 1e-10;

/// Eigenvalues within this distance of an extremal eigenvalue are treated
/// as one cluster when forming subgradients.
pub const EIG_CLUSTER: f64 = 1e-8;

/// Relative threshold below which trailing eigenvalues count as a null space.
pub const NULL_SPACE_REL: f64 = 1e-8;

/// `I_0(z)` splitting gate: `beta_j(z) <= SPLIT_EPS_FACTOR * (max_j beta_j + 1)`.
pub const SPLIT_EPS_FACTOR: f64 = 1e-12;

/// Rank tolerance used on extrapolated limit curves, which converge like
/// O(1/i^2) and so carry residuals far above machine precision.
pub const LIMIT_RANK_TOL: f64 = 1e-5;
