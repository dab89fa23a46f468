//! Numerical thresholds used across the crate.
//!
//! Jet arithmetic carries exact derivatives, so identity residuals are pure
//! floating-point rounding; the looser thresholds only absorb conditioning
//! of the least-squares solves and of offset geometry near focal distances.

/// Rank/singularity guard for determinants (first/third fundamental form,
/// relative metric, cross-product norm).
pub const RANK_GUARD: f64 = 1e-12;

/// Minimum admissible |Ktilde|; the construction assumes the Euclidean
/// Gauss curvature never vanishes.
pub const GAUSS_CURV_MIN: f64 = 1e-10;

/// Minimum admissible |q| for a support function.
pub const SUPPORT_MIN: f64 = 1e-10;

/// |A(mu)| below this is treated as a focal (singular) offset.
pub const OFFSET_A_MIN: f64 = 1e-10;

/// Stricter per-grid guard for parallel-distance candidates: a candidate
/// whose |A| drops below this anywhere on the grid is reported as singular
/// rather than evaluated.
pub const CANDIDATE_A_MIN: f64 = 1e-6;

/// Guard for reciprocals of principal curvatures and of `1 - mu*kappa`.
pub const RECIP_GUARD: f64 = 1e-12;

/// Relative spread below which a curvature function counts as constant on
/// the sampled grid (candidate applicability).
pub const CONSTANCY_TOL: f64 = 1e-6;

/// Looser constancy threshold for the predicted function on the offset;
/// offset geometry amplifies conditioning near focal distances.
pub const PREDICTION_TOL: f64 = 1e-5;

/// Every returned parallel distance must annihilate its defining
/// polynomial to this absolute residual.
pub const ROOT_CERT_TOL: f64 = 1e-9;

/// Frame-law residuals (Weingarten equations, tangency of the relative
/// normal's derivatives, mixed-component consistency).
pub const FRAME_LAW_TOL: f64 = 1e-7;

/// Residuals that are exact identities of jet arithmetic (conormal laws,
/// symmetry of the B-form, metric relation).
pub const EXACT_LAW_TOL: f64 = 1e-8;

/// Agreement between the closed-form offset quantities and the
/// recompute-on-`x + mu*y` path, and between shared quantities of the
/// family.
pub const STAR_PATH_TOL: f64 = 1e-6;
