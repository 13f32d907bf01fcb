//! Numerical tolerances shared by the library, the property suites and the CLI.

/// Structural checks: unitarity, orthonormality, declared-form checks.
pub const STRUCTURAL: f64 = 1e-8;
/// Algebraic identities: Hermiticity, trace, normalization.
pub const ALGEBRAIC: f64 = 1e-10;
/// Idempotence of projectors.
pub const IDEMPOTENT: f64 = 1e-12;
/// Most negative eigenvalue accepted in a density operator.
pub const EIGEN_FLOOR: f64 = 1e-9;
/// Probability vectors must sum to one within this.
pub const PROB_SUM: f64 = 1e-9;
/// Most negative probability silently clamped to zero.
pub const PROB_NEGATIVE: f64 = 1e-12;
/// Probabilities below this are treated as exact zeros before entropies.
pub const PROB_FLOOR: f64 = 1e-14;
/// Pivot norm below which Gram-Schmidt reports rank deficiency.
pub const RANK_PIVOT: f64 = 1e-10;
/// Overlap modulus below which a ratio coefficient is singular.
pub const SINGULAR_OVERLAP: f64 = 1e-12;
/// Violation threshold (bits) for relations with an exactly computed bound.
pub const VIOLATION_EXACT: f64 = 1e-9;
/// Violation threshold (bits) for relations whose bound is optimized.
pub const VIOLATION_OPTIMIZED: f64 = 1e-6;
/// Minimum increase of the best fitness that counts as an improvement.
pub const IMPROVEMENT: f64 = 1e-12;
