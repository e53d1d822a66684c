//! Numerical tolerances shared by every module.

/// Absolute tolerance for exact-geometry comparisons (LP feasibility,
/// containment, support identities).
pub const GEOMETRY: f64 = 1e-9;

/// Margin a violation must exceed before an inclusion is called strict.
pub const STRICT: f64 = 1e-6;

/// Distance by which a complement piece is pushed off the carved region in
/// `a \ carve ⊆ b` tests. Sits between [`GEOMETRY`] and [`STRICT`] so that
/// coincident boundaries never produce slivers the LP still sees as feasible.
pub const CARVE: f64 = 1e-7;

/// Prediction gaps at or below this value are treated as zero.
pub const ZERO_GAP: f64 = 1e-12;

/// Gap-regime comparisons (`r^g` against the best and worst member gaps).
pub const GAP_REGIME: f64 = 1e-9;

/// Largest point set produced when expanding Minkowski combinations.
pub const MAX_EXPANSION: usize = 10_000;

/// Directions probed by sampled containment tests in two or more dimensions.
pub const SAMPLED_DIRECTIONS: usize = 10_000;
