//! Shared numeric tolerances.

/// Structural identities: probability sums, martingale residuals, tree vs
/// normal-form agreement.
pub const STRUCTURAL: f64 = 1e-9;

/// Game-theoretic comparisons: regrets, purified equilibrium checks.
pub const GAME_THEORETIC: f64 = 1e-6;

/// A behavioral probability vector must sum to 1 within this.
pub const PROFILE_SUM: f64 = 1e-12;

/// A unilateral deviation must gain more than this to break a pure equilibrium.
pub const NASH_GAIN: f64 = 1e-9;

/// Ties in best-response search are broken by order unless the gap exceeds this.
pub const TIE: f64 = 1e-12;

/// Default cap on enumerated pure strategies (per player) or profiles.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;
