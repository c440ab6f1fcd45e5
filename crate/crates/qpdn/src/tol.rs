//! Centralized numeric tolerances.
//!
//! Every construction check, equivalence assertion, and validation report in
//! the crate reads from this record; none of them hard-code their own value.

/// Tolerance constants grouped by what they guard.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Construction-time invariants: unit norms, weight sums, trace checks.
    pub structural: f64,
    /// Agreement between two algebraic routes to the same quantity.
    pub equivalence: f64,
    /// Bit-level drift allowed for operations that should be near-exact.
    pub arithmetic: f64,
    /// Smallest admissible eigenvalue of a density matrix.
    pub psd_floor: f64,
}

pub const TOL: Tolerances = Tolerances {
    structural: 1e-6,
    equivalence: 1e-8,
    arithmetic: 1e-12,
    psd_floor: -1e-8,
};
