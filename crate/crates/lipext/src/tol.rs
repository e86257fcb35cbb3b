//! Shared numeric tolerances.
//!
//! Two tolerances are used throughout the crate: metric-axiom validation runs
//! at relative `1e-12` (double-precision inputs are trusted to that level),
//! and extension certificates are compared against their bounds with absolute
//! slack `1e-9` (certificates are ratios of sums of distances, so a few ulps
//! accumulate).

/// Relative tolerance for metric-axiom and construction-internal checks.
pub const REL_TOL: f64 = 1e-12;

/// Absolute slack for Lipschitz-certificate comparisons.
pub const CERT_SLACK: f64 = 1e-9;

/// `a ≤ b` up to relative tolerance `rel` (scaled by the magnitudes involved,
/// with floor 1 so that near-zero comparisons behave absolutely).
pub fn approx_le(a: f64, b: f64, rel: f64) -> bool {
    a <= b + rel * a.abs().max(b.abs()).max(1.0)
}

/// `|a - b|` within relative tolerance `rel`.
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approx_le_handles_exact_and_slack() {
        assert!(approx_le(1.0, 1.0, REL_TOL));
        assert!(approx_le(1.0 + 1e-13, 1.0, REL_TOL));
        assert!(!approx_le(1.0 + 1e-9, 1.0, REL_TOL));
        assert!(approx_le(0.0, -1e-13, REL_TOL));
    }

    #[test]
    fn approx_eq_is_symmetric_near_zero() {
        assert!(approx_eq(1e-15, 0.0, REL_TOL));
        assert!(!approx_eq(1e-9, 0.0, REL_TOL));
    }
}
