//! Numerical thresholds shared across the crate.

/// Structural zero: coefficients, commutators and residuals below this are treated as exact zeros.
pub const ZERO: f64 = 1e-12;

/// Floor for eigenvalues of a state that is still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-10;

/// Slack on |a| <= 1 for Bloch vectors and on trace/Hermiticity checks of density matrices.
pub const STATE: f64 = 1e-10;

/// One record bundling the thresholds, for callers that want to pass them around explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub zero: f64,
    pub psd_floor: f64,
    pub state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: ZERO,
            psd_floor: PSD_FLOOR,
            state: STATE,
        }
    }
}
