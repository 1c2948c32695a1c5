//! Shared numerical tolerances.
//!
//! The library and the test suites read every threshold from here so the two
//! never drift apart.

use serde::{Deserialize, Serialize};

/// Relative tolerance for projector identities (idempotency, completeness,
/// orthogonality, Pythagorean splitting).
pub const PROJECTOR_REL: f64 = 1e-12;

/// Relative tolerance on per-sample norm bookkeeping in a [`NormSeries`](crate::analysis::NormSeries).
pub const NORM_SERIES_REL: f64 = 1e-10;

/// Face-equality tolerance, scaled by the threshold δ.
pub const FACE_REL: f64 = 1e-9;

/// Default regime-classification threshold on tail norm ratios.
pub const EPSILON_REL: f64 = 0.05;

/// Default trailing-window fraction used by the regime classifier.
pub const WINDOW_FRACTION: f64 = 0.2;

/// Default fixed RK4 step.
pub const DEFAULT_DT: f64 = 0.01;

/// Exponent arguments are clamped to this magnitude before `exp`.
pub const EXP_CLAMP: f64 = 700.0;

/// Runtime-configurable tolerance record with the defaults above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub projector_rel: f64,
    pub norm_series_rel: f64,
    pub face_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            projector_rel: PROJECTOR_REL,
            norm_series_rel: NORM_SERIES_REL,
            face_rel: FACE_REL,
        }
    }
}
