//! Smooth surrogates for max, min, Heaviside and sign.
//!
//! All of these take a width `zeta > 0`. Passing a non-positive width is a
//! programming error and trips a debug assertion; release builds return
//! whatever IEEE arithmetic produces.

use crate::error::{Error, Result};
use crate::tolerances::EXP_CLAMP;

/// `exp` with the argument clamped to `±EXP_CLAMP`.
pub fn clamped_exp(arg: f64) -> f64 {
    arg.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
}

/// Log-sum-exp maximum, `ζ·log Σ exp(v/ζ)`, evaluated with a max shift.
///
/// The result lies in `[max, max + ζ·log(len)]`.
pub fn smooth_max(values: &[f64], zeta: f64) -> Result<f64> {
    debug_assert!(zeta > 0.0, "zeta must be positive");
    let m = values
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(Error::Empty("smooth_max values"))?;
    let s: f64 = values.iter().map(|v| ((v - m) / zeta).exp()).sum();
    Ok(m + zeta * s.ln())
}

/// Two-argument soft minimum, `−ζ·log(e^{−a/ζ} + e^{−b/ζ})`.
pub fn smooth_min(a: f64, b: f64, zeta: f64) -> f64 {
    debug_assert!(zeta > 0.0, "zeta must be positive");
    let m = a.min(b);
    // The sum is commutative, so swapping a and b gives a bit-identical result.
    let s = (-(a - m) / zeta).exp() + (-(b - m) / zeta).exp();
    m - zeta * s.ln()
}

/// `½(1 + tanh(z/ζ))`.
pub fn smooth_heaviside(z: f64, zeta: f64) -> f64 {
    debug_assert!(zeta > 0.0, "zeta must be positive");
    0.5 * (1.0 + (z / zeta).tanh())
}

/// `tanh(z/ζ)`.
pub fn smooth_sign(z: f64, zeta: f64) -> f64 {
    debug_assert!(zeta > 0.0, "zeta must be positive");
    (z / zeta).tanh()
}

/// Symmetrised sign `tanh((x + y)/(2ζ))`, invariant under swapping x and y.
pub fn smooth_sign_sym(x: f64, y: f64, zeta: f64) -> f64 {
    debug_assert!(zeta > 0.0, "zeta must be positive");
    ((x + y) / (2.0 * zeta)).tanh()
}
