//! The normalized Fresnel correlation kernel
//!
//! ```text
//! G(β₁, β₂) = |Ĉ + jŜ| / (2β₂),   Ĉ = C(β₁+β₂) − C(β₁−β₂),  Ŝ = S(β₁+β₂) − S(β₁−β₂)
//! ```
//!
//! `G` is the modulus of the mean of `e^{jπt²/2}` over `[β₁−β₂, β₁+β₂]`, so it
//! never exceeds one and equals one when the window collapses.

use std::f64::consts::PI;

use super::{fresnel, NumericsError};

/// Below this `β₂` the four-term difference loses digits to cancellation and
/// the kernel is evaluated through its small-window limit instead.
pub const SMALL_BETA2: f64 = 1e-6;

/// Evaluates `G(β₁, β₂)`.
///
/// For `β₂ < SMALL_BETA2` the window is short enough that the chirp is
/// linear across it, giving `|sinc(β₁β₂)|` (normalized sinc). This is the
/// `0/0` limit of the quotient and reduces to exactly one when `β₁β₂ = 0`.
pub fn g_kernel(beta1: f64, beta2: f64) -> Result<f64, NumericsError> {
    if !beta1.is_finite() {
        return Err(NumericsError::NonFinite(beta1));
    }
    if !beta2.is_finite() {
        return Err(NumericsError::NonFinite(beta2));
    }
    if beta2 < 0.0 {
        return Err(NumericsError::NegativeBeta2(beta2));
    }
    if beta2 < SMALL_BETA2 {
        return Ok(sinc(beta1 * beta2).abs());
    }
    let hi = fresnel(beta1 + beta2)?;
    let lo = fresnel(beta1 - beta2)?;
    let c_hat = hi.c - lo.c;
    let s_hat = hi.s - lo.s;
    Ok(c_hat.hypot(s_hat) / (2.0 * beta2))
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_at_origin() {
        assert_eq!(g_kernel(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(g_kernel(0.0, 1e-9).unwrap(), 1.0);
    }

    #[test]
    fn rejects_negative_beta2() {
        assert!(matches!(g_kernel(0.3, -0.1), Err(NumericsError::NegativeBeta2(_))));
    }

    #[test]
    fn symmetric_in_beta1() {
        for &(b1, b2) in &[(0.4, 0.9), (2.5, 0.1), (7.0, 3.3), (0.01, 1e-7)] {
            let a = g_kernel(b1, b2).unwrap();
            let b = g_kernel(-b1, b2).unwrap();
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn continuous_across_small_window_switch() {
        for &b1 in &[0.0, 0.5, 3.0, 40.0, 900.0] {
            let below = g_kernel(b1, SMALL_BETA2 * 0.99).unwrap();
            let above = g_kernel(b1, SMALL_BETA2 * 1.01).unwrap();
            assert!((below - above).abs() < 1e-6, "b1={b1}: {below} vs {above}");
        }
    }

    #[test]
    fn bounded_by_one() {
        let mut b1 = -6.0;
        while b1 <= 6.0 {
            let mut b2 = 1e-5;
            while b2 < 20.0 {
                assert!(g_kernel(b1, b2).unwrap() <= 1.0 + 1e-9);
                b2 *= 1.7;
            }
            b1 += 0.25;
        }
    }
}
