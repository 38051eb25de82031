//! Second-order distance expansion against the exact law-of-cosines phase.

use std::f64::consts::PI;

use ramix_core::geometry::{near_steering, ArrayConfig, DistanceModel, RotationState};

fn array() -> ArrayConfig {
    ArrayConfig::half_wavelength(129, 5, 24e9).unwrap()
}

/// Per-element phase gap between the exact and second-order steering vectors.
fn phase_gaps(cfg: &ArrayConfig, theta: f64, r: f64) -> Vec<f64> {
    let rot = RotationState::fixed(cfg.n_subarrays());
    let exact = near_steering(cfg, &rot, theta, r, DistanceModel::Exact).unwrap();
    let fresnel = near_steering(cfg, &rot, theta, r, DistanceModel::Fresnel).unwrap();
    exact
        .iter()
        .zip(fresnel.iter())
        .map(|(a, b)| (a * b.conj()).arg())
        .collect()
}

fn thetas() -> impl Iterator<Item = f64> {
    (0..=60).map(|i| PI / 3.0 + i as f64 * PI / 180.0)
}

#[test]
fn gap_is_the_third_order_term() {
    let cfg = array();
    let k = cfg.wavenumber();
    let z = cfg.rayleigh_distance();
    for frac in [0.03, 0.05, 0.1, 0.2] {
        let r = frac * z;
        for theta in thetas() {
            let (s, c) = theta.sin_cos();
            for (gap, &(_, delta)) in phase_gaps(&cfg, theta, r).iter().zip(cfg.elements()) {
                // The next term of the expansion is δ³ cos θ sin²θ / (2r²);
                // the remainder is bounded by δ⁴/r³.
                let third = k * delta.powi(3) * c * s * s / (2.0 * r * r);
                let remainder = k * delta.powi(4) / r.powi(3);
                assert!(
                    (-gap - third).abs() <= remainder + 1e-9,
                    "θ = {theta}, r = {frac}Z, δ = {delta}: gap {gap}, third-order {third}"
                );
            }
        }
    }
}

#[test]
fn gap_stays_small_beyond_five_percent_of_rayleigh() {
    let cfg = array();
    let z = cfg.rayleigh_distance();
    let limit = 2.0 * PI * 0.05;
    let worst = |frac: f64| {
        thetas()
            .flat_map(|t| phase_gaps(&cfg, t, frac * z))
            .fold(0.0f64, |m, g| m.max(g.abs()))
    };
    for frac in [0.05, 0.08, 0.12, 0.2] {
        assert!(worst(frac) <= limit, "r = {frac}Z: {}", worst(frac));
    }
    // Closer in, off-boresight users exceed it.
    assert!(worst(0.03) > limit);
}
