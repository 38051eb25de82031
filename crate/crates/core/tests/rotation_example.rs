//! Two near users on the same bearing: rotating the subarrays separates them.

use std::f64::consts::PI;

use ramix_core::geometry::{AngleRange, ArrayConfig};
use ramix_core::interference::{optimal_rotation_same_angle_nn, rho_nn_betas, rho_nn_exact};
use ramix_core::optimizer::{run_benchmark, BenchmarkConfig, Scheme};
use ramix_core::scenario::{dbm_to_watts, free_space_gain, NearUser, Scenario};

fn scenario() -> Scenario {
    let array = ArrayConfig::half_wavelength(129, 5, 24e9).unwrap();
    let z = array.rayleigh_distance();
    let lambda = array.wavelength();
    let near = [(0.6 * PI, 0.03 * z), (0.6 * PI, 0.08 * z)]
        .iter()
        .map(|&(t, r)| NearUser::los_only(t, r, free_space_gain(lambda, r).into()))
        .collect();
    Scenario {
        near,
        far: Vec::new(),
        tx_power_w: 1.0,
        noise_w: dbm_to_watts(-70.0),
        rotation_ranges: vec![AngleRange::sector(); 5],
        array,
    }
}

fn correlation(s: &Scenario, phi: f64, r1: f64, r2: f64) -> f64 {
    let z = s.array.rayleigh_distance();
    rho_nn_exact(&s.array, phi, 0.6 * PI, r1 * z, 0.6 * PI, r2 * z).unwrap()
}

fn grid_min(s: &Scenario, r1: f64, r2: f64) -> f64 {
    (-166..=166)
        .map(|k| correlation(s, k as f64 * 0.001 * PI, r1, r2))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn closed_form_rotation_is_the_minimizer_for_moderate_curvature() {
    let s = scenario();
    let phi = optimal_rotation_same_angle_nn(0.6 * PI, AngleRange::sector());
    assert!((phi - 0.1 * PI).abs() < 1e-12);
    let rotated = correlation(&s, phi, 0.05, 0.1);
    assert!(rotated < correlation(&s, 0.0, 0.05, 0.1) - 0.05);
    assert!(rotated <= grid_min(&s, 0.05, 0.1) + 1e-12);
}

#[test]
fn closed_form_rotation_overshoots_for_strong_curvature() {
    // With the users this close the kernel argument passes its first local
    // minimum, so turning fully broadside is no longer best.
    let s = scenario();
    let z = s.array.rayleigh_distance();
    let betas = rho_nn_betas(&s.array, 0.1 * PI, 0.6 * PI, 0.03 * z, 0.6 * PI, 0.08 * z).unwrap();
    assert!(betas.beta2 > 1.91);
    assert!(correlation(&s, 0.1 * PI, 0.03, 0.08) > grid_min(&s, 0.03, 0.08) + 0.05);
}

#[test]
fn swarm_beats_the_fixed_array() {
    let s = scenario();
    let mut cfg = BenchmarkConfig::default();
    cfg.pso.swarm_size = 20;
    cfg.pso.iterations = 20;
    let fixed = run_benchmark(&s, Scheme::FaOpa, &cfg).unwrap();
    let rotated = run_benchmark(&s, Scheme::Proposed, &cfg).unwrap();
    // The anchor particle evaluates the fixed array, so this cannot regress.
    assert!(rotated.sum_rate >= fixed.sum_rate - 1e-9);
    assert!(
        rotated.sum_rate > fixed.sum_rate + 0.5,
        "{} vs {}",
        rotated.sum_rate,
        fixed.sum_rate
    );
    assert!(rotated.best_angles.iter().any(|a| a.abs() > 1e-3));
}
