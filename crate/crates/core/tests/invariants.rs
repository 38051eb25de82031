use std::f64::consts::PI;

use proptest::prelude::*;

use ramix_core::beamforming::{build_precoders, interference_free_bound, DigitalMode, LinkGains};
use ramix_core::channel::synthesize_channels;
use ramix_core::geometry::{near_steering, AngleRange, ArrayConfig, DistanceModel, RotationState};
use ramix_core::interference::{rho_nf_exact, rho_nn_approx, rho_nn_exact};
use ramix_core::numerics::g_kernel;
use ramix_core::optimizer::sca::{sca_power_allocation, ScaConfig};
use ramix_core::scenario::{sample_scenario, PowerSettings, SamplingRegion};

fn array() -> ArrayConfig {
    ArrayConfig::half_wavelength(65, 3, 24e9).unwrap()
}

fn angles() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-PI / 6.0..PI / 6.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_even_and_bounded(b1 in -20.0f64..20.0, b2 in 0.0f64..5.0) {
        let g = g_kernel(b1, b2).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
        prop_assert!((g - g_kernel(-b1, b2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn steering_vectors_have_unit_norm(phis in angles(), theta in 0.3f64..2.8, frac in 0.02f64..1.0) {
        let cfg = array();
        let rot = RotationState::new(phis, vec![AngleRange::sector(); 3]).unwrap();
        for model in [DistanceModel::Fresnel, DistanceModel::Exact] {
            let b = near_steering(&cfg, &rot, theta, frac * cfg.rayleigh_distance(), model).unwrap();
            prop_assert!((b.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_is_symmetric_and_bounded(
        phi in -PI / 6.0..PI / 6.0,
        tk in PI / 3.0..2.0 * PI / 3.0,
        ti in PI / 3.0..2.0 * PI / 3.0,
        rk in 0.03f64..0.2,
        ri in 0.03f64..0.2,
    ) {
        let cfg = array();
        let z = cfg.rayleigh_distance();
        let a = rho_nn_exact(&cfg, phi, tk, rk * z, ti, ri * z).unwrap();
        let b = rho_nn_exact(&cfg, phi, ti, ri * z, tk, rk * z).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        let approx = rho_nn_approx(&cfg, phi, tk, rk * z, ti, ri * z).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&approx));
        let nf = rho_nf_exact(&cfg, phi, tk, rk * z, ti).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&nf));
    }

    #[test]
    fn optimized_power_is_feasible_and_no_worse_than_equal(phis in angles(), seed in 0u64..1000) {
        let cfg = array();
        let s = sample_scenario(
            cfg,
            &SamplingRegion::default(),
            3,
            2,
            PowerSettings { tx_power_w: 1.0, far_power_w: 1.0, noise_w: 1e-10 },
            AngleRange::sector(),
            seed,
        );
        let rot = RotationState::new(phis, s.rotation_ranges.clone()).unwrap();
        let ch = synthesize_channels(&s, &rot, DistanceModel::Fresnel).unwrap();
        let pre = build_precoders(&ch, DigitalMode::Identity).unwrap();
        let gains = LinkGains::new(&ch, &pre, &s).unwrap();
        let out = sca_power_allocation(&gains, 1.0, &ScaConfig::default()).unwrap();
        let p = out.alloc.powers();
        prop_assert!(p.iter().all(|x| *x >= 0.0));
        prop_assert!(p.iter().sum::<f64>() <= 1.0 + 1e-9);
        let equal = gains.sum_rate(&[1.0 / 3.0; 3]);
        prop_assert!(out.sum_rate() >= equal - 1e-9);
        let bound = interference_free_bound(&ch, &out.alloc, &s);
        prop_assert!(bound >= out.sum_rate() - 1e-9);
    }
}
