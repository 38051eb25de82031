//! Multipath channel synthesis for a given rotation state.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{far_steering, near_steering, DistanceModel, GeometryError, RotationState};
use crate::numerics::ComplexVector;
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Channel vectors of every user, each of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub near: Vec<ComplexVector>,
    pub far: Vec<ComplexVector>,
}

/// `h = √N·(g_LoS·b(θ, r, φ) + Σ_ℓ g_ℓ·b(θ_ℓ, r_ℓ, φ))`, and the angle-only
/// analogue for far users.
pub fn synthesize_channels(
    scenario: &Scenario,
    rot: &RotationState,
    model: DistanceModel,
) -> Result<ChannelSet, ChannelError> {
    scenario.validate()?;
    let cfg = &scenario.array;
    let sqrt_n = Complex64::new((cfg.n_antennas() as f64).sqrt(), 0.0);

    let mut near = Vec::with_capacity(scenario.near.len());
    for user in &scenario.near {
        let mut h = near_steering(cfg, rot, user.theta, user.range_m, model)?.scaled(sqrt_n * user.los_gain);
        for s in &user.scatterers {
            let b = near_steering(cfg, rot, s.theta, s.range_m, model)?;
            h.axpy(sqrt_n * s.gain, &b);
        }
        near.push(h);
    }

    let far = scenario
        .far
        .iter()
        .map(|user| {
            let mut h = far_steering(cfg, rot, user.psi).scaled(sqrt_n * user.los_gain);
            for s in &user.scatterers {
                h.axpy(sqrt_n * s.gain, &far_steering(cfg, rot, s.psi));
            }
            h
        })
        .collect();

    Ok(ChannelSet { near, far })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AngleRange, ArrayConfig};
    use crate::scenario::{FarUser, NearUser, Scatterer};

    fn scenario(near: Vec<NearUser>, far: Vec<FarUser>) -> Scenario {
        let array = ArrayConfig::half_wavelength(33, 3, 24e9).unwrap();
        Scenario {
            rotation_ranges: vec![AngleRange::sector(); 3],
            array,
            near,
            far,
            tx_power_w: 1.0,
            noise_w: 1e-10,
        }
    }

    fn rot() -> RotationState {
        RotationState::new(vec![0.1, -0.2, 0.3], vec![AngleRange::sector(); 3]).unwrap()
    }

    #[test]
    fn los_unit_gain_has_norm_sqrt_n() {
        let z = ArrayConfig::half_wavelength(33, 3, 24e9).unwrap().rayleigh_distance();
        let s = scenario(
            vec![NearUser::los_only(1.3, 0.1 * z, Complex64::new(1.0, 0.0))],
            vec![FarUser::los_only(1.7, 2.0 * z, Complex64::new(0.0, 1.0), 1.0)],
        );
        let ch = synthesize_channels(&s, &rot(), DistanceModel::Fresnel).unwrap();
        assert!((ch.near[0].norm() - 33f64.sqrt()).abs() < 1e-12);
        assert!((ch.far[0].norm() - 33f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_gains_give_zero_channel() {
        let z = ArrayConfig::half_wavelength(33, 3, 24e9).unwrap().rayleigh_distance();
        let mut user = NearUser::los_only(1.3, 0.1 * z, Complex64::new(0.0, 0.0));
        user.scatterers.push(Scatterer {
            theta: 1.0,
            range_m: 0.05 * z,
            gain: Complex64::new(0.0, 0.0),
        });
        let ch = synthesize_channels(&scenario(vec![user], vec![]), &rot(), DistanceModel::Fresnel).unwrap();
        assert_eq!(ch.near[0].norm(), 0.0);
    }

    #[test]
    fn colocated_scatterer_doubles_the_channel() {
        let z = ArrayConfig::half_wavelength(33, 3, 24e9).unwrap().rayleigh_distance();
        let g = Complex64::new(0.3, -0.4);
        let single = NearUser::los_only(1.1, 0.07 * z, g);
        let mut doubled = single.clone();
        doubled.scatterers.push(Scatterer {
            theta: 1.1,
            range_m: 0.07 * z,
            gain: g,
        });
        let a = synthesize_channels(&scenario(vec![single], vec![]), &rot(), DistanceModel::Fresnel).unwrap();
        let b = synthesize_channels(&scenario(vec![doubled], vec![]), &rot(), DistanceModel::Fresnel).unwrap();
        for (x, y) in a.near[0].iter().zip(b.near[0].iter()) {
            assert!((2.0 * x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let z = ArrayConfig::half_wavelength(33, 3, 24e9).unwrap().rayleigh_distance();
        let s = scenario(vec![NearUser::los_only(1.3, 3.0 * z, Complex64::new(1.0, 0.0))], vec![]);
        assert!(matches!(
            synthesize_channels(&s, &rot(), DistanceModel::Fresnel),
            Err(ChannelError::Scenario(_))
        ));
    }
}
