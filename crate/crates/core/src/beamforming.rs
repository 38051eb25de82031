//! Precoders, link gains and achievable rates.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::channel::ChannelSet;
use crate::numerics::{pseudo_inverse, ComplexVector, NumericsError};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error("channel of {kind} user {index} is zero")]
    DegenerateChannel { kind: &'static str, index: usize },
    #[error("zero-forcing failed: {0}")]
    ZeroForcing(#[from] NumericsError),
    #[error("allocation is infeasible: {0}")]
    Infeasible(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Digital stage of the hybrid precoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DigitalMode {
    /// `F_D = I`: each near beam is the matched filter of its own channel.
    #[default]
    Identity,
    /// `F_D = (H F_A)⁺`, nulling near-user cross terms.
    ZeroForcing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    pub near: Vec<ComplexVector>,
    pub far: Vec<ComplexVector>,
    pub mode: DigitalMode,
}

/// Near-user powers `P_N,k` under the budget `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    near_w: Vec<f64>,
    budget_w: f64,
}

/// Slack allowed on the budget, relative to `max(P, 1 W)`.
pub const BUDGET_SLACK: f64 = 1e-12;

impl PowerAllocation {
    pub fn new(near_w: Vec<f64>, budget_w: f64) -> Result<Self, RateError> {
        if !(budget_w >= 0.0 && budget_w.is_finite()) {
            return Err(RateError::Infeasible(format!("budget {budget_w} W")));
        }
        if let Some((k, p)) = near_w.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(RateError::Infeasible(format!("user {k} has power {p} W")));
        }
        let total: f64 = near_w.iter().sum();
        if total > budget_w + BUDGET_SLACK * budget_w.max(1.0) {
            return Err(RateError::Infeasible(format!(
                "total {total} W exceeds the budget {budget_w} W"
            )));
        }
        Ok(Self { near_w, budget_w })
    }

    /// `P/K` to each of `k` users.
    pub fn equal(k: usize, budget_w: f64) -> Self {
        Self {
            near_w: vec![budget_w / k.max(1) as f64; k],
            budget_w,
        }
    }

    pub fn powers(&self) -> &[f64] {
        &self.near_w
    }

    pub fn budget(&self) -> f64 {
        self.budget_w
    }

    pub fn total(&self) -> f64 {
        self.near_w.iter().sum()
    }
}

fn unit(h: &ComplexVector, kind: &'static str, index: usize) -> Result<ComplexVector, RateError> {
    h.normalized().ok_or(RateError::DegenerateChannel { kind, index })
}

/// Matched-filter analog beams with the selected digital stage; far-user
/// beams are always `h_F,m/‖h_F,m‖`.
pub fn build_precoders(channels: &ChannelSet, mode: DigitalMode) -> Result<PrecoderSet, RateError> {
    let analog = channels
        .near
        .iter()
        .enumerate()
        .map(|(k, h)| unit(h, "near", k))
        .collect::<Result<Vec<_>, _>>()?;
    let far = channels
        .far
        .iter()
        .enumerate()
        .map(|(m, h)| unit(h, "far", m))
        .collect::<Result<Vec<_>, _>>()?;

    let near = match mode {
        DigitalMode::Identity => analog,
        DigitalMode::ZeroForcing => zero_forcing(&channels.near, &analog)?,
    };
    Ok(PrecoderSet { near, far, mode })
}

fn zero_forcing(channels: &[ComplexVector], analog: &[ComplexVector]) -> Result<Vec<ComplexVector>, RateError> {
    let k = channels.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = channels[0].len();
    // Effective channel E[k][i] = h_kᴴ v_i.
    let effective = DMatrix::from_fn(k, k, |row, col| channels[row].dot(&analog[col]));
    let digital = pseudo_inverse(&effective)?;
    (0..k)
        .map(|col| {
            let mut w = ComplexVector::zeros(n);
            for (row, v) in analog.iter().enumerate() {
                w.axpy(digital[(row, col)], v);
            }
            unit(&w, "near", col)
        })
        .collect()
}

/// Received powers per unit transmit power, shared by rate evaluation and
/// the power-allocation solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGains {
    /// `direct[k][i] = |h_kᴴ w_i|²`.
    pub direct: Vec<Vec<f64>>,
    /// `Σ_m P_F,m |h_kᴴ w_F,m|²` at near user `k`, in watts.
    pub mixed_w: Vec<f64>,
    pub noise_w: f64,
}

impl LinkGains {
    pub fn new(channels: &ChannelSet, precoders: &PrecoderSet, scenario: &Scenario) -> Result<Self, RateError> {
        let k = channels.near.len();
        if precoders.near.len() != k || precoders.far.len() != channels.far.len() {
            return Err(RateError::Dimension(format!(
                "{} near / {} far precoders for {} near / {} far channels",
                precoders.near.len(),
                precoders.far.len(),
                k,
                channels.far.len()
            )));
        }
        if scenario.far.len() != channels.far.len() {
            return Err(RateError::Dimension(
                "far-user powers do not match the far channels".into(),
            ));
        }
        let direct = channels
            .near
            .iter()
            .map(|h| precoders.near.iter().map(|w| h.dot(w).norm_sqr()).collect())
            .collect();
        let mixed_w = channels
            .near
            .iter()
            .map(|h| {
                precoders
                    .far
                    .iter()
                    .zip(&scenario.far)
                    .map(|(w, user)| user.tx_power_w * h.dot(w).norm_sqr())
                    .sum()
            })
            .collect();
        Ok(Self {
            direct,
            mixed_w,
            noise_w: scenario.noise_w,
        })
    }

    pub fn n_users(&self) -> usize {
        self.direct.len()
    }

    /// Near-user interference at `k`, `Σ_{i≠k} P_i |h_kᴴ w_i|²`.
    pub fn near_interference(&self, k: usize, powers: &[f64]) -> f64 {
        self.direct[k]
            .iter()
            .zip(powers)
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, (g, p))| g * p)
            .sum()
    }

    /// Rates in bits/s/Hz for the given powers.
    pub fn rates(&self, powers: &[f64]) -> RateBreakdown {
        let k = self.n_users();
        let mut breakdown = RateBreakdown {
            per_user_rate: Vec::with_capacity(k),
            per_user_sinr: Vec::with_capacity(k),
            near_interf_w: Vec::with_capacity(k),
            mixed_interf_w: self.mixed_w.clone(),
            sum_rate: 0.0,
        };
        for user in 0..k {
            let near = self.near_interference(user, powers);
            let sinr = powers[user] * self.direct[user][user] / (near + self.mixed_w[user] + self.noise_w);
            let rate = sinr.ln_1p() / std::f64::consts::LN_2;
            breakdown.near_interf_w.push(near);
            breakdown.per_user_sinr.push(sinr);
            breakdown.per_user_rate.push(rate);
        }
        breakdown.sum_rate = breakdown.per_user_rate.iter().sum();
        breakdown
    }

    pub fn sum_rate(&self, powers: &[f64]) -> f64 {
        self.rates(powers).sum_rate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateBreakdown {
    pub per_user_rate: Vec<f64>,
    pub per_user_sinr: Vec<f64>,
    pub near_interf_w: Vec<f64>,
    pub mixed_interf_w: Vec<f64>,
    pub sum_rate: f64,
}

/// SINR and rate of every near user.
pub fn evaluate_rates(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    alloc: &PowerAllocation,
    scenario: &Scenario,
) -> Result<RateBreakdown, RateError> {
    if alloc.powers().len() != channels.near.len() {
        return Err(RateError::Dimension(format!(
            "{} powers for {} near users",
            alloc.powers().len(),
            channels.near.len()
        )));
    }
    PowerAllocation::new(alloc.powers().to_vec(), scenario.tx_power_w)?;
    Ok(LinkGains::new(channels, precoders, scenario)?.rates(alloc.powers()))
}

/// Sum-rate with every cross term removed and matched-filter beams, an upper
/// reference for any precoder at the same powers.
pub fn interference_free_bound(channels: &ChannelSet, alloc: &PowerAllocation, scenario: &Scenario) -> f64 {
    channels
        .near
        .iter()
        .zip(alloc.powers())
        .map(|(h, p)| (p * h.norm_sqr() / scenario.noise_w).ln_1p() / std::f64::consts::LN_2)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::synthesize_channels;
    use crate::geometry::{AngleRange, ArrayConfig, DistanceModel, RotationState};
    use crate::interference::{rho_nf_exact, rho_nn_exact};
    use crate::scenario::{dbm_to_watts, sample_scenario, FarUser, NearUser, PowerSettings, SamplingRegion};
    use num_complex::Complex64;

    fn los_scenario(near: Vec<NearUser>, far: Vec<FarUser>) -> Scenario {
        let array = ArrayConfig::half_wavelength(129, 1, 24e9).unwrap();
        Scenario {
            rotation_ranges: vec![AngleRange::sector()],
            array,
            near,
            far,
            tx_power_w: 1.0,
            noise_w: dbm_to_watts(-70.0),
        }
    }

    fn z() -> f64 {
        102.4
    }

    #[test]
    fn single_user_matched_filter() {
        let g = Complex64::from_polar(3e-4, 0.7);
        let s = los_scenario(vec![NearUser::los_only(1.4, 0.1 * z(), g)], vec![]);
        let ch = synthesize_channels(&s, &RotationState::fixed(1), DistanceModel::Fresnel).unwrap();
        let pre = build_precoders(&ch, DigitalMode::Identity).unwrap();
        let gain = ch.near[0].dot(&pre.near[0]).norm_sqr();
        assert!((gain - ch.near[0].norm_sqr()).abs() < 1e-12 * gain);

        let alloc = PowerAllocation::new(vec![1.0], 1.0).unwrap();
        let r = evaluate_rates(&ch, &pre, &alloc, &s).unwrap();
        let want = (1.0 + 129.0 * g.norm_sqr() / s.noise_w).log2();
        assert!((r.per_user_rate[0] - want).abs() < 1e-9);
        assert!((interference_free_bound(&ch, &alloc, &s) - r.sum_rate).abs() < 1e-9);
    }

    #[test]
    fn zero_power_zero_rate() {
        let region = SamplingRegion::default();
        let s = sample_scenario(
            ArrayConfig::half_wavelength(129, 5, 24e9).unwrap(),
            &region,
            3,
            2,
            PowerSettings {
                tx_power_w: 1.0,
                far_power_w: 1.0,
                noise_w: 1e-10,
            },
            AngleRange::sector(),
            1,
        );
        let ch = synthesize_channels(&s, &RotationState::fixed(5), DistanceModel::Fresnel).unwrap();
        let pre = build_precoders(&ch, DigitalMode::Identity).unwrap();
        let r = evaluate_rates(&ch, &pre, &PowerAllocation::new(vec![0.0; 3], 1.0).unwrap(), &s).unwrap();
        assert_eq!(r.sum_rate, 0.0);
    }

    #[test]
    fn zero_forcing_nulls_near_cross_terms() {
        let g = Complex64::from_polar(2e-4, 0.1);
        let s = los_scenario(
            vec![
                NearUser::los_only(1.5, 0.05 * z(), g),
                NearUser::los_only(1.7, 0.12 * z(), g * 0.5),
            ],
            vec![FarUser::los_only(1.6, 2.0 * z(), g, 1.0)],
        );
        let ch = synthesize_channels(&s, &RotationState::fixed(1), DistanceModel::Fresnel).unwrap();
        let pre = build_precoders(&ch, DigitalMode::ZeroForcing).unwrap();
        for (k, h) in ch.near.iter().enumerate() {
            for (i, w) in pre.near.iter().enumerate() {
                assert!((w.norm() - 1.0).abs() < 1e-9);
                if i != k {
                    assert!(h.dot(w).norm() / h.norm() <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn degenerate_channel_is_rejected() {
        let s = los_scenario(vec![NearUser::los_only(1.4, 5.0, Complex64::new(0.0, 0.0))], vec![]);
        let ch = synthesize_channels(&s, &RotationState::fixed(1), DistanceModel::Fresnel).unwrap();
        assert!(matches!(
            build_precoders(&ch, DigitalMode::Identity),
            Err(RateError::DegenerateChannel { .. })
        ));
    }

    #[test]
    fn infeasible_allocation() {
        assert!(PowerAllocation::new(vec![0.6, 0.6], 1.0).is_err());
        assert!(PowerAllocation::new(vec![-0.1, 0.6], 1.0).is_err());
        assert!(PowerAllocation::new(vec![0.5, 0.5], 1.0).is_ok());
    }

    #[test]
    fn los_rates_match_correlation_form() {
        // With LoS channels and matched-filter beams the cross gains reduce
        // to N|g_k|²ρ², so both routes must agree.
        let phi = 0.2;
        let gains = [Complex64::from_polar(3e-4, 0.3), Complex64::from_polar(1e-4, 2.0)];
        let users = [(1.3, 0.04 * z()), (1.55, 0.11 * z())];
        let psis = [1.45, 1.9];
        let array = ArrayConfig::half_wavelength(129, 1, 24e9).unwrap();
        let s = Scenario {
            rotation_ranges: vec![AngleRange::sector()],
            array: array.clone(),
            near: users
                .iter()
                .zip(gains)
                .map(|(&(t, r), g)| NearUser::los_only(t, r, g))
                .collect(),
            far: psis
                .iter()
                .map(|&p| FarUser::los_only(p, 2.0 * z(), Complex64::new(1e-5, 0.0), 0.5))
                .collect(),
            tx_power_w: 1.0,
            noise_w: dbm_to_watts(-70.0),
        };
        let rot = RotationState::uniform(1, phi, AngleRange::sector()).unwrap();
        let ch = synthesize_channels(&s, &rot, DistanceModel::Fresnel).unwrap();
        let pre = build_precoders(&ch, DigitalMode::Identity).unwrap();
        let powers = [0.7, 0.3];
        let r = evaluate_rates(&ch, &pre, &PowerAllocation::new(powers.to_vec(), 1.0).unwrap(), &s).unwrap();
        for k in 0..2 {
            let i = 1 - k;
            let (tk, rk) = users[k];
            let (ti, ri) = users[i];
            let own = 129.0 * gains[k].norm_sqr();
            let nn = rho_nn_exact(&array, phi, tk, rk, ti, ri).unwrap();
            let mut den = powers[i] * own * nn * nn + s.noise_w;
            for &psi in &psis {
                let nf = rho_nf_exact(&array, phi, tk, rk, psi).unwrap();
                den += 0.5 * own * nf * nf;
            }
            let want = (1.0 + powers[k] * own / den).log2();
            assert!(
                ((r.per_user_rate[k] - want) / want).abs() < 1e-9,
                "{} vs {want}",
                r.per_user_rate[k]
            );
        }
    }
}
