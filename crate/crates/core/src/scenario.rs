//! Problem instances: users, scatterers, powers, and seeded sampling of the
//! default deployment region.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_PI_3, PI};
use thiserror::Error;

use crate::geometry::{AngleRange, ArrayConfig};
use crate::numerics::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

/// NLoS path toward a near-field user, seen from the array.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer {
    pub theta: f64,
    pub range_m: f64,
    pub gain: Complex64,
}

/// NLoS path toward a far-field user.
#[derive(Debug, Clone, PartialEq)]
pub struct FarScatterer {
    pub psi: f64,
    pub gain: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearUser {
    pub theta: f64,
    pub range_m: f64,
    pub los_gain: Complex64,
    pub scatterers: Vec<Scatterer>,
}

impl NearUser {
    pub fn los_only(theta: f64, range_m: f64, los_gain: Complex64) -> Self {
        Self {
            theta,
            range_m,
            los_gain,
            scatterers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarUser {
    pub psi: f64,
    /// Nominal distance, only used for path loss and validation.
    pub distance_m: f64,
    pub los_gain: Complex64,
    pub scatterers: Vec<FarScatterer>,
    pub tx_power_w: f64,
}

impl FarUser {
    pub fn los_only(psi: f64, distance_m: f64, los_gain: Complex64, tx_power_w: f64) -> Self {
        Self {
            psi,
            distance_m,
            los_gain,
            scatterers: Vec::new(),
            tx_power_w,
        }
    }
}

/// Full downlink problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub array: ArrayConfig,
    pub near: Vec<NearUser>,
    pub far: Vec<FarUser>,
    /// Total near-user power budget `P`.
    pub tx_power_w: f64,
    /// Per-user noise power `σ²`.
    pub noise_w: f64,
    /// Admissible rotation interval of each subarray, by slot.
    pub rotation_ranges: Vec<AngleRange>,
}

impl Scenario {
    pub fn n_near(&self) -> usize {
        self.near.len()
    }

    pub fn n_far(&self) -> usize {
        self.far.len()
    }

    /// Checks every user against the Rayleigh boundary and the physical
    /// ranges; the error lists every offending item.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let z = self.array.rayleigh_distance();
        let mut problems = Vec::new();
        if self.near.is_empty() {
            problems.push("no near-field users".to_string());
        }
        if !(self.tx_power_w >= 0.0 && self.tx_power_w.is_finite()) {
            problems.push(format!("transmit power {} W is not a valid budget", self.tx_power_w));
        }
        if !(self.noise_w > 0.0 && self.noise_w.is_finite()) {
            problems.push(format!("noise power {} W must be positive", self.noise_w));
        }
        if self.rotation_ranges.len() != self.array.n_subarrays() {
            problems.push(format!(
                "{} rotation ranges for {} subarrays",
                self.rotation_ranges.len(),
                self.array.n_subarrays()
            ));
        }
        for (k, u) in self.near.iter().enumerate() {
            if !(u.theta > 0.0 && u.theta < PI) {
                problems.push(format!("near user {k}: angle {} outside (0, π)", u.theta));
            }
            if !(u.range_m > 0.0 && u.range_m < z) {
                problems.push(format!(
                    "near user {k}: distance {} m not inside the Rayleigh distance {z} m",
                    u.range_m
                ));
            }
            for (l, s) in u.scatterers.iter().enumerate() {
                if !(s.range_m > 0.0 && s.range_m.is_finite()) {
                    problems.push(format!("near user {k} path {l}: distance {} m", s.range_m));
                }
            }
        }
        for (m, u) in self.far.iter().enumerate() {
            if !(u.psi > 0.0 && u.psi < PI) {
                problems.push(format!("far user {m}: angle {} outside (0, π)", u.psi));
            }
            if u.distance_m.is_nan() || u.distance_m < z {
                problems.push(format!(
                    "far user {m}: distance {} m is inside the Rayleigh distance {z} m",
                    u.distance_m
                ));
            }
            if !(u.tx_power_w > 0.0 && u.tx_power_w.is_finite()) {
                problems.push(format!("far user {m}: power {} W must be positive", u.tx_power_w));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::Invalid(problems))
        }
    }
}

/// Free-space amplitude `λ/(4πr)`.
pub fn free_space_gain(wavelength: f64, distance_m: f64) -> f64 {
    wavelength / (4.0 * PI * distance_m)
}

/// Where and how users and their scatterers are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRegion {
    /// Near-user distance interval as fractions of the Rayleigh distance.
    pub near_distance_frac: (f64, f64),
    /// Angle interval shared by near users, far users and scatterers.
    pub angle_rad: (f64, f64),
    /// Far-user nominal distance as a multiple of the Rayleigh distance.
    pub far_distance_frac: f64,
    pub near_paths: usize,
    pub far_paths: usize,
    /// NLoS amplitude relative to the user's LoS amplitude.
    pub nlos_scale: f64,
}

impl Default for SamplingRegion {
    fn default() -> Self {
        Self {
            near_distance_frac: (0.03, 0.2),
            angle_rad: (FRAC_PI_3, 2.0 * FRAC_PI_3),
            far_distance_frac: 1.5,
            near_paths: 3,
            far_paths: 3,
            nlos_scale: 0.1,
        }
    }
}

const NEAR_STREAM: u64 = 1;
const FAR_STREAM: u64 = 2;

fn random_phase(rng: &mut RngStream, magnitude: f64) -> Complex64 {
    Complex64::from_polar(magnitude, rng.random_range(0.0..2.0 * PI))
}

fn uniform(rng: &mut RngStream, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

impl SamplingRegion {
    /// Near user `index`; its draws come from a dedicated stream so adding
    /// users never changes the ones already sampled.
    pub fn sample_near(&self, array: &ArrayConfig, seed: u64, index: usize) -> NearUser {
        let mut rng = RngStream::derive(seed, &[NEAR_STREAM, index as u64]);
        let z = array.rayleigh_distance();
        let lambda = array.wavelength();
        let r_range = (self.near_distance_frac.0 * z, self.near_distance_frac.1 * z);
        let theta = uniform(&mut rng, self.angle_rad);
        let range_m = uniform(&mut rng, r_range);
        let amp = free_space_gain(lambda, range_m);
        let los_gain = random_phase(&mut rng, amp);
        let scatterers = (0..self.near_paths)
            .map(|_| Scatterer {
                theta: uniform(&mut rng, self.angle_rad),
                range_m: uniform(&mut rng, r_range),
                gain: random_phase(&mut rng, self.nlos_scale * amp),
            })
            .collect();
        NearUser {
            theta,
            range_m,
            los_gain,
            scatterers,
        }
    }

    pub fn sample_far(&self, array: &ArrayConfig, seed: u64, index: usize, tx_power_w: f64) -> FarUser {
        let mut rng = RngStream::derive(seed, &[FAR_STREAM, index as u64]);
        let distance_m = self.far_distance_frac * array.rayleigh_distance();
        let amp = free_space_gain(array.wavelength(), distance_m);
        let psi = uniform(&mut rng, self.angle_rad);
        let los_gain = random_phase(&mut rng, amp);
        let scatterers = (0..self.far_paths)
            .map(|_| FarScatterer {
                psi: uniform(&mut rng, self.angle_rad),
                gain: random_phase(&mut rng, self.nlos_scale * amp),
            })
            .collect();
        FarUser {
            psi,
            distance_m,
            los_gain,
            scatterers,
            tx_power_w,
        }
    }
}

/// Power levels of a sampled scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSettings {
    pub tx_power_w: f64,
    pub far_power_w: f64,
    pub noise_w: f64,
}

/// Draws `n_near` near users and `n_far` far users from `region`.
pub fn sample_scenario(
    array: ArrayConfig,
    region: &SamplingRegion,
    n_near: usize,
    n_far: usize,
    powers: PowerSettings,
    rotation_range: AngleRange,
    seed: u64,
) -> Scenario {
    let near = (0..n_near).map(|k| region.sample_near(&array, seed, k)).collect();
    let far = (0..n_far)
        .map(|m| region.sample_far(&array, seed, m, powers.far_power_w))
        .collect();
    let rotation_ranges = vec![rotation_range; array.n_subarrays()];
    Scenario {
        array,
        near,
        far,
        tx_power_w: powers.tx_power_w,
        noise_w: powers.noise_w,
        rotation_ranges,
    }
}

/// `10^((dBm − 30)/10)` watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}
