//! Modular rotatable ULA geometry and steering vectors.
//!
//! The array has `N = 2Ñ+1` elements on the x-axis at `n·d`,
//! `n ∈ [−Ñ, Ñ]`, split into `Q = 2Q̃+1` contiguous subarrays. Inner
//! subarrays hold `N̄ = ⌊N/Q⌋` elements centred on `q·N̄·d`; the leftover
//! `N − Q·N̄` elements are split evenly between the two outermost subarrays.
//! Subarray `q` rotates by `φ_q` about the array origin, so an element at
//! signed offset `δ` moves to `(δ cos φ_q, δ sin φ_q)`.
//!
//! Steering vectors are ordered by global element index, `−Ñ` first, and
//! carry the `1/√N` normalization.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use thiserror::Error;

use crate::numerics::ComplexVector;

/// Nominal propagation speed used to derive the wavelength.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("antenna count must be odd and positive, got {0}")]
    EvenAntennaCount(usize),
    #[error("subarray count must be odd and positive, got {0}")]
    EvenSubarrayCount(usize),
    #[error("{n} antennas cannot be split into {q} subarrays of odd size (got {per} per subarray)")]
    BadPartition { n: usize, q: usize, per: usize },
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("expected {expected} rotation angles, got {got}")]
    AngleCount { expected: usize, got: usize },
    #[error("rotation angle {angle} of subarray slot {slot} lies outside [{min}, {max}]")]
    AngleOutOfRange {
        slot: usize,
        angle: f64,
        min: f64,
        max: f64,
    },
    #[error("empty rotation range [{min}, {max}]")]
    EmptyRange { min: f64, max: f64 },
    #[error("element index (q={q}, n̄={n_bar}) is outside the array")]
    IndexOutOfRange { q: i64, n_bar: i64 },
}

/// Uniform linear array split into rotatable subarrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    n_antennas: usize,
    n_subarrays: usize,
    carrier_hz: f64,
    spacing_m: f64,
    /// Per element (global order): subarray slot and signed offset δ in meters.
    elements: Vec<(usize, f64)>,
}

impl ArrayConfig {
    pub fn new(n_antennas: usize, n_subarrays: usize, carrier_hz: f64, spacing_m: f64) -> Result<Self, GeometryError> {
        if n_antennas == 0 || n_antennas.is_multiple_of(2) {
            return Err(GeometryError::EvenAntennaCount(n_antennas));
        }
        if n_subarrays == 0 || n_subarrays.is_multiple_of(2) {
            return Err(GeometryError::EvenSubarrayCount(n_subarrays));
        }
        let per = n_antennas / n_subarrays;
        if per == 0 || per.is_multiple_of(2) {
            return Err(GeometryError::BadPartition {
                n: n_antennas,
                q: n_subarrays,
                per,
            });
        }
        positive("carrier_hz", carrier_hz)?;
        positive("spacing_m", spacing_m)?;

        let half = (n_antennas / 2) as i64;
        let q_half = (n_subarrays / 2) as i64;
        let per_i = per as i64;
        let elements = (-half..=half)
            .map(|n| {
                let q = ((n as f64) / per_i as f64).round() as i64;
                let q = q.clamp(-q_half, q_half);
                ((q + q_half) as usize, n as f64 * spacing_m)
            })
            .collect();
        Ok(Self {
            n_antennas,
            n_subarrays,
            carrier_hz,
            spacing_m,
            elements,
        })
    }

    /// Array with `d = λ/2`.
    pub fn half_wavelength(n_antennas: usize, n_subarrays: usize, carrier_hz: f64) -> Result<Self, GeometryError> {
        positive("carrier_hz", carrier_hz)?;
        Self::new(n_antennas, n_subarrays, carrier_hz, SPEED_OF_LIGHT / carrier_hz / 2.0)
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_subarrays(&self) -> usize {
        self.n_subarrays
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn spacing_m(&self) -> f64 {
        self.spacing_m
    }

    /// `Ñ`, so that element indices run over `[−Ñ, Ñ]`.
    pub fn half_size(&self) -> usize {
        self.n_antennas / 2
    }

    /// `N̄`, the size of each inner subarray.
    pub fn elements_per_subarray(&self) -> usize {
        self.n_antennas / self.n_subarrays
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    /// `D = (N−1)d`.
    pub fn aperture(&self) -> f64 {
        (self.n_antennas - 1) as f64 * self.spacing_m
    }

    /// `2D²/λ`.
    pub fn rayleigh_distance(&self) -> f64 {
        let d = self.aperture();
        2.0 * d * d / self.wavelength()
    }

    /// Subarray slot (`q + Q̃`) and signed offset of every element.
    pub fn elements(&self) -> &[(usize, f64)] {
        &self.elements
    }

    /// Inclusive range of within-subarray indices `n̄` for subarray `q`.
    pub fn local_index_range(&self, q: i64) -> Option<(i64, i64)> {
        let q_half = (self.n_subarrays / 2) as i64;
        if q.abs() > q_half {
            return None;
        }
        let per = self.elements_per_subarray() as i64;
        let half_per = (per - 1) / 2;
        let extra = ((self.n_antennas - self.n_subarrays * self.elements_per_subarray()) / 2) as i64;
        let mut lo = -half_per;
        let mut hi = half_per;
        if q == -q_half {
            lo -= extra;
        }
        if q == q_half {
            hi += extra;
        }
        Some((lo, hi))
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), GeometryError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GeometryError::NonPositive { name, value })
    }
}

/// `2(N−1)²d²/λ` in meters.
pub fn rayleigh_distance(cfg: &ArrayConfig) -> f64 {
    cfg.rayleigh_distance()
}

/// Closed admissible interval for one subarray's rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleRange {
    pub min: f64,
    pub max: f64,
}

impl AngleRange {
    pub fn new(min: f64, max: f64) -> Result<Self, GeometryError> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(GeometryError::EmptyRange { min, max });
        }
        Ok(Self { min, max })
    }

    /// `[−π/6, π/6]`, matching a tri-sector deployment.
    pub fn sector() -> Self {
        Self {
            min: -FRAC_PI_6,
            max: FRAC_PI_6,
        }
    }

    pub fn point(angle: f64) -> Self {
        Self { min: angle, max: angle }
    }

    pub fn contains(&self, angle: f64) -> bool {
        angle >= self.min && angle <= self.max
    }

    pub fn clamp(&self, angle: f64) -> f64 {
        angle.clamp(self.min, self.max)
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

/// Per-subarray rotation angles `φ_q`, stored by slot `q + Q̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationState {
    angles: Vec<f64>,
    ranges: Vec<AngleRange>,
}

impl RotationState {
    pub fn new(angles: Vec<f64>, ranges: Vec<AngleRange>) -> Result<Self, GeometryError> {
        if angles.len() != ranges.len() {
            return Err(GeometryError::AngleCount {
                expected: ranges.len(),
                got: angles.len(),
            });
        }
        for (slot, (&angle, range)) in angles.iter().zip(&ranges).enumerate() {
            if !range.contains(angle) {
                return Err(GeometryError::AngleOutOfRange {
                    slot,
                    angle,
                    min: range.min,
                    max: range.max,
                });
            }
        }
        Ok(Self { angles, ranges })
    }

    /// Every subarray at `phi`, all sharing `range`.
    pub fn uniform(n_subarrays: usize, phi: f64, range: AngleRange) -> Result<Self, GeometryError> {
        Self::new(vec![phi; n_subarrays], vec![range; n_subarrays])
    }

    /// The fixed (unrotated) orientation with sector ranges.
    pub fn fixed(n_subarrays: usize) -> Self {
        Self {
            angles: vec![0.0; n_subarrays],
            ranges: vec![AngleRange::sector(); n_subarrays],
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn ranges(&self) -> &[AngleRange] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Number of unordered subarray pairs with `|φ_p − φ_q| < π/2`.
    pub fn non_obtuse_pairs(&self) -> usize {
        count_non_obtuse_pairs(&self.angles)
    }

    /// Whether `|φ_p − φ_q| > π/2` holds for every pair.
    pub fn all_pairs_obtuse(&self) -> bool {
        self.angles
            .iter()
            .enumerate()
            .all(|(p, &a)| self.angles[p + 1..].iter().all(|&b| (a - b).abs() > FRAC_PI_2))
    }

    fn check_size(&self, cfg: &ArrayConfig) -> Result<(), GeometryError> {
        if self.angles.len() != cfg.n_subarrays() {
            return Err(GeometryError::AngleCount {
                expected: cfg.n_subarrays(),
                got: self.angles.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn count_non_obtuse_pairs(angles: &[f64]) -> usize {
    let mut count = 0;
    for (p, &a) in angles.iter().enumerate() {
        for &b in &angles[p + 1..] {
            if (a - b).abs() < FRAC_PI_2 {
                count += 1;
            }
        }
    }
    count
}

/// Position `(x, y)` in meters of element `n̄` of subarray `q`.
pub fn element_position(
    cfg: &ArrayConfig,
    rot: &RotationState,
    q: i64,
    n_bar: i64,
) -> Result<(f64, f64), GeometryError> {
    rot.check_size(cfg)?;
    let (lo, hi) = cfg
        .local_index_range(q)
        .ok_or(GeometryError::IndexOutOfRange { q, n_bar })?;
    if n_bar < lo || n_bar > hi {
        return Err(GeometryError::IndexOutOfRange { q, n_bar });
    }
    let per = cfg.elements_per_subarray() as i64;
    let delta = (q * per + n_bar) as f64 * cfg.spacing_m();
    let phi = rot.angles()[(q + (cfg.n_subarrays() / 2) as i64) as usize];
    Ok((delta * phi.cos(), delta * phi.sin()))
}

/// How the element-to-user distance enters the near-field phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceModel {
    /// Second-order expansion `r − δcos(φ−θ) + δ²sin²(φ−θ)/(2r)`.
    #[default]
    Fresnel,
    /// Exact law-of-cosines distance.
    Exact,
}

/// Near-field steering vector `b(θ, r, φ)`.
pub fn near_steering(
    cfg: &ArrayConfig,
    rot: &RotationState,
    theta: f64,
    range_m: f64,
    model: DistanceModel,
) -> Result<ComplexVector, GeometryError> {
    positive("range_m", range_m)?;
    rot.check_size(cfg)?;
    let k = cfg.wavenumber();
    let norm = 1.0 / (cfg.n_antennas() as f64).sqrt();
    let trig: Vec<(f64, f64)> = rot
        .angles()
        .iter()
        .map(|&phi| {
            let (s, c) = (phi - theta).sin_cos();
            (c, s * s)
        })
        .collect();
    Ok(cfg
        .elements()
        .iter()
        .map(|&(slot, delta)| {
            let (cos_t, sin2) = trig[slot];
            let excess = match model {
                DistanceModel::Fresnel => -delta * cos_t + delta * delta * sin2 / (2.0 * range_m),
                DistanceModel::Exact => {
                    let num = delta * delta - 2.0 * range_m * delta * cos_t;
                    let dist = (range_m * range_m + num).sqrt();
                    num / (dist + range_m)
                }
            };
            Complex64::from_polar(norm, -k * excess)
        })
        .collect())
}

/// Far-field steering vector `a(ψ, φ)`, the `r → ∞` limit of
/// [`near_steering`].
pub fn far_steering(cfg: &ArrayConfig, rot: &RotationState, psi: f64) -> ComplexVector {
    assert_eq!(
        rot.len(),
        cfg.n_subarrays(),
        "rotation state does not match the subarray count"
    );
    let k = cfg.wavenumber();
    let norm = 1.0 / (cfg.n_antennas() as f64).sqrt();
    let cosines: Vec<f64> = rot.angles().iter().map(|&phi| (psi - phi).cos()).collect();
    cfg.elements()
        .iter()
        .map(|&(slot, delta)| Complex64::from_polar(norm, k * delta * cosines[slot]))
        .collect()
}
