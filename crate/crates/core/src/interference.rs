//! Rotation-aware near-field and mixed-field interference for a uniformly
//! rotated array.
//!
//! The exact correlations are direct sums over the `N` elements. Their
//! closed-form approximations replace the sum by an integral, which turns
//! the quadratic-phase sum into a window of the Cornu spiral:
//!
//! ```text
//! ρ ≈ G(β₁, β₂),   β₂ = (N/2)·d·√(2|a|/λ),   β₁ = u·√(2/(λ|a|))
//! ```
//!
//! with curvature `a = sin²(φ−θ_k)/r_k − sin²(φ−θ_i)/r_i` and linear phase
//! `u = cos(φ−θ_k) − cos(φ−θ_i)`. For `d = λ/2` these reduce to
//! `β₂ = (N/2)√(d|a|)` and `β₁ = u/√(d|a|)`.
//!
//! A far user is the `r_i → ∞` limit of a near user with `θ_i = ψ`.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

use crate::geometry::{AngleRange, ArrayConfig};
use crate::numerics::{g_kernel, NumericsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterferenceError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveDistance { name: &'static str, value: f64 },
    #[error("curvature difference vanishes (linear phase {linear}); use the Dirichlet form")]
    DegenerateCurvature { linear: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Relative size below which the curvature difference counts as zero.
pub const CURVATURE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPair {
    pub beta1: f64,
    pub beta2: f64,
}

impl BetaPair {
    pub fn new(beta1: f64, beta2: f64) -> Result<Self, NumericsError> {
        if !beta1.is_finite() {
            return Err(NumericsError::NonFinite(beta1));
        }
        if !beta2.is_finite() {
            return Err(NumericsError::NonFinite(beta2));
        }
        if beta2 < 0.0 {
            return Err(NumericsError::NegativeBeta2(beta2));
        }
        Ok(Self { beta1, beta2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterferenceKind {
    NearNear,
    NearFar,
}

impl InterferenceKind {
    pub fn label(self) -> &'static str {
        match self {
            InterferenceKind::NearNear => "near-near",
            InterferenceKind::NearFar => "near-far",
        }
    }
}

/// Exact and approximate correlation for one user pair at one rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceReport {
    pub kind: InterferenceKind,
    pub exact: f64,
    pub fresnel_approx: f64,
    /// `None` when the curvature difference vanishes.
    pub betas: Option<BetaPair>,
}

fn check_distance(name: &'static str, value: f64) -> Result<(), InterferenceError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(InterferenceError::NonPositiveDistance { name, value })
    }
}

/// `(1/N)|Σₙ exp(j·k·(n²d²·a/2 + n·d·v))|` with `v` the linear coefficient.
fn quadratic_phase_sum(cfg: &ArrayConfig, curvature: f64, linear: f64) -> f64 {
    let k = cfg.wavenumber();
    let d = cfg.spacing_m();
    let half = cfg.half_size() as i64;
    let quad = k * d * d * curvature / 2.0;
    let lin = k * d * linear;
    let sum: Complex64 = (-half..=half)
        .map(|n| {
            let n = n as f64;
            Complex64::from_polar(1.0, n * n * quad + n * lin)
        })
        .sum();
    sum.norm() / cfg.n_antennas() as f64
}

/// Exact normalized near-field inter-user interference `|b_kᴴ b_i|`.
pub fn rho_nn_exact(
    cfg: &ArrayConfig,
    phi: f64,
    theta_k: f64,
    r_k: f64,
    theta_i: f64,
    r_i: f64,
) -> Result<f64, InterferenceError> {
    check_distance("r_k", r_k)?;
    check_distance("r_i", r_i)?;
    let curvature = (phi - theta_k).sin().powi(2) / r_k - (phi - theta_i).sin().powi(2) / r_i;
    let linear = (phi - theta_i).cos() - (phi - theta_k).cos();
    Ok(quadratic_phase_sum(cfg, curvature, linear))
}

/// Exact normalized mixed-field interference `|b_kᴴ a_m|`.
pub fn rho_nf_exact(cfg: &ArrayConfig, phi: f64, theta_k: f64, r_k: f64, psi: f64) -> Result<f64, InterferenceError> {
    check_distance("r_k", r_k)?;
    let curvature = (phi - theta_k).sin().powi(2) / r_k;
    let linear = (psi - phi).cos() - (phi - theta_k).cos();
    Ok(quadratic_phase_sum(cfg, curvature, linear))
}

fn betas_from(cfg: &ArrayConfig, curvature: f64, linear: f64, scale: f64) -> Result<BetaPair, InterferenceError> {
    let a = curvature.abs();
    if a <= CURVATURE_EPS * scale || a == 0.0 {
        return Err(InterferenceError::DegenerateCurvature { linear });
    }
    let lambda = cfg.wavelength();
    let n = cfg.n_antennas() as f64;
    let beta2 = 0.5 * n * cfg.spacing_m() * (2.0 * a / lambda).sqrt();
    let beta1 = linear * (2.0 / (lambda * a)).sqrt();
    Ok(BetaPair::new(beta1, beta2)?)
}

/// Fresnel parameters of a near–near pair.
pub fn rho_nn_betas(
    cfg: &ArrayConfig,
    phi: f64,
    theta_k: f64,
    r_k: f64,
    theta_i: f64,
    r_i: f64,
) -> Result<BetaPair, InterferenceError> {
    check_distance("r_k", r_k)?;
    check_distance("r_i", r_i)?;
    let ck = (phi - theta_k).sin().powi(2) / r_k;
    let ci = (phi - theta_i).sin().powi(2) / r_i;
    let linear = (phi - theta_k).cos() - (phi - theta_i).cos();
    betas_from(cfg, ck - ci, linear, ck + ci)
}

/// Fresnel parameters of a near–far pair.
pub fn rho_nf_betas(
    cfg: &ArrayConfig,
    phi: f64,
    theta_k: f64,
    r_k: f64,
    psi: f64,
) -> Result<BetaPair, InterferenceError> {
    check_distance("r_k", r_k)?;
    let ck = (phi - theta_k).sin().powi(2) / r_k;
    let linear = (phi - theta_k).cos() - (psi - phi).cos();
    betas_from(cfg, ck, linear, ck)
}

/// Closed-form correlation `G(β₁, β₂)`.
pub fn rho_approx(betas: BetaPair) -> f64 {
    // BetaPair guarantees finite, non-negative inputs.
    g_kernel(betas.beta1, betas.beta2).expect("validated beta pair")
}

/// `|sin(N·x/2) / (N·sin(x/2))|` with `x = k·d·u`, the exact sum when the
/// quadratic phase cancels.
pub fn dirichlet_magnitude(cfg: &ArrayConfig, linear: f64) -> f64 {
    let n = cfg.n_antennas() as f64;
    let x = cfg.wavenumber() * cfg.spacing_m() * linear;
    let den = n * (x / 2.0).sin();
    if den.abs() < 1e-300 {
        return 1.0;
    }
    ((n * x / 2.0).sin() / den).abs().min(1.0)
}

fn approx_or_dirichlet(
    cfg: &ArrayConfig,
    betas: Result<BetaPair, InterferenceError>,
) -> Result<(f64, Option<BetaPair>), InterferenceError> {
    match betas {
        Ok(b) => Ok((rho_approx(b), Some(b))),
        Err(InterferenceError::DegenerateCurvature { linear }) => Ok((dirichlet_magnitude(cfg, linear), None)),
        Err(e) => Err(e),
    }
}

/// Closed-form near–near correlation, falling back to the Dirichlet kernel
/// when the curvature difference vanishes.
pub fn rho_nn_approx(
    cfg: &ArrayConfig,
    phi: f64,
    theta_k: f64,
    r_k: f64,
    theta_i: f64,
    r_i: f64,
) -> Result<f64, InterferenceError> {
    approx_or_dirichlet(cfg, rho_nn_betas(cfg, phi, theta_k, r_k, theta_i, r_i)).map(|(v, _)| v)
}

pub fn rho_nf_approx(cfg: &ArrayConfig, phi: f64, theta_k: f64, r_k: f64, psi: f64) -> Result<f64, InterferenceError> {
    approx_or_dirichlet(cfg, rho_nf_betas(cfg, phi, theta_k, r_k, psi)).map(|(v, _)| v)
}

pub fn report_nn(
    cfg: &ArrayConfig,
    phi: f64,
    theta_k: f64,
    r_k: f64,
    theta_i: f64,
    r_i: f64,
) -> Result<InterferenceReport, InterferenceError> {
    let exact = rho_nn_exact(cfg, phi, theta_k, r_k, theta_i, r_i)?;
    let (fresnel_approx, betas) = approx_or_dirichlet(cfg, rho_nn_betas(cfg, phi, theta_k, r_k, theta_i, r_i))?;
    Ok(InterferenceReport {
        kind: InterferenceKind::NearNear,
        exact,
        fresnel_approx,
        betas,
    })
}

pub fn report_nf(
    cfg: &ArrayConfig,
    phi: f64,
    theta_k: f64,
    r_k: f64,
    psi: f64,
) -> Result<InterferenceReport, InterferenceError> {
    let exact = rho_nf_exact(cfg, phi, theta_k, r_k, psi)?;
    let (fresnel_approx, betas) = approx_or_dirichlet(cfg, rho_nf_betas(cfg, phi, theta_k, r_k, psi))?;
    Ok(InterferenceReport {
        kind: InterferenceKind::NearFar,
        exact,
        fresnel_approx,
        betas,
    })
}

const BORESIGHT_TOL: f64 = 1e-12;

/// Rotation that pushes `|φ − θ|` as close to `π/2` as the range allows,
/// maximizing `β₂` for two users sharing the angle `theta`.
///
/// The range must contain the unrotated orientation `φ = 0`.
pub fn optimal_rotation_same_angle_nn(theta: f64, range: AngleRange) -> f64 {
    debug_assert!(range.contains(0.0), "rotation range must contain 0");
    if (theta - FRAC_PI_2).abs() <= BORESIGHT_TOL {
        0.0
    } else if theta > FRAC_PI_2 {
        (theta - FRAC_PI_2).min(range.max)
    } else {
        (theta - FRAC_PI_2).max(range.min)
    }
}

/// Same rule for a near user and a far user sharing the angle `psi`.
pub fn optimal_rotation_same_angle_nf(psi: f64, range: AngleRange) -> f64 {
    optimal_rotation_same_angle_nn(psi, range)
}
