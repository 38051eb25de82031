//! Successive convex approximation for near-user power allocation.
//!
//! With `D_k(p) = Σ_{i≠k} p_i G[k][i] + I_k + σ²`, the negative sum-rate is
//! the difference of two convex functions
//!
//! ```text
//! f(p) = A(p) − B(p),  A(p) = −Σ_k log₂(D_k(p) + p_k G[k][k]),  B(p) = −Σ_k log₂ D_k(p).
//! ```
//!
//! Each round linearizes `B` at the current point and solves the convex
//! surrogate on the capped simplex.

use super::simplex::{minimize_on_simplex, InnerSolverConfig, SimplexObjective};
use super::OptimizerError;
use crate::beamforming::{LinkGains, PowerAllocation};
use std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum ScaInit {
    #[default]
    EqualPower,
    WarmStart(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaConfig {
    pub max_iters: usize,
    /// Stop when one round improves the sum-rate by less than this
    /// (bits/s/Hz).
    pub tol: f64,
    pub inner: InnerSolverConfig,
    pub init: ScaInit,
}

impl Default for ScaConfig {
    fn default() -> Self {
        Self {
            max_iters: 50,
            tol: 1e-4,
            inner: InnerSolverConfig::default(),
            init: ScaInit::EqualPower,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaOutcome {
    pub alloc: PowerAllocation,
    /// Objective `f = −sum-rate` at the start and after every round.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl ScaOutcome {
    pub fn sum_rate(&self) -> f64 {
        -self.trace.last().copied().unwrap_or(0.0)
    }
}

fn interference_plus_noise(gains: &LinkGains, p: &[f64], k: usize) -> f64 {
    gains.near_interference(k, p) + gains.mixed_w[k] + gains.noise_w
}

/// `A(p)` in bits.
pub fn concave_part(gains: &LinkGains, p: &[f64]) -> f64 {
    -(0..gains.n_users())
        .map(|k| (interference_plus_noise(gains, p, k) + p[k] * gains.direct[k][k]).log2())
        .sum::<f64>()
}

/// `B(p)` in bits.
pub fn convex_part(gains: &LinkGains, p: &[f64]) -> f64 {
    -(0..gains.n_users())
        .map(|k| interference_plus_noise(gains, p, k).log2())
        .sum::<f64>()
}

/// `f(p) = −Σ_k R_k(p)`.
pub fn objective(gains: &LinkGains, p: &[f64]) -> f64 {
    concave_part(gains, p) - convex_part(gains, p)
}

/// `∂B/∂p_k = −(1/ln 2) Σ_{j≠k} G[j][k] / D_j`.
pub fn convex_part_gradient(gains: &LinkGains, p: &[f64]) -> Vec<f64> {
    let k = gains.n_users();
    let inv: Vec<f64> = (0..k).map(|j| 1.0 / interference_plus_noise(gains, p, j)).collect();
    (0..k)
        .map(|col| {
            -(0..k)
                .filter(|j| *j != col)
                .map(|j| gains.direct[j][col] * inv[j])
                .sum::<f64>()
                / LN_2
        })
        .collect()
}

struct Surrogate<'a> {
    gains: &'a LinkGains,
    slope: Vec<f64>,
}

impl SimplexObjective for Surrogate<'_> {
    fn dim(&self) -> usize {
        self.gains.n_users()
    }

    fn value(&self, p: &[f64]) -> f64 {
        concave_part(self.gains, p) - self.slope.iter().zip(p).map(|(s, x)| s * x).sum::<f64>()
    }

    fn gradient(&self, p: &[f64], grad: &mut [f64]) {
        let n = self.dim();
        let inv: Vec<f64> = (0..n)
            .map(|j| 1.0 / (interference_plus_noise(self.gains, p, j) + p[j] * self.gains.direct[j][j]))
            .collect();
        for (col, g) in grad.iter_mut().enumerate() {
            let total: f64 = (0..n).map(|j| self.gains.direct[j][col] * inv[j]).sum();
            *g = -total / LN_2 - self.slope[col];
        }
    }
}

/// Runs SCA on precomputed link gains with budget `budget_w`.
///
/// The objective trace is non-increasing: a round whose solution would
/// raise the true objective through rounding is discarded and the loop
/// stops.
pub fn sca_power_allocation(gains: &LinkGains, budget_w: f64, cfg: &ScaConfig) -> Result<ScaOutcome, OptimizerError> {
    let k = gains.n_users();
    let mut p = match &cfg.init {
        ScaInit::EqualPower => vec![budget_w / k.max(1) as f64; k],
        ScaInit::WarmStart(p0) => {
            if p0.len() != k {
                return Err(OptimizerError::Config(format!(
                    "warm start has {} entries for {k} users",
                    p0.len()
                )));
            }
            PowerAllocation::new(p0.clone(), budget_w)?;
            p0.clone()
        }
    };
    let mut current = objective(gains, &p);
    let mut trace = vec![current];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        let surrogate = Surrogate {
            gains,
            slope: convex_part_gradient(gains, &p),
        };
        let sol = minimize_on_simplex(&surrogate, budget_w, &p, &cfg.inner)?;
        let next = objective(gains, &sol.p);
        if next > current {
            converged = true;
            break;
        }
        let improvement = current - next;
        p = sol.p;
        current = next;
        trace.push(current);
        if improvement < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(ScaOutcome {
        alloc: PowerAllocation::new(p, budget_w)?,
        trace,
        iterations,
        converged,
    })
}
