//! Particle swarm search over subarray rotation angles.
//!
//! Fitness is evaluated at angles snapped to a `1e-4` rad grid and cached
//! per grid point. Missing grid points of one iteration are evaluated in
//! parallel and merged in particle order, and every random draw comes from
//! a stream labelled by `(particle, iteration)`, so results do not depend on
//! the thread count.

use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_6;

use super::OptimizerError;
use crate::geometry::{count_non_obtuse_pairs, AngleRange};
use crate::numerics::RngStream;
use rand::Rng;

/// Angle grid used for fitness evaluation and caching.
pub const ANGLE_QUANTUM: f64 = 1e-4;

const INIT_STREAM: u64 = 11;
const MOVE_STREAM: u64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyMode {
    /// Penalize only when some range reaches beyond `±π/6`.
    #[default]
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Fitness subtracted per non-obtuse subarray pair.
    pub penalty_weight: f64,
    pub penalty: PenaltyMode,
    /// Velocity bound as a fraction of each range's width.
    pub velocity_clamp_frac: f64,
    /// Seed particle 0 at the unrotated orientation when it is feasible.
    pub anchor_fixed: bool,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            iterations: 40,
            inertia: 0.7298,
            cognitive: 1.4962,
            social: 1.4962,
            penalty_weight: 100.0,
            penalty: PenaltyMode::Auto,
            velocity_clamp_frac: 0.5,
            anchor_fixed: true,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn penalty_active(&self, ranges: &[AngleRange]) -> bool {
        match self.penalty {
            PenaltyMode::On => true,
            PenaltyMode::Off => false,
            PenaltyMode::Auto => ranges
                .iter()
                .any(|r| r.min < -FRAC_PI_6 - 1e-12 || r.max > FRAC_PI_6 + 1e-12),
        }
    }

    /// Penalty for an angle vector under this configuration.
    pub fn penalty_for(&self, angles: &[f64], ranges: &[AngleRange]) -> f64 {
        if self.penalty_active(ranges) {
            self.penalty_weight * count_non_obtuse_pairs(angles) as f64
        } else {
            0.0
        }
    }

    fn validate(&self, ranges: &[AngleRange]) -> Result<(), OptimizerError> {
        if self.swarm_size == 0 {
            return Err(OptimizerError::Config("swarm size must be positive".into()));
        }
        if ranges.is_empty() {
            return Err(OptimizerError::Config("no rotation ranges".into()));
        }
        for (name, v) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
            ("penalty_weight", self.penalty_weight),
            ("velocity_clamp_frac", self.velocity_clamp_frac),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(OptimizerError::Config(format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

/// Fitness of one angle vector plus the inner solver effort it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessValue {
    pub fitness: f64,
    pub inner_iters: usize,
}

impl FitnessValue {
    pub fn failed() -> Self {
        Self {
            fitness: f64::NEG_INFINITY,
            inner_iters: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmOutcome {
    /// Grid-snapped angles of the best evaluation.
    pub best_angles: Vec<f64>,
    pub best: FitnessValue,
    /// Global best fitness after initialization and after every iteration.
    pub trace: Vec<f64>,
    /// Inner iterations behind the global best at each trace entry.
    pub inner_iters: Vec<usize>,
    pub evaluations: usize,
    pub cache_hits: usize,
    pub failures: usize,
    pub particles: Vec<Particle>,
}

fn grid_key(position: &[f64]) -> Vec<i64> {
    position.iter().map(|a| (a / ANGLE_QUANTUM).round() as i64).collect()
}

fn grid_angles(key: &[i64], ranges: &[AngleRange]) -> Vec<f64> {
    key.iter()
        .zip(ranges)
        .map(|(k, r)| r.clamp(*k as f64 * ANGLE_QUANTUM))
        .collect()
}

/// Maximizes `fitness` over the box `ranges`.
pub fn run_swarm<F>(ranges: &[AngleRange], cfg: &PsoConfig, fitness: F) -> Result<SwarmOutcome, OptimizerError>
where
    F: Fn(&[f64]) -> FitnessValue + Sync,
{
    cfg.validate(ranges)?;
    let dim = ranges.len();
    let vmax: Vec<f64> = ranges.iter().map(|r| cfg.velocity_clamp_frac * r.width()).collect();
    let anchor_ok = cfg.anchor_fixed && ranges.iter().all(|r| r.contains(0.0));

    let mut particles: Vec<Particle> = (0..cfg.swarm_size)
        .map(|i| {
            let mut rng = RngStream::derive(cfg.seed, &[INIT_STREAM, i as u64]);
            let position = if i == 0 && anchor_ok {
                vec![0.0; dim]
            } else {
                ranges
                    .iter()
                    .map(|r| {
                        if r.width() > 0.0 {
                            rng.random_range(r.min..=r.max)
                        } else {
                            r.min
                        }
                    })
                    .collect()
            };
            let velocity = vmax
                .iter()
                .map(|v| if *v > 0.0 { rng.random_range(-v..=*v) } else { 0.0 })
                .collect();
            Particle {
                best_position: position.clone(),
                position,
                velocity,
                best_fitness: f64::NEG_INFINITY,
            }
        })
        .collect();

    let mut cache: HashMap<Vec<i64>, FitnessValue> = HashMap::new();
    let mut evaluations = 0;
    let mut cache_hits = 0;
    let mut failures = 0;
    let mut best_angles: Option<Vec<f64>> = None;
    let mut best = FitnessValue::failed();
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let mut inner_iters = Vec::with_capacity(cfg.iterations + 1);

    for iteration in 0..=cfg.iterations {
        let keys: Vec<Vec<i64>> = particles.iter().map(|p| grid_key(&p.position)).collect();
        let mut missing: Vec<Vec<i64>> = Vec::new();
        for key in &keys {
            if !cache.contains_key(key) && !missing.contains(key) {
                missing.push(key.clone());
            }
        }
        cache_hits += keys.len() - missing.len();
        let fresh: Vec<FitnessValue> = missing
            .par_iter()
            .map(|key| {
                let value = fitness(&grid_angles(key, ranges));
                if value.fitness.is_nan() {
                    FitnessValue::failed()
                } else {
                    value
                }
            })
            .collect();
        evaluations += fresh.len();
        failures += fresh.iter().filter(|v| v.fitness == f64::NEG_INFINITY).count();
        cache.extend(missing.into_iter().zip(fresh));

        for (particle, key) in particles.iter_mut().zip(&keys) {
            let value = cache[key];
            let angles = grid_angles(key, ranges);
            if value.fitness > particle.best_fitness {
                particle.best_fitness = value.fitness;
                particle.best_position = angles.clone();
            }
            if value.fitness > best.fitness {
                best = value;
                best_angles = Some(angles);
            }
        }
        trace.push(best.fitness);
        inner_iters.push(best.inner_iters);

        if iteration == cfg.iterations {
            break;
        }
        let Some(global) = best_angles.clone() else {
            continue;
        };
        for (i, particle) in particles.iter_mut().enumerate() {
            let mut rng = RngStream::derive(cfg.seed, &[MOVE_STREAM, i as u64, iteration as u64]);
            for d in 0..dim {
                let tau1: f64 = rng.random();
                let tau2: f64 = rng.random();
                let x = particle.position[d];
                let v = cfg.inertia * particle.velocity[d]
                    + cfg.cognitive * tau1 * (particle.best_position[d] - x)
                    + cfg.social * tau2 * (global[d] - x);
                let v = v.clamp(-vmax[d], vmax[d]);
                particle.velocity[d] = v;
                particle.position[d] = ranges[d].clamp(x + v);
            }
        }
    }

    let best_angles = best_angles.ok_or(OptimizerError::NoFeasibleFitness)?;
    Ok(SwarmOutcome {
        best_angles,
        best,
        trace,
        inner_iters,
        evaluations,
        cache_hits,
        failures,
        particles,
    })
}
