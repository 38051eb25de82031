//! The proposed rotation/power design and its baselines.

use std::time::Instant;

use super::pso::{run_swarm, FitnessValue, PsoConfig};
use super::sca::{sca_power_allocation, ScaConfig};
use super::OptimizerError;
use crate::beamforming::{build_precoders, evaluate_rates, DigitalMode, LinkGains, PowerAllocation, RateBreakdown};
use crate::channel::synthesize_channels;
use crate::geometry::{count_non_obtuse_pairs, DistanceModel, RotationState};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Fixed array, zero-forcing digital stage, equal power.
    FaZf,
    /// Fixed array, matched-filter beams, SCA power.
    FaOpa,
    /// Swarm-optimized rotation, equal power.
    RaEpa,
    /// Swarm-optimized rotation with SCA power in the loop.
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::FaZf, Scheme::FaOpa, Scheme::RaEpa, Scheme::Proposed];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::FaZf => "fa_zf",
            Scheme::FaOpa => "fa_opa",
            Scheme::RaEpa => "ra_epa",
            Scheme::Proposed => "proposed",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }

    fn rotates(self) -> bool {
        matches!(self, Scheme::RaEpa | Scheme::Proposed)
    }

    fn optimizes_power(self) -> bool {
        matches!(self, Scheme::FaOpa | Scheme::Proposed)
    }

    fn digital(self) -> DigitalMode {
        match self {
            Scheme::FaZf => DigitalMode::ZeroForcing,
            _ => DigitalMode::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchmarkConfig {
    pub sca: ScaConfig,
    pub pso: PsoConfig,
    pub model: DistanceModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub best_angles: Vec<f64>,
    pub powers: Vec<f64>,
    pub rates: RateBreakdown,
    /// Sum-rate at the reported design, without any penalty.
    pub sum_rate: f64,
    /// Best fitness per outer iteration; a single entry for fixed arrays.
    pub sum_rate_trace: Vec<f64>,
    pub inner_iters_used: Vec<usize>,
    pub evaluations: usize,
    pub fitness_failures: usize,
    pub penalty_active: bool,
    pub non_obtuse_pairs: usize,
    pub wall_time_s: f64,
}

struct Design {
    powers: Vec<f64>,
    rates: RateBreakdown,
    inner_iters: usize,
}

fn design_at(
    scenario: &Scenario,
    angles: &[f64],
    scheme: Scheme,
    cfg: &BenchmarkConfig,
) -> Result<Design, OptimizerError> {
    let rot = RotationState::new(angles.to_vec(), scenario.rotation_ranges.clone())?;
    let channels = synthesize_channels(scenario, &rot, cfg.model)?;
    let precoders = build_precoders(&channels, scheme.digital())?;
    let (alloc, inner_iters) = if scheme.optimizes_power() {
        let gains = LinkGains::new(&channels, &precoders, scenario)?;
        let out = sca_power_allocation(&gains, scenario.tx_power_w, &cfg.sca)?;
        (out.alloc, out.iterations)
    } else {
        (PowerAllocation::equal(scenario.n_near(), scenario.tx_power_w), 0)
    };
    let rates = evaluate_rates(&channels, &precoders, &alloc, scenario)?;
    Ok(Design {
        powers: alloc.powers().to_vec(),
        rates,
        inner_iters,
    })
}

/// Runs one scheme on one scenario.
pub fn run_benchmark(
    scenario: &Scenario,
    scheme: Scheme,
    cfg: &BenchmarkConfig,
) -> Result<OptimizerReport, OptimizerError> {
    let start = Instant::now();
    let ranges = &scenario.rotation_ranges;
    let penalty_active = scheme.rotates() && cfg.pso.penalty_active(ranges);

    let (angles, trace, inner_iters_used, evaluations, fitness_failures) = if scheme.rotates() {
        let fitness = |angles: &[f64]| match design_at(scenario, angles, scheme, cfg) {
            Ok(d) => FitnessValue {
                fitness: d.rates.sum_rate - cfg.pso.penalty_for(angles, ranges),
                inner_iters: d.inner_iters,
            },
            Err(_) => FitnessValue::failed(),
        };
        let swarm = run_swarm(ranges, &cfg.pso, fitness)?;
        (
            swarm.best_angles,
            swarm.trace,
            swarm.inner_iters,
            swarm.evaluations,
            swarm.failures,
        )
    } else {
        (vec![0.0; ranges.len()], Vec::new(), Vec::new(), 1, 0)
    };

    let design = design_at(scenario, &angles, scheme, cfg)?;
    let sum_rate = design.rates.sum_rate;
    let (trace, inner_iters_used) = if scheme.rotates() {
        (trace, inner_iters_used)
    } else {
        (vec![sum_rate], vec![design.inner_iters])
    };
    Ok(OptimizerReport {
        scheme,
        seed: cfg.pso.seed,
        non_obtuse_pairs: count_non_obtuse_pairs(&angles),
        best_angles: angles,
        powers: design.powers,
        rates: design.rates,
        sum_rate,
        sum_rate_trace: trace,
        inner_iters_used,
        evaluations,
        fitness_failures,
        penalty_active,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
