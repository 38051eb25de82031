//! Optimization runs and multi-seed parameter sweeps.

use rayon::prelude::*;

use ramix_core::optimizer::{run_benchmark, OptimizerReport};

use crate::config::{ScenarioConfig, SchemeChoice};
use crate::output::{float, float_list, Table};
use crate::CliError;

/// Swarm size, iteration count and number of seeds of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunScale {
    pub swarm_size: usize,
    pub iterations: usize,
    pub seeds: usize,
}

impl RunScale {
    pub const DESK: RunScale = RunScale {
        swarm_size: 30,
        iterations: 40,
        seeds: 5,
    };
    pub const FULL: RunScale = RunScale {
        swarm_size: 100,
        iterations: 100,
        seeds: 5,
    };

    /// Writes the swarm settings into `cfg` so the echoed config matches
    /// what actually ran.
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        cfg.optimizer.swarm_size = self.swarm_size;
        cfg.optimizer.iterations = self.iterations;
    }
}

/// Runs one scheme on the scenario drawn with `seed`; the swarm uses the
/// same seed.
pub fn run_scheme(cfg: &ScenarioConfig, choice: SchemeChoice, seed: u64) -> Result<OptimizerReport, CliError> {
    let scenario = cfg.build(seed, choice.subarrays)?;
    let bench = cfg.benchmark_config(seed)?;
    run_benchmark(&scenario, choice.scheme, &bench).map_err(|e| CliError::Solver(e.to_string()))
}

pub const OPTIMIZE_COLUMNS: [&str; 9] = [
    "row",
    "iteration",
    "fitness",
    "inner_iters",
    "sum_rate",
    "angles_rad",
    "powers_w",
    "user_rates",
    "non_obtuse_pairs",
];

pub fn cmd_optimize(
    cfg: &ScenarioConfig,
    choice: SchemeChoice,
    seed: u64,
) -> Result<(OptimizerReport, Table), CliError> {
    let report = run_scheme(cfg, choice, seed)?;
    let mut table = Table::new(&OPTIMIZE_COLUMNS);
    for (t, (fitness, inner)) in report.sum_rate_trace.iter().zip(&report.inner_iters_used).enumerate() {
        table.push(vec![
            "iter".into(),
            t.to_string(),
            float(*fitness),
            inner.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    table.push(vec![
        "summary".into(),
        (report.sum_rate_trace.len().saturating_sub(1)).to_string(),
        float(*report.sum_rate_trace.last().unwrap_or(&report.sum_rate)),
        report.inner_iters_used.iter().sum::<usize>().to_string(),
        float(report.sum_rate),
        float_list(&report.best_angles),
        float_list(&report.powers),
        float_list(&report.rates.per_user_rate),
        report.non_obtuse_pairs.to_string(),
    ]);
    Ok((report, table))
}

/// Human-readable summary of one run.
pub fn summarize(choice: SchemeChoice, report: &OptimizerReport) -> String {
    let angles: Vec<String> = report
        .best_angles
        .iter()
        .map(|a| format!("{:+.2}", a.to_degrees()))
        .collect();
    let powers: Vec<String> = report.powers.iter().map(|p| format!("{p:.4}")).collect();
    let rates: Vec<String> = report.rates.per_user_rate.iter().map(|r| format!("{r:.3}")).collect();
    format!(
        "scheme      {}\nseed        {}\nsum-rate    {:.4} bits/s/Hz\nuser rates  [{}]\nangles      [{}] deg\npowers      [{}] W\nevaluations {}  failures {}  time {:.2}s\n",
        choice.label(),
        report.seed,
        report.sum_rate,
        rates.join(", "),
        angles.join(", "),
        powers.join(", "),
        report.evaluations,
        report.fitness_failures,
        report.wall_time_s,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParameter {
    TxPower,
    FarPower,
    NNear,
    NFar,
    /// Handled by the analysis recipes.
    Angle,
    Distance,
    Rotation,
}

impl SweptParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweptParameter::TxPower => "tx_power_dbm",
            SweptParameter::FarPower => "far_power_dbm",
            SweptParameter::NNear => "n_near",
            SweptParameter::NFar => "n_far",
            SweptParameter::Angle => "angle",
            SweptParameter::Distance => "distance",
            SweptParameter::Rotation => "rotation",
        }
    }

    fn apply(self, cfg: &mut ScenarioConfig, value: f64) -> Result<(), CliError> {
        let count = |v: f64| -> Result<usize, CliError> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::Config(format!("{}: {v} is not a count", self.name())))
            }
        };
        match self {
            SweptParameter::TxPower => cfg.powers.tx_power_dbm = value,
            SweptParameter::FarPower => cfg.powers.far_power_dbm = value,
            SweptParameter::NNear => cfg.users.n_near = count(value)?,
            SweptParameter::NFar => cfg.users.n_far = count(value)?,
            _ => {
                return Err(CliError::Config(format!(
                    "'{}' sweeps are produced by the analyze recipes",
                    self.name()
                )))
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub values: Vec<f64>,
    pub schemes: Vec<SchemeChoice>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.values.is_empty() {
            return Err(CliError::Config("sweep has no values".into()));
        }
        if self.schemes.is_empty() {
            return Err(CliError::Config("sweep has no schemes".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepRecipe {
    /// Sum-rate against the near-user power budget.
    Fig7,
    /// Sum-rate against the per-far-user power.
    Fig8,
    /// Sum-rate against the number of near users.
    Fig9,
    /// Sum-rate against the number of far users.
    Fig10,
}

/// Schemes compared by every sweep recipe.
pub fn recipe_schemes() -> Vec<SchemeChoice> {
    ["fa_zf", "fa_opa", "ra_epa", "proposed_q1", "proposed"]
        .iter()
        .map(|l| SchemeChoice::parse(l).expect("built-in label"))
        .collect()
}

impl SweepRecipe {
    pub const ALL: [SweepRecipe; 4] = [
        SweepRecipe::Fig7,
        SweepRecipe::Fig8,
        SweepRecipe::Fig9,
        SweepRecipe::Fig10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepRecipe::Fig7 => "fig7",
            SweepRecipe::Fig8 => "fig8",
            SweepRecipe::Fig9 => "fig9",
            SweepRecipe::Fig10 => "fig10",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    pub fn spec(self) -> SweepSpec {
        let (parameter, values) = match self {
            SweepRecipe::Fig7 => (SweptParameter::TxPower, vec![10.0, 20.0, 30.0, 40.0]),
            SweepRecipe::Fig8 => (SweptParameter::FarPower, vec![10.0, 20.0, 30.0, 40.0]),
            SweepRecipe::Fig9 => (SweptParameter::NNear, vec![1.0, 2.0, 3.0, 4.0, 5.0]),
            SweepRecipe::Fig10 => (SweptParameter::NFar, vec![1.0, 2.0, 3.0, 4.0, 5.0]),
        };
        SweepSpec {
            parameter,
            values,
            schemes: recipe_schemes(),
        }
    }
}

pub const SWEEP_COLUMNS: [&str; 7] = [
    "scheme",
    "parameter",
    "value",
    "mean_sum_rate",
    "min_sum_rate",
    "max_sum_rate",
    "n_seeds",
];

/// Mean sum-rate of every scheme at every swept value over `seeds` seeds
/// starting at `cfg.seed`. Rows are ordered by scheme, then value.
pub fn cmd_sweep(cfg: &ScenarioConfig, spec: &SweepSpec, seeds: usize) -> Result<Table, CliError> {
    spec.validate()?;
    if seeds == 0 {
        return Err(CliError::Config("at least one seed is required".into()));
    }
    let mut point_cfgs = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let mut c = cfg.clone();
        spec.parameter.apply(&mut c, value)?;
        c.validate()?;
        point_cfgs.push(c);
    }

    let tasks: Vec<(usize, usize, u64)> = (0..spec.schemes.len())
        .flat_map(|s| (0..spec.values.len()).flat_map(move |v| (0..seeds as u64).map(move |k| (s, v, k))))
        .collect();
    let rates: Vec<f64> = tasks
        .par_iter()
        .map(|&(s, v, k)| run_scheme(&point_cfgs[v], spec.schemes[s], cfg.seed + k).map(|r| r.sum_rate))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(&SWEEP_COLUMNS);
    for (chunk, (s, v)) in rates
        .chunks(seeds)
        .zip((0..spec.schemes.len()).flat_map(|s| (0..spec.values.len()).map(move |v| (s, v))))
    {
        let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
        let min = chunk.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = chunk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        table.push(vec![
            spec.schemes[s].label(),
            spec.parameter.name().to_string(),
            float(spec.values[v]),
            float(mean),
            float(min),
            float(max),
            seeds.to_string(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.array.n_antennas = 33;
        cfg.array.n_subarrays = 3;
        RunScale {
            swarm_size: 4,
            iterations: 2,
            seeds: 1,
        }
        .apply(&mut cfg);
        cfg
    }

    #[test]
    fn empty_scheme_list_is_a_config_error() {
        let spec = SweepSpec {
            parameter: SweptParameter::TxPower,
            values: vec![10.0],
            schemes: vec![],
        };
        assert!(matches!(cmd_sweep(&tiny(), &spec, 1), Err(CliError::Config(_))));
    }

    #[test]
    fn analysis_parameters_are_rejected() {
        let spec = SweepSpec {
            parameter: SweptParameter::Angle,
            values: vec![1.0],
            schemes: recipe_schemes(),
        };
        assert!(cmd_sweep(&tiny(), &spec, 1).is_err());
    }

    #[test]
    fn sweep_rows_are_ordered() {
        let mut spec = SweepRecipe::Fig9.spec();
        spec.values = vec![1.0, 2.0];
        spec.schemes = vec![
            SchemeChoice::parse("fa_zf").unwrap(),
            SchemeChoice::parse("ra_epa").unwrap(),
        ];
        let t = cmd_sweep(&tiny(), &spec, 2).unwrap();
        let labels: Vec<&str> = t.rows.iter().map(|r| r[0].as_str()).collect();
        assert_eq!(labels, ["fa_zf", "fa_zf", "ra_epa", "ra_epa"]);
    }

    #[test]
    fn optimize_table_has_trace_and_summary() {
        let (report, t) = cmd_optimize(&tiny(), SchemeChoice::parse("proposed").unwrap(), 3).unwrap();
        assert_eq!(t.rows.len(), report.sum_rate_trace.len() + 1);
        assert_eq!(t.rows.last().unwrap()[0], "summary");
    }
}
