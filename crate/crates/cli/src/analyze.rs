//! Uniform-rotation analysis recipes: interference curves against the
//! rotation angle and two-user rate curves against user position.

use std::f64::consts::PI;

use ramix_core::beamforming::{build_precoders, DigitalMode, LinkGains};
use ramix_core::channel::synthesize_channels;
use ramix_core::geometry::{AngleRange, ArrayConfig, DistanceModel, RotationState};
use ramix_core::interference::{
    optimal_rotation_same_angle_nf, optimal_rotation_same_angle_nn, report_nf, report_nn, InterferenceReport,
};
use ramix_core::scenario::{free_space_gain, NearUser, Scenario};

use crate::config::ScenarioConfig;
use crate::output::{float, Table};
use crate::CliError;

/// Rotation grid step, `0.001π`.
pub const PHI_STEP: f64 = 0.001 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyzeRecipe {
    /// Near–near interference against rotation for users sharing an angle.
    Fig2,
    /// Two-user sum-rate against the first user's angle, distinct ranges.
    Fig3,
    /// Two-user sum-rate against the first user's angle, equal ranges.
    Fig4,
    /// Two-user sum-rate against the first user's range.
    Fig5,
    /// Near–far interference against rotation for a shared angle.
    Fig6,
}

impl AnalyzeRecipe {
    pub const ALL: [AnalyzeRecipe; 5] = [
        AnalyzeRecipe::Fig2,
        AnalyzeRecipe::Fig3,
        AnalyzeRecipe::Fig4,
        AnalyzeRecipe::Fig5,
        AnalyzeRecipe::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalyzeRecipe::Fig2 => "fig2",
            AnalyzeRecipe::Fig3 => "fig3",
            AnalyzeRecipe::Fig4 => "fig4",
            AnalyzeRecipe::Fig5 => "fig5",
            AnalyzeRecipe::Fig6 => "fig6",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }
}

/// Angles `k·0.001π` inside `range`; always contains 0.
pub fn phi_grid(range: AngleRange) -> Vec<f64> {
    let lo = (range.min / PHI_STEP).ceil() as i64;
    let hi = (range.max / PHI_STEP).floor() as i64;
    (lo..=hi).map(|k| k as f64 * PHI_STEP).collect()
}

/// Shared-angle families used by the interference recipes, in units of π.
pub const THETA_FAMILY: [f64; 4] = [0.5, 0.55, 0.6, 0.65];

/// Near–near recipe distances as fractions of the Rayleigh distance.
pub const NN_RANGES: (f64, f64) = (0.03, 0.08);
/// Near user distance of the near–far recipe. At this range the closed-form
/// rotation rule is the grid argmin for every angle in the family.
pub const NF_RANGE: f64 = 0.1;

fn interference_row(theta: f64, phi: f64, report: &InterferenceReport, closed: f64) -> Vec<String> {
    let (b1, b2) = report.betas.map(|b| (b.beta1, b.beta2)).unwrap_or((f64::NAN, f64::NAN));
    vec![
        float(theta / PI),
        float(phi / PI),
        float(report.exact),
        float(report.fresnel_approx),
        float(report.exact.powi(2)),
        float(report.fresnel_approx.powi(2)),
        float(b1),
        float(b2),
        float(closed / PI),
    ]
}

const INTERFERENCE_COLUMNS: [&str; 9] = [
    "theta_pi",
    "phi_pi",
    "rho_exact",
    "rho_fresnel",
    "power_exact",
    "power_fresnel",
    "beta1",
    "beta2",
    "phi_closed_form_pi",
];

fn interference_table(array: &ArrayConfig, range: AngleRange, near_near: bool) -> Result<Table, CliError> {
    let z = array.rayleigh_distance();
    let mut table = Table::new(&INTERFERENCE_COLUMNS);
    let solver = |e: ramix_core::interference::InterferenceError| CliError::Solver(e.to_string());
    for &t in &THETA_FAMILY {
        let theta = t * PI;
        for phi in phi_grid(range) {
            let (report, closed) = if near_near {
                (
                    report_nn(array, phi, theta, NN_RANGES.0 * z, theta, NN_RANGES.1 * z).map_err(solver)?,
                    optimal_rotation_same_angle_nn(theta, range),
                )
            } else {
                (
                    report_nf(array, phi, theta, NF_RANGE * z, theta).map_err(solver)?,
                    optimal_rotation_same_angle_nf(theta, range),
                )
            };
            table.push(interference_row(theta, phi, &report, closed));
        }
    }
    Ok(table)
}

struct TwoUser<'a> {
    cfg: &'a ScenarioConfig,
    array: ArrayConfig,
    range: AngleRange,
    model: DistanceModel,
}

impl TwoUser<'_> {
    fn scenario(&self, users: [(f64, f64); 2]) -> Scenario {
        let lambda = self.array.wavelength();
        let powers = self.cfg.power_settings();
        Scenario {
            near: users
                .iter()
                .map(|&(theta, r)| NearUser::los_only(theta, r, free_space_gain(lambda, r).into()))
                .collect(),
            far: Vec::new(),
            tx_power_w: powers.tx_power_w,
            noise_w: powers.noise_w,
            rotation_ranges: vec![self.range; self.array.n_subarrays()],
            array: self.array.clone(),
        }
    }

    /// Equal-power sum-rate at uniform rotation `phi`.
    fn sum_rate(&self, scenario: &Scenario, phi: f64) -> Result<f64, CliError> {
        let solver = |e: String| CliError::Solver(e);
        let rot =
            RotationState::uniform(self.array.n_subarrays(), phi, self.range).map_err(|e| solver(e.to_string()))?;
        let channels = synthesize_channels(scenario, &rot, self.model).map_err(|e| solver(e.to_string()))?;
        let pre = build_precoders(&channels, DigitalMode::Identity).map_err(|e| solver(e.to_string()))?;
        let gains = LinkGains::new(&channels, &pre, scenario).map_err(|e| solver(e.to_string()))?;
        let p = scenario.tx_power_w / 2.0;
        Ok(gains.sum_rate(&[p, p]))
    }

    /// Fixed-array rate, best grid rotation and its rate.
    fn row(&self, users: [(f64, f64); 2]) -> Result<(f64, f64, f64), CliError> {
        let s = self.scenario(users);
        let fixed = self.sum_rate(&s, 0.0)?;
        let mut best = (0.0, fixed);
        for phi in phi_grid(self.range) {
            let rate = self.sum_rate(&s, phi)?;
            if rate > best.1 {
                best = (phi, rate);
            }
        }
        Ok((fixed, best.0, best.1))
    }
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Second user of the two-user rate recipes, at `0.6π`.
pub const SECOND_USER_THETA: f64 = 0.6 * PI;

pub fn cmd_analyze(cfg: &ScenarioConfig, recipe: AnalyzeRecipe) -> Result<Table, CliError> {
    let array = cfg.array_config(None)?;
    let range = cfg.rotation_range()?;
    let z = array.rayleigh_distance();
    match recipe {
        AnalyzeRecipe::Fig2 => interference_table(&array, range, true),
        AnalyzeRecipe::Fig6 => interference_table(&array, range, false),
        AnalyzeRecipe::Fig3 | AnalyzeRecipe::Fig4 | AnalyzeRecipe::Fig5 => {
            let two = TwoUser {
                cfg,
                array,
                range,
                model: cfg.distance_model()?,
            };
            let mut table = Table::new(&[
                "theta1_pi",
                "r1_frac",
                "theta2_pi",
                "r2_frac",
                "sum_rate_fixed",
                "phi_best_pi",
                "sum_rate_rotated",
            ]);
            let [lo, hi] = cfg.users.angle_range_deg;
            let cases: Vec<[(f64, f64); 2]> = match recipe {
                AnalyzeRecipe::Fig3 => steps(lo.to_radians(), hi.to_radians(), 0.01 * PI)
                    .into_iter()
                    .map(|t| [(t, 0.03 * z), (SECOND_USER_THETA, 0.08 * z)])
                    .collect(),
                AnalyzeRecipe::Fig4 => steps(lo.to_radians(), hi.to_radians(), 0.01 * PI)
                    .into_iter()
                    .map(|t| [(t, 0.05 * z), (SECOND_USER_THETA, 0.05 * z)])
                    .collect(),
                _ => steps(0.03, 0.2, 0.005)
                    .into_iter()
                    .map(|f| [(0.55 * PI, f * z), (SECOND_USER_THETA, 0.03 * z)])
                    .collect(),
            };
            for users in cases {
                let (fixed, phi, rotated) = two.row(users)?;
                table.push(vec![
                    float(users[0].0 / PI),
                    float(users[0].1 / z),
                    float(users[1].0 / PI),
                    float(users[1].1 / z),
                    float(fixed),
                    float(phi / PI),
                    float(rotated),
                ]);
            }
            Ok(table)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_zero_and_stays_in_range() {
        let g = phi_grid(AngleRange::sector());
        assert_eq!(g.len(), 333);
        assert!(g.contains(&0.0));
        assert!(g.iter().all(|p| AngleRange::sector().contains(*p)));
        assert_eq!(phi_grid(AngleRange::point(0.0)), vec![0.0]);
    }

    #[test]
    fn single_point_grid_is_the_fixed_array() {
        let mut cfg = ScenarioConfig::default();
        cfg.rotation.range_deg = [0.0, 0.0];
        let t = cmd_analyze(&cfg, AnalyzeRecipe::Fig2).unwrap();
        assert_eq!(t.rows.len(), THETA_FAMILY.len());
        let t = cmd_analyze(&cfg, AnalyzeRecipe::Fig5).unwrap();
        let fixed = t.column("sum_rate_fixed").unwrap();
        let rotated = t.column("sum_rate_rotated").unwrap();
        for row in &t.rows {
            assert_eq!(row[fixed], row[rotated]);
        }
    }

    #[test]
    fn rotation_never_hurts_the_two_user_rate() {
        let t = cmd_analyze(&ScenarioConfig::default(), AnalyzeRecipe::Fig4).unwrap();
        let fixed = t.column("sum_rate_fixed").unwrap();
        let rotated = t.column("sum_rate_rotated").unwrap();
        for row in &t.rows {
            let f: f64 = row[fixed].parse().unwrap();
            let r: f64 = row[rotated].parse().unwrap();
            assert!(r >= f);
        }
    }

    #[test]
    fn recipe_names() {
        for r in AnalyzeRecipe::ALL {
            assert_eq!(AnalyzeRecipe::parse(r.name()), Some(r));
        }
        assert_eq!(AnalyzeRecipe::parse("fig7"), None);
    }
}
