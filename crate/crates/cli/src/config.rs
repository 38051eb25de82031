//! TOML scenario configuration.
//!
//! Units live in the key names (`carrier_ghz`, `tx_power_dbm`, `range_deg`);
//! conversion to SI happens in [`ScenarioConfig::build`].

use serde::{Deserialize, Serialize};

use ramix_core::geometry::{AngleRange, ArrayConfig, DistanceModel, SPEED_OF_LIGHT};
use ramix_core::optimizer::{BenchmarkConfig, InnerSolverConfig, PenaltyMode, PsoConfig, ScaConfig, ScaInit, Scheme};
use ramix_core::scenario::{
    dbm_to_watts, free_space_gain, sample_scenario, FarUser, NearUser, PowerSettings, SamplingRegion, Scenario,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub array: ArraySection,
    pub users: UsersSection,
    pub rotation: RotationSection,
    pub powers: PowersSection,
    pub optimizer: OptimizerSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    pub n_antennas: usize,
    pub n_subarrays: usize,
    pub carrier_ghz: f64,
    /// Element spacing; half a wavelength when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_mm: Option<f64>,
    /// `"fresnel"` or `"exact"` near-field distance model.
    pub distance_model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UsersSection {
    pub n_near: usize,
    pub n_far: usize,
    /// Near-user distances as fractions of the Rayleigh distance.
    pub near_distance_frac: [f64; 2],
    pub angle_range_deg: [f64; 2],
    pub far_distance_frac: f64,
    pub paths_per_user: usize,
    pub nlos_scale: f64,
    /// Explicit line-of-sight users; when present they replace sampling.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub near: Vec<ExplicitNear>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub far: Vec<ExplicitFar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitNear {
    pub theta_deg: f64,
    pub range_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitFar {
    pub psi_deg: f64,
    pub distance_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationSection {
    pub range_deg: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowersSection {
    pub tx_power_dbm: f64,
    pub far_power_dbm: f64,
    pub noise_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    /// `fa_zf`, `fa_opa`, `ra_epa`, `proposed`, or `proposed_q<Q>`.
    pub scheme: String,
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub penalty_weight: f64,
    /// `"auto"`, `"on"` or `"off"`.
    pub penalty: String,
    pub sca_max_iters: usize,
    pub sca_tol: f64,
    pub subsolver_tol: f64,
    pub subsolver_max_iters: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            array: ArraySection::default(),
            users: UsersSection::default(),
            rotation: RotationSection::default(),
            powers: PowersSection::default(),
            optimizer: OptimizerSection::default(),
        }
    }
}

impl Default for ArraySection {
    fn default() -> Self {
        Self {
            n_antennas: 129,
            n_subarrays: 5,
            carrier_ghz: 24.0,
            spacing_mm: None,
            distance_model: "fresnel".into(),
        }
    }
}

impl Default for UsersSection {
    fn default() -> Self {
        let region = SamplingRegion::default();
        Self {
            n_near: 3,
            n_far: 2,
            near_distance_frac: [region.near_distance_frac.0, region.near_distance_frac.1],
            angle_range_deg: [60.0, 120.0],
            far_distance_frac: region.far_distance_frac,
            paths_per_user: region.near_paths,
            nlos_scale: region.nlos_scale,
            near: Vec::new(),
            far: Vec::new(),
        }
    }
}

impl Default for RotationSection {
    fn default() -> Self {
        Self {
            range_deg: [-30.0, 30.0],
        }
    }
}

impl Default for PowersSection {
    fn default() -> Self {
        Self {
            tx_power_dbm: 30.0,
            far_power_dbm: 30.0,
            noise_dbm: -70.0,
        }
    }
}

impl Default for OptimizerSection {
    fn default() -> Self {
        let pso = PsoConfig::default();
        let sca = ScaConfig::default();
        Self {
            scheme: "proposed".into(),
            swarm_size: 100,
            iterations: 100,
            inertia: pso.inertia,
            cognitive: pso.cognitive,
            social: pso.social,
            penalty_weight: pso.penalty_weight,
            penalty: "auto".into(),
            sca_max_iters: sca.max_iters,
            sca_tol: sca.tol,
            subsolver_tol: sca.inner.tol,
            subsolver_max_iters: sca.inner.max_iters,
        }
    }
}

/// A scheme plus an optional subarray-count override (`proposed_q1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeChoice {
    pub scheme: Scheme,
    pub subarrays: Option<usize>,
}

impl SchemeChoice {
    pub fn parse(label: &str) -> Result<Self, CliError> {
        if let Some(q) = label.strip_prefix("proposed_q") {
            let q: usize = q
                .parse()
                .map_err(|_| CliError::Config(format!("unknown scheme '{label}'")))?;
            return Ok(Self {
                scheme: Scheme::Proposed,
                subarrays: Some(q),
            });
        }
        Scheme::from_label(label)
            .map(|scheme| Self {
                scheme,
                subarrays: None,
            })
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown scheme '{label}' (expected fa_zf, fa_opa, ra_epa, proposed or proposed_q<Q>)"
                ))
            })
    }

    pub fn label(&self) -> String {
        match self.subarrays {
            Some(q) => format!("{}_q{q}", self.scheme.label()),
            None => self.scheme.label().to_string(),
        }
    }
}

fn field<T>(name: &str, result: Result<T, impl std::fmt::Display>) -> Result<T, CliError> {
    result.map_err(|e| CliError::Config(format!("{name}: {e}")))
}

fn check(cond: bool, name: &str, msg: impl std::fmt::Display) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name}: {msg}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// Semantic checks with the offending key in every message.
    pub fn validate(&self) -> Result<(), CliError> {
        self.array_config(None)?;
        self.distance_model()?;
        let u = &self.users;
        check(
            u.near_distance_frac[0] > 0.0 && u.near_distance_frac[0] <= u.near_distance_frac[1],
            "users.near_distance_frac",
            format!("need 0 < min <= max, got {:?}", u.near_distance_frac),
        )?;
        check(
            u.near_distance_frac[1] < 1.0,
            "users.near_distance_frac",
            "near users must lie inside the Rayleigh distance",
        )?;
        check(
            u.angle_range_deg[0] > 0.0 && u.angle_range_deg[0] <= u.angle_range_deg[1] && u.angle_range_deg[1] < 180.0,
            "users.angle_range_deg",
            format!("need 0 < min <= max < 180, got {:?}", u.angle_range_deg),
        )?;
        check(
            u.far_distance_frac >= 1.0,
            "users.far_distance_frac",
            "far users must lie beyond the Rayleigh distance",
        )?;
        check(u.nlos_scale >= 0.0, "users.nlos_scale", "must be non-negative")?;
        check(
            u.n_near > 0 || !u.near.is_empty(),
            "users.n_near",
            "at least one near user is required",
        )?;
        for (i, n) in u.near.iter().enumerate() {
            check(
                n.theta_deg > 0.0 && n.theta_deg < 180.0,
                &format!("users.near[{i}].theta_deg"),
                "must lie in (0, 180)",
            )?;
            check(n.range_m > 0.0, &format!("users.near[{i}].range_m"), "must be positive")?;
        }
        for (i, f) in u.far.iter().enumerate() {
            check(
                f.psi_deg > 0.0 && f.psi_deg < 180.0,
                &format!("users.far[{i}].psi_deg"),
                "must lie in (0, 180)",
            )?;
            check(
                f.distance_m > 0.0,
                &format!("users.far[{i}].distance_m"),
                "must be positive",
            )?;
        }
        self.rotation_range()?;
        for (name, v) in [
            ("powers.tx_power_dbm", self.powers.tx_power_dbm),
            ("powers.far_power_dbm", self.powers.far_power_dbm),
            ("powers.noise_dbm", self.powers.noise_dbm),
        ] {
            check(v.is_finite(), name, "must be finite")?;
        }
        SchemeChoice::parse(&self.optimizer.scheme).map_err(|e| CliError::Config(format!("optimizer.scheme: {e}")))?;
        self.penalty_mode()?;
        let o = &self.optimizer;
        check(o.swarm_size > 0, "optimizer.swarm_size", "must be positive")?;
        check(o.sca_max_iters > 0, "optimizer.sca_max_iters", "must be positive")?;
        check(
            o.subsolver_max_iters > 0,
            "optimizer.subsolver_max_iters",
            "must be positive",
        )?;
        check(o.sca_tol > 0.0, "optimizer.sca_tol", "must be positive")?;
        check(o.subsolver_tol > 0.0, "optimizer.subsolver_tol", "must be positive")?;
        for (name, v) in [
            ("optimizer.inertia", o.inertia),
            ("optimizer.cognitive", o.cognitive),
            ("optimizer.social", o.social),
            ("optimizer.penalty_weight", o.penalty_weight),
        ] {
            check(v >= 0.0 && v.is_finite(), name, "must be finite and non-negative")?;
        }
        Ok(())
    }

    /// The array, optionally with a different subarray count.
    pub fn array_config(&self, subarrays: Option<usize>) -> Result<ArrayConfig, CliError> {
        let a = &self.array;
        check(a.carrier_ghz > 0.0, "array.carrier_ghz", "must be positive")?;
        let carrier = a.carrier_ghz * 1e9;
        let spacing = match a.spacing_mm {
            Some(mm) => mm * 1e-3,
            None => SPEED_OF_LIGHT / carrier / 2.0,
        };
        field(
            "array",
            ArrayConfig::new(a.n_antennas, subarrays.unwrap_or(a.n_subarrays), carrier, spacing),
        )
    }

    pub fn distance_model(&self) -> Result<DistanceModel, CliError> {
        match self.array.distance_model.as_str() {
            "fresnel" => Ok(DistanceModel::Fresnel),
            "exact" => Ok(DistanceModel::Exact),
            other => Err(CliError::Config(format!(
                "array.distance_model: expected 'fresnel' or 'exact', got '{other}'"
            ))),
        }
    }

    pub fn rotation_range(&self) -> Result<AngleRange, CliError> {
        let [lo, hi] = self.rotation.range_deg;
        let range = field("rotation.range_deg", AngleRange::new(lo.to_radians(), hi.to_radians()))?;
        check(range.contains(0.0), "rotation.range_deg", "must contain 0")?;
        Ok(range)
    }

    pub fn penalty_mode(&self) -> Result<PenaltyMode, CliError> {
        match self.optimizer.penalty.as_str() {
            "auto" => Ok(PenaltyMode::Auto),
            "on" => Ok(PenaltyMode::On),
            "off" => Ok(PenaltyMode::Off),
            other => Err(CliError::Config(format!(
                "optimizer.penalty: expected 'auto', 'on' or 'off', got '{other}'"
            ))),
        }
    }

    pub fn power_settings(&self) -> PowerSettings {
        PowerSettings {
            tx_power_w: dbm_to_watts(self.powers.tx_power_dbm),
            far_power_w: dbm_to_watts(self.powers.far_power_dbm),
            noise_w: dbm_to_watts(self.powers.noise_dbm),
        }
    }

    pub fn sampling_region(&self) -> SamplingRegion {
        let u = &self.users;
        SamplingRegion {
            near_distance_frac: (u.near_distance_frac[0], u.near_distance_frac[1]),
            angle_rad: (u.angle_range_deg[0].to_radians(), u.angle_range_deg[1].to_radians()),
            far_distance_frac: u.far_distance_frac,
            near_paths: u.paths_per_user,
            far_paths: u.paths_per_user,
            nlos_scale: u.nlos_scale,
        }
    }

    /// Builds the scenario for `seed`, optionally overriding the subarray
    /// count. Users do not depend on the subarray count.
    pub fn build(&self, seed: u64, subarrays: Option<usize>) -> Result<Scenario, CliError> {
        let array = self.array_config(subarrays)?;
        let range = self.rotation_range()?;
        let powers = self.power_settings();
        let mut scenario = sample_scenario(
            array.clone(),
            &self.sampling_region(),
            self.users.n_near,
            self.users.n_far,
            powers,
            range,
            seed,
        );
        let lambda = array.wavelength();
        if !self.users.near.is_empty() {
            scenario.near = self
                .users
                .near
                .iter()
                .map(|u| {
                    let g = free_space_gain(lambda, u.range_m);
                    NearUser::los_only(u.theta_deg.to_radians(), u.range_m, g.into())
                })
                .collect();
        }
        if !self.users.far.is_empty() {
            scenario.far = self
                .users
                .far
                .iter()
                .map(|u| {
                    let g = free_space_gain(lambda, u.distance_m);
                    FarUser::los_only(u.psi_deg.to_radians(), u.distance_m, g.into(), powers.far_power_w)
                })
                .collect();
        }
        scenario
            .validate()
            .map_err(|e| CliError::Config(format!("users: {e}")))?;
        Ok(scenario)
    }

    pub fn benchmark_config(&self, seed: u64) -> Result<BenchmarkConfig, CliError> {
        let o = &self.optimizer;
        Ok(BenchmarkConfig {
            sca: ScaConfig {
                max_iters: o.sca_max_iters,
                tol: o.sca_tol,
                inner: InnerSolverConfig {
                    tol: o.subsolver_tol,
                    max_iters: o.subsolver_max_iters,
                },
                init: ScaInit::EqualPower,
            },
            pso: PsoConfig {
                swarm_size: o.swarm_size,
                iterations: o.iterations,
                inertia: o.inertia,
                cognitive: o.cognitive,
                social: o.social,
                penalty_weight: o.penalty_weight,
                penalty: self.penalty_mode()?,
                seed,
                ..PsoConfig::default()
            },
            model: self.distance_model()?,
        })
    }
}
