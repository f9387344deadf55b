//! Structured-text configuration: scenario files and experiment plans.
//!
//! Scenario files are TOML tables whose keys mirror [`SystemConfig`] field
//! names. Power and bandwidth entries accept either plain numbers (watts /
//! Hz) or strings with a unit suffix (`"20 dBW"`, `"10 dBm"`, `"5 mW"`,
//! `"180 kHz"`); conversion happens once at parse time. Missing fields
//! fall back to the desk-scale defaults, except the noise power, which
//! defaults to the thermal floor over the configured bandwidth.

use crate::driver::{Objective, PhaseMethod, SolverSpec};
use crate::experiment::{ExperimentPlan, SolverChoice, Sweep};
use crate::oracle::GridSpec;
use crate::types::{Rect, Result, SolveError, SystemConfig};
use crate::units;
use serde::Deserialize;
use std::path::Path;

/// A number with an optional unit suffix.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

impl Quantity {
    /// Interpret as a power in watts. Accepted suffixes: `W`, `mW`, `uW`,
    /// `dBW`, `dBm`. A bare number is watts.
    pub fn as_watts(&self) -> Result<f64> {
        match self {
            Quantity::Number(x) => Ok(*x),
            Quantity::Text(s) => parse_suffixed(
                s,
                &[
                    ("dbm", &|x| units::dbm_to_watts(x)),
                    ("dbw", &|x| units::dbw_to_watts(x)),
                    ("mw", &|x| x * 1e-3),
                    ("uw", &|x| x * 1e-6),
                    ("kw", &|x| x * 1e3),
                    ("w", &|x| x),
                ],
            ),
        }
    }

    /// Interpret as a frequency in Hz. Accepted suffixes: `Hz`, `kHz`,
    /// `MHz`, `GHz`. A bare number is Hz.
    pub fn as_hz(&self) -> Result<f64> {
        match self {
            Quantity::Number(x) => Ok(*x),
            Quantity::Text(s) => parse_suffixed(
                s,
                &[
                    ("khz", &|x| x * 1e3),
                    ("mhz", &|x| x * 1e6),
                    ("ghz", &|x| x * 1e9),
                    ("hz", &|x| x),
                ],
            ),
        }
    }
}

type Conv<'a> = &'a dyn Fn(f64) -> f64;

fn parse_suffixed(s: &str, table: &[(&str, Conv)]) -> Result<f64> {
    let compact = s.trim().to_lowercase().replace(' ', "");
    for (suffix, conv) in table {
        if let Some(num) = compact.strip_suffix(suffix) {
            let x: f64 = num
                .parse()
                .map_err(|_| SolveError::Parse(format!("bad number in quantity '{s}'")))?;
            return Ok(conv(x));
        }
    }
    Err(SolveError::Parse(format!(
        "quantity '{s}' has no recognized unit suffix"
    )))
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub m_antennas: Option<usize>,
    pub k_users: Option<usize>,
    pub n_elements: Option<usize>,
    pub p_max: Option<Quantity>,
    pub sigma2: Option<Quantity>,
    pub xi: Option<f64>,
    pub p_bs: Option<Quantity>,
    pub p_ue: Option<Quantity>,
    pub p_element: Option<Quantity>,
    pub phase_bits: Option<u32>,
    pub bandwidth: Option<Quantity>,
    /// Scalar (applied to every user) or one entry per user, bits/s/Hz.
    pub r_min: Option<RMin>,
    pub bs_pos: Option<[f64; 2]>,
    pub ris_pos: Option<[f64; 2]>,
    /// `[x_min, x_max, y_min, y_max]`, meters.
    pub user_region: Option<[f64; 4]>,
    pub pathloss_ref: Option<f64>,
    pub pathloss_exp: Option<f64>,
    pub epsilon: Option<f64>,
    pub allow_general_dims: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RMin {
    Scalar(f64),
    PerUser(Vec<f64>),
}

impl ScenarioFile {
    pub fn into_config(self) -> Result<SystemConfig> {
        let mut c = SystemConfig::desk_default();
        if let Some(v) = self.m_antennas {
            c.m_antennas = v;
        }
        if let Some(v) = self.k_users {
            c.k_users = v;
        }
        if let Some(v) = self.n_elements {
            c.n_elements = v;
        }
        if let Some(v) = &self.p_max {
            c.p_max = v.as_watts()?;
        }
        if let Some(v) = self.xi {
            c.xi = v;
        }
        if let Some(v) = &self.p_bs {
            c.p_bs = v.as_watts()?;
        }
        if let Some(v) = &self.p_ue {
            c.p_ue = v.as_watts()?;
        }
        if let Some(v) = &self.p_element {
            c.p_element = v.as_watts()?;
        }
        if let Some(v) = self.phase_bits {
            c.phase_bits = v;
        }
        if let Some(v) = &self.bandwidth {
            c.bandwidth = v.as_hz()?;
        }
        // noise defaults to the thermal floor over the (possibly new) bandwidth
        c.sigma2 = match &self.sigma2 {
            Some(v) => v.as_watts()?,
            None => units::thermal_noise_watts(c.bandwidth),
        };
        c.r_min = match self.r_min {
            Some(RMin::Scalar(r)) => vec![r; c.k_users],
            Some(RMin::PerUser(v)) => v,
            None => vec![0.0; c.k_users],
        };
        if let Some(v) = self.bs_pos {
            c.bs_pos = v;
        }
        if let Some(v) = self.ris_pos {
            c.ris_pos = v;
        }
        if let Some([x0, x1, y0, y1]) = self.user_region {
            c.user_region = Rect::new(x0, x1, y0, y1);
        }
        if let Some(v) = self.pathloss_ref {
            c.pathloss_ref = v;
        }
        if let Some(v) = self.pathloss_exp {
            c.pathloss_exp = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.allow_general_dims {
            c.allow_general_dims = v;
        }
        c.validate()?;
        Ok(c)
    }
}

pub fn load_scenario(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<SystemConfig> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| SolveError::Parse(e.to_string()))?;
    file.into_config()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    #[serde(default)]
    pub scenario: ScenarioFile,
    pub sweep: SweepFile,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub solvers: Vec<String>,
    pub output: Option<String>,
    #[serde(default)]
    pub workers: usize,
    /// For element-count sweeps: keep K equal to N at every sweep point.
    #[serde(default = "default_true")]
    pub tie_k_to_n: bool,
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

fn default_trials() -> usize {
    100
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    /// One of `pmax`, `n_elements`, `qos_fraction`, `snr`.
    pub kind: String,
    /// `pmax` values must carry explicit unit suffixes (or be watts);
    /// `snr` values are dB; the others are plain numbers.
    pub values: Vec<Quantity>,
}

impl PlanFile {
    pub fn into_plan(self) -> Result<ExperimentPlan> {
        let scenario = self.scenario.into_config()?;
        let sweep = match self.sweep.kind.as_str() {
            "pmax" => Sweep::PMax(
                self.sweep
                    .values
                    .iter()
                    .map(|q| q.as_watts())
                    .collect::<Result<_>>()?,
            ),
            "n_elements" => Sweep::Elements(
                self.sweep
                    .values
                    .iter()
                    .map(|q| match q {
                        Quantity::Number(x) if *x >= 1.0 && x.fract() == 0.0 => Ok(*x as usize),
                        _ => Err(SolveError::Parse(
                            "n_elements values must be integers".into(),
                        )),
                    })
                    .collect::<Result<_>>()?,
            ),
            "qos_fraction" => Sweep::QosFraction(
                self.sweep
                    .values
                    .iter()
                    .map(|q| match q {
                        Quantity::Number(x) => Ok(*x),
                        _ => Err(SolveError::Parse(
                            "qos_fraction values are plain numbers".into(),
                        )),
                    })
                    .collect::<Result<_>>()?,
            ),
            "snr" => Sweep::SnrDb(
                self.sweep
                    .values
                    .iter()
                    .map(|q| match q {
                        Quantity::Number(x) => Ok(*x),
                        _ => Err(SolveError::Parse("snr values are plain dB numbers".into())),
                    })
                    .collect::<Result<_>>()?,
            ),
            other => {
                return Err(SolveError::Parse(format!(
                    "unknown sweep kind '{other}' (expected pmax | n_elements | qos_fraction | snr)"
                )))
            }
        };
        let solvers = self
            .solvers
            .iter()
            .map(|s| solver_from_id(s))
            .collect::<Result<Vec<_>>>()?;
        if self.trials == 0 {
            return Err(SolveError::Parse("trials must be at least 1".into()));
        }
        Ok(ExperimentPlan {
            scenario,
            sweep,
            trials: self.trials,
            base_seed: self.base_seed,
            solvers,
            output_prefix: self.output,
            workers: self.workers,
            tie_k_to_n: self.tie_k_to_n,
            record_timing: self.record_timing,
        })
    }
}

/// Solver ids: `gradient-ee`, `sfp-ee`, `gradient-se`, `sfp-se`, `relay`,
/// `oracle-ee`, `oracle-se`.
pub fn solver_from_id(id: &str) -> Result<SolverChoice> {
    let choice = match id {
        "gradient-ee" => SolverChoice::Ris(SolverSpec::new(
            PhaseMethod::Gradient,
            Objective::EnergyEfficiency,
        )),
        "sfp-ee" => SolverChoice::Ris(SolverSpec::new(
            PhaseMethod::Sfp,
            Objective::EnergyEfficiency,
        )),
        "gradient-se" => {
            SolverChoice::Ris(SolverSpec::new(PhaseMethod::Gradient, Objective::SumRate))
        }
        "sfp-se" => SolverChoice::Ris(SolverSpec::new(PhaseMethod::Sfp, Objective::SumRate)),
        "relay" => SolverChoice::Relay,
        "oracle-ee" => SolverChoice::Oracle(Objective::EnergyEfficiency, oracle_grid_default()),
        "oracle-se" => SolverChoice::Oracle(Objective::SumRate, oracle_grid_default()),
        other => return Err(SolveError::Parse(format!("unknown solver id '{other}'"))),
    };
    Ok(choice)
}

fn oracle_grid_default() -> GridSpec {
    GridSpec {
        points_per_angle: 64,
        points_per_power: 16,
        max_dim: 3,
        budget: 1e8,
    }
}

pub fn load_plan(path: &Path) -> Result<ExperimentPlan> {
    let text = std::fs::read_to_string(path)?;
    parse_plan(&text)
}

pub fn parse_plan(text: &str) -> Result<ExperimentPlan> {
    let file: PlanFile = toml::from_str(text).map_err(|e| SolveError::Parse(e.to_string()))?;
    file.into_plan()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantities_convert_units() {
        assert!((Quantity::Text("20 dBW".into()).as_watts().unwrap() - 100.0).abs() < 1e-9);
        assert!((Quantity::Text("10dBm".into()).as_watts().unwrap() - 0.01).abs() < 1e-15);
        assert!((Quantity::Text("5 mW".into()).as_watts().unwrap() - 5e-3).abs() < 1e-15);
        assert!((Quantity::Number(2.5).as_watts().unwrap() - 2.5).abs() < 1e-15);
        assert!((Quantity::Text("180 kHz".into()).as_hz().unwrap() - 180e3).abs() < 1e-9);
        assert!(Quantity::Text("5 parsec".into()).as_watts().is_err());
    }

    #[test]
    fn scenario_defaults_and_overrides() {
        let cfg = parse_scenario(
            r#"
            m_antennas = 16
            k_users = 8
            n_elements = 8
            p_max = "26 dBm"
            r_min = 0.5
            "#,
        )
        .unwrap();
        assert_eq!(cfg.m_antennas, 16);
        assert_eq!(cfg.k_users, 8);
        assert!((cfg.p_max - crate::units::dbm_to_watts(26.0)).abs() < 1e-12);
        assert_eq!(cfg.r_min, vec![0.5; 8]);
        // untouched defaults survive
        assert!((cfg.xi - 1.2).abs() < 1e-12);
    }

    #[test]
    fn sigma2_follows_bandwidth_unless_pinned() {
        let a = parse_scenario("bandwidth = \"360 kHz\"").unwrap();
        assert!((a.sigma2 - crate::units::thermal_noise_watts(360e3)).abs() / a.sigma2 < 1e-12);
        let b = parse_scenario("sigma2 = \"-100 dBm\"").unwrap();
        assert!((b.sigma2 - crate::units::dbm_to_watts(-100.0)).abs() / b.sigma2 < 1e-12);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(parse_scenario("p_maax = 3.0").is_err());
    }

    #[test]
    fn plan_round_trip() {
        let plan = parse_plan(
            r#"
            trials = 7
            base_seed = 3
            solvers = ["gradient-ee", "sfp-se", "relay"]
            output = "out/run"

            [scenario]
            m_antennas = 4
            k_users = 2
            n_elements = 2

            [sweep]
            kind = "pmax"
            values = ["0 dBm", "10 dBm", 1.0]
            "#,
        )
        .unwrap();
        assert_eq!(plan.trials, 7);
        assert_eq!(plan.base_seed, 3);
        assert_eq!(plan.solvers.len(), 3);
        match &plan.sweep {
            Sweep::PMax(v) => {
                assert!((v[0] - 1e-3).abs() < 1e-15);
                assert!((v[1] - 1e-2).abs() < 1e-15);
                assert!((v[2] - 1.0).abs() < 1e-15);
            }
            other => panic!("wrong sweep {other:?}"),
        }
    }

    #[test]
    fn bad_solver_and_sweep_ids_fail() {
        assert!(solver_from_id("newton-ee").is_err());
        let bad = parse_plan(
            r#"
            solvers = ["sfp-ee"]
            [sweep]
            kind = "power"
            values = [1.0]
            "#,
        );
        assert!(bad.is_err());
    }
}
