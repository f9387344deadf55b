//! Outer alternating loop: optimize the surface phases for the current
//! powers, gate on feasibility, then re-optimize the powers for the new
//! phases, until the objective stabilizes.
//!
//! The phase step never changes the achieved rates (zero forcing makes the
//! per-user SINR depend on the powers alone); it lowers the BS power the
//! current allocation requires, which enlarges the feasible power region
//! for the next allocation step. That is why the objective sequence is
//! non-decreasing: the previous allocation stays feasible after every
//! phase step.

use crate::model::{bs_transmit_power, energy_efficiency, spectral_efficiency, total_power};
use crate::phase_gradient::optimize_phases_gradient;
use crate::phase_sfp::optimize_phases_sfp;
use crate::power::{dinkelbach_power, sum_rate_power, PowerFeasibleSet};
use crate::types::{
    ChannelRealization, PhaseProfile, PowerAllocation, Result, SolveError, SolveOutcome,
    SystemConfig,
};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMethod {
    /// Polak-Ribiere-Polyak conjugate gradient.
    Gradient,
    /// Sequential fractional programming (majorization-minimization).
    Sfp,
}

impl PhaseMethod {
    pub fn id(self) -> &'static str {
        match self {
            PhaseMethod::Gradient => "gradient",
            PhaseMethod::Sfp => "sfp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Bits per Joule.
    EnergyEfficiency,
    /// Sum rate; obtained by dropping the amplifier term from the
    /// power-allocation denominator.
    SumRate,
}

impl Objective {
    pub fn id(self) -> &'static str {
        match self {
            Objective::EnergyEfficiency => "ee",
            Objective::SumRate => "se",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QosPolicy {
    /// Return `feasible = false` with the best iterate found.
    Strict,
    /// Rerun the whole solve with the rate floors removed and flag the
    /// outcome as relaxed.
    RelaxOnInfeasible,
}

#[derive(Debug, Clone)]
pub struct SolverSpec {
    pub phase_method: PhaseMethod,
    pub objective: Objective,
    /// Outer stopping tolerance; also the inner phase-loop tolerance on
    /// the squared reflection-matrix change.
    pub epsilon: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    pub qos_policy: QosPolicy,
    /// Stop on the squared absolute objective change instead of the
    /// default relative change. The relative criterion copes better with
    /// objectives that span orders of magnitude across power sweeps.
    pub absolute_stop: bool,
}

impl SolverSpec {
    pub fn new(phase_method: PhaseMethod, objective: Objective) -> Self {
        SolverSpec {
            phase_method,
            objective,
            epsilon: 1e-3,
            max_outer_iters: 50,
            max_inner_iters: 500,
            qos_policy: QosPolicy::RelaxOnInfeasible,
            absolute_stop: false,
        }
    }

    pub fn id(&self) -> String {
        format!("{}-{}", self.phase_method.id(), self.objective.id())
    }
}

/// Per-user rate in the genie benchmark of mutually orthogonal channels
/// and a uniformly split budget: `log2(1 + P_max / (K sigma2))`. QoS
/// sweeps set the floors to a fraction of this rate.
pub fn genie_rate(config: &SystemConfig) -> f64 {
    (1.0 + config.p_max / (config.k_users as f64 * config.sigma2)).log2()
}

/// Maximize the configured objective over phases and powers.
pub fn solve(
    ch: &ChannelRealization,
    config: &SystemConfig,
    spec: &SolverSpec,
) -> Result<SolveOutcome> {
    config.validate()?;
    if !ch.matches(config) {
        return Err(SolveError::InvalidConfig(
            "channel dimensions do not match the configuration".into(),
        ));
    }
    solve_inner(ch, config, spec, false)
}

/// EE maximization entry point.
pub fn maximize_ee(
    ch: &ChannelRealization,
    config: &SystemConfig,
    spec: &SolverSpec,
) -> Result<SolveOutcome> {
    let spec = SolverSpec {
        objective: Objective::EnergyEfficiency,
        ..spec.clone()
    };
    solve(ch, config, &spec)
}

/// Sum-rate maximization entry point.
pub fn maximize_se(
    ch: &ChannelRealization,
    config: &SystemConfig,
    spec: &SolverSpec,
) -> Result<SolveOutcome> {
    let spec = SolverSpec {
        objective: Objective::SumRate,
        ..spec.clone()
    };
    solve(ch, config, &spec)
}

fn solve_inner(
    ch: &ChannelRealization,
    config: &SystemConfig,
    spec: &SolverSpec,
    relaxed: bool,
) -> Result<SolveOutcome> {
    let k = config.k_users;
    let mut theta = PhaseProfile::uniform(config.n_elements, FRAC_PI_2);
    let mut powers = PowerAllocation::uniform(k, config.p_max);

    let mut trace: Vec<f64> = Vec::new();
    let mut best: Option<(f64, PhaseProfile, PowerAllocation)> = None;
    let mut converged = false;
    let mut outer = 0;

    while outer < spec.max_outer_iters {
        outer += 1;

        // Phase step: shrink the BS power required by the current powers.
        // Zero entries are lifted to 1e-12 of the largest power so the
        // row-scaled factorization stays defined and well conditioned; the
        // objective shift is far below solver tolerances.
        let p_top = powers
            .as_slice()
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max)
            .max(1e-30 * config.p_max);
        let phase_powers = PowerAllocation::new(
            powers
                .as_slice()
                .iter()
                .map(|&p| p.max(1e-12 * p_top))
                .collect(),
        );
        let opt = match spec.phase_method {
            PhaseMethod::Gradient => optimize_phases_gradient(
                &theta,
                &phase_powers,
                ch,
                spec.epsilon,
                spec.max_inner_iters,
            )?,
            PhaseMethod::Sfp => optimize_phases_sfp(
                &theta,
                &phase_powers,
                ch,
                spec.epsilon,
                spec.max_inner_iters,
            )?,
        };
        theta = opt.phases;

        // Feasibility gate: the floors must fit the BS budget under the
        // new phases before powers can be reallocated.
        let set = PowerFeasibleSet::from_channel(ch, &theta, config)?;
        if !set.is_feasible() {
            return match spec.qos_policy {
                QosPolicy::Strict => Ok(build_outcome(
                    ch, config, theta, powers, outer, false, relaxed, false, trace,
                )),
                QosPolicy::RelaxOnInfeasible => {
                    let mut cfg = config.clone();
                    cfg.r_min = vec![0.0; k];
                    let mut out = solve_inner(ch, &cfg, spec, true)?;
                    out.qos_relaxed = true;
                    Ok(out)
                }
            };
        }

        // Power step: globally optimal allocation for the new phases.
        powers = match spec.objective {
            Objective::EnergyEfficiency => dinkelbach_power(&set, config, spec.epsilon)?.0,
            Objective::SumRate => sum_rate_power(&set, config)?,
        };

        let objective = match spec.objective {
            Objective::EnergyEfficiency => energy_efficiency(&powers, config),
            Objective::SumRate => spectral_efficiency(&powers, config.sigma2),
        };
        trace.push(objective);
        match &mut best {
            Some((b, bt, bp)) if objective > *b => {
                *b = objective;
                *bt = theta.clone();
                *bp = powers.clone();
            }
            None => best = Some((objective, theta.clone(), powers.clone())),
            _ => {}
        }

        if trace.len() >= 2 {
            let prev = trace[trace.len() - 2];
            let stop = if spec.absolute_stop {
                (objective - prev).powi(2) < spec.epsilon
            } else {
                (objective - prev).abs() / prev.abs().max(1.0) < spec.epsilon
            };
            if stop {
                converged = true;
                break;
            }
        }
    }

    let (_, theta, powers) = best.expect("at least one outer iteration ran");
    Ok(build_outcome(
        ch, config, theta, powers, outer, true, relaxed, converged, trace,
    ))
}

#[allow(clippy::too_many_arguments)]
fn build_outcome(
    ch: &ChannelRealization,
    config: &SystemConfig,
    phases: PhaseProfile,
    powers: PowerAllocation,
    outer_iterations: usize,
    feasible: bool,
    qos_relaxed: bool,
    converged: bool,
    objective_trace: Vec<f64>,
) -> SolveOutcome {
    let se = spectral_efficiency(&powers, config.sigma2);
    let total = total_power(&powers, config);
    let bs_tx = bs_transmit_power(&powers, ch, &phases).unwrap_or(f64::NAN);
    SolveOutcome {
        phases,
        powers,
        se,
        ee: config.bandwidth * se / total,
        total_power: total,
        bs_tx_power: bs_tx,
        outer_iterations,
        feasible,
        qos_relaxed,
        converged,
        objective_trace,
    }
}
