//! Brute-force reference optimizers. These provide ground truth for the
//! iterative solvers at tiny dimensions: an exhaustive phase grid for the
//! BS-power minimization and a joint phase/power grid for the rate and
//! efficiency objectives.

use crate::driver::Objective;
use crate::model::{total_power, zf_column_costs};
use crate::power::qos_floor;
use crate::quadratic::PhaseQuadratic;
use crate::types::{
    ChannelRealization, PhaseProfile, PowerAllocation, Result, SolveError, SolveOutcome,
    SystemConfig,
};
use rayon::prelude::*;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Angle samples per element, spanning [0, 2*pi). Doubling this count
    /// keeps every old sample, so refined grids are supersets.
    pub points_per_angle: usize,
    /// Power levels per user.
    pub points_per_power: usize,
    /// Refuse instances with more than this many phase or power dimensions.
    pub max_dim: usize,
    /// Upper bound on total objective evaluations.
    pub budget: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points_per_angle: 721,
            points_per_power: 24,
            max_dim: 3,
            budget: 1e8,
        }
    }
}

impl GridSpec {
    fn check(&self, evaluations: f64, dims: usize) -> Result<()> {
        if dims > self.max_dim {
            return Err(SolveError::BudgetExceeded {
                requested: f64::INFINITY,
                budget: self.budget,
            });
        }
        if evaluations > self.budget {
            return Err(SolveError::BudgetExceeded {
                requested: evaluations,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

fn decode_angles(mut index: u64, n: usize, points: usize) -> Vec<f64> {
    let step = TAU / points as f64;
    let mut theta = vec![0.0; n];
    for slot in theta.iter_mut() {
        *slot = (index % points as u64) as f64 * step;
        index /= points as u64;
    }
    theta
}

/// Exhaustive minimizer of the required BS power over the angle grid.
/// Ties resolve to the lowest linear grid index, so the result does not
/// depend on evaluation order.
pub fn phase_grid_min_f(
    powers: &PowerAllocation,
    ch: &ChannelRealization,
    grid: &GridSpec,
) -> Result<(PhaseProfile, f64)> {
    let n = ch.n_elements();
    let total = (grid.points_per_angle as f64).powi(n as i32);
    grid.check(total, n)?;
    let quad = PhaseQuadratic::new(ch, powers)?;
    let count = (grid.points_per_angle as u64).pow(n as u32);

    let best = (0..count)
        .into_par_iter()
        .map(|i| {
            let theta = decode_angles(i, n, grid.points_per_angle);
            let v = quad.value(&PhaseProfile::new(theta));
            (v, i)
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let theta = decode_angles(best.1, n, grid.points_per_angle);
    Ok((PhaseProfile::new(theta), best.0))
}

/// Per-user BS-power levels enumerated by the joint oracle. The sum-rate
/// objective peaks on the budget boundary with commensurate shares, so it
/// gets a linear grid. The efficiency objective can peak either on the
/// boundary (tight budgets) or orders of magnitude below it (saturation),
/// so it gets half linear shares and half logarithmic levels spanning six
/// decades, plus zero.
fn power_levels(objective: Objective, p_max: f64, points: usize) -> Vec<f64> {
    match objective {
        Objective::SumRate => (0..points)
            .map(|i| p_max * i as f64 / (points - 1) as f64)
            .collect(),
        Objective::EnergyEfficiency => {
            let linear = points / 2;
            let log = points - linear - 1;
            let mut levels = vec![0.0];
            for i in 1..=linear {
                levels.push(p_max * i as f64 / linear as f64);
            }
            let decades = 6.0;
            for i in 0..log {
                let frac = i as f64 / (log - 1).max(1) as f64;
                levels.push(p_max * 10f64.powf(-decades * (1.0 - frac)));
            }
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            levels.dedup();
            levels
        }
    }
}

fn for_each_combo(levels: &[f64], k: usize, cap: f64, mut f: impl FnMut(&[f64], f64)) {
    let mut idx = vec![0usize; k];
    let mut t = vec![0.0; k];
    loop {
        for (slot, &i) in t.iter_mut().zip(idx.iter()) {
            *slot = levels[i];
        }
        let sum: f64 = t.iter().sum();
        if sum <= cap * (1.0 + 1e-12) {
            f(&t, sum);
        }
        let mut pos = 0;
        loop {
            if pos == k {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < levels.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Exhaustive maximizer of the chosen objective over the product of the
/// angle grid and a per-user BS-power grid. The BS budget and the QoS
/// floors are enforced on every candidate; grid points whose effective
/// channel cannot be zero-forced are skipped.
///
/// The returned outcome carries `feasible = false` when no grid point was
/// admissible.
pub fn joint_grid_max(
    ch: &ChannelRealization,
    config: &SystemConfig,
    objective: Objective,
    grid: &GridSpec,
) -> Result<SolveOutcome> {
    let n = ch.n_elements();
    let k = ch.k_users();
    let levels = power_levels(objective, config.p_max, grid.points_per_power);

    let mut combos = 0usize;
    for_each_combo(&levels, k, config.p_max, |_, _| combos += 1);
    let angle_count = (grid.points_per_angle as u64).pow(n as u32);
    grid.check(angle_count as f64 * combos as f64, n.max(k))?;

    let floors: Vec<f64> = config
        .r_min
        .iter()
        .map(|&r| qos_floor(r, config.sigma2))
        .collect();
    let static_power = config.static_power();

    struct Best {
        value: f64,
        angle_idx: u64,
        powers: Vec<f64>,
        bs_power: f64,
    }

    let best = (0..angle_count)
        .into_par_iter()
        .fold(
            || None::<Best>,
            |mut acc, ai| {
                let theta = PhaseProfile::new(decode_angles(ai, n, grid.points_per_angle));
                let costs = match zf_column_costs(ch, &theta) {
                    Ok(c) => c,
                    Err(_) => return acc, // degenerate phase point
                };
                for_each_combo(&levels, k, config.p_max, |t, sum| {
                    // candidate powers: p_k = t_k / c_k (t is BS power spent per user)
                    let mut ok = true;
                    let mut se = 0.0;
                    let mut p_total = 0.0;
                    let mut p = vec![0.0; k];
                    for i in 0..k {
                        p[i] = t[i] / costs[i];
                        if p[i] < floors[i] {
                            ok = false;
                            break;
                        }
                        se += (1.0 + p[i] / config.sigma2).log2();
                        p_total += p[i];
                    }
                    if !ok {
                        return;
                    }
                    let value = match objective {
                        Objective::SumRate => se,
                        Objective::EnergyEfficiency => {
                            config.bandwidth * se / (config.xi * p_total + static_power)
                        }
                    };
                    let better = match &acc {
                        None => true,
                        Some(b) => value > b.value,
                    };
                    if better {
                        acc = Some(Best {
                            value,
                            angle_idx: ai,
                            powers: p.clone(),
                            bs_power: sum,
                        });
                    }
                });
                acc
            },
        )
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(a), Some(b)) => {
                    // lexicographically-first argmax among exact ties
                    if b.value > a.value || (b.value == a.value && b.angle_idx < a.angle_idx) {
                        Some(b)
                    } else {
                        Some(a)
                    }
                }
            },
        );

    let outcome = match best {
        Some(b) => {
            let phases = PhaseProfile::new(decode_angles(b.angle_idx, n, grid.points_per_angle));
            let powers = PowerAllocation::new(b.powers);
            let se: f64 = powers
                .as_slice()
                .iter()
                .map(|&p| (1.0 + p / config.sigma2).log2())
                .sum();
            let total = total_power(&powers, config);
            SolveOutcome {
                phases,
                powers,
                se,
                ee: config.bandwidth * se / total,
                total_power: total,
                bs_tx_power: b.bs_power,
                outer_iterations: 1,
                feasible: true,
                qos_relaxed: false,
                converged: true,
                objective_trace: vec![b.value],
            }
        }
        None => SolveOutcome {
            phases: PhaseProfile::uniform(n, 0.0),
            powers: PowerAllocation::zeros(k),
            se: 0.0,
            ee: 0.0,
            total_power: static_power,
            bs_tx_power: 0.0,
            outer_iterations: 1,
            feasible: false,
            qos_relaxed: false,
            converged: true,
            objective_trace: Vec::new(),
        },
    };
    Ok(outcome)
}
