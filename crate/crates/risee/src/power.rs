//! Transmit-power allocation for fixed phases.
//!
//! The rate-over-power ratio is concave-over-affine in the powers, so
//! Dinkelbach's algorithm finds the global maximizer: iterate
//! `p* = argmax N(p) - lambda D(p)` and `lambda = N(p*) / D(p*)` until the
//! weights stabilize. Each parametric subproblem is solved in closed form
//! by waterfilling with bisection on the coupling multipliers.

use crate::model::zf_column_costs;
use crate::types::{
    ChannelRealization, PhaseProfile, PowerAllocation, Result, SolveError, SystemConfig,
};

/// Power needed to guarantee a minimum rate under interference-free
/// reception with noise `sigma2`: `sigma2 * (2^r_min - 1)`.
pub fn qos_floor(r_min: f64, sigma2: f64) -> f64 {
    sigma2 * ((2f64).powf(r_min) - 1.0)
}

/// Feasible power region for one phase configuration: per-user floors,
/// per-user BS-power costs, and the BS budget.
#[derive(Debug, Clone)]
pub struct PowerFeasibleSet {
    /// QoS floors, watts.
    pub floors: Vec<f64>,
    /// `c_k = ||g_k||^2`; radiating `p_k` costs `c_k p_k` at the BS.
    pub costs: Vec<f64>,
    /// BS transmit power budget, watts.
    pub p_max: f64,
}

impl PowerFeasibleSet {
    pub fn from_channel(
        ch: &ChannelRealization,
        phases: &PhaseProfile,
        config: &SystemConfig,
    ) -> Result<Self> {
        let costs = zf_column_costs(ch, phases)?;
        let floors = config
            .r_min
            .iter()
            .map(|&r| qos_floor(r, config.sigma2))
            .collect();
        Ok(PowerFeasibleSet {
            floors,
            costs,
            p_max: config.p_max,
        })
    }

    /// Minimum BS power needed to serve the floors.
    pub fn floor_cost(&self) -> f64 {
        self.floors
            .iter()
            .zip(&self.costs)
            .map(|(f, c)| f * c)
            .sum()
    }

    pub fn is_feasible(&self) -> bool {
        self.floor_cost() <= self.p_max * (1.0 + 1e-12)
    }
}

/// A single-ratio maximization over powers:
/// `max sum_k log2(1 + p_k / noise_k) / (sum_k denom_weights_k p_k + denom_const)`
/// subject to `p_k >= floors_k` and `sum_k w_k p_k <= cap` for every budget.
#[derive(Debug, Clone)]
pub struct RatioProblem {
    pub noise: Vec<f64>,
    pub floors: Vec<f64>,
    pub denom_weights: Vec<f64>,
    pub denom_const: f64,
    pub budgets: Vec<Budget>,
}

#[derive(Debug, Clone)]
pub struct Budget {
    pub weights: Vec<f64>,
    pub cap: f64,
}

#[derive(Debug, Clone)]
pub struct DinkelbachOutcome {
    pub powers: Vec<f64>,
    /// Converged ratio value.
    pub lambda: f64,
    pub iterations: usize,
    /// Ratio value after each iteration; strictly increasing until the
    /// stopping tolerance is met.
    pub lambda_trace: Vec<f64>,
}

/// Relative tolerance on active budget residuals in the inner solver.
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_DINKELBACH_ITERS: usize = 100;

impl RatioProblem {
    pub fn numerator(&self, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.noise)
            .map(|(&pk, &s)| (1.0 + pk / s).log2())
            .sum()
    }

    pub fn denominator(&self, p: &[f64]) -> f64 {
        self.denom_const
            + p.iter()
                .zip(&self.denom_weights)
                .map(|(&pk, &a)| a * pk)
                .sum::<f64>()
    }

    pub fn ratio(&self, p: &[f64]) -> f64 {
        self.numerator(p) / self.denominator(p)
    }

    fn k(&self) -> usize {
        self.noise.len()
    }

    fn check_feasible(&self) -> Result<()> {
        for b in &self.budgets {
            let need: f64 = self.floors.iter().zip(&b.weights).map(|(f, w)| f * w).sum();
            if need > b.cap * (1.0 + 1e-12) {
                return Err(SolveError::Infeasible {
                    required: need,
                    budget: b.cap,
                });
            }
        }
        Ok(())
    }

    /// Powers at given Lagrange multipliers: the stationarity condition
    /// `1 / (ln2 (noise_k + p_k)) = lambda a_k + sum_j nu_j w_jk` clamped
    /// at the floor. A non-positive left-hand coefficient means the user
    /// is unconstrained there; cap by the tightest budget instead.
    fn waterfill(&self, lambda: f64, nu: &[f64]) -> Vec<f64> {
        (0..self.k())
            .map(|k| {
                let mut slope = lambda * self.denom_weights[k];
                for (j, b) in self.budgets.iter().enumerate() {
                    slope += nu[j] * b.weights[k];
                }
                let unconstrained = if slope > 0.0 {
                    1.0 / (std::f64::consts::LN_2 * slope) - self.noise[k]
                } else {
                    f64::INFINITY
                };
                let cap = self
                    .budgets
                    .iter()
                    .filter(|b| b.weights[k] > 0.0)
                    .map(|b| b.cap / b.weights[k])
                    .fold(f64::INFINITY, f64::min);
                unconstrained.min(cap).max(self.floors[k])
            })
            .collect()
    }

    fn budget_usage(&self, j: usize, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.budgets[j].weights)
            .map(|(&pk, &w)| pk * w)
            .sum()
    }

    /// Smallest `nu_j >= 0` satisfying budget `j` with the other
    /// multipliers held fixed (complementary slackness by bisection).
    fn solve_multiplier(&self, lambda: f64, nu: &mut [f64], j: usize) {
        let cap = self.budgets[j].cap;
        let tol = RESIDUAL_TOL * cap.max(1.0);

        nu[j] = 0.0;
        if self.budget_usage(j, &self.waterfill(lambda, nu)) <= cap + tol {
            return;
        }
        let mut hi = 1.0;
        for _ in 0..200 {
            nu[j] = hi;
            if self.budget_usage(j, &self.waterfill(lambda, nu)) <= cap {
                break;
            }
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            nu[j] = mid;
            let usage = self.budget_usage(j, &self.waterfill(lambda, nu));
            if usage > cap {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= f64::EPSILON * hi {
                break;
            }
        }
        // end on the feasible side
        nu[j] = hi;
    }

    /// Exact maximizer of `numerator(p) - lambda * denominator(p)` over the
    /// feasible set, by coordinate ascent on the budget multipliers (a
    /// single bisection when there is one budget).
    pub fn concave_subproblem(&self, lambda: f64) -> Vec<f64> {
        let jn = self.budgets.len();
        let mut nu = vec![0.0; jn];
        if jn == 0 {
            return self.waterfill(lambda, &nu);
        }
        let rounds = if jn == 1 { 1 } else { 200 };
        for _ in 0..rounds {
            let before = nu.clone();
            for j in 0..jn {
                self.solve_multiplier(lambda, &mut nu, j);
            }
            let p = self.waterfill(lambda, &nu);
            let all_ok = (0..jn).all(|j| {
                self.budget_usage(j, &p) <= self.budgets[j].cap * (1.0 + RESIDUAL_TOL) + 1e-300
            });
            let moved = nu
                .iter()
                .zip(&before)
                .any(|(a, b)| (a - b).abs() > 1e-14 * a.abs().max(1.0));
            if all_ok && !moved {
                break;
            }
        }
        self.waterfill(lambda, &nu)
    }

    /// Dinkelbach's algorithm. When the denominator does not depend on the
    /// powers (all weights zero) the ratio is maximized by the very first
    /// subproblem, so a single iteration suffices.
    pub fn dinkelbach(&self, epsilon: f64) -> Result<DinkelbachOutcome> {
        self.check_feasible()?;
        assert!(
            self.denom_const > 0.0,
            "denominator constant must be positive"
        );

        let denom_fixed = self.denom_weights.iter().all(|&a| a == 0.0);
        let mut lambda = 0.0;
        let mut trace = Vec::new();
        let mut powers = self.floors.clone();

        for i in 1..=MAX_DINKELBACH_ITERS {
            powers = self.concave_subproblem(lambda);
            let new_lambda = self.ratio(&powers);
            trace.push(new_lambda);
            let done = denom_fixed || (new_lambda - lambda).abs() < epsilon;
            lambda = new_lambda;
            if done {
                return Ok(DinkelbachOutcome {
                    powers,
                    lambda,
                    iterations: i,
                    lambda_trace: trace,
                });
            }
        }
        Ok(DinkelbachOutcome {
            powers,
            lambda,
            iterations: MAX_DINKELBACH_ITERS,
            lambda_trace: trace,
        })
    }
}

/// The parametric subproblem for one phase configuration:
/// `argmax sum_k log2(1 + p_k / sigma2) - lambda (xi sum_k p_k + static)`
/// over the feasible set.
pub fn inner_concave_solve(
    lambda: f64,
    set: &PowerFeasibleSet,
    config: &SystemConfig,
) -> Result<PowerAllocation> {
    let prob = ratio_problem(set, config, config.xi);
    prob.check_feasible()?;
    Ok(PowerAllocation::new(prob.concave_subproblem(lambda)))
}

/// Globally optimal power allocation for fixed phases: maximizes the
/// rate-per-consumed-power ratio over the feasible set. Returns the
/// allocation and the converged ratio (bits/s/Hz per watt; multiply by the
/// bandwidth for bits per Joule).
pub fn dinkelbach_power(
    set: &PowerFeasibleSet,
    config: &SystemConfig,
    epsilon: f64,
) -> Result<(PowerAllocation, f64)> {
    let out = ratio_problem(set, config, config.xi).dinkelbach(epsilon)?;
    Ok((PowerAllocation::new(out.powers), out.lambda))
}

/// Rate-maximizing allocation for fixed phases: the same machinery with the
/// amplifier term removed from the denominator, which makes the ratio's
/// denominator constant and the problem a plain concave rate maximization.
pub fn sum_rate_power(set: &PowerFeasibleSet, config: &SystemConfig) -> Result<PowerAllocation> {
    let out = ratio_problem(set, config, 0.0).dinkelbach(config.epsilon)?;
    Ok(PowerAllocation::new(out.powers))
}

pub fn ratio_problem(set: &PowerFeasibleSet, config: &SystemConfig, xi: f64) -> RatioProblem {
    let k = set.floors.len();
    RatioProblem {
        noise: vec![config.sigma2; k],
        floors: set.floors.clone(),
        denom_weights: vec![xi; k],
        denom_const: config.static_power(),
        budgets: vec![Budget {
            weights: set.costs.clone(),
            cap: set.p_max,
        }],
    }
}
