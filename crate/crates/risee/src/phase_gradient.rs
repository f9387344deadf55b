//! Phase-shift optimization for fixed powers by Polak-Ribiere-Polyak
//! conjugate gradient on the compact quadratic form.

use crate::linalg::CVector;
use crate::quadratic::PhaseQuadratic;
use crate::types::{ChannelRealization, PhaseProfile, PowerAllocation, Result};
use nalgebra::DVector;

/// One iterate of the conjugate-gradient search.
#[derive(Debug, Clone)]
pub struct GradientState {
    pub theta: PhaseProfile,
    /// Non-zero entries of the vectorized inverse reflection matrix,
    /// `exp(-j theta_n)` (length N; the full vector is N^2 with zeros
    /// everywhere else).
    pub support: CVector,
    /// Gradient of the required BS power with respect to the angles.
    pub q: DVector<f64>,
    /// Current descent direction.
    pub d: DVector<f64>,
    /// Required BS power at `theta`, watts.
    pub objective: f64,
}

impl GradientState {
    pub fn at(quad: &PhaseQuadratic, theta: PhaseProfile) -> Self {
        let support = PhaseQuadratic::support_vector(&theta);
        let q = quad.gradient_of(&support);
        let d = -q.clone();
        let objective = quad.value_of(&support);
        GradientState {
            theta,
            support,
            q,
            d,
            objective,
        }
    }
}

/// Outcome of an inner phase loop (either optimizer).
#[derive(Debug, Clone)]
pub struct PhaseOptim {
    pub phases: PhaseProfile,
    /// Required BS power at the returned phases, watts.
    pub objective: f64,
    pub iterations: usize,
    /// The line search could no longer make progress; the best iterate
    /// found is returned.
    pub stalled: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct StepSize {
    pub mu: f64,
    /// Objective value at `theta + mu d`.
    pub value: f64,
    pub stalled: bool,
}

const MAX_BACKTRACKS: usize = 60;

/// Step length along `d` from the phases encoded in `x`.
///
/// Uses the minimizer of the second-order Taylor model of
/// `h(mu) = F(theta + mu d)` when that model is convex with negative slope,
/// and otherwise backtracks on the exact objective until it decreases.
/// Always returns `h(mu) <= h(0)`; `mu = 0` with `stalled` set means no
/// descent step exists at representable lengths.
pub fn step_size(quad: &PhaseQuadratic, x: &CVector, d: &DVector<f64>) -> StepSize {
    let h0 = quad.value_of(x);
    let dmax = d.amax();
    if dmax == 0.0 || !dmax.is_finite() {
        return StepSize {
            mu: 0.0,
            value: h0,
            stalled: true,
        };
    }

    let eval = |mu: f64| quad.value_of(&PhaseQuadratic::step_support(x, d, mu));
    let (h1, h2) = quad.directional_derivatives(x, d);

    // quadratic-model minimizer, then verified against the true objective
    let mut mu = if h1 < 0.0 && h2 > 0.0 {
        -h1 / h2
    } else {
        // model predicts ascent or has non-positive curvature:
        // plain backtracking from a quarter-turn step
        std::f64::consts::FRAC_PI_2 / dmax
    };

    for _ in 0..MAX_BACKTRACKS {
        let v = eval(mu);
        if v < h0 {
            return StepSize {
                mu,
                value: v,
                stalled: false,
            };
        }
        mu *= 0.5;
    }
    StepSize {
        mu: 0.0,
        value: h0,
        stalled: true,
    }
}

/// Polak-Ribiere-Polyak direction update, safeguarded to stay a descent
/// direction: whenever the conjugate direction fails `q_new . d < 0` it is
/// replaced by the steepest-descent direction. A zero `q_old` signals
/// convergence and yields the zero direction.
pub fn prp_direction(
    q_new: &DVector<f64>,
    q_old: &DVector<f64>,
    d_old: &DVector<f64>,
) -> DVector<f64> {
    let denom = q_old.norm_squared();
    if denom == 0.0 {
        return DVector::zeros(q_new.len());
    }
    let beta = (q_new - q_old).dot(q_new) / denom;
    let d = -q_new + beta * d_old;
    if q_new.dot(&d) < 0.0 {
        d
    } else {
        -q_new.clone()
    }
}

/// Minimize the required BS power over the surface phases, starting from
/// `theta0`, for fixed strictly positive `powers`.
///
/// Stops when the squared change of the reflection matrix falls below
/// `epsilon`, when the search stalls, or after `max_iters` iterations.
/// The objective never increases across accepted iterations; the best
/// iterate found is returned.
pub fn optimize_phases_gradient(
    theta0: &PhaseProfile,
    powers: &PowerAllocation,
    ch: &ChannelRealization,
    epsilon: f64,
    max_iters: usize,
) -> Result<PhaseOptim> {
    let quad = PhaseQuadratic::new(ch, powers)?;
    optimize_with_quadratic(&quad, theta0, epsilon, max_iters)
}

pub(crate) fn optimize_with_quadratic(
    quad: &PhaseQuadratic,
    theta0: &PhaseProfile,
    epsilon: f64,
    max_iters: usize,
) -> Result<PhaseOptim> {
    let mut state = GradientState::at(quad, theta0.clone());
    let mut best = (state.objective, state.theta.clone());
    let mut stalled = false;
    let mut iterations = 0;

    for _ in 0..max_iters {
        if state.q.norm() == 0.0 {
            break;
        }
        let mut step = step_size(quad, &state.support, &state.d);
        if step.stalled && state.d != -&state.q {
            // conjugate direction exhausted; retry along steepest descent
            state.d = -state.q.clone();
            step = step_size(quad, &state.support, &state.d);
        }
        if step.stalled {
            stalled = true;
            break;
        }

        let new_theta = PhaseProfile::new(
            state
                .theta
                .angles()
                .iter()
                .zip(state.d.iter())
                .map(|(t, di)| t + step.mu * di)
                .collect(),
        );
        debug_assert!(step.value <= state.objective + 1e-12 * state.objective.abs().max(1.0));

        let change = new_theta.reflection_distance_sq(&state.theta);
        let q_new = quad.gradient(&new_theta);
        state.d = prp_direction(&q_new, &state.q, &state.d);
        state.q = q_new;
        state.support = PhaseQuadratic::support_vector(&new_theta);
        state.theta = new_theta;
        state.objective = step.value;
        iterations += 1;
        if state.objective < best.0 {
            best = (state.objective, state.theta.clone());
        }

        if change < epsilon {
            break;
        }
    }

    Ok(PhaseOptim {
        phases: best.1,
        objective: best.0,
        iterations,
        stalled,
    })
}
