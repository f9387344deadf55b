//! Domain types shared by every solver: scenario configuration, channel
//! realizations, phase profiles, power allocations, and solve outcomes.

use crate::linalg::{CMatrix, CVector, C64};
use std::f64::consts::TAU;
use thiserror::Error;

/// Errors surfaced by solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum SolveError {
    /// The effective channel is not right-invertible, so no zero-forcing
    /// precoder exists for this draw.
    #[error("effective channel is rank deficient (rank {rank}, need {needed})")]
    RankDeficient { rank: usize, needed: usize },

    /// The QoS power floors cannot be served within the transmit power budget.
    #[error("infeasible: serving the QoS floors needs {required:.6e} W > budget {budget:.6e} W")]
    Infeasible { required: f64, budget: f64 },

    /// Exhaustive relay search refused: too many gain elements.
    #[error("relay grid search supports at most {max} elements, got {got}")]
    GridCapExceeded { got: usize, max: usize },

    /// A grid oracle would exceed its evaluation budget.
    #[error("grid of {requested:.3e} evaluations exceeds budget {budget:.3e}")]
    BudgetExceeded { requested: f64, budget: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("config file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, SolveError>;

/// Axis-aligned rectangle for uniform user placement, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Rect {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }
}

/// Full scenario description: array sizes, power budget and dissipation
/// terms, QoS targets, geometry, and propagation model.
///
/// All powers are stored in watts; use [`crate::units`] to convert from
/// dBm/dBW at the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Base-station antennas (M).
    pub m_antennas: usize,
    /// Single-antenna users (K).
    pub k_users: usize,
    /// Reflecting elements on the surface (N).
    pub n_elements: usize,
    /// Maximum BS transmit power, watts.
    pub p_max: f64,
    /// Noise power per user, watts.
    pub sigma2: f64,
    /// Transmit amplifier inefficiency (reciprocal of efficiency).
    pub xi: f64,
    /// BS static hardware power, watts.
    pub p_bs: f64,
    /// Per-user static hardware power, watts.
    pub p_ue: f64,
    /// Per-element phase-shifter power, watts.
    pub p_element: f64,
    /// Phase-shifter resolution in bits. Metadata only: it sizes
    /// `p_element` in data sheets but phases are treated as continuous.
    pub phase_bits: u32,
    /// Transmission bandwidth, Hz.
    pub bandwidth: f64,
    /// Per-user minimum rate, bits/s/Hz (length K).
    pub r_min: Vec<f64>,
    /// BS position, meters.
    pub bs_pos: [f64; 2],
    /// Surface position, meters.
    pub ris_pos: [f64; 2],
    /// Users are placed uniformly at random in this rectangle.
    pub user_region: Rect,
    /// Large-scale power gain at 1 m (dimensionless).
    pub pathloss_ref: f64,
    /// Large-scale path-loss exponent.
    pub pathloss_exp: f64,
    /// Convergence tolerance shared by the iterative solvers.
    pub epsilon: f64,
    /// Permit K < N (and K <= M) instead of requiring K = N <= M.
    /// The compact quadratic-form path is unavailable in that regime;
    /// metric evaluation falls back to direct pseudo-inverses with a
    /// runtime rank check.
    pub allow_general_dims: bool,
}

impl SystemConfig {
    /// Scenario with the reference outdoor parameters: 20 dBW budget,
    /// 9 dBW BS dissipation, 10 dBm per user and per element, amplifier
    /// inefficiency 1.2, 180 kHz bandwidth, 3.76-exponent path loss with
    /// reference gain 10^-3.53, thermal noise floor, and users dropped in
    /// the 100 m x 100 m rectangle beside the surface.
    pub fn outdoor(m_antennas: usize, k_users: usize, n_elements: usize) -> Self {
        let bandwidth = 180e3;
        SystemConfig {
            m_antennas,
            k_users,
            n_elements,
            p_max: crate::units::dbw_to_watts(20.0),
            sigma2: crate::units::thermal_noise_watts(bandwidth),
            xi: 1.2,
            p_bs: crate::units::dbw_to_watts(9.0),
            p_ue: crate::units::dbm_to_watts(10.0),
            p_element: crate::units::dbm_to_watts(10.0),
            phase_bits: 3,
            bandwidth,
            r_min: vec![0.0; k_users],
            bs_pos: [0.0, 0.0],
            ris_pos: [100.0, 100.0],
            user_region: Rect::new(100.0, 200.0, 0.0, 100.0),
            pathloss_ref: 10f64.powf(-3.53),
            pathloss_exp: 3.76,
            epsilon: 1e-3,
            allow_general_dims: false,
        }
    }

    /// Desk-scale default used by the CLI: M=8, K=N=4 outdoor scenario.
    pub fn desk_default() -> Self {
        Self::outdoor(8, 4, 4)
    }

    /// Per-link static power: P_BS + K P_UE + N P_n. This is the
    /// power-consumption denominator with all transmit powers at zero.
    pub fn static_power(&self) -> f64 {
        self.p_bs + self.k_users as f64 * self.p_ue + self.n_elements as f64 * self.p_element
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(SolveError::InvalidConfig(msg));
        if self.k_users == 0 || self.m_antennas == 0 || self.n_elements == 0 {
            return fail("M, K, N must all be positive".into());
        }
        if self.allow_general_dims {
            if self.k_users > self.n_elements || self.k_users > self.m_antennas {
                return fail(format!(
                    "general regime needs K <= min(M, N), got M={} K={} N={}",
                    self.m_antennas, self.k_users, self.n_elements
                ));
            }
        } else if self.k_users != self.n_elements || self.m_antennas < self.n_elements {
            return fail(format!(
                "need K = N <= M (got M={} K={} N={}); set allow_general_dims for K < N",
                self.m_antennas, self.k_users, self.n_elements
            ));
        }
        for (name, v) in [
            ("p_max", self.p_max),
            ("sigma2", self.sigma2),
            ("xi", self.xi),
            ("p_bs", self.p_bs),
            ("p_ue", self.p_ue),
            ("p_element", self.p_element),
            ("bandwidth", self.bandwidth),
            ("pathloss_ref", self.pathloss_ref),
            ("epsilon", self.epsilon),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if self.pathloss_exp < 0.0 || !self.pathloss_exp.is_finite() {
            return fail(format!(
                "pathloss_exp must be >= 0, got {}",
                self.pathloss_exp
            ));
        }
        if self.r_min.len() != self.k_users {
            return fail(format!(
                "r_min has {} entries, expected K={}",
                self.r_min.len(),
                self.k_users
            ));
        }
        if self.r_min.iter().any(|&r| r < 0.0 || !r.is_finite()) {
            return fail("r_min entries must be finite and >= 0".into());
        }
        if self.user_region.x_max < self.user_region.x_min
            || self.user_region.y_max < self.user_region.y_min
        {
            return fail("user_region is empty".into());
        }
        Ok(())
    }
}

/// One fading draw: the BS-to-surface matrix, the per-user surface-to-user
/// rows, and the user drop that produced the large-scale gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// N x M, BS to surface.
    pub h1: CMatrix,
    /// K x N, surface to users (row k serves user k).
    pub h2: CMatrix,
    /// User positions in meters, length K.
    pub user_positions: Vec<[f64; 2]>,
}

impl ChannelRealization {
    pub fn n_elements(&self) -> usize {
        self.h1.nrows()
    }

    pub fn m_antennas(&self) -> usize {
        self.h1.ncols()
    }

    pub fn k_users(&self) -> usize {
        self.h2.nrows()
    }

    pub fn matches(&self, config: &SystemConfig) -> bool {
        self.n_elements() == config.n_elements
            && self.m_antennas() == config.m_antennas
            && self.k_users() == config.k_users
            && self.h2.ncols() == config.n_elements
            && self.user_positions.len() == config.k_users
    }
}

/// Phase configuration of the surface: one angle per element, radians.
///
/// Only angles are stored, reduced modulo 2*pi; the unit-modulus reflection
/// coefficients `exp(j*theta_n)` are always derived on demand, so the
/// modulus constraint cannot be violated by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    theta: Vec<f64>,
}

impl PhaseProfile {
    pub fn new(theta: Vec<f64>) -> Self {
        let theta = theta.into_iter().map(|t| t.rem_euclid(TAU)).collect();
        PhaseProfile { theta }
    }

    /// All elements set to the same angle.
    pub fn uniform(n: usize, angle: f64) -> Self {
        Self::new(vec![angle; n])
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Reflection coefficients `exp(j*theta_n)`.
    pub fn coefficients(&self) -> CVector {
        CVector::from_iterator(
            self.theta.len(),
            self.theta.iter().map(|&t| C64::new(t.cos(), t.sin())),
        )
    }

    /// Conjugate coefficients `exp(-j*theta_n)`, the diagonal of the
    /// inverse reflection matrix.
    pub fn inverse_coefficients(&self) -> CVector {
        CVector::from_iterator(
            self.theta.len(),
            self.theta.iter().map(|&t| C64::new(t.cos(), -t.sin())),
        )
    }

    /// The diagonal reflection matrix.
    pub fn phi_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.coefficients())
    }

    /// Squared Frobenius distance between the two reflection matrices,
    /// `sum_n |exp(j theta'_n) - exp(j theta_n)|^2`. This is the stopping
    /// metric of both inner phase loops.
    pub fn reflection_distance_sq(&self, other: &PhaseProfile) -> f64 {
        assert_eq!(self.len(), other.len());
        self.theta
            .iter()
            .zip(other.theta.iter())
            .map(|(&a, &b)| {
                let d = (C64::new(a.cos(), a.sin())) - (C64::new(b.cos(), b.sin()));
                d.norm_sqr()
            })
            .sum()
    }
}

/// Per-user transmit powers, watts. Entries are non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    p: Vec<f64>,
}

impl PowerAllocation {
    pub fn new(p: Vec<f64>) -> Self {
        assert!(
            p.iter().all(|&x| x >= 0.0 && x.is_finite()),
            "powers must be finite and non-negative"
        );
        PowerAllocation { p }
    }

    /// Budget split evenly across `k` users.
    pub fn uniform(k: usize, total: f64) -> Self {
        Self::new(vec![total / k as f64; k])
    }

    pub fn zeros(k: usize) -> Self {
        Self::new(vec![0.0; k])
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Converged design point plus the metrics and bookkeeping of the run.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub phases: PhaseProfile,
    pub powers: PowerAllocation,
    /// Sum rate, bits/s/Hz.
    pub se: f64,
    /// Bits per Joule.
    pub ee: f64,
    /// Consumed power (amplifier + static terms), watts.
    pub total_power: f64,
    /// Radiated BS power under zero forcing, watts.
    pub bs_tx_power: f64,
    pub outer_iterations: usize,
    /// All constraints hold at the returned point.
    pub feasible: bool,
    /// The QoS floors were dropped to rescue an infeasible instance.
    pub qos_relaxed: bool,
    /// The outer loop met its tolerance before the iteration cap.
    pub converged: bool,
    /// Objective value after each completed outer iteration.
    pub objective_trace: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phase_profile_wraps_modulo_two_pi() {
        let p = PhaseProfile::new(vec![TAU, -PI, 3.0 * PI]);
        assert_eq!(p.angles()[0], 0.0);
        assert!((p.angles()[1] - PI).abs() < 1e-15);
        assert!((p.angles()[2] - PI).abs() < 1e-12);
    }

    #[test]
    fn coefficients_have_unit_modulus() {
        let p = PhaseProfile::new(vec![0.1, 1.7, -2.9, 40.0]);
        for c in p.coefficients().iter() {
            assert!((c.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reflection_distance_ignores_full_turns() {
        let a = PhaseProfile::new(vec![0.3, 1.1]);
        let b = PhaseProfile::new(vec![0.3 + TAU, 1.1 - TAU]);
        assert!(a.reflection_distance_sq(&b) < 1e-28);
    }

    #[test]
    fn config_validation_catches_bad_dims() {
        let mut c = SystemConfig::desk_default();
        assert!(c.validate().is_ok());
        c.k_users = 3;
        assert!(c.validate().is_err());
        c.allow_general_dims = true;
        c.r_min = vec![0.0; 3];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn static_power_matches_reference_values() {
        // 9 dBW BS + 16 users at 10 dBm + 16 elements at 10 dBm
        let c = SystemConfig::outdoor(32, 16, 16);
        let expected = 10f64.powf(0.9) + 16.0 * 0.01 + 16.0 * 0.01;
        assert!((c.static_power() - expected).abs() < 1e-12);
        assert!((c.static_power() - 8.2633).abs() < 1e-3);
    }

    #[test]
    #[should_panic]
    fn negative_power_rejected() {
        let _ = PowerAllocation::new(vec![1.0, -0.5]);
    }
}
