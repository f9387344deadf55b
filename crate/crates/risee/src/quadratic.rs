//! Compact quadratic form for the phase-shift subproblem.
//!
//! For fixed positive powers, the BS transmit power needed to zero-force
//! through phases `theta` is
//!
//! ```text
//! F(theta) = tr((H2 Phi H1)^+ P (H2 Phi H1)^+H)
//!          = || H1^+ Phi^-1 Hbar2^+ ||_F^2          (Hbar2 = P^-1/2 H2)
//!          = x^H Atilde x,  x_n = exp(-j theta_n)
//! ```
//!
//! where the middle step needs `Hbar2` square full rank and `H1` full row
//! rank (K = N <= M), and `Atilde` is the N x N Hadamard compaction of the
//! N^2 x N^2 Gram matrix of `(Hbar2^+)^T (x) H1^+` restricted to the indices
//! where `vec(Phi^-1)` is non-zero. Holding `Atilde` instead of the full
//! Kronecker product cuts the memory and per-iteration cost from O(N^4) to
//! O(N^2).

use crate::linalg::{pseudo_inverse, singular_values, CMatrix, CVector, C64, RANK_TOL};
use crate::model::bs_transmit_power;
use crate::types::{ChannelRealization, PhaseProfile, PowerAllocation, Result, SolveError};
use nalgebra::DVector;

/// 0-based positions of the diagonal entries inside a column-major
/// vectorized N x N matrix: `n * (N + 1)`.
pub fn diag_support_indices(n: usize) -> Vec<usize> {
    (0..n).map(|i| i * (n + 1)).collect()
}

/// The reduced quadratic form. Construction costs two pseudo-inverses;
/// evaluations and gradients afterwards are O(N^2) and phase-only.
#[derive(Debug, Clone)]
pub struct PhaseQuadratic {
    /// N x N Hermitian PSD compaction.
    atilde: CMatrix,
    /// Largest eigenvalue of the full (uncompacted) Gram matrix.
    lambda_max: f64,
}

impl PhaseQuadratic {
    /// Build from a channel draw and strictly positive powers.
    ///
    /// Requires K = N <= M with both `P^-1/2 H2` and `H1` full rank;
    /// returns [`SolveError::RankDeficient`] otherwise.
    pub fn new(ch: &ChannelRealization, powers: &PowerAllocation) -> Result<Self> {
        let n = ch.n_elements();
        let k = ch.k_users();
        let m = ch.m_antennas();
        if k != n || m < n {
            return Err(SolveError::InvalidConfig(format!(
                "quadratic phase form needs K = N <= M, got M={m} K={k} N={n}"
            )));
        }
        if powers.len() != k || powers.as_slice().iter().any(|&p| p <= 0.0 || p.is_nan()) {
            return Err(SolveError::InvalidConfig(
                "quadratic phase form needs strictly positive powers".into(),
            ));
        }

        // Hbar2 = P^-1/2 H2 (rows scaled by 1/sqrt(p_k))
        let mut hbar2 = ch.h2.clone();
        for (ki, &p) in powers.as_slice().iter().enumerate() {
            let s = C64::new(1.0 / p.sqrt(), 0.0);
            let mut row = hbar2.row_mut(ki);
            row *= s;
        }

        let sv2 = singular_values(&hbar2);
        let sv1 = singular_values(&ch.h1);
        for (sv, dim) in [(&sv2, n), (&sv1, n)] {
            let smax = sv.first().copied().unwrap_or(0.0);
            let rank = sv.iter().filter(|&&s| s > RANK_TOL * smax).count();
            if rank < dim {
                return Err(SolveError::RankDeficient { rank, needed: dim });
            }
        }

        let h1p = pseudo_inverse(&ch.h1); // M x N
        let h2p = pseudo_inverse(&hbar2); // N x K

        let g1 = h1p.adjoint() * &h1p; // N x N, Hermitian PSD
        let g2 = &h2p * h2p.adjoint(); // N x N, Hermitian PSD

        // Hadamard compaction of conj(G2) (x) G1 at the diagonal support:
        // entry (n, m) is G1[n,m] * conj(G2[n,m]).
        let atilde = CMatrix::from_fn(n, n, |i, j| g1[(i, j)] * g2[(i, j)].conj());

        // Kronecker structure: the largest eigenvalue of the full Gram
        // matrix is the product of the factors' largest eigenvalues,
        // i.e. (sigma_max(Hbar2^+) * sigma_max(H1^+))^2.
        let smax_h2p = 1.0 / sv2.last().copied().unwrap();
        let smax_h1p = 1.0 / sv1.last().copied().unwrap();
        let lambda_max = (smax_h2p * smax_h1p).powi(2);

        Ok(PhaseQuadratic { atilde, lambda_max })
    }

    pub fn n(&self) -> usize {
        self.atilde.nrows()
    }

    /// Largest eigenvalue of the full quadratic form.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// The compact Hermitian matrix itself.
    pub fn atilde(&self) -> &CMatrix {
        &self.atilde
    }

    /// `x_n = exp(-j theta_n)`, the non-zero entries of `vec(Phi^-1)`.
    pub fn support_vector(phases: &PhaseProfile) -> CVector {
        phases.inverse_coefficients()
    }

    /// Objective at a support vector (unit-modulus entries expected).
    pub fn value_of(&self, x: &CVector) -> f64 {
        (x.adjoint() * &self.atilde * x)[(0, 0)].re
    }

    /// Required BS power at the given phases, watts.
    pub fn value(&self, phases: &PhaseProfile) -> f64 {
        self.value_of(&Self::support_vector(phases))
    }

    /// Gradient of the objective with respect to the phase angles:
    /// `q_i = 2 Re(j conj(x_i) (Atilde x)_i)`.
    pub fn gradient(&self, phases: &PhaseProfile) -> DVector<f64> {
        let x = Self::support_vector(phases);
        self.gradient_of(&x)
    }

    pub fn gradient_of(&self, x: &CVector) -> DVector<f64> {
        let ax = &self.atilde * x;
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(ax.iter())
                .map(|(xi, axi)| 2.0 * (C64::i() * xi.conj() * axi).re),
        )
    }

    /// First and second derivatives of `mu -> F(theta + mu d)` at `mu = 0`.
    pub fn directional_derivatives(&self, x: &CVector, d: &DVector<f64>) -> (f64, f64) {
        let u = CVector::from_iterator(x.len(), x.iter().zip(d.iter()).map(|(xi, di)| xi * di));
        let w =
            CVector::from_iterator(x.len(), x.iter().zip(d.iter()).map(|(xi, di)| xi * di * di));
        let s = (x.adjoint() * &self.atilde * &u)[(0, 0)];
        let uu = (u.adjoint() * &self.atilde * &u)[(0, 0)].re;
        let xw = (x.adjoint() * &self.atilde * &w)[(0, 0)].re;
        let h1 = 2.0 * s.im;
        let h2 = 2.0 * uu - 2.0 * xw;
        (h1, h2)
    }

    /// Support vector after the additive phase step `theta + mu d`:
    /// `x_n exp(-j mu d_n)`.
    pub fn step_support(x: &CVector, d: &DVector<f64>, mu: f64) -> CVector {
        CVector::from_iterator(
            x.len(),
            x.iter().zip(d.iter()).map(|(xi, di)| {
                let a = -mu * di;
                xi * C64::new(a.cos(), a.sin())
            }),
        )
    }
}

/// Required BS transmit power as a function of the phases, watts.
///
/// Uses the compact quadratic form when its preconditions hold
/// (K = N <= M, strictly positive powers) and otherwise falls back to the
/// direct pseudo-inverse trace, which is valid in the general K <= N regime.
pub fn objective_f(
    phases: &PhaseProfile,
    powers: &PowerAllocation,
    ch: &ChannelRealization,
) -> Result<f64> {
    match PhaseQuadratic::new(ch, powers) {
        Ok(q) => Ok(q.value(phases)),
        Err(SolveError::InvalidConfig(_)) => bs_transmit_power(powers, ch, phases),
        Err(e) => Err(e),
    }
}

/// The Frobenius-norm route `||H1^+ Phi^-1 Hbar2^+||_F^2`. Requires the
/// same factorization conditions as the quadratic form; primarily a
/// cross-check for the identity chain.
pub fn objective_frobenius(
    phases: &PhaseProfile,
    powers: &PowerAllocation,
    ch: &ChannelRealization,
) -> Result<f64> {
    let n = ch.n_elements();
    if ch.k_users() != n || ch.m_antennas() < n {
        return Err(SolveError::InvalidConfig("needs K = N <= M".into()));
    }
    let mut hbar2 = ch.h2.clone();
    for (ki, &p) in powers.as_slice().iter().enumerate() {
        let s = C64::new(1.0 / p.sqrt(), 0.0);
        let mut row = hbar2.row_mut(ki);
        row *= s;
    }
    let h1p = pseudo_inverse(&ch.h1);
    let h2p = pseudo_inverse(&hbar2);
    let phi_inv = CMatrix::from_diagonal(&phases.inverse_coefficients());
    let prod = h1p * phi_inv * h2p;
    Ok(prod.iter().map(|z| z.norm_sqr()).sum())
}

/// Gradient of [`objective_f`] with respect to the phase angles.
pub fn gradient_f(
    phases: &PhaseProfile,
    powers: &PowerAllocation,
    ch: &ChannelRealization,
) -> Result<DVector<f64>> {
    Ok(PhaseQuadratic::new(ch, powers)?.gradient(phases))
}
