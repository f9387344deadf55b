//! Zero-forcing precoding and the spectral-efficiency / power / efficiency
//! metrics shared by every solver.

use crate::linalg::{numerical_rank, pseudo_inverse, CMatrix};
use crate::types::{
    ChannelRealization, PhaseProfile, PowerAllocation, Result, SolveError, SystemConfig,
};

/// Effective BS-to-users channel through the surface, `H2 * Phi * H1`
/// (K x M).
pub fn effective_channel(ch: &ChannelRealization, phases: &PhaseProfile) -> CMatrix {
    assert_eq!(phases.len(), ch.n_elements());
    let coeffs = phases.coefficients();
    // scale columns of H2 by the reflection coefficients, then apply H1
    let mut h2_phi = ch.h2.clone();
    for (n, c) in coeffs.iter().enumerate() {
        let mut col = h2_phi.column_mut(n);
        col *= *c;
    }
    &h2_phi * &ch.h1
}

/// Zero-forcing precoder `G = (H2 Phi H1)^+` (M x K). With full row rank
/// the product `(H2 Phi H1) G` is the identity, so multi-user interference
/// vanishes exactly.
///
/// Fails with [`SolveError::RankDeficient`] when the effective channel is
/// not right-invertible, which signals a degenerate draw.
pub fn zf_precoder(ch: &ChannelRealization, phases: &PhaseProfile) -> Result<CMatrix> {
    let eff = effective_channel(ch, phases);
    let k = eff.nrows();
    let rank = numerical_rank(&eff);
    if rank < k {
        return Err(SolveError::RankDeficient { rank, needed: k });
    }
    Ok(pseudo_inverse(&eff))
}

/// Squared column norms of the ZF precoder: `c_k = ||g_k||^2`. Radiating
/// `p_k` to user k costs `c_k * p_k` watts at the BS, so these coefficients
/// turn the BS power constraint into a weighted sum over users.
pub fn zf_column_costs(ch: &ChannelRealization, phases: &PhaseProfile) -> Result<Vec<f64>> {
    let g = zf_precoder(ch, phases)?;
    Ok((0..g.ncols()).map(|k| g.column(k).norm_squared()).collect())
}

/// Post-ZF SINR of one user: interference is nulled, leaving `p_k / sigma2`.
pub fn sinr_zf(p_k: f64, sigma2: f64) -> f64 {
    debug_assert!(p_k >= 0.0 && sigma2 > 0.0);
    p_k / sigma2
}

/// SINR of every user for an arbitrary precoder, from the full
/// signal-plus-interference ratio. Used to cross-check the ZF shortcut.
pub fn sinr_general(
    ch: &ChannelRealization,
    phases: &PhaseProfile,
    precoder: &CMatrix,
    powers: &PowerAllocation,
    sigma2: f64,
) -> Vec<f64> {
    let eff = effective_channel(ch, phases); // K x M
    let k_users = eff.nrows();
    let p = powers.as_slice();
    (0..k_users)
        .map(|k| {
            let row = eff.row(k);
            let gains: Vec<f64> = (0..k_users)
                .map(|i| (row * precoder.column(i))[(0, 0)].norm_sqr())
                .collect();
            let signal = p[k] * gains[k];
            let interference: f64 = (0..k_users)
                .filter(|&i| i != k)
                .map(|i| p[i] * gains[i])
                .sum();
            signal / (interference + sigma2)
        })
        .collect()
}

/// Sum rate under ZF, bits/s/Hz: `sum_k log2(1 + p_k / sigma2)`.
pub fn spectral_efficiency(powers: &PowerAllocation, sigma2: f64) -> f64 {
    powers
        .as_slice()
        .iter()
        .map(|&p| (1.0 + sinr_zf(p, sigma2)).log2())
        .sum()
}

/// Consumed power, watts: amplifier draw `xi * sum_k p_k` plus the static
/// dissipation of BS, users, and surface.
pub fn total_power(powers: &PowerAllocation, config: &SystemConfig) -> f64 {
    config.xi * powers.total() + config.static_power()
}

/// Bits per Joule: `bandwidth * SE / total_power`.
pub fn energy_efficiency(powers: &PowerAllocation, config: &SystemConfig) -> f64 {
    config.bandwidth * spectral_efficiency(powers, config.sigma2) / total_power(powers, config)
}

/// Radiated BS power under ZF, watts: `tr(G P G^H) = sum_k p_k ||g_k||^2`.
pub fn bs_transmit_power(
    powers: &PowerAllocation,
    ch: &ChannelRealization,
    phases: &PhaseProfile,
) -> Result<f64> {
    let costs = zf_column_costs(ch, phases)?;
    Ok(costs
        .iter()
        .zip(powers.as_slice())
        .map(|(c, p)| c * p)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_channels;
    use crate::linalg::C64;
    use crate::types::Rect;
    use std::f64::consts::TAU;

    fn identity_channel(n: usize) -> ChannelRealization {
        ChannelRealization {
            h1: CMatrix::identity(n, n),
            h2: CMatrix::identity(n, n),
            user_positions: vec![[0.0, 0.0]; n],
        }
    }

    fn unit_config(m: usize, k: usize, n: usize) -> SystemConfig {
        // unit-gain propagation so draws are CN(0,1)
        let mut c = SystemConfig::outdoor(m, k, n);
        c.pathloss_ref = 1.0;
        c.pathloss_exp = 0.0;
        c.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
        c.sigma2 = 1e-3;
        c
    }

    #[test]
    fn zf_identity_case() {
        let ch = identity_channel(3);
        let g = zf_precoder(&ch, &PhaseProfile::uniform(3, 0.0)).unwrap();
        assert!((g - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn zf_inverts_random_effective_channel() {
        let c = unit_config(4, 2, 2);
        let ch = generate_channels(&c, 11);
        let phases = PhaseProfile::new(vec![0.4, -1.2]);
        let g = zf_precoder(&ch, &phases).unwrap();
        let eff = effective_channel(&ch, &phases);
        let residual = (&eff * &g - CMatrix::identity(2, 2)).norm();
        assert!(residual < 1e-8, "ZF residual {residual}");
    }

    #[test]
    fn phase_periodicity_gives_identical_precoder() {
        let c = unit_config(4, 2, 2);
        let ch = generate_channels(&c, 5);
        let a = zf_precoder(&ch, &PhaseProfile::uniform(2, 0.0)).unwrap();
        let b = zf_precoder(&ch, &PhaseProfile::uniform(2, TAU)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rank_deficient_channel_is_rejected() {
        // two identical user rows cannot both be zero-forced
        let mut ch = identity_channel(2);
        ch.h2 = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(2.0, 0.0),
            ],
        );
        match zf_precoder(&ch, &PhaseProfile::uniform(2, 0.0)) {
            Err(SolveError::RankDeficient { rank, needed }) => {
                assert_eq!((rank, needed), (1, 2));
            }
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn zf_sinr_matches_general_formula() {
        let c = unit_config(6, 3, 3);
        let ch = generate_channels(&c, 21);
        let phases = PhaseProfile::new(vec![0.3, 2.0, 4.4]);
        let powers = PowerAllocation::new(vec![1.5e-3, 0.7e-3, 2.2e-3]);
        let g = zf_precoder(&ch, &phases).unwrap();
        let general = sinr_general(&ch, &phases, &g, &powers, c.sigma2);
        for (k, &got) in general.iter().enumerate() {
            let expected = sinr_zf(powers.as_slice()[k], c.sigma2);
            assert!(
                (got - expected).abs() / expected.max(1e-300) < 1e-8,
                "user {k}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn se_hand_values() {
        assert_eq!(spectral_efficiency(&PowerAllocation::zeros(4), 1.0), 0.0);
        let one = spectral_efficiency(&PowerAllocation::new(vec![2.0]), 2.0);
        assert!((one - 1.0).abs() < 1e-15);
        // p = (sigma2, 3 sigma2) -> log2(2) + log2(4) = 3
        let three = spectral_efficiency(&PowerAllocation::new(vec![0.5, 1.5]), 0.5);
        assert!((three - 3.0).abs() < 1e-12);
    }

    #[test]
    fn total_power_hand_values() {
        let mut c = SystemConfig::outdoor(1, 1, 1);
        c.p_ue = 1.0;
        c.p_bs = 1.0;
        c.p_element = 1.0;
        assert!((total_power(&PowerAllocation::zeros(1), &c) - 3.0).abs() < 1e-15);

        let c16 = SystemConfig::outdoor(32, 16, 16);
        let got = total_power(&PowerAllocation::zeros(16), &c16);
        assert!((got - 8.2633).abs() < 1e-3);

        let mut cxi = SystemConfig::outdoor(2, 2, 2);
        cxi.xi = 1.2;
        let base = cxi.static_power();
        let got = total_power(&PowerAllocation::new(vec![4.0, 6.0]), &cxi);
        assert!((got - (12.0 + base)).abs() < 1e-12);
    }

    #[test]
    fn ee_zero_power_and_bw_linearity() {
        let c = SystemConfig::desk_default();
        assert_eq!(energy_efficiency(&PowerAllocation::zeros(4), &c), 0.0);

        let p = PowerAllocation::new(vec![1e-6; 4]);
        let e1 = energy_efficiency(&p, &c);
        let mut c2 = c.clone();
        c2.bandwidth = 2.0 * c.bandwidth;
        c2.sigma2 = c.sigma2; // hold noise fixed so only BW scales
        let e2 = energy_efficiency(&p, &c2);
        assert!((e2 / e1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bs_power_trace_equals_column_norm_form() {
        let c = unit_config(4, 2, 2);
        let ch = generate_channels(&c, 31);
        let phases = PhaseProfile::new(vec![1.0, 2.5]);
        let powers = PowerAllocation::new(vec![0.3, 0.9]);

        let g = zf_precoder(&ch, &phases).unwrap();
        let p_diag = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(powers.as_slice()[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let trace_form = (&g * p_diag * g.adjoint()).trace().re;
        let col_form = bs_transmit_power(&powers, &ch, &phases).unwrap();
        assert!((trace_form - col_form).abs() <= 1e-10 * trace_form.abs().max(1.0));
    }

    #[test]
    fn bs_power_identity_and_zero_cases() {
        let ch = identity_channel(2);
        let phases = PhaseProfile::uniform(2, 0.0);
        let powers = PowerAllocation::new(vec![0.4, 1.1]);
        let got = bs_transmit_power(&powers, &ch, &phases).unwrap();
        assert!((got - 1.5).abs() < 1e-12);

        let zero = bs_transmit_power(&PowerAllocation::zeros(2), &ch, &phases).unwrap();
        assert_eq!(zero, 0.0);
    }
}
