//! Amplify-and-forward relay baseline.
//!
//! The surface is replaced by an N-antenna AF relay applying a diagonal
//! complex gain matrix `V`. Unlike the reflecting surface, the relay
//! amplifies its own receiver noise, draws transmit power for forwarding,
//! and dissipates static power per antenna; in exchange its gains are not
//! modulus-constrained. Gains are optimized by exhaustive search over a
//! magnitude/phase grid with the transmit powers re-optimized for every
//! candidate, which makes one sweep equivalent to alternating the two
//! blocks to convergence over the grid.

use crate::linalg::{pseudo_inverse, CVector, C64};
use crate::model::zf_column_costs;
use crate::power::{qos_floor, Budget, RatioProblem};
use crate::types::{
    ChannelRealization, PhaseProfile, PowerAllocation, Result, SolveError, SystemConfig,
};
use rayon::prelude::*;

/// Diagonal AF gains, one complex coefficient per relay antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayGains {
    pub v: CVector,
}

impl RelayGains {
    pub fn zeros(n: usize) -> Self {
        RelayGains {
            v: CVector::zeros(n),
        }
    }

    /// Total squared gain magnitude `||v||^2`.
    pub fn norm_sq(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Spacing of the gain-magnitude grid. Linear covers `{0, ..., v_max}`
/// evenly; Log keeps the `0` and `v_max` endpoints but spreads the
/// interior levels over six decades below `v_max`, which matters when the
/// noise power is orders of magnitude below the budgets and the useful
/// gains are tiny fractions of `v_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnitudeSpacing {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct RelayOptions {
    /// Relay amplifier inefficiency.
    pub xi_af: f64,
    /// Static dissipation per relay transmit-receive antenna, watts.
    pub p_antenna: f64,
    /// Relay transmit power budget, watts.
    pub p_relay_max: f64,
    /// Power of the relay receiver noise that gets amplified, watts.
    /// Kept separate from the user noise because the two play different
    /// roles in the rate and power expressions.
    pub relay_noise: f64,
    /// Use the noise term `(h V V^H h^H)^2` as written in the rate
    /// expression; disable to use the unsquared quadratic form for
    /// sensitivity checks.
    pub squared_gain_noise: bool,
    /// Magnitude levels per element (including zero).
    pub mag_levels: usize,
    pub mag_spacing: MagnitudeSpacing,
    /// Phase levels per element.
    pub phase_levels: usize,
    /// Exhaustive search refuses more elements than this.
    pub max_elements: usize,
    pub epsilon: f64,
}

impl RelayOptions {
    /// Reference values: inefficiency 1.2, 10 dBm per antenna, relay
    /// budget equal to the BS budget, relay noise equal to user noise.
    pub fn from_config(config: &SystemConfig) -> Self {
        RelayOptions {
            xi_af: 1.2,
            p_antenna: crate::units::dbm_to_watts(10.0),
            p_relay_max: config.p_max,
            relay_noise: config.sigma2,
            squared_gain_noise: true,
            mag_levels: 8,
            mag_spacing: MagnitudeSpacing::Linear,
            phase_levels: 16,
            max_elements: 4,
            epsilon: config.epsilon,
        }
    }
}

/// Per-user amplified-noise quadratic form `||V^H h_2k^H||^2`, which only
/// depends on the gain magnitudes.
fn gain_noise_terms(gains: &RelayGains, ch: &ChannelRealization) -> Vec<f64> {
    (0..ch.k_users())
        .map(|k| {
            ch.h2
                .row(k)
                .iter()
                .zip(gains.v.iter())
                .map(|(h, v)| h.norm_sqr() * v.norm_sqr())
                .sum()
        })
        .collect()
}

/// Achievable sum rate through the relay, bits/s/Hz:
/// `sum_k log2(1 + p_k / (noise_term_k + sigma2))` where the noise term is
/// `||V^H h_2k^H||^2`, squared when `squared_gain_noise` is set.
pub fn relay_rate(
    powers: &PowerAllocation,
    gains: &RelayGains,
    ch: &ChannelRealization,
    sigma2: f64,
    squared_gain_noise: bool,
) -> f64 {
    let terms = gain_noise_terms(gains, ch);
    powers
        .as_slice()
        .iter()
        .zip(&terms)
        .map(|(&p, &w)| {
            let noise = if squared_gain_noise { w * w } else { w } + sigma2;
            (1.0 + p / noise).log2()
        })
        .sum()
}

/// Relay transmit power, watts: the forwarded signal part
/// `tr(H2^+ P H2^+H)` plus the amplified receiver noise
/// `relay_noise * ||v||^2`.
pub fn relay_power(
    powers: &PowerAllocation,
    gains: &RelayGains,
    ch: &ChannelRealization,
    relay_noise: f64,
) -> Result<f64> {
    let u = relay_signal_costs(ch)?;
    let signal: f64 = u.iter().zip(powers.as_slice()).map(|(uk, p)| uk * p).sum();
    Ok(signal + relay_noise * gains.norm_sq())
}

/// `u_k = ||H2^+ e_k||^2`: forwarding `p_k` to user k costs `u_k p_k`
/// watts of relay transmit power.
fn relay_signal_costs(ch: &ChannelRealization) -> Result<Vec<f64>> {
    let k = ch.k_users();
    let rank = crate::linalg::numerical_rank(&ch.h2);
    if rank < k {
        return Err(SolveError::RankDeficient { rank, needed: k });
    }
    let h2p = pseudo_inverse(&ch.h2);
    Ok((0..k).map(|j| h2p.column(j).norm_squared()).collect())
}

#[derive(Debug, Clone)]
pub struct RelayOutcome {
    pub gains: RelayGains,
    pub powers: PowerAllocation,
    /// Sum rate, bits/s/Hz.
    pub se: f64,
    /// Bits per Joule.
    pub ee: f64,
    /// Consumed power including the relay terms, watts.
    pub total_power: f64,
    /// Radiated BS power, watts.
    pub bs_tx_power: f64,
    /// Radiated relay power, watts.
    pub relay_tx_power: f64,
    pub feasible: bool,
    /// Grid candidates that admitted a feasible power allocation.
    pub feasible_candidates: usize,
}

fn decode_gains(mut index: u64, n: usize, mags: &[f64], phases: usize) -> CVector {
    // per element: option 0 is zero gain, then (mag, phase) pairs
    let per_element = 1 + (mags.len() - 1) * phases;
    let step = std::f64::consts::TAU / phases as f64;
    CVector::from_iterator(
        n,
        (0..n).map(|_| {
            let opt = (index % per_element as u64) as usize;
            index /= per_element as u64;
            if opt == 0 {
                C64::new(0.0, 0.0)
            } else {
                let mag = mags[1 + (opt - 1) / phases];
                let ang = ((opt - 1) % phases) as f64 * step;
                C64::new(mag * ang.cos(), mag * ang.sin())
            }
        }),
    )
}

/// Exhaustive EE maximization over the relay gain grid, with the transmit
/// powers globally re-optimized for every gain candidate.
///
/// The per-element magnitude range is sized so that a full-magnitude gain
/// vector alone stays within the relay budget once the QoS floors are
/// served. Candidates whose effective channel cannot be zero-forced, or
/// whose floors exceed either power budget, are skipped.
pub fn optimize_relay(
    ch: &ChannelRealization,
    config: &SystemConfig,
    options: &RelayOptions,
) -> Result<RelayOutcome> {
    let n = ch.n_elements();
    let k = ch.k_users();
    if n > options.max_elements {
        return Err(SolveError::GridCapExceeded {
            got: n,
            max: options.max_elements,
        });
    }
    let u = relay_signal_costs(ch)?;

    // magnitude cap from the relay budget with floors at the user-noise level
    let min_floor_cost: f64 = config
        .r_min
        .iter()
        .zip(&u)
        .map(|(&r, uk)| uk * qos_floor(r, config.sigma2))
        .sum();
    let v_budget = (options.p_relay_max - min_floor_cost).max(0.0);
    let v_max = (v_budget / (options.relay_noise * n as f64)).sqrt();
    let mags: Vec<f64> = match options.mag_spacing {
        MagnitudeSpacing::Linear => (0..options.mag_levels)
            .map(|i| v_max * i as f64 / (options.mag_levels - 1) as f64)
            .collect(),
        MagnitudeSpacing::Log => {
            let interior = options.mag_levels - 1;
            let mut m = vec![0.0];
            m.extend((0..interior).map(|i| {
                let frac = i as f64 / (interior - 1).max(1) as f64;
                v_max * 10f64.powf(-6.0 * (1.0 - frac))
            }));
            m
        }
    };

    let per_element = 1 + (options.mag_levels - 1) * options.phase_levels;
    let combos = (per_element as u64).pow(n as u32);

    struct Cand {
        ee: f64,
        index: u64,
        powers: Vec<f64>,
    }

    let static_part = config.p_bs + k as f64 * config.p_ue + n as f64 * options.p_antenna;

    let evaluate = |index: u64| -> Option<Cand> {
        let gains = RelayGains {
            v: decode_gains(index, n, &mags, options.phase_levels),
        };
        let noise_fwd = options.relay_noise * gains.norm_sq();
        let relay_cap = options.p_relay_max - noise_fwd;
        if relay_cap < 0.0 {
            return None;
        }

        let w = gain_noise_terms(&gains, ch);
        let noise: Vec<f64> = w
            .iter()
            .map(|&wk| if options.squared_gain_noise { wk * wk } else { wk } + config.sigma2)
            .collect();
        let floors: Vec<f64> = config
            .r_min
            .iter()
            .zip(&noise)
            .map(|(&r, &s)| qos_floor(r, s))
            .collect();

        // ZF through the relay: effective channel H2 V H1
        let mut h2v = ch.h2.clone();
        for (j, v) in gains.v.iter().enumerate() {
            let mut col = h2v.column_mut(j);
            col *= *v;
        }
        let eff = &h2v * &ch.h1;
        if crate::linalg::numerical_rank(&eff) < k {
            return None;
        }
        let g = pseudo_inverse(&eff);
        let costs: Vec<f64> = (0..k).map(|j| g.column(j).norm_squared()).collect();

        let prob = RatioProblem {
            noise,
            floors,
            denom_weights: u.iter().map(|uk| config.xi + options.xi_af * uk).collect(),
            denom_const: static_part + options.xi_af * noise_fwd,
            budgets: vec![
                Budget {
                    weights: costs,
                    cap: config.p_max,
                },
                Budget {
                    weights: u.clone(),
                    cap: relay_cap,
                },
            ],
        };
        let out = prob.dinkelbach(options.epsilon).ok()?;
        Some(Cand {
            ee: config.bandwidth * out.lambda,
            index,
            powers: out.powers,
        })
    };

    let pick = |a: Option<Cand>, b: Option<Cand>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.ee > a.ee || (b.ee == a.ee && b.index < a.index) {
                Some(b)
            } else {
                Some(a)
            }
        }
    };
    let (best, feasible_candidates) = (0..combos)
        .into_par_iter()
        .fold(
            || (None::<Cand>, 0usize),
            |(acc, count), i| match evaluate(i) {
                Some(c) => (pick(acc, Some(c)), count + 1),
                None => (acc, count),
            },
        )
        .reduce(|| (None, 0), |(a, ca), (b, cb)| (pick(a, b), ca + cb));

    match best {
        Some(cand) => {
            let gains = RelayGains {
                v: decode_gains(cand.index, n, &mags, options.phase_levels),
            };
            let powers = PowerAllocation::new(cand.powers);
            let se = relay_rate(
                &powers,
                &gains,
                ch,
                config.sigma2,
                options.squared_gain_noise,
            );
            let relay_tx = relay_power(&powers, &gains, ch, options.relay_noise)?;
            let total = config.xi * powers.total() + static_part + options.xi_af * relay_tx;

            let mut h2v = ch.h2.clone();
            for (j, v) in gains.v.iter().enumerate() {
                let mut col = h2v.column_mut(j);
                col *= *v;
            }
            let eff_ch = ChannelRealization {
                h1: ch.h1.clone(),
                h2: h2v,
                user_positions: ch.user_positions.clone(),
            };
            let bs_tx = zf_column_costs(&eff_ch, &PhaseProfile::uniform(n, 0.0))?
                .iter()
                .zip(powers.as_slice())
                .map(|(c, p)| c * p)
                .sum();

            Ok(RelayOutcome {
                gains,
                powers,
                se,
                ee: config.bandwidth * se / total,
                total_power: total,
                bs_tx_power: bs_tx,
                relay_tx_power: relay_tx,
                feasible: true,
                feasible_candidates,
            })
        }
        None => Ok(RelayOutcome {
            gains: RelayGains::zeros(n),
            powers: PowerAllocation::zeros(k),
            se: 0.0,
            ee: 0.0,
            total_power: static_part,
            bs_tx_power: 0.0,
            relay_tx_power: 0.0,
            feasible: false,
            feasible_candidates: 0,
        }),
    }
}
