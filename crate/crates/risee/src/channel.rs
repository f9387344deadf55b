//! Channel generation: uniform user drops, distance-based large-scale
//! gain, and i.i.d. Rayleigh small-scale fading.

use crate::linalg::{CMatrix, C64};
use crate::types::{ChannelRealization, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Distances below this are clamped before applying the path-loss law,
/// which is referenced to 1 m.
const MIN_DISTANCE_M: f64 = 1.0;

/// Large-scale power gain at distance `d` meters.
pub fn pathloss(config: &SystemConfig, d: f64) -> f64 {
    let d = d.max(MIN_DISTANCE_M);
    config.pathloss_ref / d.powf(config.pathloss_exp)
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn complex_gaussian(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    // CN(0, scale^2): each component N(0, scale^2 / 2)
    let s = scale * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Draw one channel realization. Deterministic in `(config, seed)`: the
/// same pair always yields bitwise-identical matrices.
///
/// Users are placed uniformly in `config.user_region`; every entry of the
/// BS-to-surface matrix is CN(0,1) scaled by the square root of the
/// BS-to-surface gain, and row `k` of the surface-to-users matrix is
/// CN(0,1) scaled by the square root of the surface-to-user-`k` gain.
pub fn generate_channels(config: &SystemConfig, seed: u64) -> ChannelRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, k, n) = (config.m_antennas, config.k_users, config.n_elements);

    let user_positions: Vec<[f64; 2]> = (0..k)
        .map(|_| {
            let x = rng.gen_range(config.user_region.x_min..=config.user_region.x_max);
            let y = rng.gen_range(config.user_region.y_min..=config.user_region.y_max);
            [x, y]
        })
        .collect();

    let g1 = pathloss(config, distance(config.bs_pos, config.ris_pos)).sqrt();
    let h1 = CMatrix::from_fn(n, m, |_, _| complex_gaussian(&mut rng, g1));

    let mut h2 = CMatrix::zeros(k, n);
    for (ki, pos) in user_positions.iter().enumerate() {
        let gk = pathloss(config, distance(config.ris_pos, *pos)).sqrt();
        for ni in 0..n {
            h2[(ki, ni)] = complex_gaussian(&mut rng, gk);
        }
    }

    ChannelRealization {
        h1,
        h2,
        user_positions,
    }
}
