//! Validate both alternating solvers against the exhaustive joint
//! phase/power grid at a tiny size, in sum-rate mode at 20 dB SNR.
//!
//! Run with: cargo run --release --example oracle_check

use risee::channel::generate_channels;
use risee::driver::{solve, Objective, PhaseMethod, SolverSpec};
use risee::oracle::{joint_grid_max, GridSpec};
use risee::types::Rect;
use risee::SystemConfig;

fn main() -> risee::Result<()> {
    let mut config = SystemConfig::outdoor(8, 2, 2);
    config.pathloss_ref = 1.0;
    config.pathloss_exp = 0.0;
    config.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
    config.p_max = 1.0;
    config.sigma2 = config.p_max / 100.0; // 20 dB transmit SNR

    let grid = GridSpec {
        points_per_angle: 181,
        points_per_power: 32,
        max_dim: 3,
        budget: 1e8,
    };

    println!("seed  oracle    gradient  sfp      (SE, bits/s/Hz)");
    for seed in 0..5 {
        let ch = generate_channels(&config, seed);
        let oracle = joint_grid_max(&ch, &config, Objective::SumRate, &grid)?;
        let mut spec = SolverSpec::new(PhaseMethod::Gradient, Objective::SumRate);
        spec.epsilon = 1e-6;
        let grad = solve(&ch, &config, &spec)?;
        spec.phase_method = PhaseMethod::Sfp;
        let sfp = solve(&ch, &config, &spec)?;
        println!(
            "{seed:4}  {:8.4}  {:8.4}  {:8.4}   ({:+.2}%, {:+.2}%)",
            oracle.se,
            grad.se,
            sfp.se,
            100.0 * (grad.se / oracle.se - 1.0),
            100.0 * (sfp.se / oracle.se - 1.0),
        );
    }
    Ok(())
}
