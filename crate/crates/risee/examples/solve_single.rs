//! Solve one channel draw with both phase optimizers and compare.
//!
//! Run with: cargo run --release --example solve_single

use risee::channel::generate_channels;
use risee::driver::{solve, Objective, PhaseMethod, SolverSpec};
use risee::types::Rect;
use risee::SystemConfig;

fn main() -> risee::Result<()> {
    // unit-gain channels at a moderate noise level; swap in
    // SystemConfig::desk_default() for the outdoor path-loss scenario,
    // where the same code runs at received powers ~17 orders lower
    let mut config = SystemConfig::outdoor(8, 4, 4);
    config.pathloss_ref = 1.0;
    config.pathloss_exp = 0.0;
    config.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
    config.sigma2 = 1e-6;
    config.p_bs = 1.0;
    config.p_max = 1.0;
    let seed = 7;
    let ch = generate_channels(&config, seed);

    println!(
        "scenario: M={} antennas, K={} users, N={} elements, budget {:.1} W",
        config.m_antennas, config.k_users, config.n_elements, config.p_max
    );
    println!("seed: {seed}\n");

    for method in [PhaseMethod::Gradient, PhaseMethod::Sfp] {
        let spec = SolverSpec::new(method, Objective::EnergyEfficiency);
        let out = solve(&ch, &config, &spec)?;
        println!("[{}]", spec.id());
        println!("  spectral efficiency: {:.6} bits/s/Hz", out.se);
        println!("  energy efficiency:   {:.4e} bits/Joule", out.ee);
        println!("  consumed power:      {:.4} W", out.total_power);
        println!("  BS transmit power:   {:.4e} W", out.bs_tx_power);
        println!("  outer iterations:    {}", out.outer_iterations);
        println!("  per-user powers (W): {:?}", out.powers.as_slice());
        println!();
    }
    Ok(())
}
