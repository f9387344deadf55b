//! Efficiency versus the number of reflecting elements, evaluated by the
//! exhaustive joint grid. Each extra element improves the channel but
//! burns its own phase-shifter power, so when that power is substantial
//! an interior element count maximizes bits per Joule.
//!
//! Run with: cargo run --release --example element_count

use risee::channel::generate_channels;
use risee::driver::Objective;
use risee::oracle::{joint_grid_max, GridSpec};
use risee::types::Rect;
use risee::SystemConfig;

fn main() -> risee::Result<()> {
    let seeds = [0u64, 1, 2];
    let angle_points = [64usize, 64, 48, 21];

    for (label, p_element) in [("10 W per element", 10.0), ("1 nW per element", 1e-9)] {
        println!("{label}:");
        println!("  N  K  mean EE (bits/Joule)");
        for n in 1..=4usize {
            let k = n.min(2);
            let mut config = SystemConfig::outdoor(8, k, n);
            config.allow_general_dims = true;
            config.pathloss_ref = 1.0;
            config.pathloss_exp = 0.0;
            config.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
            config.sigma2 = 1e-6;
            config.p_bs = 1.0;
            config.p_max = 0.003;
            config.p_element = p_element;

            let grid = GridSpec {
                points_per_angle: angle_points[n - 1],
                points_per_power: 28,
                max_dim: 4,
                budget: 6e8,
            };
            let mut ee = 0.0;
            for &s in &seeds {
                let ch = generate_channels(&config, s);
                ee += joint_grid_max(&ch, &config, Objective::EnergyEfficiency, &grid)?.ee;
            }
            println!("  {n}  {k}  {:.4e}", ee / seeds.len() as f64);
        }
        println!();
    }
    Ok(())
}
