//! Rate-maximizing versus efficiency-maximizing designs across the budget
//! range. Below the efficiency saturation point the two coincide (all
//! power is worth spending); above it the rate design keeps burning the
//! full budget while the efficiency design holds back.
//!
//! Run with: cargo run --release --example se_vs_ee_designs

use risee::channel::generate_channels;
use risee::driver::{solve, Objective, PhaseMethod, SolverSpec};
use risee::types::Rect;
use risee::units::dbm_to_watts;
use risee::SystemConfig;

fn main() -> risee::Result<()> {
    let mut config = SystemConfig::outdoor(8, 4, 4);
    config.pathloss_ref = 1.0;
    config.pathloss_exp = 0.0;
    config.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
    config.sigma2 = 1e-6;
    config.p_bs = 1.0;

    let trials = 20;
    println!("pmax_dbm | SE-design: SE, EE        | EE-design: SE, EE");
    for dbm in [0.0, 6.0, 12.0, 18.0, 24.0, 30.0, 36.0] {
        config.p_max = dbm_to_watts(dbm);
        let mut acc = [0.0; 4];
        for seed in 0..trials {
            let ch = generate_channels(&config, seed);
            let mut spec = SolverSpec::new(PhaseMethod::Sfp, Objective::SumRate);
            spec.epsilon = 1e-6;
            let se_design = solve(&ch, &config, &spec)?;
            spec.objective = Objective::EnergyEfficiency;
            let ee_design = solve(&ch, &config, &spec)?;
            acc[0] += se_design.se;
            acc[1] += se_design.ee;
            acc[2] += ee_design.se;
            acc[3] += ee_design.ee;
        }
        let t = trials as f64;
        println!(
            "{:8.1} | {:10.2} {:12.3e} | {:10.2} {:12.3e}",
            dbm,
            acc[0] / t,
            acc[1] / t,
            acc[2] / t,
            acc[3] / t
        );
    }
    Ok(())
}
