//! Load a scenario from TOML text with unit-suffixed quantities, then
//! solve it. The same format works for the CLI's --config flag.
//!
//! Run with: cargo run --release --example custom_scenario

use risee::channel::generate_channels;
use risee::driver::{solve, Objective, PhaseMethod, SolverSpec};
use risee::scenario::parse_scenario;

const SCENARIO: &str = r#"
    m_antennas = 8
    k_users = 4
    n_elements = 4
    p_max = "24 dBm"
    p_bs = "9 dBW"
    p_ue = "10 dBm"
    p_element = "10 dBm"
    bandwidth = "180 kHz"
    sigma2 = "-60 dBm"
    xi = 1.2
    r_min = 0.25
    pathloss_ref = 1.0
    pathloss_exp = 0.0
    user_region = [0.0, 10.0, 0.0, 10.0]
"#;

fn main() -> risee::Result<()> {
    let config = parse_scenario(SCENARIO)?;
    println!(
        "parsed: budget {:.4} W, noise {:.2e} W, floors {:?} bits/s/Hz",
        config.p_max, config.sigma2, config.r_min
    );

    let ch = generate_channels(&config, 1);
    let spec = SolverSpec::new(PhaseMethod::Gradient, Objective::EnergyEfficiency);
    let out = solve(&ch, &config, &spec)?;
    println!(
        "solved: SE {:.3} bits/s/Hz, EE {:.3e} bits/Joule, feasible={}, qos_relaxed={}",
        out.se, out.ee, out.feasible, out.qos_relaxed
    );
    Ok(())
}
