//! Passive surface versus an active amplify-and-forward relay on the same
//! channel draws. The relay buys rate with amplification but pays for it
//! in consumed power, so the surface wins on bits per Joule.
//!
//! Run with: cargo run --release --example relay_comparison

use risee::channel::generate_channels;
use risee::driver::{solve, Objective, PhaseMethod, SolverSpec};
use risee::relay::{optimize_relay, MagnitudeSpacing, RelayOptions};
use risee::types::Rect;
use risee::units::dbm_to_watts;
use risee::SystemConfig;

fn main() -> risee::Result<()> {
    let mut config = SystemConfig::outdoor(8, 2, 2);
    config.pathloss_ref = 1.0;
    config.pathloss_exp = 0.0;
    config.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
    config.sigma2 = 1e-6;
    config.p_bs = 1.0;
    config.p_max = dbm_to_watts(30.0);

    let trials = 10;
    let spec = SolverSpec::new(PhaseMethod::Sfp, Objective::EnergyEfficiency);
    // log-spaced gain magnitudes: the useful gains sit orders below the
    // budget-derived cap at this noise level
    let mut relay_opts = RelayOptions::from_config(&config);
    relay_opts.mag_spacing = MagnitudeSpacing::Log;

    let mut surface = (0.0, 0.0);
    let mut relay = (0.0, 0.0);
    for seed in 0..trials {
        let ch = generate_channels(&config, seed);
        let s = solve(&ch, &config, &spec)?;
        let r = optimize_relay(&ch, &config, &relay_opts)?;
        surface.0 += s.se;
        surface.1 += s.ee;
        relay.0 += r.se;
        relay.1 += r.ee;
        println!(
            "seed {seed}: surface SE {:.2} EE {:.3e} | relay SE {:.2} EE {:.3e}",
            s.se, s.ee, r.se, r.ee
        );
    }
    let t = trials as f64;
    println!("\naverages over {trials} draws:");
    println!(
        "  surface: SE {:.2} bits/s/Hz, EE {:.3e} bits/Joule",
        surface.0 / t,
        surface.1 / t
    );
    println!(
        "  relay:   SE {:.2} bits/s/Hz, EE {:.3e} bits/Joule",
        relay.0 / t,
        relay.1 / t
    );
    println!(
        "  surface EE gain: {:.0}%",
        100.0 * (surface.1 / relay.1 - 1.0)
    );
    Ok(())
}
