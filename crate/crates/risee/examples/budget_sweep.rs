//! Average SE and EE versus the BS power budget, for both phase
//! optimizers: the budget sweep shows the efficiency saturating once the
//! extra power stops paying for itself. Writes CSVs next to the working
//! directory.
//!
//! Run with: cargo run --release --example budget_sweep

use risee::driver::{Objective, PhaseMethod, SolverSpec};
use risee::experiment::{run_and_emit, ExperimentPlan, SolverChoice, Sweep};
use risee::types::Rect;
use risee::units::dbm_to_watts;
use risee::SystemConfig;

fn main() -> risee::Result<()> {
    // unit-gain desk scenario: saturation lands inside the sweep
    let mut scenario = SystemConfig::outdoor(8, 4, 4);
    scenario.pathloss_ref = 1.0;
    scenario.pathloss_exp = 0.0;
    scenario.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
    scenario.sigma2 = 1e-6;
    scenario.p_bs = 1.0;

    let sweep_dbm: Vec<f64> = (0..=9).map(|i| 4.0 * i as f64).collect();
    let plan = ExperimentPlan {
        scenario,
        sweep: Sweep::PMax(sweep_dbm.iter().map(|&d| dbm_to_watts(d)).collect()),
        trials: 50,
        base_seed: 1,
        solvers: vec![
            SolverChoice::Ris(SolverSpec::new(
                PhaseMethod::Gradient,
                Objective::EnergyEfficiency,
            )),
            SolverChoice::Ris(SolverSpec::new(
                PhaseMethod::Sfp,
                Objective::EnergyEfficiency,
            )),
        ],
        output_prefix: Some("budget_sweep".into()),
        workers: 0,
        tie_k_to_n: true,
        record_timing: true,
    };

    let (results, errors) = run_and_emit(&plan)?;
    println!("pmax_dbm  solver        SE (bits/s/Hz)  EE (bits/J)");
    for agg in &results.aggregates {
        println!(
            "{:8.1}  {:12}  {:14.3}  {:11.4e}",
            risee::units::watts_to_dbm(agg.sweep_value),
            agg.solver,
            agg.se_mean,
            agg.ee_mean
        );
    }
    println!("\nwrote budget_sweep_trials.csv and budget_sweep_summary.csv ({errors} errors)");
    Ok(())
}
