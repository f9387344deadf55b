//! Command-line front end: single solves, Monte-Carlo sweeps, and the
//! oracle / relay baselines. Progress goes to stderr, results to stdout or
//! the CSV files named by `--out`. Exit code is nonzero when any trial
//! recorded an error.

use clap::{Args, Parser, Subcommand};
use risee::driver::{solve, Objective, PhaseMethod, SolverSpec};
use risee::experiment::{run_and_emit, ExperimentPlan, SolverChoice, Sweep};
use risee::oracle::{joint_grid_max, GridSpec};
use risee::relay::{optimize_relay, RelayOptions};
use risee::scenario::{load_plan, load_scenario, solver_from_id};
use risee::types::SystemConfig;
use risee::{channel, units};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "risee",
    about = "Energy-efficiency solvers and Monte-Carlo experiments for a surface-assisted multi-user downlink"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario TOML file; omitted means the desk-scale default
    /// (M=8, K=N=4 outdoor).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the BS power budget, dBm.
    #[arg(long)]
    pmax_dbm: Option<f64>,
    /// Set every user's rate floor to this fraction of the genie rate.
    #[arg(long)]
    qos_fraction: Option<f64>,
}

impl ScenarioArgs {
    fn build(&self) -> risee::Result<SystemConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_scenario(path)?,
            None => SystemConfig::desk_default(),
        };
        if let Some(dbm) = self.pmax_dbm {
            cfg.p_max = units::dbm_to_watts(dbm);
        }
        if let Some(frac) = self.qos_fraction {
            let r = frac * risee::genie_rate(&cfg);
            cfg.r_min = vec![r; cfg.k_users];
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel draw and print the outcome.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_algorithm, default_value = "sfp")]
        algorithm: PhaseMethod,
        #[arg(long, value_parser = parse_objective, default_value = "ee")]
        objective: Objective,
    },
    /// Run a Monte-Carlo sweep from a plan file or from flags.
    Sweep {
        /// Plan TOML file; overrides every other flag except --out.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Scenario TOML file for flag mode; omitted means the desk default.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Set every user's rate floor to this fraction of the genie rate.
        #[arg(long)]
        qos_fraction: Option<f64>,
        /// Comma-separated budget sweep in dBm (flag mode).
        #[arg(long, value_delimiter = ',')]
        pmax_dbm: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Base seed; trial t uses base + t.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solver ids: gradient-ee, sfp-ee, gradient-se, sfp-se, relay,
        /// oracle-ee, oracle-se.
        #[arg(long, value_delimiter = ',', default_values_t = [String::from("gradient-ee"), String::from("sfp-ee")])]
        solvers: Vec<String>,
        /// Output prefix for <prefix>_trials.csv and <prefix>_summary.csv.
        #[arg(long)]
        out: Option<String>,
        /// Worker threads (0 = default).
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Exhaustive joint phase/power grid search on one draw.
    Oracle {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = parse_objective, default_value = "se")]
        objective: Objective,
        #[arg(long, default_value_t = 64)]
        points_per_angle: usize,
        #[arg(long, default_value_t = 16)]
        points_per_power: usize,
    },
    /// Exhaustive amplify-and-forward relay baseline on one draw.
    Relay {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_algorithm(s: &str) -> Result<PhaseMethod, String> {
    match s {
        "gradient" => Ok(PhaseMethod::Gradient),
        "sfp" => Ok(PhaseMethod::Sfp),
        other => Err(format!("unknown algorithm '{other}' (gradient | sfp)")),
    }
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    match s {
        "ee" => Ok(Objective::EnergyEfficiency),
        "se" => Ok(Objective::SumRate),
        other => Err(format!("unknown objective '{other}' (ee | se)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(errors) => {
            eprintln!("{errors} trial(s) recorded an error");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> risee::Result<usize> {
    match cli.command {
        Command::Solve {
            scenario,
            seed,
            algorithm,
            objective,
        } => {
            let config = scenario.build()?;
            let ch = channel::generate_channels(&config, seed);
            let spec = SolverSpec::new(algorithm, objective);
            eprintln!(
                "solving seed {seed} with {} (M={} K={} N={})",
                spec.id(),
                config.m_antennas,
                config.k_users,
                config.n_elements
            );
            let out = solve(&ch, &config, &spec)?;
            println!("solver:            {}", spec.id());
            println!("spectral eff:      {:.6} bits/s/Hz", out.se);
            println!("energy eff:        {:.6e} bits/Joule", out.ee);
            println!("total power:       {:.6e} W", out.total_power);
            println!(
                "bs tx power:       {:.6e} W (budget {:.6e} W)",
                out.bs_tx_power, config.p_max
            );
            println!("outer iterations:  {}", out.outer_iterations);
            println!("feasible:          {}", out.feasible);
            println!("qos relaxed:       {}", out.qos_relaxed);
            println!("converged:         {}", out.converged);
            Ok(0)
        }
        Command::Sweep {
            plan,
            config,
            qos_fraction,
            pmax_dbm,
            trials,
            seed,
            solvers,
            out,
            workers,
        } => {
            let mut plan = match plan {
                Some(path) => load_plan(&path)?,
                None => {
                    if pmax_dbm.is_empty() {
                        return Err(risee::SolveError::InvalidConfig(
                            "flag mode needs --pmax-dbm <list> (or use --plan)".into(),
                        ));
                    }
                    let scenario =
                        ScenarioArgs { config, pmax_dbm: None, qos_fraction }.build()?;
                    let solvers = solvers
                        .iter()
                        .map(|s| solver_from_id(s))
                        .collect::<risee::Result<Vec<SolverChoice>>>()?;
                    ExperimentPlan {
                        scenario,
                        sweep: Sweep::PMax(
                            pmax_dbm.iter().map(|&d| units::dbm_to_watts(d)).collect(),
                        ),
                        trials,
                        base_seed: seed,
                        solvers,
                        output_prefix: None,
                        workers,
                        tie_k_to_n: true,
                        record_timing: true,
                    }
                }
            };
            if out.is_some() {
                plan.output_prefix = out;
            }
            eprintln!(
                "sweep: {} point(s) x {} trial(s) x {} solver(s)",
                plan.sweep.values().len(),
                plan.trials,
                plan.solvers.len()
            );
            let (results, errors) = run_and_emit(&plan)?;
            match &plan.output_prefix {
                Some(prefix) => {
                    eprintln!("wrote {prefix}_trials.csv and {prefix}_summary.csv")
                }
                None => print!("{}", risee::experiment::summary_csv(&results)),
            }
            Ok(errors)
        }
        Command::Oracle {
            scenario,
            seed,
            objective,
            points_per_angle,
            points_per_power,
        } => {
            let config = scenario.build()?;
            let ch = channel::generate_channels(&config, seed);
            let grid = GridSpec {
                points_per_angle,
                points_per_power,
                ..GridSpec::default()
            };
            eprintln!(
                "grid search: {}^{} angles x up to {}^{} power levels",
                points_per_angle, config.n_elements, points_per_power, config.k_users
            );
            let out = joint_grid_max(&ch, &config, objective, &grid)?;
            println!("objective:    {}", objective.id());
            println!("spectral eff: {:.6} bits/s/Hz", out.se);
            println!("energy eff:   {:.6e} bits/Joule", out.ee);
            println!("bs tx power:  {:.6e} W", out.bs_tx_power);
            println!("feasible:     {}", out.feasible);
            Ok(0)
        }
        Command::Relay { scenario, seed } => {
            let config = scenario.build()?;
            let ch = channel::generate_channels(&config, seed);
            let opts = RelayOptions::from_config(&config);
            eprintln!(
                "relay grid: {} magnitudes x {} phases per element, {} elements",
                opts.mag_levels, opts.phase_levels, config.n_elements
            );
            let out = optimize_relay(&ch, &config, &opts)?;
            println!("spectral eff:   {:.6} bits/s/Hz", out.se);
            println!("energy eff:     {:.6e} bits/Joule", out.ee);
            println!("bs tx power:    {:.6e} W", out.bs_tx_power);
            println!("relay tx power: {:.6e} W", out.relay_tx_power);
            println!(
                "feasible:       {} ({} grid candidates)",
                out.feasible, out.feasible_candidates
            );
            Ok(0)
        }
    }
}
