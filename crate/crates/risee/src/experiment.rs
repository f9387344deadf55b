//! Monte-Carlo experiment harness: run a sweep of scenarios over seeded
//! channel draws, one row per (sweep value, trial, solver), plus aggregate
//! rows with means and standard errors.
//!
//! Seeding contract: trial `t` always uses seed `base_seed + t`, and the
//! channel draw depends only on the effective scenario and the seed, so
//! every solver in the list sees identical channels and adding or removing
//! solvers never changes the draws.

use crate::channel::generate_channels;
use crate::driver::{genie_rate, solve, SolverSpec};
use crate::oracle::{joint_grid_max, GridSpec};
use crate::relay::{optimize_relay, RelayOptions};
use crate::types::{Result, SolveError, SystemConfig};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

#[derive(Debug, Clone)]
pub enum Sweep {
    /// BS power budget, watts.
    PMax(Vec<f64>),
    /// Surface element count.
    Elements(Vec<usize>),
    /// Per-user rate floor as a fraction of the genie rate.
    QosFraction(Vec<f64>),
    /// Transmit SNR `p_max / sigma2` in dB; pins the noise power.
    SnrDb(Vec<f64>),
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::PMax(v) => v.clone(),
            Sweep::Elements(v) => v.iter().map(|&n| n as f64).collect(),
            Sweep::QosFraction(v) => v.clone(),
            Sweep::SnrDb(v) => v.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Sweep::PMax(_) => "pmax_w",
            Sweep::Elements(_) => "n_elements",
            Sweep::QosFraction(_) => "qos_fraction",
            Sweep::SnrDb(_) => "snr_db",
        }
    }
}

#[derive(Debug, Clone)]
pub enum SolverChoice {
    Ris(SolverSpec),
    Relay,
    Oracle(crate::driver::Objective, GridSpec),
}

impl SolverChoice {
    pub fn id(&self) -> String {
        match self {
            SolverChoice::Ris(spec) => spec.id(),
            SolverChoice::Relay => "relay".into(),
            SolverChoice::Oracle(obj, _) => format!("oracle-{}", obj.id()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub scenario: SystemConfig,
    pub sweep: Sweep,
    pub trials: usize,
    pub base_seed: u64,
    pub solvers: Vec<SolverChoice>,
    /// When set, `run_and_emit` writes `<prefix>_trials.csv` and
    /// `<prefix>_summary.csv`.
    pub output_prefix: Option<String>,
    /// Worker threads; 0 uses the global default.
    pub workers: usize,
    /// Element-count sweeps also set K = N.
    pub tie_k_to_n: bool,
    /// Record wall-clock times. Disable to make output files bitwise
    /// reproducible run-to-run.
    pub record_timing: bool,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SolveError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        if self.sweep.values().is_empty() {
            return Err(SolveError::InvalidConfig("sweep must be non-empty".into()));
        }
        if self.solvers.is_empty() {
            return Err(SolveError::InvalidConfig("need at least one solver".into()));
        }
        Ok(())
    }

    /// Scenario at one sweep point.
    pub fn effective_config(&self, sweep_idx: usize) -> SystemConfig {
        let mut cfg = self.scenario.clone();
        match &self.sweep {
            Sweep::PMax(v) => cfg.p_max = v[sweep_idx],
            Sweep::Elements(v) => {
                cfg.n_elements = v[sweep_idx];
                if self.tie_k_to_n {
                    cfg.k_users = v[sweep_idx];
                    cfg.r_min = vec![cfg.r_min.first().copied().unwrap_or(0.0); cfg.k_users];
                }
            }
            Sweep::QosFraction(v) => {
                let r = v[sweep_idx] * genie_rate(&cfg);
                cfg.r_min = vec![r; cfg.k_users];
            }
            Sweep::SnrDb(v) => {
                cfg.sigma2 = cfg.p_max / crate::units::db_to_linear(v[sweep_idx]);
            }
        }
        cfg
    }
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    pub solver: String,
    pub se: f64,
    pub ee: f64,
    pub total_power: f64,
    pub bs_tx_power: f64,
    pub outer_iterations: usize,
    pub feasible: bool,
    pub qos_relaxed: bool,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct AggregateRecord {
    pub sweep_value: f64,
    pub solver: String,
    pub trials: usize,
    pub errors: usize,
    /// Fraction of error-free trials solved without relaxing the floors.
    pub feasibility_rate: f64,
    pub se_mean: f64,
    pub se_stderr: f64,
    pub ee_mean: f64,
    pub ee_stderr: f64,
    pub total_power_mean: f64,
    pub bs_tx_power_mean: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub sweep_kind: &'static str,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRecord>,
}

fn run_single(
    choice: &SolverChoice,
    config: &SystemConfig,
    seed: u64,
    record_timing: bool,
) -> (f64, f64, f64, f64, usize, bool, bool, f64, Option<String>) {
    let started = Instant::now();
    let ch = generate_channels(config, seed);
    let outcome: Result<(f64, f64, f64, f64, usize, bool, bool)> = match choice {
        SolverChoice::Ris(spec) => solve(&ch, config, spec).map(|o| {
            (
                o.se,
                o.ee,
                o.total_power,
                o.bs_tx_power,
                o.outer_iterations,
                o.feasible,
                o.qos_relaxed,
            )
        }),
        SolverChoice::Relay => {
            let opts = RelayOptions::from_config(config);
            optimize_relay(&ch, config, &opts).map(|o| {
                (
                    o.se,
                    o.ee,
                    o.total_power,
                    o.bs_tx_power,
                    1,
                    o.feasible,
                    false,
                )
            })
        }
        SolverChoice::Oracle(obj, grid) => joint_grid_max(&ch, config, *obj, grid).map(|o| {
            (
                o.se,
                o.ee,
                o.total_power,
                o.bs_tx_power,
                o.outer_iterations,
                o.feasible,
                false,
            )
        }),
    };
    let elapsed = if record_timing {
        started.elapsed().as_secs_f64()
    } else {
        0.0
    };
    match outcome {
        Ok((se, ee, tp, bs, it, feas, relaxed)) => {
            (se, ee, tp, bs, it, feas, relaxed, elapsed, None)
        }
        Err(e) => (
            f64::NAN,
            f64::NAN,
            f64::NAN,
            f64::NAN,
            0,
            false,
            false,
            elapsed,
            Some(e.to_string()),
        ),
    }
}

/// Run every (sweep value, trial, solver) combination. Rows come back in
/// deterministic (sweep, trial, solver) order regardless of scheduling;
/// per-trial failures are recorded in their row and never abort the sweep.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResults> {
    plan.validate()?;
    let sweep_values = plan.sweep.values();

    let jobs: Vec<(usize, usize)> = (0..sweep_values.len())
        .flat_map(|s| (0..plan.trials).map(move |t| (s, t)))
        .collect();

    let run_all = || -> Vec<TrialRecord> {
        jobs.par_iter()
            .flat_map_iter(|&(s, t)| {
                let config = plan.effective_config(s);
                let seed = plan.base_seed + t as u64;
                let sweep_value = sweep_values[s];
                plan.solvers.iter().map(move |choice| {
                    let (se, ee, total_power, bs_tx_power, iters, feasible, relaxed, wall, err) =
                        run_single(choice, &config, seed, plan.record_timing);
                    TrialRecord {
                        sweep_value,
                        trial: t,
                        seed,
                        solver: choice.id(),
                        se,
                        ee,
                        total_power,
                        bs_tx_power,
                        outer_iterations: iters,
                        feasible,
                        qos_relaxed: relaxed,
                        wall_time_s: wall,
                        error: err,
                    }
                })
                .collect::<Vec<_>>()
            })
            .collect()
    };

    let mut trials = if plan.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(plan.workers)
            .build()
            .map_err(|e| SolveError::InvalidConfig(e.to_string()))?
            .install(run_all)
    } else {
        run_all()
    };

    let solver_order: Vec<String> = plan.solvers.iter().map(|c| c.id()).collect();
    trials.sort_by(|a, b| {
        let ka = (
            sweep_values
                .iter()
                .position(|&v| v == a.sweep_value)
                .unwrap_or(usize::MAX),
            a.trial,
            solver_order
                .iter()
                .position(|s| *s == a.solver)
                .unwrap_or(usize::MAX),
        );
        let kb = (
            sweep_values
                .iter()
                .position(|&v| v == b.sweep_value)
                .unwrap_or(usize::MAX),
            b.trial,
            solver_order
                .iter()
                .position(|s| *s == b.solver)
                .unwrap_or(usize::MAX),
        );
        ka.cmp(&kb)
    });

    let aggregates = aggregate(&trials, &sweep_values, &solver_order);
    Ok(ExperimentResults {
        sweep_kind: plan.sweep.kind(),
        trials,
        aggregates,
    })
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn aggregate(
    trials: &[TrialRecord],
    sweep_values: &[f64],
    solver_order: &[String],
) -> Vec<AggregateRecord> {
    let mut out = Vec::new();
    for &v in sweep_values {
        for solver in solver_order {
            let rows: Vec<&TrialRecord> = trials
                .iter()
                .filter(|r| r.sweep_value == v && &r.solver == solver)
                .collect();
            if rows.is_empty() {
                continue;
            }
            let ok: Vec<&&TrialRecord> = rows.iter().filter(|r| r.error.is_none()).collect();
            let se: Vec<f64> = ok.iter().map(|r| r.se).collect();
            let ee: Vec<f64> = ok.iter().map(|r| r.ee).collect();
            let tp: Vec<f64> = ok.iter().map(|r| r.total_power).collect();
            let bs: Vec<f64> = ok.iter().map(|r| r.bs_tx_power).collect();
            let (se_mean, se_stderr) = mean_and_stderr(&se);
            let (ee_mean, ee_stderr) = mean_and_stderr(&ee);
            let feasible_ok = ok.iter().filter(|r| r.feasible && !r.qos_relaxed).count();
            out.push(AggregateRecord {
                sweep_value: v,
                solver: solver.clone(),
                trials: rows.len(),
                errors: rows.len() - ok.len(),
                feasibility_rate: if ok.is_empty() {
                    0.0
                } else {
                    feasible_ok as f64 / ok.len() as f64
                },
                se_mean,
                se_stderr,
                ee_mean,
                ee_stderr,
                total_power_mean: mean_and_stderr(&tp).0,
                bs_tx_power_mean: mean_and_stderr(&bs).0,
            });
        }
    }
    out
}

pub const TRIALS_HEADER: &str = "sweep_kind,sweep_value,trial,seed,solver,se_bps_hz,ee_bits_per_joule,total_power_w,bs_tx_power_w,outer_iterations,feasible,qos_relaxed,wall_time_s,error";
pub const SUMMARY_HEADER: &str = "sweep_kind,sweep_value,solver,trials,errors,feasibility_rate,se_mean,se_stderr,ee_mean,ee_stderr,total_power_mean_w,bs_tx_power_mean_w";

/// Scientific notation with enough digits to make parsing lossless.
fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:e}")
    }
}

pub fn trials_csv(results: &ExperimentResults) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for r in &results.trials {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            results.sweep_kind,
            fmt_float(r.sweep_value),
            r.trial,
            r.seed,
            r.solver,
            fmt_float(r.se),
            fmt_float(r.ee),
            fmt_float(r.total_power),
            fmt_float(r.bs_tx_power),
            r.outer_iterations,
            r.feasible,
            r.qos_relaxed,
            fmt_float(r.wall_time_s),
            r.error.as_deref().map(sanitize_error).unwrap_or_default(),
        );
    }
    out
}

fn sanitize_error(e: &str) -> String {
    e.replace([',', '\n'], ";")
}

pub fn summary_csv(results: &ExperimentResults) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for a in &results.aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            results.sweep_kind,
            fmt_float(a.sweep_value),
            a.solver,
            a.trials,
            a.errors,
            fmt_float(a.feasibility_rate),
            fmt_float(a.se_mean),
            fmt_float(a.se_stderr),
            fmt_float(a.ee_mean),
            fmt_float(a.ee_stderr),
            fmt_float(a.total_power_mean),
            fmt_float(a.bs_tx_power_mean),
        );
    }
    out
}

/// Write `<prefix>_trials.csv` and `<prefix>_summary.csv`.
pub fn emit_csv(results: &ExperimentResults, prefix: &str) -> Result<()> {
    let trials_path = format!("{prefix}_trials.csv");
    let summary_path = format!("{prefix}_summary.csv");
    if let Some(parent) = Path::new(&trials_path).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(trials_path, trials_csv(results))?;
    std::fs::write(summary_path, summary_csv(results))?;
    Ok(())
}

/// Run the plan and write its CSVs when an output prefix is set. Returns
/// the number of rows that recorded an error.
pub fn run_and_emit(plan: &ExperimentPlan) -> Result<(ExperimentResults, usize)> {
    let results = run_experiment(plan)?;
    if let Some(prefix) = &plan.output_prefix {
        emit_csv(&results, prefix)?;
    }
    let errors = results.trials.iter().filter(|r| r.error.is_some()).count();
    Ok((results, errors))
}
