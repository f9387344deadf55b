//! Energy-efficiency maximization for a multi-user MISO downlink served
//! through a reconfigurable reflecting surface.
//!
//! A multi-antenna base station reaches K single-antenna users via an
//! N-element passive surface whose per-element phase shifts are the only
//! control (unit-modulus coefficients, no amplification). With zero-forcing
//! precoding at the BS, the per-user rates depend on the allocated powers
//! alone, while the phases decide how much BS transmit power that
//! allocation costs. The solvers alternate between
//!
//! - a phase step minimizing the required BS power (conjugate-gradient
//!   descent or a closed-form majorization-minimization update), and
//! - a power step solving the resulting single-ratio efficiency problem
//!   globally with Dinkelbach's algorithm,
//!
//! until the objective stabilizes. The crate also ships an exhaustive
//! amplify-and-forward relay baseline, brute-force grid oracles for
//! validating the solvers at small sizes, and a seeded Monte-Carlo
//! experiment harness with CSV output.
//!
//! Start from [`SystemConfig`], draw channels with
//! [`channel::generate_channels`], and call [`driver::solve`]; the
//! `examples/` directory has one runnable program per capability.

pub mod channel;
pub mod driver;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod phase_gradient;
pub mod phase_sfp;
pub mod power;
pub mod quadratic;
pub mod relay;
pub mod scenario;
pub mod types;
pub mod units;

pub use driver::{
    genie_rate, maximize_ee, maximize_se, solve, Objective, PhaseMethod, QosPolicy, SolverSpec,
};
pub use types::{
    ChannelRealization, PhaseProfile, PowerAllocation, Rect, Result, SolveError, SolveOutcome,
    SystemConfig,
};
