//! De Broglie guidance and adaptive trajectory integration.

mod cash_karp;
mod integrate;
mod velocity;

pub use cash_karp::{cash_karp_step, CashKarpStep};
pub use integrate::{
    evolve, period, step, Flow, FlowEnd, IntegratorConfig, StepResult, Trajectory,
    TrajectoryStatus,
};
pub use velocity::{velocity, Velocity, VelocityField};
