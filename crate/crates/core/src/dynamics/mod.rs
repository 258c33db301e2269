//! Right-hand sides of the delayed systems and their integration by the
//! method of steps.

mod integrate;
mod io;
mod oracle;
mod rhs;
mod trajectory;

pub use integrate::{
    integrate, integrate_rk4, IntegratorSpec, Method, BLOW_UP_THRESHOLD, DEFAULT_HORIZON_DELAYS,
    DEFAULT_STEPS_PER_DELAY,
};
pub use io::{fmt_real, read_trajectory_csv, write_trajectory_csv, TrajectoryTable, TRAJECTORY_CSV_HEADER};
pub use oracle::integrate_oracle;
pub use rhs::{rhs, rhs_from_states};
pub use trajectory::{sample, Interpolation, Trajectory, TrajectoryDoc};
