//! Diameter, radius, fluctuation, dissipation and Lyapunov diagnostics, plus
//! decay-rate fitting and oscillation counting.

mod energy;
mod fit;
mod geometry;
mod series;

pub use energy::{dissipation, dissipation_from_states, lyapunov};
pub use fit::{count_sign_changes, envelope_peaks, first_sustained_below, fit_decay_rate, DecayFit, SIGN_ATOL};
pub use geometry::{diameter, fluctuation, mean, radius};
pub use series::{consensus_time, MetricSeries, METRICS_CSV_HEADER};
