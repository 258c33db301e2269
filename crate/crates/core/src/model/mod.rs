//! System configuration, influence functions, initial data and
//! communication weights.

mod config;
mod datum;
mod influence;
mod state;
mod weights;

pub use config::{DelayKind, SystemConfig, WeightScheme};
pub use datum::{check_icass, IcassReport, InitialDatum, SampledPath};
pub use influence::{psi_floor, InfluenceFunction};
pub use state::{distance, norm, State};
pub use weights::{eval_weights, weights_from_states, RowSumContract, WeightMatrix, ROW_SUM_TOL};
