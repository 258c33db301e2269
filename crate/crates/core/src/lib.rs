//! Hegselmann-Krause opinion dynamics with transmission and reaction delays.

// guards like `!(x > 0.0)` are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiment;
#[doc(hidden)]
pub mod fuzzing;
pub mod metrics;
pub mod model;
pub mod rates;
pub mod toy;

pub use error::{BlowUp, Error, Result};
