//! Casimir–Polder interaction of a polarizable particle with a gently
//! corrugated perfect mirror, to first order in the corrugation height.

pub mod classical;
pub mod cli;
pub mod constants;
pub mod error;
pub mod kernels;
pub mod moments;
pub mod numerics;
pub mod polarizability;
pub mod profiles;
pub mod quantum;

pub use error::{Error, Result};
