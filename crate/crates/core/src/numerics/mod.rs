//! Foundation numerics: modified Bessel functions of the second kind,
//! adaptive Gauss-Kronrod quadrature and bracketing root finding.

mod bessel;
mod quadrature;
mod roots;

pub use bessel::{
    bessel_k, bessel_k_flagged, bessel_k_scaled, bessel_k_scaled_0123, KValue, UNDERFLOW_ARG,
};
pub use quadrature::{
    integrate, integrate_2d, integrate_semi_infinite, integrate_with_breaks, Domain2d, Quadrature,
    TailBound,
};
pub use roots::{find_root, first_sign_change, minimize_scalar, Bracket};

use crate::error::{Error, Result};

/// Stopping criteria shared by the quadrature and root-finding routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_evals: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_evals: usize) -> Result<Self> {
        if !(rel >= 0.0 && abs >= 0.0) || (rel == 0.0 && abs == 0.0) {
            return Err(Error::domain(format!(
                "tolerance needs rel >= 0, abs >= 0 and one of them positive (rel={rel}, abs={abs})"
            )));
        }
        if max_evals == 0 {
            return Err(Error::domain("max_evals must be at least 1"));
        }
        Ok(Self { rel, abs, max_evals })
    }

    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            abs: 0.0,
            max_evals: 200_000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::relative(1e-10)
    }
}
