//! Independent real-space evaluation of the first-order energy.
//!
//! Differentiating the first-order Green function under the surface integral
//! (see `docs/oracle_integrand.md`) gives
//!
//! ```text
//! U1 = −(1 / 8π² ε0) ∫ d²r̃ h(r̃) Fᵀ D F,
//! s = r0∥ − r̃,  R² = |s|² + z0²,
//! F = (−3 z0 sx, −3 z0 sy, |s|² − 2 z0²) / R⁵.
//! ```
//!
//! The integrand is smooth and bounded by `max|h| · tr D · 4 / |s|⁶`, which
//! fixes where the plane can be truncated.

use std::f64::consts::PI;

use crate::classical::AmplitudeGuard;
use crate::constants::EPSILON_0;
use crate::error::Result;
use crate::moments::SecondMoments;
use crate::numerics::{integrate_2d, Domain2d, Quadrature, TailBound, Tolerance};
use crate::profiles::RoughnessProfile;

const MAX_EVALS: usize = 4_000_000;

/// `Fᵀ D F` at lateral offset `s` from the source point.
fn contracted_field(d: &SecondMoments, z0: f64, sx: f64, sy: f64) -> f64 {
    let rho2 = sx * sx + sy * sy;
    let r2 = rho2 + z0 * z0;
    let inv_r5 = 1.0 / (r2 * r2 * r2.sqrt());
    let f = [-3.0 * z0 * sx * inv_r5, -3.0 * z0 * sy * inv_r5, (rho2 - 2.0 * z0 * z0) * inv_r5];
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += f[i] * d.get(i, j) * f[j];
        }
    }
    acc
}

/// Real-space first-order energy, to relative accuracy `rel`.
///
/// A first coarse pass sets the magnitude; the second pass then asks for
/// `rel / 20` of it as an absolute target, which also fixes the truncation
/// radius. Grids are extended periodically.
pub fn oracle_u1_realspace(
    d: &SecondMoments,
    profile: &RoughnessProfile,
    z0: f64,
    r0: (f64, f64),
    rel: f64,
    guard: AmplitudeGuard,
) -> Result<Quadrature> {
    super::check_z0(z0)?;
    guard.check(profile.max_height(), z0)?;
    if profile.is_empty() {
        return Err(crate::error::Error::EmptyProfile);
    }
    let prefactor = -1.0 / (8.0 * PI * PI * EPSILON_0);
    let bound = profile.max_height() * d.trace().abs() * 4.0 * prefactor.abs();
    if bound == 0.0 {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let natural = bound / z0.powi(4);
    let integrand =
        |x: f64, y: f64| prefactor * profile.evaluate_periodic(x, y) * contracted_field(d, z0, r0.0 - x, r0.1 - y);
    let domain = Domain2d::Plane {
        center: r0,
        scale: z0,
        tail: TailBound {
            coefficient: bound,
            power: 6.0,
        },
    };
    let coarse = integrate_2d(
        integrand,
        domain,
        Tolerance::new(1e-12, 1e-6 * natural, MAX_EVALS)?,
    )?;
    let target = 0.05 * rel * coarse.value.abs().max(1e-10 * natural);
    let mut fine = integrate_2d(integrand, domain, Tolerance::new(1e-12, target, MAX_EVALS)?)?;
    fine.evals += coarse.evals;
    Ok(fine)
}
