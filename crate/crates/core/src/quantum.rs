//! Nonretarded Casimir–Polder interaction of a polarizable spheroid with the
//! corrugated mirror. The landscape has the classical form with `d_i d_j`
//! replaced by the moment matrix `<d_i d_j>`.

use std::f64::consts::PI;

use crate::classical::{
    self, c_zero_border, classify_regime, AmplitudeGuard, Geometry, Regime, RegimeResult, XminPoint,
};
use crate::constants::EPSILON_0;
use crate::error::{Error, Result};
use crate::numerics::{minimize_scalar, Bracket, Tolerance};
use crate::polarizability::{moment_matrix, LorentzOscillator, MomentMatrix, SpheroidParticle};
use crate::profiles::RoughnessProfile;

/// A particle above a sinusoidal corrugation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpScenario {
    pub particle: SpheroidParticle,
    pub geom: Geometry,
}

impl CpScenario {
    pub fn new(particle: SpheroidParticle, geom: Geometry) -> Self {
        Self { particle, geom }
    }

    pub fn moments(&self) -> Result<MomentMatrix> {
        moment_matrix(&self.particle)
    }

    pub fn with_z0(mut self, z0: f64) -> Self {
        self.geom = self.geom.with_z0(z0);
        self
    }

    pub fn at(mut self, x0: f64) -> Self {
        self.geom = self.geom.at(x0);
        self
    }

    pub fn regime(&self) -> Result<RegimeResult> {
        classify_regime(&self.moments()?, self.geom.u())
    }
}

/// Flat-mirror energy.
pub fn u0_cp(m: &MomentMatrix, z0: f64) -> Result<f64> {
    classical::u0_classical(m, z0)
}

/// First-order energy above `a cos(k x)` at `x0 = scenario.geom.x0`.
pub fn u1_cp_sinusoid(scenario: &CpScenario) -> Result<f64> {
    scenario.geom.validate()?;
    classical::u1_classical_sinusoid(&scenario.moments()?, &scenario.geom)
}

/// First-order energy above an arbitrary profile.
pub fn u1_cp_general(
    particle: &SpheroidParticle,
    profile: &RoughnessProfile,
    z0: f64,
    r0: (f64, f64),
    guard: AmplitudeGuard,
) -> Result<f64> {
    classical::u1_classical_general(&moment_matrix(particle)?, profile, z0, r0, guard)
}

/// Moments of a spheroid of unit semi-minor axis; every border below is a
/// ratio of moments, so the size drops out.
fn unit_particle(aspect: f64, material: &LorentzOscillator, phi: f64, theta: f64) -> Result<SpheroidParticle> {
    SpheroidParticle::new(aspect, 1.0, *material, 1.0, phi, theta)
}

/// `λ/z0` at which `C = 0` for a particle lying along `x`; zero for a sphere.
pub fn transition_g(aspect: f64, material: &LorentzOscillator) -> Result<f64> {
    if aspect == 1.0 {
        unit_particle(aspect, material, 0.0, 0.0)?;
        return Ok(0.0);
    }
    border_phi(aspect, material, 0.0)
}

/// `λ/z0` at which `C = 0` for a particle lying in the surface plane at
/// azimuth `phi`. Shorter periods put the minima over the valleys.
pub fn border_phi(aspect: f64, material: &LorentzOscillator, phi: f64) -> Result<f64> {
    if phi.cos().abs() < 1e-12 {
        return Err(Error::domain("border is undefined for a particle along y"));
    }
    let p = unit_particle(aspect, material, phi, PI / 2.0)?;
    c_zero_border(&moment_matrix(&p)?)
}

/// Height at which the first-order landscape vanishes for the given period.
pub fn null_z0(particle: &SpheroidParticle, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
    }
    let m = moment_matrix(particle)?;
    let (lo, hi) = classical::BORDER_SCAN;
    let no_null = Error::NoSignChange {
        lo: wavelength / hi,
        hi: wavelength / lo,
    };
    // A vanishes only where B does too, which needs M_xz = 0.
    if m.xz().abs() > 1e-12 * m.trace() {
        return Err(no_null);
    }
    match c_zero_border(&m) {
        Ok(ratio) => Ok(wavelength / ratio),
        Err(Error::NoSignChange { .. }) => Err(no_null),
        Err(e) => Err(e),
    }
}

/// Small-oscillation frequency (Hz) about the landscape minimum for a body
/// of mass `mass` with second moments `m`.
pub fn oscillation_frequency_with_mass(m: &MomentMatrix, geom: &Geometry, mass: f64) -> Result<f64> {
    geom.validate()?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    let regime = classify_regime(m, geom.u())?;
    if regime.regime == Regime::Null {
        return Err(Error::NullAmplitude);
    }
    let a = regime.coefficients.a;
    let omega2 = 3.0 * geom.amplitude * PI * a
        / (128.0 * geom.wavelength.powi(2) * geom.z0.powi(4) * EPSILON_0 * mass);
    Ok(omega2.sqrt() / (2.0 * PI))
}

/// Small-oscillation frequency (Hz) for the particle's own mass.
pub fn oscillation_frequency(scenario: &CpScenario) -> Result<f64> {
    oscillation_frequency_with_mass(&scenario.moments()?, &scenario.geom, scenario.particle.mass())
}

/// Frequency maximum on the valley side of the null height, as `(z0, f)`.
pub fn valley_frequency_maximum(scenario: &CpScenario) -> Result<(f64, f64)> {
    let null = null_z0(&scenario.particle, scenario.geom.wavelength)?;
    let f_at = |z0: f64| oscillation_frequency(&scenario.with_z0(z0)).unwrap_or(0.0);
    let (lo, hi) = (null, 2.0 * null);
    let n = 400;
    let grid: Vec<f64> = (1..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let best = (0..n)
        .max_by(|&i, &j| f_at(grid[i]).total_cmp(&f_at(grid[j])))
        .expect("non-empty grid");
    let left = if best == 0 { lo } else { grid[best - 1] };
    let right = grid[(best + 1).min(n - 1)];
    if right <= left {
        return Err(Error::Convergence {
            what: "frequency maximum search",
            evals: n,
            estimate: grid[best],
        });
    }
    let z = minimize_scalar(|z| -f_at(z), Bracket::new(left, right)?, Tolerance::relative(1e-10))?;
    Ok((z, f_at(z)))
}

/// `x_min / λ` for a spheroid over an orientation grid.
pub fn xmin_map(
    aspect: f64,
    material: &LorentzOscillator,
    phis: &[f64],
    thetas: &[f64],
    lambda_over_z0: f64,
) -> Result<Vec<XminPoint>> {
    classical::xmin_grid(
        |phi, theta| moment_matrix(&unit_particle(aspect, material, phi, theta)?),
        phis,
        thetas,
        lambda_over_z0,
    )
}
