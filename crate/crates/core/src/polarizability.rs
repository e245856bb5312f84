//! Single-pole dielectric response, prolate-spheroid polarizability and the
//! ground-state dipole second moments `<d_i d_j> = (ħ/π) ∫₀^∞ α_ij(iξ) dξ`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{EPSILON_0, HBAR};
use crate::error::{Error, Result};
use crate::moments::{axis_from_angles, SecondMoments};
use crate::numerics::{integrate_semi_infinite, Tolerance};

/// Quantum second moments `<d_i d_j>`.
pub type MomentMatrix = SecondMoments;

/// Dimensionless prefactor carried by the spheroid polarizability.
pub const POLARIZABILITY_PREFACTOR: f64 = 1e-6;

/// `ε(iξ) = 1 + B1 ω1² / (ξ² + ω1²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzOscillator {
    pub b1: f64,
    /// Angular frequency, rad/s.
    pub omega1: f64,
}

impl LorentzOscillator {
    pub fn new(b1: f64, omega1: f64) -> Result<Self> {
        if !(b1 > 0.0 && b1.is_finite() && omega1 > 0.0 && omega1.is_finite()) {
            return Err(Error::domain(format!("oscillator needs B1 > 0 and omega1 > 0, got {b1}, {omega1}")));
        }
        Ok(Self { b1, omega1 })
    }
}

/// Catalog entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    #[serde(rename = "B1")]
    pub b1: f64,
    pub omega1_rad_s: f64,
    pub density_kg_m3: f64,
}

impl Material {
    pub fn oscillator(&self) -> Result<LorentzOscillator> {
        LorentzOscillator::new(self.b1, self.omega1_rad_s)
    }
}

const BUILTIN_CATALOG: &str = include_str!("../data/materials.json");

/// Parses a catalog: a JSON array of materials.
pub fn parse_catalog(text: &str) -> Result<Vec<Material>> {
    let materials: Vec<Material> = serde_json::from_str(text)?;
    for m in &materials {
        m.oscillator()?;
        if !(m.density_kg_m3 > 0.0 && m.density_kg_m3.is_finite()) {
            return Err(Error::Config(format!("material '{}' needs a positive density", m.name)));
        }
    }
    Ok(materials)
}

pub fn load_catalog(path: &Path) -> Result<Vec<Material>> {
    parse_catalog(&std::fs::read_to_string(path)?)
}

pub fn builtin_catalog() -> Vec<Material> {
    parse_catalog(BUILTIN_CATALOG).expect("bundled material catalog is valid")
}

/// Looks a material up by name (case-insensitive).
pub fn find_material<'a>(catalog: &'a [Material], name: &str) -> Result<&'a Material> {
    catalog
        .iter()
        .find(|m| m.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Config(format!("unknown material '{name}'")))
}

/// Prolate (or spherical) spheroid with its symmetry axis along `(phi, theta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpheroidParticle {
    pub semi_major: f64,
    pub semi_minor: f64,
    pub material: LorentzOscillator,
    pub density: f64,
    pub phi: f64,
    pub theta: f64,
}

impl SpheroidParticle {
    pub fn new(
        semi_major: f64,
        semi_minor: f64,
        material: LorentzOscillator,
        density: f64,
        phi: f64,
        theta: f64,
    ) -> Result<Self> {
        if !(semi_minor > 0.0 && semi_major >= semi_minor && semi_major.is_finite()) {
            return Err(Error::domain(format!(
                "spheroid needs semi_major >= semi_minor > 0, got {semi_major}, {semi_minor}"
            )));
        }
        if !(density > 0.0 && density.is_finite()) {
            return Err(Error::domain(format!("density must be positive, got {density}")));
        }
        if !(phi.is_finite() && theta.is_finite()) {
            return Err(Error::domain("orientation angles must be finite"));
        }
        Ok(Self {
            semi_major,
            semi_minor,
            material,
            density,
            phi,
            theta,
        })
    }

    pub fn oriented(mut self, phi: f64, theta: f64) -> Self {
        self.phi = phi;
        self.theta = theta;
        self
    }

    pub fn aspect(&self) -> f64 {
        self.semi_major / self.semi_minor
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.semi_minor * self.semi_minor * self.semi_major
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }

    pub fn axis(&self) -> [f64; 3] {
        axis_from_angles(self.phi, self.theta)
    }
}

pub fn epsilon_imag_axis(material: &LorentzOscillator, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    let w2 = material.omega1 * material.omega1;
    Ok(1.0 + material.b1 * w2 / (xi * xi + w2))
}

fn check_xi(xi: f64) -> Result<()> {
    if xi >= 0.0 && xi.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("imaginary frequency must be >= 0, got {xi}")))
    }
}

/// Depolarization factors `(n_p, n_t)` of a prolate spheroid, with
/// `n_t = (1 − n_p) / 2` and, for eccentricity `e = √(1 − aspect⁻²)`,
/// `n_p = ((1 − e²)/e²) (atanh(e)/e − 1)`.
pub fn depolarization_factors(aspect: f64) -> Result<(f64, f64)> {
    if !(aspect >= 1.0 && aspect.is_finite()) {
        return Err(Error::domain(format!("aspect ratio must be >= 1, got {aspect}")));
    }
    let one_minus_e2 = 1.0 / (aspect * aspect);
    let e2 = 1.0 - one_minus_e2;
    let np = if e2 < 0.04 {
        // (1 − e²) Σ_{k≥1} e^{2k−2} / (2k + 1)
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut k = 1.0;
        loop {
            let term = pow / (2.0 * k + 1.0);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            pow *= e2;
            k += 1.0;
        }
        one_minus_e2 * sum
    } else {
        let e = e2.sqrt();
        // 1 − e = (1 − e²) / (1 + e) keeps the logarithm accurate for needles.
        let atanh = 0.5 * ((1.0 + e) * (1.0 + e) / one_minus_e2).ln();
        one_minus_e2 / e2 * (atanh / e - 1.0)
    };
    Ok((np, 0.5 * (1.0 - np)))
}

fn alpha_from_factor(material: &LorentzOscillator, volume: f64, n: f64, xi: f64) -> Result<f64> {
    let chi = epsilon_imag_axis(material, xi)? - 1.0;
    Ok(EPSILON_0 * volume * POLARIZABILITY_PREFACTOR * chi / (1.0 + chi * n))
}

/// `(α_p, α_t)` at imaginary frequency `ξ`.
pub fn alpha_components(particle: &SpheroidParticle, xi: f64) -> Result<(f64, f64)> {
    let (np, nt) = depolarization_factors(particle.aspect())?;
    let v = particle.volume();
    Ok((
        alpha_from_factor(&particle.material, v, np, xi)?,
        alpha_from_factor(&particle.material, v, nt, xi)?,
    ))
}

/// `(ħ/π) ∫₀^∞ α(iξ) dξ` for depolarization factor `n`, in closed form:
/// the integrand is a Lorentzian, `∫₀^∞ (ε−1)/(1+(ε−1)n) dξ = π B1 ω1 / (2√(1 + n B1))`.
pub fn moment_closed_form(material: &LorentzOscillator, volume: f64, n: f64) -> f64 {
    HBAR * EPSILON_0 * volume * POLARIZABILITY_PREFACTOR * material.b1 * material.omega1
        / (2.0 * (1.0 + n * material.b1).sqrt())
}

/// The same moment by adaptive quadrature over `ξ ∈ [0, ∞)`.
pub fn moment_quadrature(material: &LorentzOscillator, volume: f64, n: f64, tol: Tolerance) -> Result<f64> {
    let width = material.omega1 * (1.0 + n * material.b1).sqrt();
    let q = integrate_semi_infinite(
        |xi| alpha_from_factor(material, volume, n, xi).unwrap_or(f64::NAN),
        width,
        tol,
    )?;
    Ok(HBAR / PI * q.value)
}

/// `(I_p, I_t)`: moments along and across the symmetry axis.
pub fn axial_moments(particle: &SpheroidParticle) -> Result<(f64, f64)> {
    let (np, nt) = depolarization_factors(particle.aspect())?;
    let v = particle.volume();
    Ok((
        moment_closed_form(&particle.material, v, np),
        moment_closed_form(&particle.material, v, nt),
    ))
}

/// `M = I_t δ + (I_p − I_t) n̂ n̂ᵀ`, using the closed-form axial moments.
pub fn moment_matrix(particle: &SpheroidParticle) -> Result<MomentMatrix> {
    let (ip, it) = axial_moments(particle)?;
    Ok(SecondMoments::uniaxial(ip, it, particle.axis()))
}

/// [`moment_matrix`] with the axial moments obtained by quadrature.
pub fn moment_matrix_quadrature(particle: &SpheroidParticle, tol: Tolerance) -> Result<MomentMatrix> {
    let (np, nt) = depolarization_factors(particle.aspect())?;
    let v = particle.volume();
    let ip = moment_quadrature(&particle.material, v, np, tol)?;
    let it = moment_quadrature(&particle.material, v, nt, tol)?;
    Ok(SecondMoments::uniaxial(ip, it, particle.axis()))
}
