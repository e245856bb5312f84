//! Electrostatic interaction of a permanent dipole with a grounded,
//! corrugated conductor, to first order in the corrugation height.
//!
//! Every function here takes a second-moment matrix, so the same code path
//! serves the quantum problem once `d_i d_j` is replaced by `<d_i d_j>`.
//!
//! For `h = a cos(k x)` and `u = k z0`:
//!
//! ```text
//! U0 = −(Dxx + Dyy + 2 Dzz) / (64π ε0 z0³)
//! U1 = −(3a / (512π ε0 z0⁴)) · A cos(k x0 − δ)
//! B  = −2 Dxz Rxz(u),   C = Dxx Rxx(u) + Dyy Ryy(u) + Dzz Rzz(u)
//! A  = √(B² + C²),      sin δ = B/A,  cos δ = C/A
//! ```

pub mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::EPSILON_0;
use crate::error::{Error, Result};
use crate::kernels::{kernel_i, response_set, response_set_scaled, ResponseSet};
use crate::moments::SecondMoments;
use crate::numerics::{find_root, first_sign_change, Tolerance};
use crate::profiles::RoughnessProfile;

pub use oracle::oracle_u1_realspace;

/// Classical second moments `d_i d_j`.
pub type DipoleState = SecondMoments;

/// Largest `max|h| / z0` accepted without an explicit override.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// `A` counts as zero below this fraction of `Σ|D_ii| · max|R|`.
pub const NULL_THRESHOLD: f64 = 1e-9;

/// Half-width (radians) of the windows around 0 and π labelled peak/valley.
pub const PHASE_TOLERANCE: f64 = 1e-9;

/// Whether the small-amplitude guard is enforced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AmplitudeGuard {
    #[default]
    Enforce,
    Allow,
}

impl AmplitudeGuard {
    pub fn check(self, max_height: f64, z0: f64) -> Result<()> {
        if self == AmplitudeGuard::Enforce && max_height > PERTURBATIVE_LIMIT * z0 {
            return Err(Error::PerturbativityViolation { max_height, z0 });
        }
        Ok(())
    }
}

/// Sinusoidal corrugation `a cos(2π x / λ)` seen from lateral position `x0`
/// at height `z0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub z0: f64,
    pub amplitude: f64,
    pub wavelength: f64,
    pub x0: f64,
    pub guard: AmplitudeGuard,
}

impl Geometry {
    pub fn new(z0: f64, amplitude: f64, wavelength: f64, x0: f64) -> Result<Self> {
        check_z0(z0)?;
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::domain(format!("amplitude must be >= 0, got {amplitude}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
        }
        if !x0.is_finite() {
            return Err(Error::domain("x0 must be finite"));
        }
        Ok(Self {
            z0,
            amplitude,
            wavelength,
            x0,
            guard: AmplitudeGuard::Enforce,
        })
    }

    pub fn with_guard(mut self, guard: AmplitudeGuard) -> Self {
        self.guard = guard;
        self
    }

    pub fn at(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_z0(mut self, z0: f64) -> Self {
        self.z0 = z0;
        self
    }

    pub fn k(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn u(&self) -> f64 {
        self.k() * self.z0
    }

    pub fn lambda_over_z0(&self) -> f64 {
        self.wavelength / self.z0
    }

    pub fn validate(&self) -> Result<()> {
        self.guard.check(self.amplitude, self.z0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Peak,
    Valley,
    Intermediate,
    Null,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::Peak => "peak",
            Regime::Valley => "valley",
            Regime::Intermediate => "intermediate",
            Regime::Null => "null",
        }
    }
}

/// Landscape coefficients `B`, `C` and `A = √(B² + C²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub b: f64,
    pub c: f64,
    pub a: f64,
}

impl Coefficients {
    fn from_bc(b: f64, c: f64) -> Self {
        Self { b, c, a: b.hypot(c) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeResult {
    pub coefficients: Coefficients,
    /// `None` in the null regime.
    pub delta: Option<f64>,
    pub regime: Regime,
    /// Position of the minimum inside one period, as a fraction of `λ`.
    pub xmin_over_lambda: Option<f64>,
}

fn check_z0(z0: f64) -> Result<()> {
    if z0 > 0.0 && z0.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("z0 must be positive, got {z0}")))
    }
}

fn combine(d: &SecondMoments, r: &ResponseSet) -> Coefficients {
    Coefficients::from_bc(
        -2.0 * d.xz() * r.xz,
        d.xx() * r.xx + d.yy() * r.yy + d.zz() * r.zz,
    )
}

/// Flat-mirror energy.
pub fn u0_classical(d: &SecondMoments, z0: f64) -> Result<f64> {
    check_z0(z0)?;
    Ok(-d.flat_weight() / (64.0 * PI * EPSILON_0 * z0.powi(3)))
}

/// `B`, `C`, `A` at `u = k z0`. Zero once the response functions underflow.
pub fn bc_coefficients(d: &SecondMoments, u: f64) -> Result<Coefficients> {
    Ok(combine(d, &response_set(u)?))
}

/// `e^u · (B, C, A)`: same phase, never underflows.
pub fn bc_coefficients_scaled(d: &SecondMoments, u: f64) -> Result<Coefficients> {
    Ok(combine(d, &response_set_scaled(u)?))
}

/// `δ = atan2(B, C)` in `[0, 2π)`.
pub fn phase_delta(b: f64, c: f64) -> Result<f64> {
    if b == 0.0 && c == 0.0 {
        return Err(Error::NullAmplitude);
    }
    let delta = b.atan2(c).rem_euclid(2.0 * PI);
    Ok(if delta >= 2.0 * PI { 0.0 } else { delta })
}

/// Peak, valley, intermediate or null, with the phase and the minimum.
pub fn classify_regime(d: &SecondMoments, u: f64) -> Result<RegimeResult> {
    let scaled_r = response_set_scaled(u)?;
    let scaled = combine(d, &scaled_r);
    let coefficients = bc_coefficients(d, u)?;
    let weight = d.xx().abs() + d.yy().abs() + d.zz().abs();
    if scaled.a <= NULL_THRESHOLD * weight * scaled_r.max_abs() {
        return Ok(RegimeResult {
            coefficients,
            delta: None,
            regime: Regime::Null,
            xmin_over_lambda: None,
        });
    }
    let delta = phase_delta(scaled.b, scaled.c)?;
    let regime = if delta < PHASE_TOLERANCE || 2.0 * PI - delta < PHASE_TOLERANCE {
        Regime::Peak
    } else if (delta - PI).abs() < PHASE_TOLERANCE {
        Regime::Valley
    } else {
        Regime::Intermediate
    };
    Ok(RegimeResult {
        coefficients,
        delta: Some(delta),
        regime,
        xmin_over_lambda: Some(delta / (2.0 * PI)),
    })
}

/// Position of the landscape minimum in `[0, λ)`.
pub fn xmin(d: &SecondMoments, u: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
    }
    let result = classify_regime(d, u)?;
    let frac = result.xmin_over_lambda.ok_or(Error::NullAmplitude)?;
    Ok(frac * wavelength)
}

/// First-order energy for the sinusoid `a cos(k x)`.
pub fn u1_classical_sinusoid(d: &SecondMoments, geom: &Geometry) -> Result<f64> {
    geom.validate()?;
    let coeff = bc_coefficients(d, geom.u())?;
    let phase = 2.0 * PI * (geom.x0 / geom.wavelength).rem_euclid(1.0);
    let prefactor = 3.0 * geom.amplitude / (512.0 * PI * EPSILON_0 * geom.z0.powi(4));
    Ok(-prefactor * (coeff.c * phase.cos() + coeff.b * phase.sin()))
}

/// First-order energy for an arbitrary profile, summed over its spectral
/// lines: `U1 = −(1/64π ε0) Re Σ c_q e^{iq·r0} Σ_ij D_ij I_ij(z0, q)`.
pub fn u1_classical_general(
    d: &SecondMoments,
    profile: &RoughnessProfile,
    z0: f64,
    r0: (f64, f64),
    guard: AmplitudeGuard,
) -> Result<f64> {
    check_z0(z0)?;
    guard.check(profile.max_height(), z0)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for line in profile.fourier_modes()? {
        let kernel = kernel_i(z0, line.q)?;
        acc += line.amplitude * Complex64::from_polar(1.0, line.q.dot(r0)) * kernel.contract(d);
    }
    Ok(-acc.re / (64.0 * PI * EPSILON_0))
}

/// Range of `λ/z0` scanned when looking for the `C = 0` border.
pub const BORDER_SCAN: (f64, f64) = (1e-6, 100.0);
const BORDER_SCAN_POINTS: usize = 4000;

/// Smallest `λ/z0` in [`BORDER_SCAN`] at which `C` changes sign: below it
/// (towards shorter periods) the landscape has its minima over valleys.
pub fn c_zero_border(d: &SecondMoments) -> Result<f64> {
    let (lo, hi) = BORDER_SCAN;
    let c_at = |ratio: f64| bc_coefficients_scaled(d, 2.0 * PI / ratio).map(|c| c.c).unwrap_or(f64::NAN);
    let step = (hi / lo).ln() / (BORDER_SCAN_POINTS - 1) as f64;
    let grid = (0..BORDER_SCAN_POINTS).map(|i| lo * (step * i as f64).exp());
    let bracket = first_sign_change(c_at, grid).ok_or(Error::NoSignChange { lo, hi })?;
    find_root(c_at, bracket, Tolerance::relative(1e-14).with_max_evals(500))
}

/// Classical border at azimuth `phi` for a dipole lying in the surface plane.
pub fn border_phi_classical(phi: f64) -> Result<f64> {
    if phi.cos().abs() < 1e-12 {
        return Err(Error::domain("border is undefined for a dipole along y"));
    }
    c_zero_border(&SecondMoments::from_dipole(1.0, phi, PI / 2.0))
}

/// One cell of an orientation map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XminPoint {
    pub phi: f64,
    pub theta: f64,
    pub regime: Regime,
    pub xmin_over_lambda: Option<f64>,
}

/// `x_min / λ` over every `(phi, theta)` pair, `phi` varying slowest.
/// Cells are independent and evaluated in parallel; the output order is fixed.
pub fn xmin_grid<F>(moments: F, phis: &[f64], thetas: &[f64], lambda_over_z0: f64) -> Result<Vec<XminPoint>>
where
    F: Fn(f64, f64) -> Result<SecondMoments> + Sync,
{
    use rayon::prelude::*;
    if phis.is_empty() || thetas.is_empty() {
        return Err(Error::domain("orientation grid must not be empty"));
    }
    if !(lambda_over_z0 > 0.0 && lambda_over_z0.is_finite()) {
        return Err(Error::domain(format!("lambda/z0 must be positive, got {lambda_over_z0}")));
    }
    let u = 2.0 * PI / lambda_over_z0;
    let cells: Vec<(f64, f64)> = phis.iter().flat_map(|&p| thetas.iter().map(move |&t| (p, t))).collect();
    cells
        .par_iter()
        .map(|&(phi, theta)| {
            let r = classify_regime(&moments(phi, theta)?, u)?;
            Ok(XminPoint {
                phi,
                theta,
                regime: r.regime,
                xmin_over_lambda: r.xmin_over_lambda,
            })
        })
        .collect()
}

/// Fraction of `bins` equal sub-intervals of `[0, 1]` containing at least one value.
pub fn coverage_fraction(values: &[f64], bins: usize) -> f64 {
    if bins == 0 {
        return 0.0;
    }
    let mut hit = vec![false; bins];
    for &v in values {
        if (0.0..=1.0).contains(&v) {
            hit[((v * bins as f64) as usize).min(bins - 1)] = true;
        }
    }
    hit.iter().filter(|&&h| h).count() as f64 / bins as f64
}

/// Largest distance of any value from the nearest peak (0 or 1).
pub fn peak_band_halfwidth(values: &[f64]) -> f64 {
    values.iter().map(|&v| v.min(1.0 - v)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::response_set;
    use proptest::prelude::*;

    const Z0: f64 = 10e-9;
    const DIP: f64 = 1e-29;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn dipole(phi: f64, theta: f64) -> SecondMoments {
        SecondMoments::from_dipole(DIP, phi, theta)
    }

    #[test]
    fn flat_energy_of_normal_dipole() {
        let d = dipole(0.0, 0.0);
        let expected = -DIP * DIP / (32.0 * PI * EPSILON_0 * Z0.powi(3));
        assert!(rel(u0_classical(&d, Z0).unwrap(), expected) < 1e-15);
        assert_eq!(u0_classical(&SecondMoments::zero(), Z0).unwrap(), 0.0);
        let ratio = u0_classical(&d, Z0).unwrap() / u0_classical(&d, 2.0 * Z0).unwrap();
        assert!((ratio - 8.0).abs() < 1e-13);
        assert!(u0_classical(&d, 0.0).is_err());
    }

    #[test]
    fn coefficients_for_in_plane_y_dipole() {
        let d = dipole(PI / 2.0, PI / 2.0);
        for &u in &[0.01, 0.5, 2.0, 7.0, 30.0] {
            let c = bc_coefficients(&d, u).unwrap();
            assert_eq!(c.b, 0.0);
            assert!(c.c > 0.0);
        }
    }

    #[test]
    fn coefficients_for_isotropic_moments() {
        let d = SecondMoments::isotropic(2.0);
        for &u in &[0.01, 1.0, 10.0] {
            let c = bc_coefficients(&d, u).unwrap();
            let r = response_set(u).unwrap();
            assert_eq!(c.b, 0.0);
            assert!(rel(c.c, 2.0 * (r.xx + r.yy + r.zz)) < 1e-15);
        }
    }

    #[test]
    fn coefficients_small_u_limit() {
        let d = SecondMoments::from_matrix([[1.0, 0.2, 0.3], [0.2, 2.0, 0.1], [0.3, 0.1, 3.0]]).unwrap();
        let c = bc_coefficients(&d, 1e-6).unwrap();
        assert!(rel(c.c, 8.0 * (1.0 + 2.0 + 2.0 * 3.0)) < 1e-6);
        assert!(bc_coefficients(&d, 0.0).is_err());
    }

    #[test]
    fn phase_examples() {
        assert_eq!(phase_delta(0.0, 1.0).unwrap(), 0.0);
        assert!((phase_delta(0.0, -1.0).unwrap() - PI).abs() < 1e-15);
        assert!((phase_delta(1.0, 0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((phase_delta(-1.0, 0.0).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert!(matches!(phase_delta(0.0, 0.0), Err(Error::NullAmplitude)));
    }

    #[test]
    fn regime_examples() {
        let u = 2.0 * PI / 2.0;
        assert_eq!(classify_regime(&dipole(0.0, PI / 2.0), u).unwrap().regime, Regime::Valley);
        for &ratio in &[0.05, 0.5, 2.0, 10.0, 100.0] {
            let r = classify_regime(&dipole(PI / 2.0, PI / 2.0), 2.0 * PI / ratio).unwrap();
            assert_eq!(r.regime, Regime::Peak);
            assert_eq!(r.xmin_over_lambda, Some(0.0));
        }
        let r = classify_regime(&dipole(0.0, PI / 4.0), 1.0).unwrap();
        assert_eq!(r.regime, Regime::Intermediate);
        assert!(r.coefficients.b != 0.0);
        assert!(xmin(&dipole(0.0, PI / 2.0), u, 3.0).unwrap() - 1.5 < 1e-15);
        assert_eq!(xmin(&dipole(0.0, 0.0), u, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn null_regime_and_xmin_error() {
        let r = classify_regime(&SecondMoments::zero(), 1.0).unwrap();
        assert_eq!(r.regime, Regime::Null);
        assert!(matches!(xmin(&SecondMoments::zero(), 1.0, 1.0), Err(Error::NullAmplitude)));
    }

    #[test]
    fn regime_well_defined_at_huge_u() {
        // The landscape itself underflows, the phase does not.
        let r = classify_regime(&dipole(0.0, PI / 2.0), 2000.0).unwrap();
        assert_eq!(r.regime, Regime::Valley);
        assert_eq!(r.coefficients.a, 0.0);
    }

    #[test]
    fn sinusoid_pfa_limit() {
        let a = 0.05 * Z0;
        let lambda = 1e3 * Z0;
        for &(phi, theta) in &[(0.0, 0.0), (0.0, PI / 2.0), (0.3, 1.1), (PI / 2.0, PI / 2.0)] {
            let d = dipole(phi, theta);
            let slope = 3.0 * d.flat_weight() / (64.0 * PI * EPSILON_0 * Z0.powi(4));
            for &x0 in &[0.0, 0.1 * lambda, 0.37 * lambda] {
                let g = Geometry::new(Z0, a, lambda, x0).unwrap();
                let h = a * (2.0 * PI * x0 / lambda).cos();
                let pfa = -h * slope;
                let u1 = u1_classical_sinusoid(&d, &g).unwrap();
                assert!((u1 - pfa).abs() <= 5e-3 * a * slope, "phi={phi} theta={theta} x0={x0}");
            }
        }
    }

    #[test]
    fn sinusoid_vanishes_for_short_periods() {
        let d = dipole(0.2, 0.9);
        let g = Geometry::new(Z0, 0.05 * Z0, 1e-3 * Z0, 0.0).unwrap();
        assert_eq!(u1_classical_sinusoid(&d, &g).unwrap(), 0.0);
        let g = Geometry::new(Z0, 0.05 * Z0, 0.05 * Z0, 0.0).unwrap();
        let flat = u0_classical(&d, Z0).unwrap();
        assert!(u1_classical_sinusoid(&d, &g).unwrap().abs() < 1e-30 * flat.abs());
    }

    #[test]
    fn x_dipole_valley_landscape() {
        let d = dipole(0.0, PI / 2.0);
        let lambda = 2.0 * Z0;
        let g = Geometry::new(Z0, 0.05 * Z0, lambda, 0.0).unwrap();
        let at = |x: f64| u1_classical_sinusoid(&d, &g.at(x)).unwrap();
        let min = (0..1000).map(|i| at(lambda * i as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
        assert_eq!(min, at(0.5 * lambda));
    }

    #[test]
    fn guard() {
        let d = dipole(0.0, 0.0);
        let g = Geometry::new(Z0, 0.2 * Z0, Z0, 0.0).unwrap();
        assert!(matches!(u1_classical_sinusoid(&d, &g), Err(Error::PerturbativityViolation { .. })));
        assert!(u1_classical_sinusoid(&d, &g.with_guard(AmplitudeGuard::Allow)).is_ok());
        let p = RoughnessProfile::sinusoid(0.2 * Z0, Z0).unwrap();
        assert!(u1_classical_general(&d, &p, Z0, (0.0, 0.0), AmplitudeGuard::Enforce).is_err());
    }

    #[test]
    fn general_matches_sinusoid() {
        let a = 0.08 * Z0;
        for &ratio in &[0.3, 1.0, 2.7, 50.0] {
            let lambda = ratio * Z0;
            let p = RoughnessProfile::sinusoid(a, lambda).unwrap();
            for &(phi, theta) in &[(0.0, 0.0), (0.0, PI / 2.0), (0.7, 0.4), (2.0, 2.5)] {
                let d = dipole(phi, theta);
                let amp = bc_coefficients(&d, 2.0 * PI / ratio).unwrap().a * 3.0 * a / (512.0 * PI * EPSILON_0 * Z0.powi(4));
                for &x0 in &[0.0, 0.13 * lambda, 0.5 * lambda, 0.81 * lambda] {
                    let g = Geometry::new(Z0, a, lambda, x0).unwrap();
                    let s = u1_classical_sinusoid(&d, &g).unwrap();
                    let gen = u1_classical_general(&d, &p, Z0, (x0, 0.3 * Z0), AmplitudeGuard::Enforce).unwrap();
                    assert!((s - gen).abs() <= 1e-10 * amp, "ratio={ratio} x0={x0}: {s} vs {gen}");
                }
            }
        }
    }

    #[test]
    fn constant_offset_is_a_flat_shift() {
        use crate::kernels::WaveVector;
        use crate::profiles::CosineMode;
        let c = 0.03 * Z0;
        let p = RoughnessProfile::from_modes(vec![CosineMode::new(c, WaveVector::default(), 0.0).unwrap()]);
        for &(phi, theta) in &[(0.0, 0.0), (1.0, 1.0)] {
            let d = dipole(phi, theta);
            let slope = 3.0 * d.flat_weight() / (64.0 * PI * EPSILON_0 * Z0.powi(4));
            let u1 = u1_classical_general(&d, &p, Z0, (0.0, 0.0), AmplitudeGuard::Enforce).unwrap();
            assert!(rel(u1, -c * slope) < 1e-14);
        }
    }

    #[test]
    fn incommensurate_modes_add() {
        use crate::kernels::WaveVector;
        use crate::profiles::CosineMode;
        let m1 = CosineMode::new(0.03 * Z0, WaveVector::along_x(2.0 * PI / (1.3 * Z0)), 0.0).unwrap();
        let m2 = CosineMode::new(0.02 * Z0, WaveVector::new(0.4 / Z0, 2.0f64.sqrt() / Z0), 0.9).unwrap();
        let d = dipole(0.4, 1.2);
        let r0 = (0.37 * Z0, -1.1 * Z0);
        let e = |modes: Vec<CosineMode>| {
            u1_classical_general(&d, &RoughnessProfile::from_modes(modes), Z0, r0, AmplitudeGuard::Enforce).unwrap()
        };
        let both = e(vec![m1, m2]);
        let sum = e(vec![m1]) + e(vec![m2]);
        assert!((both - sum).abs() <= 1e-14 * (e(vec![m1]).abs() + e(vec![m2]).abs()));
    }

    #[test]
    fn classical_borders() {
        let g0 = border_phi_classical(0.0).unwrap();
        assert!((g0 - 2.71283).abs() < 1e-5);
        assert!((g0 - std::f64::consts::E).abs() / std::f64::consts::E < 1e-2);
        let g45 = border_phi_classical(PI / 4.0).unwrap();
        assert!((g45 - 1.74).abs() / 1.74 < 2e-2);
        assert!(border_phi_classical(PI / 2.0).is_err());
        assert!(matches!(
            c_zero_border(&dipole(PI / 2.0, PI / 2.0)),
            Err(Error::NoSignChange { .. })
        ));
    }

    proptest! {
        #[test]
        fn classification_is_scale_invariant(
            phi in -PI..PI, theta in 0.0..PI, ratio in 0.05f64..20.0, s in 1e-6f64..1e6,
        ) {
            let u = 2.0 * PI / ratio;
            let d = dipole(phi, theta);
            let a = classify_regime(&d, u).unwrap();
            let b = classify_regime(&d.scaled(s), u).unwrap();
            prop_assert_eq!(a.regime, b.regime);
            if let (Some(x), Some(y)) = (a.delta, b.delta) {
                prop_assert!((x - y).abs() < 1e-12 || (2.0 * PI - (x - y).abs()) < 1e-12);
            }
            prop_assert!(rel(b.coefficients.a, s * a.coefficients.a) < 1e-12 || a.coefficients.a == 0.0);
        }

        #[test]
        fn mirror_symmetry(phi in -PI..PI, theta in 0.0..PI, ratio in 0.05f64..20.0) {
            let u = 2.0 * PI / ratio;
            let a = classify_regime(&dipole(phi, theta), u).unwrap();
            let b = classify_regime(&dipole(-phi, theta), u).unwrap();
            prop_assert_eq!(a.regime, b.regime);
            prop_assert!((a.coefficients.b - b.coefficients.b).abs() <= 1e-14 * a.coefficients.a);
            prop_assert!((a.coefficients.c - b.coefficients.c).abs() <= 1e-14 * a.coefficients.a);
        }

        #[test]
        fn xmin_is_the_global_minimum(phi in -PI..PI, theta in 0.0..PI, ratio in 0.2f64..20.0) {
            let lambda = ratio * Z0;
            let d = dipole(phi, theta);
            let g = Geometry::new(Z0, 0.05 * Z0, lambda, 0.0).unwrap();
            let x = xmin(&d, g.u(), lambda).unwrap();
            prop_assert!((0.0..lambda).contains(&x));
            let at_min = u1_classical_sinusoid(&d, &g.at(x)).unwrap();
            let amp = u1_classical_sinusoid(&d, &g.at(x)).unwrap().abs();
            for i in 0..200 {
                let other = u1_classical_sinusoid(&d, &g.at(lambda * i as f64 / 200.0)).unwrap();
                prop_assert!(at_min <= other + 1e-12 * amp);
            }
        }
    }
}
