//! One function per subcommand; each validates its inputs before computing.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::config::{Mode, ParticleSection, ProfileSection, ScenarioConfig};
use super::output::{Cell, Table};
use crate::classical::{
    self, c_zero_border, classify_regime, coverage_fraction, oracle_u1_realspace, peak_band_halfwidth,
    u1_classical_general, AmplitudeGuard, Geometry, Regime,
};
use crate::error::{Error, Result};
use crate::kernels::WaveVector;
use crate::moments::SecondMoments;
use crate::polarizability::{builtin_catalog, find_material, load_catalog, moment_matrix, SpheroidParticle};
use crate::profiles::{CosineMode, HeightGrid, RoughnessProfile};
use crate::quantum::{self, CpScenario};

/// Parsed configuration plus the settings every command shares.
pub struct Context {
    pub config: ScenarioConfig,
    pub guard: AmplitudeGuard,
    particle: Option<SpheroidParticle>,
}

impl Context {
    pub fn new(config: ScenarioConfig, allow_large_amplitude: bool) -> Result<Self> {
        let guard = if allow_large_amplitude || config.allow_large_amplitude {
            AmplitudeGuard::Allow
        } else {
            AmplitudeGuard::Enforce
        };
        let particle = config.particle.as_ref().map(build_particle).transpose()?;
        Ok(Self {
            config,
            guard,
            particle,
        })
    }

    fn geometry(&self) -> Result<Geometry> {
        let g = self.config.section(&self.config.geometry, "geometry")?;
        Geometry::new(g.z0_m, g.amplitude_m, g.wavelength_m, g.x0_m)
            .map(|geom| geom.with_guard(self.guard))
            .map_err(as_config)
    }

    fn particle(&self) -> Result<SpheroidParticle> {
        self.particle
            .ok_or_else(|| Error::Config("config needs a 'particle' section for this command".into()))
    }

    /// Second moments for an orientation, from the dipole or the particle
    /// section depending on the mode.
    fn moments_at(&self, phi: f64, theta: f64) -> Result<SecondMoments> {
        match self.config.mode {
            Mode::Classical => {
                let d = self.config.section(&self.config.dipole, "dipole")?;
                Ok(SecondMoments::from_dipole(d.magnitude, phi, theta))
            }
            Mode::Quantum => moment_matrix(&self.particle()?.oriented(phi, theta)),
        }
    }

    fn configured_orientation(&self) -> Result<(f64, f64)> {
        match self.config.mode {
            Mode::Classical => {
                let d = self.config.section(&self.config.dipole, "dipole")?;
                Ok((d.phi.radians(), d.theta.radians()))
            }
            Mode::Quantum => {
                let p = self.config.section(&self.config.particle, "particle")?;
                Ok((p.phi.radians(), p.theta.radians()))
            }
        }
    }

    /// Validates whichever source section the mode needs.
    fn check_source(&self) -> Result<()> {
        match self.config.mode {
            Mode::Classical => {
                let d = self.config.section(&self.config.dipole, "dipole")?;
                if !(d.magnitude >= 0.0 && d.magnitude.is_finite()) {
                    return Err(Error::Config("dipole magnitude must be >= 0".into()));
                }
                Ok(())
            }
            Mode::Quantum => self.particle().map(|_| ()),
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

pub fn build_particle(sec: &ParticleSection) -> Result<SpheroidParticle> {
    let material = match &sec.catalog {
        Some(path) => {
            let cat = load_catalog(path)?;
            find_material(&cat, &sec.material)?.clone()
        }
        None => find_material(&builtin_catalog(), &sec.material)?.clone(),
    };
    let oscillator = material.oscillator().map_err(as_config)?;
    let shape = SpheroidParticle::new(
        sec.semi_major_m,
        sec.semi_minor_m,
        oscillator,
        material.density_kg_m3,
        sec.phi.radians(),
        sec.theta.radians(),
    )
    .map_err(as_config)?;
    let density = match (sec.mass_kg, sec.density_kg_m3) {
        (Some(m), _) => m / shape.volume(),
        (None, Some(rho)) => rho,
        (None, None) => material.density_kg_m3,
    };
    SpheroidParticle::new(
        sec.semi_major_m,
        sec.semi_minor_m,
        oscillator,
        density,
        sec.phi.radians(),
        sec.theta.radians(),
    )
    .map_err(as_config)
}

pub fn build_profile(sec: &ProfileSection) -> Result<RoughnessProfile> {
    let mut profile = match &sec.height_map {
        Some(path) => RoughnessProfile::from_grid(HeightGrid::from_csv_path(path).map_err(as_config)?),
        None => RoughnessProfile::default(),
    };
    for m in &sec.modes {
        let mode = CosineMode::new(m.amplitude_m, WaveVector::new(m.kx_per_m, m.ky_per_m), m.phase.radians())
            .map_err(as_config)?;
        profile = profile.with_mode(mode);
    }
    if profile.is_empty() {
        return Err(Error::Config("profile needs at least one mode or a height map".into()));
    }
    Ok(profile)
}

fn regime_cells(r: &classical::RegimeResult) -> Vec<Cell> {
    vec![
        r.regime.label().into(),
        Cell::opt(r.delta),
        Cell::opt(r.xmin_over_lambda),
        r.coefficients.b.into(),
        r.coefficients.c.into(),
        r.coefficients.a.into(),
    ]
}

/// Energy landscape `U0`, `U1`, `U0 + U1` against `x0` over whole periods.
pub fn energy(ctx: &Context) -> Result<Vec<Table>> {
    let cfg = &ctx.config;
    let sec = cfg.section(&cfg.energy, "energy")?;
    let geom = ctx.geometry()?;
    ctx.check_source()?;
    let z0s = match &sec.z0_m {
        Some(axis) => axis.values("energy.z0_m")?,
        None => vec![geom.z0],
    };
    if sec.points == 0 || !(sec.periods > 0.0 && sec.periods.is_finite()) {
        return Err(Error::Config("energy needs points >= 1 and periods > 0".into()));
    }
    let profile = match &cfg.profile {
        Some(p) => Some(build_profile(p)?),
        None => None,
    };
    let max_height = profile.as_ref().map_or(geom.amplitude, RoughnessProfile::max_height);
    for &z0 in &z0s {
        if !(z0 > 0.0 && z0.is_finite()) {
            return Err(Error::Config(format!("z0 must be positive, got {z0}")));
        }
        ctx.guard.check(max_height, z0)?;
    }
    let (phi, theta) = ctx.configured_orientation()?;
    let d = ctx.moments_at(phi, theta)?;
    let span = sec.periods * geom.wavelength;
    let xs: Vec<f64> = if sec.points == 1 {
        vec![0.0]
    } else {
        (0..sec.points).map(|i| span * i as f64 / (sec.points - 1) as f64).collect()
    };
    let cells: Vec<(f64, f64)> = z0s.iter().flat_map(|&z| xs.iter().map(move |&x| (z, x))).collect();
    let rows: Vec<Vec<Cell>> = cells
        .par_iter()
        .map(|&(z0, x0)| {
            let u0 = classical::u0_classical(&d, z0)?;
            let u1 = match &profile {
                Some(p) => u1_classical_general(&d, p, z0, (x0, 0.0), ctx.guard)?,
                None => classical::u1_classical_sinusoid(&d, &geom.with_z0(z0).at(x0))?,
            };
            Ok(vec![z0.into(), x0.into(), u0.into(), u1.into(), (u0 + u1).into()])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new("energy", &["z0_m", "x0_m", "U0_J", "U1_J", "Utotal_J"]);
    rows.into_iter().for_each(|r| table.push(r));
    let mut tables = vec![table];
    if profile.is_none() {
        let mut regimes = Table::new(
            "regime",
            &["z0_m", "regime", "delta_rad", "xmin_over_lambda", "B_C2m2", "C_C2m2", "A_C2m2"],
        );
        for &z0 in &z0s {
            let r = classify_regime(&d, geom.with_z0(z0).u())?;
            let mut row = vec![z0.into()];
            row.extend(regime_cells(&r));
            regimes.push(row);
        }
        tables.push(regimes);
    }
    Ok(tables)
}

fn optional_border(result: Result<f64>) -> Result<Cell> {
    match result {
        Ok(v) => Ok(Cell::Num(v)),
        Err(Error::NoSignChange { .. }) | Err(Error::Domain(_)) => Ok(Cell::Missing),
        Err(e) => Err(e),
    }
}

/// Regime labels over `(λ/z0, φ)` for an in-plane orientation, plus the
/// `C = 0` border per `φ`.
pub fn regime_map(ctx: &Context) -> Result<Vec<Table>> {
    let cfg = &ctx.config;
    let sec = cfg.section(&cfg.regime_map, "regime_map")?;
    ctx.check_source()?;
    let ratios = sec.lambda_over_z0.values("regime_map.lambda_over_z0")?;
    if ratios.iter().any(|&r| r <= 0.0) {
        return Err(Error::Config("lambda_over_z0 values must be positive".into()));
    }
    let phis = sec.phi.values("regime_map.phi")?;
    let cells: Vec<(f64, f64)> = ratios.iter().flat_map(|&r| phis.iter().map(move |&p| (r, p))).collect();
    let rows: Vec<Vec<Cell>> = cells
        .par_iter()
        .map(|&(ratio, phi)| {
            let d = ctx.moments_at(phi, PI / 2.0)?;
            let r = classify_regime(&d, 2.0 * PI / ratio)?;
            let mut row = vec![ratio.into(), phi.into()];
            row.extend(regime_cells(&r));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut map = Table::new(
        "regime_map",
        &[
            "lambda_over_z0",
            "phi_rad",
            "regime",
            "delta_rad",
            "xmin_over_lambda",
            "B_C2m2",
            "C_C2m2",
            "A_C2m2",
        ],
    );
    rows.into_iter().for_each(|r| map.push(r));
    let border_rows: Vec<Vec<Cell>> = phis
        .par_iter()
        .map(|&phi| {
            let value = if phi.cos().abs() < 1e-12 {
                Cell::Missing
            } else {
                optional_border(c_zero_border(&ctx.moments_at(phi, PI / 2.0)?))?
            };
            Ok(vec![phi.into(), value])
        })
        .collect::<Result<_>>()?;
    let mut border = Table::new("border", &["phi_rad", "border_lambda_over_z0"]);
    border_rows.into_iter().for_each(|r| border.push(r));
    Ok(vec![map, border])
}

/// `x_min/λ` over `(φ, θ)` for each `λ/z0`, with coverage and peak-band summaries.
pub fn xmin_map(ctx: &Context) -> Result<Vec<Table>> {
    let cfg = &ctx.config;
    let sec = cfg.section(&cfg.xmin_map, "xmin_map")?;
    ctx.check_source()?;
    let ratios = sec.lambda_over_z0.values("xmin_map.lambda_over_z0")?;
    if ratios.iter().any(|&r| r <= 0.0) {
        return Err(Error::Config("lambda_over_z0 values must be positive".into()));
    }
    let phis = sec.phi.values("xmin_map.phi")?;
    let thetas = sec.theta.values("xmin_map.theta")?;
    if sec.bins == 0 {
        return Err(Error::Config("xmin_map.bins must be >= 1".into()));
    }
    let mut map = Table::new("xmin_map", &["lambda_over_z0", "phi_rad", "theta_rad", "regime", "xmin_over_lambda"]);
    let mut summary = Table::new(
        "summary",
        &["lambda_over_z0", "coverage_fraction", "peak_band_halfwidth", "null_cells", "bins"],
    );
    for &ratio in &ratios {
        let points = classical::xmin_grid(|phi, theta| ctx.moments_at(phi, theta), &phis, &thetas, ratio)?;
        let values: Vec<f64> = points.iter().filter_map(|p| p.xmin_over_lambda).collect();
        let nulls = points.iter().filter(|p| p.regime == Regime::Null).count();
        for p in &points {
            map.push(vec![
                ratio.into(),
                p.phi.into(),
                p.theta.into(),
                p.regime.label().into(),
                Cell::opt(p.xmin_over_lambda),
            ]);
        }
        summary.push(vec![
            ratio.into(),
            coverage_fraction(&values, sec.bins).into(),
            peak_band_halfwidth(&values).into(),
            nulls.into(),
            sec.bins.into(),
        ]);
    }
    Ok(vec![map, summary])
}

/// Peak/valley transition `λ/z0` per aspect ratio (quantum) or the
/// dipole border (classical, independent of aspect).
pub fn transition(ctx: &Context) -> Result<Vec<Table>> {
    let cfg = &ctx.config;
    let sec = cfg.section(&cfg.transition, "transition")?;
    let phi = sec.phi.radians();
    let mut table = Table::new("transition", &["aspect", "phi_rad", "border_lambda_over_z0"]);
    match cfg.mode {
        Mode::Classical => {
            let border = optional_border(classical::border_phi_classical(phi))?;
            match &sec.aspects {
                Some(axis) => {
                    for a in axis.values("transition.aspects")? {
                        table.push(vec![a.into(), phi.into(), border.clone()]);
                    }
                }
                None => table.push(vec![Cell::Missing, phi.into(), border]),
            }
        }
        Mode::Quantum => {
            let particle = ctx.particle()?;
            let aspects = match &sec.aspects {
                Some(axis) => axis.values("transition.aspects")?,
                None => vec![particle.aspect()],
            };
            if let Some(a) = aspects.iter().find(|&&a| !(a >= 1.0)) {
                return Err(Error::Config(format!("aspect ratios must be >= 1, got {a}")));
            }
            let rows: Vec<Vec<Cell>> = aspects
                .par_iter()
                .map(|&aspect| {
                    let g = if aspect == 1.0 {
                        Ok(0.0)
                    } else {
                        quantum::border_phi(aspect, &particle.material, phi)
                    };
                    Ok(vec![aspect.into(), phi.into(), optional_border(g)?])
                })
                .collect::<Result<_>>()?;
            rows.into_iter().for_each(|r| table.push(r));
        }
    }
    Ok(vec![table])
}

/// Lateral oscillation frequency against `z0`, plus the null height and the
/// valley-side maximum.
pub fn frequency(ctx: &Context) -> Result<Vec<Table>> {
    let cfg = &ctx.config;
    if cfg.mode != Mode::Quantum {
        return Err(Error::Config("frequency needs quantum mode and a particle".into()));
    }
    let sec = cfg.section(&cfg.frequency, "frequency")?;
    let geom = ctx.geometry()?;
    let particle = ctx.particle()?;
    let z0s = sec.z0_m.values("frequency.z0_m")?;
    for &z0 in &z0s {
        if !(z0 > 0.0 && z0.is_finite()) {
            return Err(Error::Config(format!("z0 must be positive, got {z0}")));
        }
        ctx.guard.check(geom.amplitude, z0)?;
    }
    let scenario = CpScenario::new(particle, geom);
    let rows: Vec<Vec<Cell>> = z0s
        .par_iter()
        .map(|&z0| {
            let s = scenario.with_z0(z0);
            let regime = s.regime()?;
            let f = match quantum::oscillation_frequency(&s) {
                Ok(f) => f,
                Err(Error::NullAmplitude) => 0.0,
                Err(e) => return Err(e),
            };
            Ok(vec![z0.into(), f.into(), regime.regime.label().into()])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new("frequency", &["z0_m", "f_Hz", "regime"]);
    rows.into_iter().for_each(|r| table.push(r));

    let mut points = Table::new("points", &["kind", "z0_m", "f_Hz"]);
    match quantum::null_z0(&particle, geom.wavelength) {
        Ok(z) => points.push(vec!["null".into(), z.into(), 0.0.into()]),
        Err(Error::NoSignChange { .. }) => points.push(vec!["null".into(), Cell::Missing, Cell::Missing]),
        Err(e) => return Err(e),
    }
    match quantum::valley_frequency_maximum(&scenario) {
        Ok((z, f)) => points.push(vec!["valley_max".into(), z.into(), f.into()]),
        Err(Error::NoSignChange { .. }) | Err(Error::PerturbativityViolation { .. }) => {
            points.push(vec!["valley_max".into(), Cell::Missing, Cell::Missing])
        }
        Err(e) => return Err(e),
    }
    Ok(vec![table, points])
}

/// Spectral first-order energy against the real-space quadrature.
pub fn oracle_check(ctx: &Context) -> Result<Vec<Table>> {
    let cfg = &ctx.config;
    let sec = cfg.section(&cfg.oracle_check, "oracle_check")?;
    let geom = ctx.geometry()?;
    ctx.check_source()?;
    ctx.guard.check(geom.amplitude, geom.z0)?;
    let ratios = sec.lambda_over_z0.values("oracle_check.lambda_over_z0")?;
    if ratios.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Config("lambda_over_z0 values must be positive".into()));
    }
    if sec.orientations.is_empty() {
        return Err(Error::Config("oracle_check needs at least one orientation".into()));
    }
    if !(sec.rel_tol > 0.0 && sec.rel_tol < 1.0) {
        return Err(Error::Config("oracle_check.rel_tol must lie in (0, 1)".into()));
    }
    let cases: Vec<(f64, f64, f64)> = ratios
        .iter()
        .flat_map(|&r| sec.orientations.iter().map(move |o| (r, o.phi.radians(), o.theta.radians())))
        .collect();
    let rows: Vec<Vec<Cell>> = cases
        .par_iter()
        .map(|&(ratio, phi, theta)| {
            let d = ctx.moments_at(phi, theta)?;
            let lambda = ratio * geom.z0;
            let x0 = sec.x0_over_lambda * lambda;
            let profile = RoughnessProfile::sinusoid(geom.amplitude, lambda)?;
            let fourier = u1_classical_general(&d, &profile, geom.z0, (x0, 0.0), ctx.guard)?;
            let oracle = oracle_u1_realspace(&d, &profile, geom.z0, (x0, 0.0), sec.rel_tol, ctx.guard)?;
            let rel = if fourier == 0.0 {
                oracle.value.abs()
            } else {
                (oracle.value - fourier).abs() / fourier.abs()
            };
            Ok(vec![
                ratio.into(),
                phi.into(),
                theta.into(),
                x0.into(),
                fourier.into(),
                oracle.value.into(),
                rel.into(),
                oracle.evals.into(),
                (rel <= sec.rel_tol).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        "oracle_check",
        &[
            "lambda_over_z0",
            "phi_rad",
            "theta_rad",
            "x0_m",
            "U1_fourier_J",
            "U1_oracle_J",
            "rel_error",
            "oracle_evals",
            "pass",
        ],
    );
    rows.into_iter().for_each(|r| table.push(r));
    Ok(vec![table])
}
