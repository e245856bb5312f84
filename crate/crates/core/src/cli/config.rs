//! Scenario configuration: JSON with unknown keys rejected, angles written
//! with an explicit unit (`"90deg"`, `"pi/4rad"`, `"1.2rad"`).

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// An angle in radians, read from a string with a `deg` or `rad` suffix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Parses `<value><unit>` where `unit` is `deg` or `rad` and `value` is a
/// decimal number or a multiple/fraction of `pi` (`pi/4`, `3pi/2`, `0.5pi`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("angle '{text}' needs a number followed by 'deg' or 'rad'"));
    let t = text.trim();
    let (value, degrees) = if let Some(v) = t.strip_suffix("deg") {
        (v, true)
    } else if let Some(v) = t.strip_suffix("rad") {
        (v, false)
    } else {
        return Err(bad());
    };
    let value = value.trim();
    let number = match value.find("pi") {
        None => value.parse::<f64>().map_err(|_| bad())?,
        Some(pos) => {
            let (coef, rest) = value.split_at(pos);
            let rest = &rest[2..];
            let coef = match coef.trim() {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
            };
            let denom = match rest.trim() {
                "" => 1.0,
                r => r.strip_prefix('/').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?,
            };
            coef * PI / denom
        }
    };
    let radians = if degrees { number / 180.0 * PI } else { number };
    if !radians.is_finite() {
        return Err(bad());
    }
    Ok(radians)
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an angle string such as \"90deg\" or \"pi/4rad\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }
        d.deserialize_str(Visitor)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:e}rad", self.0))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// A sweep axis: either an explicit list or `start`/`stop`/`count` samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis<T> {
    List(Vec<T>),
    Range {
        start: T,
        stop: T,
        count: usize,
        #[serde(default)]
        scale: Scale,
    },
}

impl<T: Copy + Into<f64>> Axis<T> {
    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let values: Vec<f64> = match self {
            Axis::List(v) => v.iter().map(|&x| x.into()).collect(),
            Axis::Range {
                start,
                stop,
                count,
                scale,
            } => {
                let (a, b, n) = ((*start).into(), (*stop).into(), *count);
                if n == 0 {
                    return Err(Error::Config(format!("axis '{name}' needs count >= 1")));
                }
                if n == 1 {
                    vec![a]
                } else {
                    match scale {
                        Scale::Linear => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                        Scale::Log => {
                            if !(a > 0.0 && b > 0.0) {
                                return Err(Error::Config(format!("log axis '{name}' needs positive bounds")));
                            }
                            let (la, lb) = (a.ln(), b.ln());
                            (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
                        }
                    }
                }
            }
        };
        if values.is_empty() {
            return Err(Error::Config(format!("axis '{name}' is empty")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("axis '{name}' has non-finite values")));
        }
        Ok(values)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    #[default]
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleSection {
    #[serde(rename = "magnitude_C_m")]
    pub magnitude: f64,
    pub phi: Angle,
    pub theta: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    pub material: String,
    /// Catalog file used instead of the bundled one.
    #[serde(default)]
    pub catalog: Option<PathBuf>,
    pub semi_major_m: f64,
    pub semi_minor_m: f64,
    pub phi: Angle,
    pub theta: Angle,
    #[serde(default)]
    pub density_kg_m3: Option<f64>,
    #[serde(default)]
    pub mass_kg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub z0_m: f64,
    pub amplitude_m: f64,
    pub wavelength_m: f64,
    #[serde(default)]
    pub x0_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub amplitude_m: f64,
    pub kx_per_m: f64,
    #[serde(default)]
    pub ky_per_m: f64,
    #[serde(default = "zero_angle")]
    pub phase: Angle,
}

fn zero_angle() -> Angle {
    Angle(0.0)
}

/// Arbitrary profile: cosine modes plus an optional periodic CSV height map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    #[serde(default)]
    pub modes: Vec<ModeSection>,
    #[serde(default)]
    pub height_map: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    /// Heights to tabulate; defaults to the geometry height.
    #[serde(default)]
    pub z0_m: Option<Axis<f64>>,
    #[serde(default = "default_periods")]
    pub periods: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_periods() -> f64 {
    2.0
}

fn default_points() -> usize {
    201
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeMapSection {
    pub lambda_over_z0: Axis<f64>,
    pub phi: Axis<Angle>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XminMapSection {
    pub lambda_over_z0: Axis<f64>,
    pub phi: Axis<Angle>,
    pub theta: Axis<Angle>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSection {
    #[serde(default)]
    pub aspects: Option<Axis<f64>>,
    #[serde(default = "zero_angle")]
    pub phi: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySection {
    pub z0_m: Axis<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationSection {
    pub phi: Angle,
    pub theta: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCheckSection {
    pub lambda_over_z0: Axis<f64>,
    pub orientations: Vec<OrientationSection>,
    #[serde(default = "default_oracle_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub x0_over_lambda: f64,
}

fn default_oracle_tol() -> f64 {
    1e-4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub dipole: Option<DipoleSection>,
    #[serde(default)]
    pub particle: Option<ParticleSection>,
    #[serde(default)]
    pub geometry: Option<GeometrySection>,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub allow_large_amplitude: bool,
    #[serde(default)]
    pub energy: Option<EnergySection>,
    #[serde(default)]
    pub regime_map: Option<RegimeMapSection>,
    #[serde(default)]
    pub xmin_map: Option<XminMapSection>,
    #[serde(default)]
    pub transition: Option<TransitionSection>,
    #[serde(default)]
    pub frequency: Option<FrequencySection>,
    #[serde(default)]
    pub oracle_check: Option<OracleCheckSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn section<'a, T>(&self, value: &'a Option<T>, name: &str) -> Result<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| Error::Config(format!("config needs a '{name}' section for this command")))
    }

    /// Canonical JSON text: keys sorted, angles normalised to radians.
    pub fn canonical(&self) -> String {
        let value = serde_json::to_value(self).expect("config serialises");
        serde_json::to_string(&value).expect("value serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("90deg").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("1.5rad").unwrap(), 1.5);
        assert_eq!(parse_angle("pi/4rad").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi/2rad").unwrap(), 1.5 * PI);
        assert_eq!(parse_angle("-pi rad").unwrap(), -PI);
        assert_eq!(parse_angle(" 0.5pirad").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("-45 deg").unwrap(), -PI / 4.0);
        for bad in ["90", "1.5", "pideg/2", "xrad", "pi/rad", "", "infrad"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn axes() {
        let a: Axis<f64> = serde_json::from_str(r#"{"start": 1, "stop": 100, "count": 3, "scale": "log"}"#).unwrap();
        let v = a.values("x").unwrap();
        assert!((v[1] - 10.0).abs() < 1e-12 && v[0] == 1.0);
        let a: Axis<f64> = serde_json::from_str("[0.5, 1, 3]").unwrap();
        assert_eq!(a.values("x").unwrap(), vec![0.5, 1.0, 3.0]);
        let a: Axis<Angle> = serde_json::from_str(r#"{"start": "0deg", "stop": "180deg", "count": 3}"#).unwrap();
        assert_eq!(a.values("phi").unwrap(), vec![0.0, PI / 2.0, PI]);
        let a: Axis<f64> = serde_json::from_str(r#"{"start": 1, "stop": 2, "count": 0}"#).unwrap();
        assert!(a.values("x").is_err());
        let a: Axis<f64> = serde_json::from_str(r#"{"start": 1, "stop": 2, "count": 1}"#).unwrap();
        assert_eq!(a.values("x").unwrap(), vec![1.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::parse(r#"{"mode": "quantum", "colour": 1}"#).is_err());
        assert!(ScenarioConfig::parse(
            r#"{"geometry": {"z0_m": 1, "amplitude_m": 0, "wavelength_m": 1, "extra": 2}}"#
        )
        .is_err());
        assert!(ScenarioConfig::parse(r#"{"mode": "classical"}"#).is_ok());
    }

    #[test]
    fn canonical_form_ignores_layout_and_angle_spelling() {
        let a = ScenarioConfig::parse(r#"{"mode":"classical","dipole":{"magnitude_C_m":1e-29,"phi":"180deg","theta":"0rad"}}"#).unwrap();
        let b = ScenarioConfig::parse(
            r#"{ "dipole": { "theta": "0deg", "phi": "pi rad", "magnitude_C_m": 1e-29 }, "mode": "classical" }"#,
        )
        .unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }
}
