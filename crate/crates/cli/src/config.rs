//! JSON run configuration.
//!
//! Layout:
//!
//! ```json
//! {
//!   "particle":    { "material": "diamond", "r_a_nm": 50, "r_b_nm": 40 },
//!   "trap":        { "power_w": 0.1, "waist_um": 0.6 },
//!   "drive":       { "detuning_hz": -6007, "omega_drive_hz": 1.5e6 },
//!   "environment": { "pressure_mtorr": 10, "temperature_k": 300 },
//!   "sweep":       { "omega_drive_hz": { "start": 0, "end": 3e6, "points": 2001 } },
//!   "ramp":        { "mode": "quasi_static", "steps": 1000 },
//!   "squeeze":     { "r": 40, "phi_rad": [3.14159], "t_end_s": 5e-3, "points": 1001 }
//! }
//! ```
//!
//! Frequencies always carry a unit suffix: `_hz` (cycles per second, converted
//! with a factor 2π) or `_rad_s`. Giving both forms of one quantity is an error.
//! Unknown keys are rejected and reported with their path.

use std::path::Path;

use libration::constants::hz_to_rad;
use libration::model::{
    gas_damping, mode_parameters, thermal_occupancy, DriveEnvironment, Material, ModeParameters, NanoparticleSpec,
    TrapConfig, DEFAULT_DAMPING_COEFF,
};
use libration::steadystate::MeanFieldParams;
use serde::Deserialize;

use crate::error::CliError;

/// One torr in pascal.
const TORR: f64 = 101_325.0 / 760.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub particle: ParticleSection,
    pub trap: TrapSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub environment: EnvironmentSection,
    pub sweep: Option<SweepSection>,
    pub ramp: Option<RampSection>,
    pub squeeze: Option<SqueezeSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    /// Preset name (`diamond`, `silica`); `density_kg_m3` and `eps_r` override it.
    pub material: Option<String>,
    pub density_kg_m3: Option<f64>,
    pub eps_r: Option<f64>,
    pub r_a_nm: f64,
    pub r_b_nm: Option<f64>,
    pub eccentricity: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub power_w: f64,
    pub waist_um: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    /// Manipulation beam power; sets the drive amplitude.
    pub power_w: Option<f64>,
    pub omega_drive_hz: Option<f64>,
    pub omega_drive_rad_s: Option<f64>,
    /// Absolute drive frequency.
    pub omega_ml_hz: Option<f64>,
    pub omega_ml_rad_s: Option<f64>,
    /// Drive frequency relative to the libration frequency, `ω_ml − ω_t`.
    pub detuning_hz: Option<f64>,
    pub detuning_rad_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub pressure_pa: Option<f64>,
    pub pressure_mtorr: Option<f64>,
    pub temperature_k: Option<f64>,
    pub damping_coeff_rad_s_per_pa: Option<f64>,
    /// Fixed damping, bypassing the pressure model.
    pub gamma_b_hz: Option<f64>,
    pub gamma_b_rad_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Range {
    pub fn values(&self, path: &str) -> Result<Vec<f64>, CliError> {
        if self.points < 2 {
            return Err(CliError::config(format!("{path}.points"), "need at least 2 points"));
        }
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(CliError::config(path, "bounds must be finite"));
        }
        Ok(match self.spacing {
            Spacing::Linear => libration::steadystate::linspace(self.start, self.end, self.points),
            Spacing::Log => {
                if !(self.start > 0.0 && self.end > 0.0) {
                    return Err(CliError::config(format!("{path}.spacing"), "log spacing needs positive bounds"));
                }
                libration::steadystate::linspace(self.start.ln(), self.end.ln(), self.points)
                    .into_iter()
                    .map(f64::exp)
                    .collect()
            }
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Long semi-axis sweep at fixed eccentricity (`derive`).
    pub r_a_nm: Option<Range>,
    /// Eccentricity sweep at fixed long semi-axis (`derive`).
    pub eccentricity: Option<Range>,
    /// Drive-amplitude grid (`bistability`).
    pub omega_drive_hz: Option<Range>,
    pub omega_drive_rad_s: Option<Range>,
    /// Pressures for the window-width table (`bistability`).
    pub pressure_pa: Option<Vec<f64>>,
    pub pressure_mtorr: Option<Vec<f64>>,
    /// Characteristic-detuning grid for the window table.
    pub characteristic_detuning_hz: Option<Range>,
    pub characteristic_detuning_rad_s: Option<Range>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampKind {
    #[default]
    QuasiStatic,
    Continuous,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSection {
    #[serde(default)]
    pub mode: RampKind,
    pub steps: Option<usize>,
    /// Hold time per step in units of `1/γ_b`.
    pub dwell_relaxations: Option<f64>,
    pub rate_hz_per_s: Option<f64>,
    pub rate_rad_s_per_s: Option<f64>,
    pub samples: Option<usize>,
    pub omega_start_hz: Option<f64>,
    pub omega_start_rad_s: Option<f64>,
    pub omega_end_hz: Option<f64>,
    pub omega_end_rad_s: Option<f64>,
    /// Sweep end as a multiple of the up-sweep fold drive, when no explicit end is set.
    pub overshoot: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchRef {
    Lower,
    Middle,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedAngle {
    ThetaSqueezing,
    ThetaAmplifying,
    JAmplifying,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeSection {
    /// Steady amplitude `|β₀|`; use either `r` with angles, or `branch`.
    pub r: Option<f64>,
    #[serde(default)]
    pub phi_rad: Vec<f64>,
    #[serde(default)]
    pub angles: Vec<NamedAngle>,
    /// Take `r` and `φ` from a steady branch at the configured drive.
    pub branch: Option<BranchRef>,
    pub t_end_s: f64,
    pub points: usize,
    /// Initial thermal occupation.
    #[serde(default)]
    pub nbar: f64,
    /// Also integrate the moment equations.
    pub oracle: Option<bool>,
    /// Oracle with gas damping towards the thermal bath.
    #[serde(default)]
    pub damped: bool,
}

/// Reads and validates a config file.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(path, e.into_inner().to_string())
    })?;
    cfg.resolve()?;
    Ok(cfg)
}

fn pair(path: &str, stem: &str, hz: Option<f64>, rad: Option<f64>) -> Result<Option<f64>, CliError> {
    match (hz, rad) {
        (Some(_), Some(_)) => Err(CliError::config(
            format!("{path}.{stem}_hz"),
            format!("give either `{stem}_hz` or `{stem}_rad_s`, not both"),
        )),
        (Some(f), None) => finite(&format!("{path}.{stem}_hz"), f).map(|f| Some(hz_to_rad(f))),
        (None, Some(w)) => finite(&format!("{path}.{stem}_rad_s"), w).map(Some),
        (None, None) => Ok(None),
    }
}

fn finite(path: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(path, "must be finite"))
    }
}

fn positive(path: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(path, format!("must be > 0, got {v}")))
    }
}

/// Physical inputs with every quantity in SI units and rad/s.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub spec: NanoparticleSpec,
    pub trap: TrapConfig,
    pub env: DriveEnvironment,
    pub mode: ModeParameters,
    /// `ω_ml − ω_t`, when a drive frequency is configured.
    pub delta_ml: Option<f64>,
    pub omega_drive: f64,
    pub gamma_b: f64,
    pub nbar: f64,
}

impl Resolved {
    /// Mean-field parameters; requires a drive frequency.
    pub fn mean_field(&self) -> Result<MeanFieldParams, CliError> {
        let delta = self
            .delta_ml
            .ok_or_else(|| CliError::config("drive", "a drive frequency (`omega_ml_*` or `detuning_*`) is required"))?;
        Ok(MeanFieldParams::new(delta, self.omega_drive, self.gamma_b, self.mode.eta)?)
    }

    pub fn omega_ml(&self) -> Option<f64> {
        self.delta_ml.map(|d| d + self.mode.omega_t)
    }
}

impl ParticleSection {
    pub fn material(&self) -> Result<Material, CliError> {
        let mut m = match &self.material {
            Some(name) => Material::preset(name)
                .ok_or_else(|| CliError::config("particle.material", format!("unknown preset `{name}`")))?,
            None => match (self.density_kg_m3, self.eps_r) {
                (Some(_), Some(_)) => Material::DIAMOND,
                _ => {
                    return Err(CliError::config(
                        "particle.material",
                        "give a preset or both `density_kg_m3` and `eps_r`",
                    ))
                }
            },
        };
        if let Some(d) = self.density_kg_m3 {
            m.density = positive("particle.density_kg_m3", d)?;
        }
        if let Some(e) = self.eps_r {
            m.eps_r = positive("particle.eps_r", e)?;
        }
        Ok(m)
    }

    pub fn spec(&self) -> Result<NanoparticleSpec, CliError> {
        let material = self.material()?;
        let r_a = positive("particle.r_a_nm", self.r_a_nm)? * 1e-9;
        match (self.r_b_nm, self.eccentricity) {
            (Some(b), None) => {
                let r_b = positive("particle.r_b_nm", b)? * 1e-9;
                if r_b > r_a {
                    return Err(CliError::config("particle.r_b_nm", "must not exceed r_a_nm (prolate spheroid)"));
                }
                Ok(NanoparticleSpec::new(r_a, r_b, material)?)
            }
            (None, Some(e)) => {
                if !(0.0..1.0).contains(&e) {
                    return Err(CliError::config("particle.eccentricity", format!("must lie in [0, 1), got {e}")));
                }
                Ok(NanoparticleSpec::from_eccentricity(r_a, e, material)?)
            }
            _ => Err(CliError::config("particle", "give exactly one of `r_b_nm` and `eccentricity`")),
        }
    }
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let spec = self.particle.spec()?;
        let trap = TrapConfig {
            power: positive("trap.power_w", self.trap.power_w)?,
            waist: positive("trap.waist_um", self.trap.waist_um)? * 1e-6,
        };
        let mode = mode_parameters(&spec, &trap)?;

        let d = &self.drive;
        let omega_ml = pair("drive", "omega_ml", d.omega_ml_hz, d.omega_ml_rad_s)?;
        let detuning = pair("drive", "detuning", d.detuning_hz, d.detuning_rad_s)?;
        let delta_ml = match (omega_ml, detuning) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("drive", "give either `omega_ml_*` or `detuning_*`, not both"))
            }
            (Some(w), None) => {
                if w < 0.0 {
                    return Err(CliError::config("drive.omega_ml", "must be >= 0"));
                }
                Some(w - mode.omega_t)
            }
            (None, det) => det,
        };

        let e = &self.environment;
        let pressure = match (e.pressure_pa, e.pressure_mtorr) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "environment",
                    "give either `pressure_pa` or `pressure_mtorr`, not both",
                ))
            }
            (Some(p), None) => p,
            (None, Some(mt)) => mt * 1e-3 * TORR,
            (None, None) => 0.0,
        };
        let env = DriveEnvironment {
            power_ml: d.power_w.unwrap_or(0.0),
            omega_ml: delta_ml.map(|dl| dl + mode.omega_t).unwrap_or(0.0),
            pressure,
            temperature: e.temperature_k.unwrap_or(300.0),
            damping_coeff: e.damping_coeff_rad_s_per_pa.unwrap_or(DEFAULT_DAMPING_COEFF),
            gamma_b_override: pair("environment", "gamma_b", e.gamma_b_hz, e.gamma_b_rad_s)?,
        };
        env.validate()?;

        let explicit = pair("drive", "omega_drive", d.omega_drive_hz, d.omega_drive_rad_s)?;
        let omega_drive = match (explicit, d.power_w) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("drive", "give either `power_w` or `omega_drive_*`, not both"))
            }
            (Some(w), None) => w,
            (None, Some(_)) => libration::model::drive_amplitude(&spec, &trap, &env)?,
            (None, None) => 0.0,
        };
        if omega_drive < 0.0 {
            return Err(CliError::config("drive.omega_drive", "must be >= 0"));
        }

        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if let Some(r) = &self.ramp {
            r.validate()?;
        }
        if let Some(q) = &self.squeeze {
            q.validate()?;
        }

        Ok(Resolved {
            spec,
            trap,
            env,
            mode,
            delta_ml,
            omega_drive,
            gamma_b: gas_damping(&env),
            nbar: thermal_occupancy(&env, &mode),
        })
    }
}

impl SweepSection {
    fn validate(&self) -> Result<(), CliError> {
        if let Some(r) = &self.r_a_nm {
            r.values("sweep.r_a_nm")?;
            if r.start <= 0.0 || r.end <= 0.0 {
                return Err(CliError::config("sweep.r_a_nm", "radii must be > 0"));
            }
        }
        if let Some(r) = &self.eccentricity {
            let v = r.values("sweep.eccentricity")?;
            if v.iter().any(|e| !(0.0..1.0).contains(e)) {
                return Err(CliError::config("sweep.eccentricity", "values must lie in [0, 1)"));
            }
        }
        self.drive_grid()?;
        self.pressures()?;
        self.detuning_grid()?;
        Ok(())
    }

    /// Characteristic-detuning grid in rad/s.
    pub fn detuning_grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        match (&self.characteristic_detuning_hz, &self.characteristic_detuning_rad_s) {
            (Some(_), Some(_)) => Err(CliError::config(
                "sweep.characteristic_detuning_hz",
                "give either `characteristic_detuning_hz` or `characteristic_detuning_rad_s`, not both",
            )),
            (Some(r), None) => Ok(Some(
                r.values("sweep.characteristic_detuning_hz")?.into_iter().map(hz_to_rad).collect(),
            )),
            (None, Some(r)) => r.values("sweep.characteristic_detuning_rad_s").map(Some),
            (None, None) => Ok(None),
        }
    }

    /// Drive grid in rad/s.
    pub fn drive_grid(&self) -> Result<Option<Vec<f64>>, CliError> {
        let grid = match (&self.omega_drive_hz, &self.omega_drive_rad_s) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "sweep.omega_drive_hz",
                    "give either `omega_drive_hz` or `omega_drive_rad_s`, not both",
                ))
            }
            (Some(r), None) => r.values("sweep.omega_drive_hz")?.into_iter().map(hz_to_rad).collect(),
            (None, Some(r)) => r.values("sweep.omega_drive_rad_s")?,
            (None, None) => return Ok(None),
        };
        let grid: Vec<f64> = grid;
        if grid.iter().any(|&w| w < 0.0) || grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::config("sweep.omega_drive", "grid must be ascending and >= 0"));
        }
        Ok(Some(grid))
    }

    /// Pressures in Pa.
    pub fn pressures(&self) -> Result<Option<Vec<f64>>, CliError> {
        let p = match (&self.pressure_pa, &self.pressure_mtorr) {
            (Some(_), Some(_)) => {
                return Err(CliError::config(
                    "sweep.pressure_pa",
                    "give either `pressure_pa` or `pressure_mtorr`, not both",
                ))
            }
            (Some(v), None) => v.clone(),
            (None, Some(v)) => v.iter().map(|mt| mt * 1e-3 * TORR).collect(),
            (None, None) => return Ok(None),
        };
        if p.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(CliError::config("sweep.pressure", "pressures must be >= 0"));
        }
        Ok(Some(p))
    }
}

impl RampSection {
    fn validate(&self) -> Result<(), CliError> {
        if let Some(s) = self.steps {
            if s == 0 {
                return Err(CliError::config("ramp.steps", "must be >= 1"));
            }
        }
        if let Some(d) = self.dwell_relaxations {
            positive("ramp.dwell_relaxations", d)?;
        }
        if let Some(o) = self.overshoot {
            positive("ramp.overshoot", o)?;
        }
        if let Some(t) = self.tolerance {
            positive("ramp.tolerance", t)?;
        }
        if let Some(s) = self.samples {
            if s < 2 {
                return Err(CliError::config("ramp.samples", "need at least 2 samples"));
            }
        }
        let rate = self.rate()?;
        if self.mode == RampKind::Continuous && rate.is_none() {
            return Err(CliError::config("ramp", "continuous mode needs `rate_hz_per_s` or `rate_rad_s_per_s`"));
        }
        if let Some(r) = rate {
            positive("ramp.rate", r)?;
        }
        self.bounds()?;
        Ok(())
    }

    pub fn rate(&self) -> Result<Option<f64>, CliError> {
        pair("ramp", "rate", self.rate_hz_per_s, self.rate_rad_s_per_s)
    }

    /// `(start, end)` drives in rad/s, when given explicitly.
    pub fn bounds(&self) -> Result<(Option<f64>, Option<f64>), CliError> {
        let start = pair("ramp", "omega_start", self.omega_start_hz, self.omega_start_rad_s)?;
        let end = pair("ramp", "omega_end", self.omega_end_hz, self.omega_end_rad_s)?;
        for (name, v) in [("ramp.omega_start", start), ("ramp.omega_end", end)] {
            if let Some(v) = v {
                if v < 0.0 {
                    return Err(CliError::config(name, "must be >= 0"));
                }
            }
        }
        Ok((start, end))
    }
}

impl SqueezeSection {
    fn validate(&self) -> Result<(), CliError> {
        match (self.r, self.branch) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("squeeze", "give either `r` or `branch`, not both"));
            }
            (Some(r), None) => {
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(CliError::config("squeeze.r", "must be >= 0"));
                }
                if self.phi_rad.is_empty() && self.angles.is_empty() {
                    return Err(CliError::config("squeeze.phi_rad", "give at least one angle"));
                }
            }
            (None, Some(_)) => {
                if !self.phi_rad.is_empty() {
                    return Err(CliError::config("squeeze.phi_rad", "the branch fixes the phase; remove `phi_rad`"));
                }
            }
            (None, None) => return Err(CliError::config("squeeze", "give `r` or `branch`")),
        }
        if self.phi_rad.iter().any(|p| !p.is_finite()) {
            return Err(CliError::config("squeeze.phi_rad", "angles must be finite"));
        }
        positive("squeeze.t_end_s", self.t_end_s)?;
        if self.points < 2 {
            return Err(CliError::config("squeeze.points", "need at least 2 points"));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(CliError::config("squeeze.nbar", "must be >= 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "particle": { "material": "diamond", "r_a_nm": 50, "r_b_nm": 40 },
        "trap": { "power_w": 0.1, "waist_um": 0.6 }
    }"#;

    #[test]
    fn minimal_config() {
        let cfg = parse(BASE).unwrap();
        let r = cfg.resolve().unwrap();
        assert!((r.mode.omega_t / (2.0 * std::f64::consts::PI) - 1.2621e6).abs() < 0.03 * 1.2621e6);
        assert_eq!(r.delta_ml, None);
        assert_eq!(r.omega_drive, 0.0);
    }

    #[test]
    fn unknown_key_names_path() {
        let text = BASE.replace("\"waist_um\"", "\"waist\": 1, \"waist_um\"");
        match parse(&text) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "trap.waist"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn both_units_rejected() {
        let text = BASE.replace(
            "\"trap\"",
            "\"drive\": { \"detuning_hz\": 1, \"detuning_rad_s\": 2 }, \"trap\"",
        );
        match parse(&text) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "drive.detuning_hz"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hz_keys_convert() {
        let text = BASE.replace("\"trap\"", "\"drive\": { \"detuning_hz\": -1000 }, \"trap\"");
        let r = parse(&text).unwrap().resolve().unwrap();
        assert!((r.delta_ml.unwrap() + 2000.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn pressure_units() {
        let text = BASE.replace("\"trap\"", "\"environment\": { \"pressure_mtorr\": 10 }, \"trap\"");
        let r = parse(&text).unwrap().resolve().unwrap();
        assert!((r.env.pressure - 1.333_223_684).abs() < 1e-8);
        assert!((r.gamma_b - DEFAULT_DAMPING_COEFF * r.env.pressure).abs() < 1e-9 * r.gamma_b);
    }
}
