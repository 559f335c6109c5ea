//! Flat `key=value` run configuration.
//!
//! Precedence is built-in defaults, then the config file, then `--set`
//! overrides. Unknown keys are rejected so a misspelt parameter never
//! silently falls back to its default.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::levels::LevelSystem;
use crate::propagator::SimulationConfig;
use crate::pulse::ChirpedPulse;

/// Every key a config file may contain, in echo order.
pub const KEYS: [&str; 18] = [
    "omega21",
    "omega32",
    "omega42",
    "beta",
    "gamma",
    "omega_rabi_peak",
    "tau_p",
    "omega_carrier",
    "alpha",
    "t0",
    "tau_chirp",
    "t_start",
    "t_end",
    "sample_interval",
    "rel_tol",
    "abs_tol",
    "method",
    "fixed_dt",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(
                "format",
                format!("expected csv or json, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub omega21: f64,
    pub omega32: f64,
    pub omega42: f64,
    pub beta: f64,
    pub gamma: f64,
    pub pulse: ChirpedPulse,
    pub simulation: SimulationConfig,
    /// `None` writes to stdout.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sys = LevelSystem::default();
        Self {
            omega21: 3.19,
            omega32: 3.06,
            omega42: 3.30,
            beta: sys.beta(),
            gamma: sys.gamma(),
            pulse: ChirpedPulse::default(),
            simulation: SimulationConfig::default(),
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

fn static_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

impl RunConfig {
    pub fn level_system(&self) -> Result<LevelSystem> {
        LevelSystem::from_transitions(
            self.omega21,
            self.omega32,
            self.omega42,
            self.beta,
            self.gamma,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.level_system()?;
        self.pulse.validate()?;
        self.simulation.validate()
    }

    /// Sets one key from its textual value. Does not validate cross-field invariants.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let name = static_key(key).ok_or_else(|| Error::UnknownKey {
            key: key.to_string(),
            line: None,
        })?;
        let value = value.trim();
        if name == "method" {
            self.simulation.method = value.parse()?;
            return Ok(());
        }
        let x: f64 = value
            .parse()
            .map_err(|_| Error::invalid(name, format!("`{value}` is not a number")))?;
        let slot = match name {
            "omega21" => &mut self.omega21,
            "omega32" => &mut self.omega32,
            "omega42" => &mut self.omega42,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "omega_rabi_peak" => &mut self.pulse.omega_rabi_peak,
            "tau_p" => &mut self.pulse.tau_p,
            "omega_carrier" => &mut self.pulse.omega_carrier,
            "alpha" => &mut self.pulse.alpha,
            "t0" => &mut self.pulse.t0,
            "tau_chirp" => &mut self.pulse.tau_chirp,
            "t_start" => &mut self.simulation.t_start,
            "t_end" => &mut self.simulation.t_end,
            "sample_interval" => &mut self.simulation.sample_interval,
            "rel_tol" => &mut self.simulation.rel_tol,
            "abs_tol" => &mut self.simulation.abs_tol,
            "fixed_dt" => &mut self.simulation.fixed_dt,
            _ => unreachable!("every key is handled"),
        };
        *slot = x;
        Ok(())
    }

    /// Textual value of a key, formatted so that parsing it back is lossless.
    pub fn get(&self, key: &str) -> Option<String> {
        let x = match static_key(key)? {
            "method" => return Some(self.simulation.method.to_string()),
            "omega21" => self.omega21,
            "omega32" => self.omega32,
            "omega42" => self.omega42,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "omega_rabi_peak" => self.pulse.omega_rabi_peak,
            "tau_p" => self.pulse.tau_p,
            "omega_carrier" => self.pulse.omega_carrier,
            "alpha" => self.pulse.alpha,
            "t0" => self.pulse.t0,
            "tau_chirp" => self.pulse.tau_chirp,
            "t_start" => self.simulation.t_start,
            "t_end" => self.simulation.t_end,
            "sample_interval" => self.simulation.sample_interval,
            "rel_tol" => self.simulation.rel_tol,
            "abs_tol" => self.simulation.abs_tol,
            "fixed_dt" => self.simulation.fixed_dt,
            _ => unreachable!("every key is handled"),
        };
        Some(format!("{x:?}"))
    }

    /// Applies the lines of a config document.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen: Vec<&'static str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected key=value, got `{content}`"),
                });
            };
            let key = key.trim();
            let name = static_key(key).ok_or_else(|| Error::UnknownKey {
                key: key.to_string(),
                line: Some(line),
            })?;
            if seen.contains(&name) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{name}`"),
                });
            }
            seen.push(name);
            self.set(name, value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// The 18 keys as a config document that [`load_config`] reads back identically.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key}={}", self.get(key).expect("known key"));
        }
        out
    }
}

/// Key/value view of a [`RunConfig`] that serializes as an ordered JSON object.
pub struct ConfigEcho<'a>(pub &'a RunConfig);

impl Serialize for ConfigEcho<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(KEYS.len()))?;
        for key in KEYS {
            if key == "method" {
                map.serialize_entry(key, self.0.simulation.method.as_str())?;
            } else {
                let v: f64 = self
                    .0
                    .get(key)
                    .expect("known key")
                    .parse()
                    .expect("echo parses");
                map.serialize_entry(key, &v)?;
            }
        }
        map.end()
    }
}

/// Defaults ← file ← overrides, then validated.
///
/// Each override is a `key=value` string.
pub fn load_config<S: AsRef<str>>(path: Option<&Path>, overrides: &[S]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.apply_text(&text)?;
    }
    for item in overrides {
        let item = item.as_ref();
        let Some((key, value)) = item.split_once('=') else {
            return Err(Error::invalid(
                "--set",
                format!("expected key=value, got `{item}`"),
            ));
        };
        cfg.set(key.trim(), value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
