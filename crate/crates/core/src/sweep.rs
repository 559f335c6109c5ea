//! Final populations over 1D and 2D lattices of pulse/atom parameters.
//!
//! Every lattice point is an independent propagation from the same initial
//! state. Points are evaluated on a rayon pool and written to pre-assigned
//! slots, so results do not depend on worker count or scheduling. A point
//! that fails is recorded as failed and the scan carries on.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levels::LevelSystem;
use crate::propagator::{final_populations, propagate, DensityMatrix, SimulationConfig};
use crate::pulse::ChirpedPulse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Alpha,
    TauChirp,
    OmegaRabiPeak,
    T0,
    TauP,
    OmegaCarrier,
    Beta,
    Gamma,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 8] = [
        SweepParameter::Alpha,
        SweepParameter::TauChirp,
        SweepParameter::OmegaRabiPeak,
        SweepParameter::T0,
        SweepParameter::TauP,
        SweepParameter::OmegaCarrier,
        SweepParameter::Beta,
        SweepParameter::Gamma,
    ];

    /// Same spelling as the config-file key.
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::TauChirp => "tau_chirp",
            SweepParameter::OmegaRabiPeak => "omega_rabi_peak",
            SweepParameter::T0 => "t0",
            SweepParameter::TauP => "tau_p",
            SweepParameter::OmegaCarrier => "omega_carrier",
            SweepParameter::Beta => "beta",
            SweepParameter::Gamma => "gamma",
        }
    }

    fn apply(&self, value: f64, sys: &mut LevelSystem, pulse: &mut ChirpedPulse) -> Result<()> {
        match self {
            SweepParameter::Alpha => pulse.alpha = value,
            SweepParameter::TauChirp => pulse.tau_chirp = value,
            SweepParameter::OmegaRabiPeak => pulse.omega_rabi_peak = value,
            SweepParameter::T0 => pulse.t0 = value,
            SweepParameter::TauP => pulse.tau_p = value,
            SweepParameter::OmegaCarrier => pulse.omega_carrier = value,
            SweepParameter::Beta => *sys = sys.with_dipole_ratios(value, sys.gamma())?,
            SweepParameter::Gamma => *sys = sys.with_dipole_ratios(sys.beta(), value)?,
        }
        Ok(())
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep parameter `{s}`")))
    }
}

/// An evenly spaced, endpoint-inclusive axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(parameter: SweepParameter, min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Self {
            parameter,
            min,
            max,
            count,
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "{}: bounds must be finite",
                self.parameter
            )));
        }
        if self.min > self.max {
            return Err(Error::InvalidSweep(format!(
                "{}: min {} exceeds max {}",
                self.parameter, self.min, self.max
            )));
        }
        if self.count == 0 {
            return Err(Error::InvalidSweep(format!(
                "{}: count must be >= 1",
                self.parameter
            )));
        }
        Ok(())
    }

    /// Lattice values; a single-point axis sits at `min`.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == last {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

/// `param:min:max:count`, e.g. `alpha:9:11:5`.
impl FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, count] = parts[..] else {
            return Err(Error::InvalidSweep(format!(
                "axis `{s}` is not of the form param:min:max:count"
            )));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSweep(format!("axis `{s}`: `{v}` is not a number")))
        };
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidSweep(format!("axis `{s}`: `{count}` is not a count")))?;
        AxisSpec::new(name.trim().parse()?, num(min)?, num(max)?, count)
    }
}

/// One lattice point: its coordinates (one per axis) and either the four
/// final populations or the reason it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    pub outcome: std::result::Result<[f64; 4], String>,
}

impl SweepPoint {
    pub fn populations(&self) -> Option<[f64; 4]> {
        self.outcome.as_ref().ok().copied()
    }
}

/// Scan results in row-major order: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axes: Vec<AxisSpec>,
    pub points: Vec<SweepPoint>,
    pub base_system: LevelSystem,
    pub base_pulse: ChirpedPulse,
    pub config: SimulationConfig,
}

impl SweepGrid {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn failed(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }

    /// Smallest final population of `level` (0-based) over the successful points.
    pub fn min_population(&self, level: usize) -> Option<f64> {
        self.points
            .iter()
            .filter_map(SweepPoint::populations)
            .map(|p| p[level])
            .min_by(f64::total_cmp)
    }

    /// Point at `index` (one index per axis).
    pub fn at(&self, index: &[usize]) -> &SweepPoint {
        assert_eq!(index.len(), self.axes.len());
        let flat = index
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.count + i);
        &self.points[flat]
    }
}

fn check_axes(axes: &[AxisSpec]) -> Result<()> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidSweep(format!(
            "expected 1 or 2 axes, got {}",
            axes.len()
        )));
    }
    for a in axes {
        a.validate()?;
    }
    if axes.len() == 2 && axes[0].parameter == axes[1].parameter {
        return Err(Error::InvalidSweep(format!(
            "both axes sweep `{}`",
            axes[0].parameter
        )));
    }
    Ok(())
}

fn lattice(axes: &[AxisSpec]) -> Vec<Vec<f64>> {
    let values: Vec<Vec<f64>> = axes.iter().map(AxisSpec::values).collect();
    match values.as_slice() {
        [a] => a.iter().map(|&x| vec![x]).collect(),
        [a, b] => a
            .iter()
            .flat_map(|&x| b.iter().map(move |&y| vec![x, y]))
            .collect(),
        _ => unreachable!("axis count checked"),
    }
}

fn evaluate(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    axes: &[AxisSpec],
    coords: Vec<f64>,
) -> SweepPoint {
    let run = || -> Result<[f64; 4]> {
        let mut sys = *sys;
        let mut pulse = *pulse;
        for (axis, &v) in axes.iter().zip(&coords) {
            axis.parameter.apply(v, &mut sys, &mut pulse)?;
        }
        let ts = propagate(&sys, &pulse, cfg, &DensityMatrix::ground())?;
        final_populations(&ts)
    };
    let outcome = run().map_err(|e| e.to_string());
    SweepPoint { coords, outcome }
}

fn assemble(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    axes: &[AxisSpec],
    points: Vec<SweepPoint>,
) -> SweepGrid {
    SweepGrid {
        axes: axes.to_vec(),
        points,
        base_system: *sys,
        base_pulse: *pulse,
        config: *cfg,
    }
}

/// Scans on the current rayon pool (the global one unless called inside `install`).
pub fn sweep(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    axes: &[AxisSpec],
) -> Result<SweepGrid> {
    check_axes(axes)?;
    cfg.validate()?;
    let points = lattice(axes)
        .into_par_iter()
        .map(|coords| evaluate(sys, pulse, cfg, axes, coords))
        .collect();
    Ok(assemble(sys, pulse, cfg, axes, points))
}

/// Scans with at most `workers` threads.
pub fn sweep_with_workers(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    axes: &[AxisSpec],
    workers: usize,
) -> Result<SweepGrid> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(|| sweep(sys, pulse, cfg, axes))
}

/// Scans on the calling thread, in lattice order.
pub fn sweep_serial(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    axes: &[AxisSpec],
) -> Result<SweepGrid> {
    check_axes(axes)?;
    cfg.validate()?;
    let points = lattice(axes)
        .into_iter()
        .map(|coords| evaluate(sys, pulse, cfg, axes, coords))
        .collect();
    Ok(assemble(sys, pulse, cfg, axes, points))
}
