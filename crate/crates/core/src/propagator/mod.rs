//! Propagation of the driven atom.
//!
//! Three independent routes are provided: the von Neumann equation
//! `dρ/dt = −i[H(t), ρ]` (the production path), the Schrödinger equation for
//! a pure state, and piecewise-constant exponential stepping
//! `ρ ← U ρ U†` with `U = exp(−i H(t_mid) dt)`. The last two exist to
//! cross-check the first.

mod density;
mod stepper;

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{DensityMatrix, HERMITICITY_TOL, POPULATION_TOL, PURITY_TOL, TRACE_TOL};

use crate::error::{Error, Result};
use crate::levels::LevelSystem;
use crate::pulse::ChirpedPulse;
use stepper::{rk4_step, substeps, unitary, Dopri5, State};

/// Invariant drift beyond this multiple of the stated tolerances aborts a run.
pub const ABORT_SLACK: f64 = 10.0;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dormand–Prince 5(4) with error control on the max-norm of the state.
    AdaptiveRk,
    FixedRk4,
    /// Midpoint matrix-exponential stepping.
    UnitaryExpm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::AdaptiveRk => "adaptive_rk",
            Method::FixedRk4 => "fixed_rk4",
            Method::UnitaryExpm => "unitary_expm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive_rk" => Ok(Method::AdaptiveRk),
            "fixed_rk4" => Ok(Method::FixedRk4),
            "unitary_expm" => Ok(Method::UnitaryExpm),
            other => Err(Error::invalid(
                "method",
                format!("expected adaptive_rk, fixed_rk4 or unitary_expm, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub sample_interval: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub method: Method,
    /// Step for the fixed-step methods, fs.
    pub fixed_dt: f64,
}

impl Default for SimulationConfig {
    /// ±99 fs window (six envelope widths), adaptive stepping at rel 1e−8 / abs 1e−10.
    fn default() -> Self {
        Self {
            t_start: -99.0,
            t_end: 99.0,
            sample_interval: 0.25,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            method: Method::AdaptiveRk,
            fixed_dt: 0.002,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.t_start.is_finite() {
            return Err(Error::invalid("t_start", "must be finite"));
        }
        if !(self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(Error::invalid(
                "t_end",
                "must be finite and greater than t_start",
            ));
        }
        let positive = [
            ("sample_interval", self.sample_interval),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("fixed_dt", self.fixed_dt),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// `t_start + k·sample_interval` up to and always including `t_end`.
    pub fn sample_times(&self) -> Vec<f64> {
        let span = self.t_end - self.t_start;
        let n = substeps(span, self.sample_interval);
        let mut times: Vec<f64> = (0..n)
            .map(|k| self.t_start + k as f64 * self.sample_interval)
            .collect();
        times.push(self.t_end);
        times
    }
}

/// Sampled density-matrix trajectory with the pulse diagnostics at each sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub envelope: Vec<f64>,
    pub instantaneous_frequency: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn populations(&self) -> impl Iterator<Item = [f64; 4]> + '_ {
        self.states.iter().map(DensityMatrix::populations)
    }

    pub fn final_state(&self) -> Result<&DensityMatrix> {
        self.states.last().ok_or(Error::EmptySeries)
    }

    fn push(&mut self, t: f64, rho: DensityMatrix, pulse: &ChirpedPulse) {
        self.times.push(t);
        self.states.push(rho);
        self.envelope.push(pulse.envelope(t));
        self.instantaneous_frequency
            .push(pulse.instantaneous_frequency(t));
    }
}

/// ρ₁₁..ρ₄₄ of the last sample.
pub fn final_populations(ts: &TimeSeries) -> Result<[f64; 4]> {
    ts.final_state().map(DensityMatrix::populations)
}

/// Sampled pure-state trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateSeries {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vector4<Complex64>>,
}

impl StateSeries {
    pub fn populations(&self, k: usize) -> [f64; 4] {
        std::array::from_fn(|n| self.amplitudes[k][n].norm_sqr())
    }

    pub fn density(&self, k: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&self.amplitudes[k])
    }

    pub fn final_populations(&self) -> Result<[f64; 4]> {
        if self.times.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(self.populations(self.times.len() - 1))
    }
}

/// −i[H(t), ρ].
pub fn rhs(
    t: f64,
    rho: &DensityMatrix,
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
) -> Matrix4<Complex64> {
    let h = sys.hamiltonian_at(t, pulse).0;
    commutator_rhs(&h, &rho.0)
}

#[inline]
fn commutator_rhs(h: &Matrix4<Complex64>, rho: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (h * rho - rho * h) * MINUS_I
}

/// Walks the sample grid with the configured method, calling `on_sample` at each sample time.
///
/// `f` is the right-hand side for the Runge–Kutta methods; `exp_step(t_mid, h, y)`
/// advances one exponential-midpoint step.
fn integrate<const R: usize, const C: usize>(
    cfg: &SimulationConfig,
    y0: State<R, C>,
    f: impl Fn(f64, &State<R, C>) -> State<R, C>,
    exp_step: impl Fn(f64, f64, &State<R, C>) -> State<R, C>,
    mut on_sample: impl FnMut(f64, &State<R, C>) -> Result<()>,
) -> Result<()> {
    cfg.validate()?;
    let times = cfg.sample_times();

    let mut t = times[0];
    let mut y = y0;
    on_sample(t, &y)?;

    match cfg.method {
        Method::AdaptiveRk => {
            let mut solver = Dopri5::new(f, cfg.rel_tol, cfg.abs_tol);
            for &target in &times[1..] {
                solver.advance_to(&mut t, &mut y, target)?;
                on_sample(t, &y)?;
            }
        }
        Method::FixedRk4 | Method::UnitaryExpm => {
            for &target in &times[1..] {
                let n = substeps(target - t, cfg.fixed_dt);
                let h = (target - t) / n as f64;
                let t_left = t;
                for k in 0..n {
                    let tk = t_left + k as f64 * h;
                    y = match cfg.method {
                        Method::FixedRk4 => rk4_step(&f, tk, &y, h),
                        _ => exp_step(tk + 0.5 * h, h, &y),
                    };
                }
                t = target;
                on_sample(t, &y)?;
            }
        }
    }
    Ok(())
}

/// Rotation by the bare level energies, `X_I = e^{iH₀τ} X e^{−iH₀τ}` with
/// `τ = t − t_start`. Inactive for exponential stepping, which works in the lab frame.
struct FreeFrame {
    levels: [f64; 4],
    t_ref: f64,
    active: bool,
}

impl FreeFrame {
    fn new(sys: &LevelSystem, cfg: &SimulationConfig) -> Self {
        Self {
            levels: sys.omega_levels(),
            t_ref: cfg.t_start,
            active: cfg.method != Method::UnitaryExpm,
        }
    }

    fn rotate(&self, t: f64, x: &Matrix4<Complex64>, sign: f64) -> Matrix4<Complex64> {
        if !self.active {
            return *x;
        }
        let tau = t - self.t_ref;
        let w = self.levels;
        Matrix4::from_fn(|j, k| x[(j, k)] * Complex64::from_polar(1.0, sign * (w[j] - w[k]) * tau))
    }

    fn to_rotating(&self, t: f64, x: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        self.rotate(t, x, 1.0)
    }

    fn to_lab(&self, t: f64, x: &Matrix4<Complex64>) -> Matrix4<Complex64> {
        self.rotate(t, x, -1.0)
    }
}

/// Integrates the von Neumann equation from `rho0` and records the trajectory.
///
/// The Runge–Kutta methods step `ρ_I = e^{iH₀τ} ρ e^{−iH₀τ}` so the free
/// precession of the coherences is exact; samples are rotated back.
///
/// The run aborts with [`Error::InvariantViolation`] if trace, Hermiticity,
/// population bounds, or purity drift by more than [`ABORT_SLACK`] times
/// their stated tolerance. Nothing is renormalised.
pub fn propagate(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    rho0: &DensityMatrix,
) -> Result<TimeSeries> {
    rho0.validate()?;
    let purity0 = rho0.purity();
    let mut series = TimeSeries::default();
    pulse.validate()?;
    let frame = FreeFrame::new(sys, cfg);
    integrate(
        cfg,
        rho0.0,
        |t, rho| {
            // dρ_I/dt = −i[V_I(t), ρ_I]
            let v = frame.to_rotating(t, &sys.coupling_at(t, pulse));
            commutator_rhs(&v, rho)
        },
        |t_mid, h, rho| {
            let u = unitary(&sys.hamiltonian_at(t_mid, pulse).0, h);
            u * rho * u.adjoint()
        },
        |t, rho| {
            let state = DensityMatrix(frame.to_lab(t, rho));
            state.check(t, purity0, ABORT_SLACK)?;
            series.push(t, state, pulse);
            Ok(())
        },
    )?;
    Ok(series)
}

/// Exponential-midpoint stepping at `cfg.fixed_dt`, whatever `cfg.method` says.
pub fn propagate_unitary(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    rho0: &DensityMatrix,
) -> Result<TimeSeries> {
    let cfg = SimulationConfig {
        method: Method::UnitaryExpm,
        ..*cfg
    };
    propagate(sys, pulse, &cfg, rho0)
}

/// Integrates `dψ/dt = −i H(t) ψ` with the configured method.
///
/// The Runge–Kutta methods step the interaction-picture amplitudes
/// `c(t) = exp(i H₀ (t − t_start)) ψ(t)`, with `H₀` the bare level energies,
/// so the free phase rotation is exact and only the coupling is integrated.
/// Exponential stepping works on ψ directly.
pub fn propagate_state(
    sys: &LevelSystem,
    pulse: &ChirpedPulse,
    cfg: &SimulationConfig,
    psi0: &Vector4<Complex64>,
) -> Result<StateSeries> {
    let norm0 = psi0.norm_squared();
    if norm0.is_nan() || (norm0 - 1.0).abs() > TRACE_TOL {
        return Err(Error::invalid(
            "psi0",
            format!("|psi0|^2 = {norm0}, expected 1"),
        ));
    }
    pulse.validate()?;
    let levels = sys.omega_levels();
    let t_ref = cfg.t_start;
    // exp(∓i ω_n (t − t_ref)) per level
    let free_phase = |t: f64, sign: f64| -> Vector4<Complex64> {
        Vector4::from_fn(|n, _| Complex64::from_polar(1.0, sign * levels[n] * (t - t_ref)))
    };
    let interaction_picture = cfg.method != Method::UnitaryExpm;

    let mut series = StateSeries::default();
    let on_sample = |t: f64, y: &Vector4<Complex64>| {
        let psi = if interaction_picture {
            free_phase(t, -1.0).component_mul(y)
        } else {
            *y
        };
        let deviation = (psi.norm_squared() - 1.0).abs();
        let limit = ABORT_SLACK * TRACE_TOL;
        if deviation.is_nan() || deviation > limit {
            return Err(Error::InvariantViolation {
                t,
                quantity: "norm",
                deviation,
                limit,
            });
        }
        series.times.push(t);
        series.amplitudes.push(psi);
        Ok(())
    };
    integrate(
        cfg,
        *psi0,
        |t, c| {
            // dc/dt = −i e^{iH₀τ} V(t) e^{−iH₀τ} c
            let v = sys.coupling_at(t, pulse);
            let rot = free_phase(t, 1.0);
            let psi = free_phase(t, -1.0).component_mul(c);
            rot.component_mul(&(v * psi)) * MINUS_I
        },
        |t_mid, h, psi| unitary(&sys.hamiltonian_at(t_mid, pulse).0, h) * psi,
        on_sample,
    )?;
    Ok(series)
}
