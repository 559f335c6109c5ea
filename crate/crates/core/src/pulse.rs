//! The tanh-chirped few-cycle pulse.
//!
//! The field enters the Hamiltonian only through the Rabi coupling
//! `Ω(t) = Ω₀ exp(-(t/τ_p)²) cos(ω t + δ(t))` with the chirp phase
//! `δ(t) = -α tanh((t + t₀)/τ)`. Times are in fs, angular frequencies in
//! rad/fs, ħ = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the arccosh argument for treating a resonance as a tangency.
const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpedPulse {
    /// Peak Rabi frequency Ω_R(0), rad/fs.
    pub omega_rabi_peak: f64,
    /// Gaussian envelope parameter τ_p, fs. FWHM is 1.177 τ_p.
    pub tau_p: f64,
    /// Carrier frequency ω, rad/fs.
    pub omega_carrier: f64,
    /// Frequency sweeping parameter α, rad.
    pub alpha: f64,
    /// Chirp offset t₀, fs. Its sign selects the target state.
    pub t0: f64,
    /// Chirp steepening parameter τ, fs.
    pub tau_chirp: f64,
}

impl Default for ChirpedPulse {
    /// Ω_R(0) = 0.60 rad/fs, τ_p = τ = t₀ = 16.5 fs, ω = 3.6 rad/fs, α = 10 rad.
    fn default() -> Self {
        Self {
            omega_rabi_peak: 0.60,
            tau_p: 16.5,
            omega_carrier: 3.6,
            alpha: 10.0,
            t0: 16.5,
            tau_chirp: 16.5,
        }
    }
}

impl ChirpedPulse {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_rabi_peak", self.omega_rabi_peak),
            ("tau_p", self.tau_p),
            ("omega_carrier", self.omega_carrier),
            ("alpha", self.alpha),
            ("t0", self.t0),
            ("tau_chirp", self.tau_chirp),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
        }
        if self.tau_p <= 0.0 {
            return Err(Error::invalid("tau_p", "must be > 0"));
        }
        if self.tau_chirp <= 0.0 {
            return Err(Error::invalid("tau_chirp", "must be > 0"));
        }
        if self.omega_rabi_peak < 0.0 {
            return Err(Error::invalid("omega_rabi_peak", "must be >= 0"));
        }
        if self.omega_carrier <= 0.0 {
            return Err(Error::invalid("omega_carrier", "must be > 0"));
        }
        Ok(())
    }

    /// Gaussian envelope of the Rabi coupling, rad/fs.
    pub fn envelope(&self, t: f64) -> f64 {
        let x = t / self.tau_p;
        self.omega_rabi_peak * (-x * x).exp()
    }

    /// Chirp phase δ(t), rad.
    pub fn chirp_phase(&self, t: f64) -> f64 {
        -self.alpha * ((t + self.t0) / self.tau_chirp).tanh()
    }

    /// Total carrier phase ω t + δ(t), rad.
    pub fn phase(&self, t: f64) -> f64 {
        self.omega_carrier * t + self.chirp_phase(t)
    }

    /// Full oscillating coupling, no rotating-wave approximation.
    pub fn rabi_coupling(&self, t: f64) -> f64 {
        self.envelope(t) * self.phase(t).cos()
    }

    /// Time derivative of [`phase`](Self::phase): ω − (α/τ) sech²((t + t₀)/τ).
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        let sech = 1.0 / ((t + self.t0) / self.tau_chirp).cosh();
        self.omega_carrier - self.alpha / self.tau_chirp * sech * sech
    }

    /// Deepest point of the frequency dip, ω − α/τ, reached at t = −t₀.
    pub fn frequency_extremum(&self) -> f64 {
        self.omega_carrier - self.alpha / self.tau_chirp
    }

    /// All times at which the instantaneous frequency equals `omega_target`,
    /// sorted ascending.
    ///
    /// The sech² profile is inverted analytically. There are two crossings
    /// symmetric about −t₀, one at an exact tangency, or none when the target
    /// lies outside the swept band.
    pub fn resonance_crossings(&self, omega_target: f64) -> Vec<f64> {
        let detuning = self.omega_carrier - omega_target;
        if detuning == 0.0 || self.alpha == 0.0 {
            return Vec::new();
        }
        // sech²(x) = τ (ω − ω_target) / α must lie in (0, 1]
        let ratio = self.alpha / (self.tau_chirp * detuning);
        if ratio <= 0.0 {
            return Vec::new();
        }
        let arg = ratio.sqrt();
        if (arg - 1.0).abs() <= TANGENCY_TOL {
            return vec![-self.t0];
        }
        if arg < 1.0 {
            return Vec::new();
        }
        let half_width = self.tau_chirp * arg.acosh();
        vec![-self.t0 - half_width, -self.t0 + half_width]
    }
}
