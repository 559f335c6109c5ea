//! Y-type four-level atom: |1⟩ ↔ |2⟩ below, |2⟩ ↔ |3⟩ and |2⟩ ↔ |4⟩ above.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::ChirpedPulse;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSystem {
    omega_levels: [f64; 4],
    beta: f64,
    gamma: f64,
}

impl Default for LevelSystem {
    /// Sodium 3s, 3p, 5s, 4d with β = 0.90, γ = 1.10.
    fn default() -> Self {
        Self::from_transitions(3.19, 3.06, 3.30, 0.90, 1.10).expect("default levels are valid")
    }
}

impl LevelSystem {
    /// Builds the ladder from the three transition frequencies with ω₁ = 0.
    pub fn from_transitions(
        omega21: f64,
        omega32: f64,
        omega42: f64,
        beta: f64,
        gamma: f64,
    ) -> Result<Self> {
        for (name, w) in [
            ("omega21", omega21),
            ("omega32", omega32),
            ("omega42", omega42),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("transition frequency must be > 0, got {w}"),
                ));
            }
        }
        Self::new(
            [0.0, omega21, omega21 + omega32, omega21 + omega42],
            beta,
            gamma,
        )
    }

    /// Absolute level energies (rad/fs) in any gauge.
    pub fn new(omega_levels: [f64; 4], beta: f64, gamma: f64) -> Result<Self> {
        let [w1, w2, w3, w4] = omega_levels;
        if omega_levels.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid(
                "omega_levels",
                "level energies must be finite",
            ));
        }
        if w2 <= w1 {
            return Err(Error::invalid("omega21", "level 2 must lie above level 1"));
        }
        if w3 <= w2 {
            return Err(Error::invalid("omega32", "level 3 must lie above level 2"));
        }
        if w4 <= w2 {
            return Err(Error::invalid("omega42", "level 4 must lie above level 2"));
        }
        // β = 0 or γ = 0 switches one upper leg off entirely
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::invalid("beta", format!("must be >= 0, got {beta}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::invalid(
                "gamma",
                format!("must be >= 0, got {gamma}"),
            ));
        }
        Ok(Self {
            omega_levels,
            beta,
            gamma,
        })
    }

    pub fn omega_levels(&self) -> [f64; 4] {
        self.omega_levels
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega21(&self) -> f64 {
        self.omega_levels[1] - self.omega_levels[0]
    }

    pub fn omega32(&self) -> f64 {
        self.omega_levels[2] - self.omega_levels[1]
    }

    pub fn omega42(&self) -> f64 {
        self.omega_levels[3] - self.omega_levels[1]
    }

    /// Same atom with every level moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            omega_levels: self.omega_levels.map(|w| w + offset),
            ..*self
        }
    }

    pub fn with_dipole_ratios(&self, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(self.omega_levels, beta, gamma)
    }

    /// Full non-RWA Hamiltonian H(t)/ħ in rad/fs.
    pub fn hamiltonian_at(&self, t: f64, pulse: &ChirpedPulse) -> Hamiltonian {
        self.hamiltonian_for_coupling(pulse.rabi_coupling(t))
    }

    /// Off-diagonal (field) part of the Hamiltonian.
    pub(crate) fn coupling_at(&self, t: f64, pulse: &ChirpedPulse) -> Matrix4<Complex64> {
        let mut v = self.hamiltonian_at(t, pulse).0;
        v.fill_diagonal(Complex64::new(0.0, 0.0));
        v
    }

    pub(crate) fn hamiltonian_for_coupling(&self, coupling: f64) -> Hamiltonian {
        let c = |x: f64| Complex64::new(x, 0.0);
        let [w1, w2, w3, w4] = self.omega_levels;
        let v12 = c(-coupling);
        let v23 = c(-self.beta * coupling);
        let v24 = c(-self.gamma * coupling);
        let z = Complex64::new(0.0, 0.0);
        #[rustfmt::skip]
        let h = Matrix4::new(
            c(w1), v12,   z,     z,
            v12,   c(w2), v23,   v24,
            z,     v23,   c(w3), z,
            z,     v24,   z,     c(w4),
        );
        Hamiltonian(h)
    }
}

/// Dense 4×4 Hamiltonian with ħ divided out (rad/fs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian(pub Matrix4<Complex64>);

impl Hamiltonian {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn is_hermitian(&self) -> bool {
        self.0 == self.0.adjoint()
    }
}
