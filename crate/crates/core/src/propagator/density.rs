use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Stated tolerances on a propagated state.
pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const POPULATION_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-6;

/// 4×4 density matrix ρ_nm, indices 0..4 standing for |1⟩..|4⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix4<Complex64>);

impl DensityMatrix {
    /// |n⟩⟨n| for a zero-based level index.
    pub fn basis(level: usize) -> Self {
        assert!(level < 4, "level index {level} out of range");
        let mut rho = Matrix4::zeros();
        rho[(level, level)] = Complex64::new(1.0, 0.0);
        Self(rho)
    }

    /// The atom in its ground state |1⟩.
    pub fn ground() -> Self {
        Self::basis(0)
    }

    /// |ψ⟩⟨ψ|.
    pub fn from_pure(psi: &Vector4<Complex64>) -> Self {
        Self(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|n| self.0[(n, n)].re)
    }

    /// ρ₁₂, ρ₂₃, ρ₂₄.
    pub fn driven_coherences(&self) -> [Complex64; 3] {
        [self.0[(0, 1)], self.0[(1, 2)], self.0[(1, 3)]]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Tr ρ², real for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// max |ρ_nm − conj(ρ_mn)|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..4 {
            for m in n..4 {
                worst = worst.max((self.0[(n, m)] - self.0[(m, n)].conj()).norm());
            }
        }
        worst
    }

    /// Largest excursion of a population outside [0, 1], or of its imaginary part from 0.
    pub fn population_excursion(&self) -> f64 {
        (0..4)
            .map(|n| {
                let p = self.0[(n, n)];
                let below = (-p.re).max(0.0);
                let above = (p.re - 1.0).max(0.0);
                below.max(above).max(p.im.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Checks the state invariants, each scaled by `slack`.
    pub(crate) fn check(&self, t: f64, purity_ref: f64, slack: f64) -> Result<()> {
        let checks = [
            ("trace", (self.trace() - 1.0).norm(), TRACE_TOL),
            ("hermiticity", self.hermiticity_error(), HERMITICITY_TOL),
            ("population", self.population_excursion(), POPULATION_TOL),
            ("purity", (self.purity() - purity_ref).abs(), PURITY_TOL),
        ];
        for (quantity, deviation, tol) in checks {
            let limit = slack * tol;
            if deviation.is_nan() || deviation > limit {
                return Err(Error::InvariantViolation {
                    t,
                    quantity,
                    deviation,
                    limit,
                });
            }
        }
        Ok(())
    }

    /// Validates an initial state against the unscaled tolerances.
    pub fn validate(&self) -> Result<()> {
        let failed = [
            ("trace", (self.trace() - 1.0).norm() <= TRACE_TOL),
            ("hermiticity", self.hermiticity_error() <= HERMITICITY_TOL),
            ("population", self.population_excursion() <= POPULATION_TOL),
            ("purity", self.purity() <= 1.0 + PURITY_TOL),
        ]
        .into_iter()
        .find(|(_, ok)| !ok);
        match failed {
            Some((quantity, _)) => Err(Error::invalid(
                "rho0",
                format!("initial state fails the {quantity} check"),
            )),
            None => Ok(()),
        }
    }
}
