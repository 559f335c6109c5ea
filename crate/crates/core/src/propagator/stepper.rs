//! Time steppers shared by the density-matrix and state-vector propagators.
//!
//! States are fixed-size complex matrices (4×4 for ρ, 4×1 for ψ). The
//! adaptive stepper is the Dormand–Prince 5(4) pair with local
//! extrapolation and FSAL reuse; the fixed-step ones are classic RK4 and
//! midpoint exponential stepping.

use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type State<const R: usize, const C: usize> = SMatrix<Complex64, R, C>;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const INITIAL_STEP: f64 = 1e-2;
/// Step attempts (accepted + rejected) allowed over one integrator's lifetime.
/// A default run needs about 8·10³; a ±300 fs window at Ω₀ = 2 about 4·10⁴.
pub(crate) const MAX_ATTEMPTS: usize = 200_000;

#[inline]
fn sc<const R: usize, const C: usize>(m: &State<R, C>, s: f64) -> State<R, C> {
    m * Complex64::new(s, 0.0)
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand–Prince 5(4) integrator for `dy/dt = f(t, y)`.
pub(crate) struct Dopri5<F, const R: usize, const C: usize> {
    f: F,
    rel_tol: f64,
    abs_tol: f64,
    h: f64,
    /// f(t, y) at the current point, carried over from the last stage.
    k1: Option<State<R, C>>,
    pub(crate) accepted: usize,
    pub(crate) rejected: usize,
}

impl<F, const R: usize, const C: usize> Dopri5<F, R, C>
where
    F: Fn(f64, &State<R, C>) -> State<R, C>,
{
    pub(crate) fn new(f: F, rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            f,
            rel_tol,
            abs_tol,
            h: INITIAL_STEP,
            k1: None,
            accepted: 0,
            rejected: 0,
        }
    }

    fn error_norm(&self, y: &State<R, C>, y_new: &State<R, C>, err: &State<R, C>) -> f64 {
        let mut worst = 0.0f64;
        for ((a, b), e) in y.iter().zip(y_new.iter()).zip(err.iter()) {
            let scale = self.abs_tol + self.rel_tol * a.norm().max(b.norm());
            let r = e.norm() / scale;
            if r.is_nan() {
                return f64::INFINITY;
            }
            worst = worst.max(r);
        }
        worst
    }

    /// Advances `(t, y)` to exactly `t_target`.
    pub(crate) fn advance_to(
        &mut self,
        t: &mut f64,
        y: &mut State<R, C>,
        t_target: f64,
    ) -> Result<()> {
        let f = &self.f;
        let mut k1 = match self.k1.take() {
            Some(k) => k,
            None => f(*t, y),
        };
        while *t < t_target {
            if self.accepted + self.rejected >= MAX_ATTEMPTS {
                return Err(Error::StepBudgetExhausted {
                    t: *t,
                    attempts: MAX_ATTEMPTS,
                });
            }
            let remaining = t_target - *t;
            let proposed = self.h;
            let last = proposed >= remaining;
            let h = if last { remaining } else { proposed };

            let k2 = f(*t + C2 * h, &(*y + sc(&k1, h * A21)));
            let k3 = f(*t + C3 * h, &(*y + sc(&k1, h * A31) + sc(&k2, h * A32)));
            let k4 = f(
                *t + C4 * h,
                &(*y + sc(&k1, h * A41) + sc(&k2, h * A42) + sc(&k3, h * A43)),
            );
            let k5 = f(
                *t + C5 * h,
                &(*y + sc(&k1, h * A51) + sc(&k2, h * A52) + sc(&k3, h * A53) + sc(&k4, h * A54)),
            );
            let k6 = f(
                *t + h,
                &(*y + sc(&k1, h * A61)
                    + sc(&k2, h * A62)
                    + sc(&k3, h * A63)
                    + sc(&k4, h * A64)
                    + sc(&k5, h * A65)),
            );
            let y_new = *y
                + sc(&k1, h * B1)
                + sc(&k3, h * B3)
                + sc(&k4, h * B4)
                + sc(&k5, h * B5)
                + sc(&k6, h * B6);
            let t_new = if last { t_target } else { *t + h };
            let k7 = f(t_new, &y_new);
            let err = sc(&k1, h * E1)
                + sc(&k3, h * E3)
                + sc(&k4, h * E4)
                + sc(&k5, h * E5)
                + sc(&k6, h * E6)
                + sc(&k7, h * E7);
            let norm = self.error_norm(y, &y_new, &err);

            if norm <= 1.0 {
                let factor = if norm == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                *t = t_new;
                *y = y_new;
                k1 = k7;
                self.accepted += 1;
                // a step shortened to land on the target says nothing about the natural step size
                self.h = if last {
                    (h * factor).max(proposed)
                } else {
                    h * factor
                };
            } else {
                self.rejected += 1;
                self.h = h * (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                if !self.h.is_finite() || self.h <= 1e-13 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { t: *t, h: self.h });
                }
            }
        }
        self.k1 = Some(k1);
        Ok(())
    }
}

/// One classical RK4 step.
pub(crate) fn rk4_step<F, const R: usize, const C: usize>(
    f: &F,
    t: f64,
    y: &State<R, C>,
    h: f64,
) -> State<R, C>
where
    F: Fn(f64, &State<R, C>) -> State<R, C>,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &(y + sc(&k1, 0.5 * h)));
    let k3 = f(t + 0.5 * h, &(y + sc(&k2, 0.5 * h)));
    let k4 = f(t + h, &(y + sc(&k3, h)));
    y + sc(&(k1 + sc(&k2, 2.0) + sc(&k3, 2.0) + k4), h / 6.0)
}

/// exp(−i H h) for Hermitian H, through its eigendecomposition.
pub(crate) fn unitary(h_mat: &Matrix4<Complex64>, h: f64) -> Matrix4<Complex64> {
    let eig = h_mat.symmetric_eigen();
    let v = eig.eigenvectors;
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex64::from_polar(1.0, -lambda * h));
    let mut vd = v;
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    vd * v.adjoint()
}

/// Number of uniform sub-steps of at most `dt` that tile `span`.
pub(crate) fn substeps(span: f64, dt: f64) -> usize {
    ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}
