//! Fixed-step classical RK4 with a per-step Richardson verification.
//!
//! The systems integrated here are linear and at worst mildly stiff, so a
//! deterministic fixed-step scheme keeps step counts reproducible. Every
//! step is computed twice, once with h and once as two half steps; the two
//! must agree to [`crate::tolerances::INTEGRATOR_REL_TOL`] or the step is
//! bisected (the half-step result, the more accurate of the two, is what
//! advances the state).

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::linalg;
use crate::tolerances::{INTEGRATOR_REL_TOL, MAX_STEP_REFINEMENTS};
use crate::C64;

/// State that can ride the RK4 stepper: linear combinations plus max-abs
/// norms for the step check.
pub trait OdeState: Clone {
    /// self + c · other
    fn add_scaled(&self, c: f64, other: &Self) -> Self;
    fn max_abs(&self) -> f64;
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl OdeState for DVector<C64> {
    fn add_scaled(&self, c: f64, other: &Self) -> Self {
        self + other * C64::new(c, 0.0)
    }
    fn max_abs(&self) -> f64 {
        linalg::max_abs_vec(self)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff_vec(self, other)
    }
}

impl OdeState for DMatrix<C64> {
    fn add_scaled(&self, c: f64, other: &Self) -> Self {
        self + other * C64::new(c, 0.0)
    }
    fn max_abs(&self) -> f64 {
        linalg::max_abs_mat(self)
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff_mat(self, other)
    }
}

impl<A: OdeState, B: OdeState> OdeState for (A, B) {
    fn add_scaled(&self, c: f64, other: &Self) -> Self {
        (self.0.add_scaled(c, &other.0), self.1.add_scaled(c, &other.1))
    }
    fn max_abs(&self) -> f64 {
        self.0.max_abs().max(self.1.max_abs())
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0).max(self.1.max_abs_diff(&other.1))
    }
}

fn rk4_step<S, F>(rhs: &F, t: f64, y: &S, h: f64) -> S
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &y.add_scaled(0.5 * h, &k1));
    let k3 = rhs(t + 0.5 * h, &y.add_scaled(0.5 * h, &k2));
    let k4 = rhs(t + h, &y.add_scaled(h, &k3));
    y.add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4)
}

fn advance_checked<S, F>(rhs: &F, t: f64, y: &S, h: f64, depth: u32) -> Result<S, Error>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let full = rk4_step(rhs, t, y, h);
    let mid = rk4_step(rhs, t, y, 0.5 * h);
    let halves = rk4_step(rhs, t + 0.5 * h, &mid, 0.5 * h);
    let scale = halves.max_abs().max(1e-30);
    if full.max_abs_diff(&halves) <= INTEGRATOR_REL_TOL * scale {
        return Ok(halves);
    }
    if depth >= MAX_STEP_REFINEMENTS {
        return Err(Error::StepRefinement { t });
    }
    let at_mid = advance_checked(rhs, t, y, 0.5 * h, depth + 1)?;
    advance_checked(rhs, t + 0.5 * h, &at_mid, 0.5 * h, depth + 1)
}

pub fn validate_grid(grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing"));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite values"));
    }
    Ok(())
}

/// Integrate dy/dt = rhs(t, y) from `y0` at `grid[0]`, invoking `observe`
/// at every grid point (index, time, state). Between grid points the step
/// never exceeds `h_max`.
pub fn integrate_observe<S, F, O>(
    rhs: F,
    y0: S,
    grid: &[f64],
    h_max: f64,
    mut observe: O,
) -> Result<(), Error>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
    O: FnMut(usize, f64, &S) -> Result<(), Error>,
{
    validate_grid(grid)?;
    if !(h_max > 0.0) {
        return Err(Error::InvalidParameter("h_max must be positive"));
    }
    observe(0, grid[0], &y0)?;
    let mut y = y0;
    for w in 1..grid.len() {
        let (t0, t1) = (grid[w - 1], grid[w]);
        let span = t1 - t0;
        let n_sub = (span / h_max).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        for s in 0..n_sub {
            y = advance_checked(&rhs, t0 + s as f64 * h, &y, h, 0)?;
        }
        observe(w, t1, &y)?;
    }
    Ok(())
}

/// Convenience wrapper collecting the state at every grid point.
pub fn integrate_collect<S, F>(rhs: F, y0: S, grid: &[f64], h_max: f64) -> Result<Vec<S>, Error>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let mut out = Vec::with_capacity(grid.len());
    integrate_observe(rhs, y0, grid, h_max, |_, _, y| {
        out.push(y.clone());
        Ok(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_exponential_decay() {
        // y' = z y with z = -0.5 + 2i; exact solution e^{z t}.
        let z = C64::new(-0.5, 2.0);
        let rhs = |_t: f64, y: &DVector<C64>| y * z;
        let grid = [0.0, 0.5, 1.0, 2.0];
        let y0 = DVector::from_element(1, C64::new(1.0, 0.0));
        let states = integrate_collect(rhs, y0, &grid, 0.01).unwrap();
        for (t, s) in grid.iter().zip(states.iter()) {
            let exact = (z * t).exp();
            assert!((s[0] - exact).norm() < 1e-8, "t={t}: {} vs {exact}", s[0]);
        }
    }

    #[test]
    fn grid_validation() {
        let rhs = |_: f64, y: &DVector<C64>| y.clone();
        let y0 = DVector::from_element(1, C64::new(0.0, 0.0));
        assert!(matches!(
            integrate_collect(rhs, y0.clone(), &[0.0, 0.0], 0.01),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            integrate_collect(rhs, y0, &[], 0.01),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn stiff_step_gets_refined() {
        // Fast decay rate forces the Richardson check to bisect at the
        // configured ceiling step but still produce the right answer.
        let z = C64::new(-400.0, 0.0);
        let rhs = move |_t: f64, y: &DVector<C64>| y * z;
        let y0 = DVector::from_element(1, C64::new(1.0, 0.0));
        let grid = [0.0, 0.05];
        let states = integrate_collect(rhs, y0, &grid, 0.01).unwrap();
        let exact = (z * 0.05).exp();
        assert!((states[1][0] - exact).norm() < 1e-8 * 1.0f64.max(exact.norm()));
    }
}
