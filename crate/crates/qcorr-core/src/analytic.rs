//! Closed-form correlators of the uniform-excitation limits.
//!
//! For the timed-Dicke and Eberly (pure Bloch) states the whole dynamics
//! collapses onto a single collective mode with decay rate Γ_N and shifted
//! detuning Δ, and every correlator is elementary. The collective rate is
//! the angular integral of |S_∞|² over emission directions,
//!
//! ```text
//! Γ_N = 1 + (N/2) ∫₀^π sinθ · exp[-4σ²sin²(θ/2)] dθ
//! ```
//!
//! evaluated by adaptive quadrature; the collective Lamb shift is not
//! computed here, Δ is a direct input.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::quad;
use crate::tolerances::COLLECTIVE_RATE_ABS_TOL;
use crate::{C64, TimePoint};

/// Collective parameters of the uniform-excitation analytic family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveParams {
    /// Γ_N in units of Γ.
    pub gamma_n: f64,
    /// Shifted detuning Δ = Δ₀ - Δ_N in units of Γ.
    pub delta: f64,
    /// Zero-delay classical intensity correlation R.
    pub r_factor: f64,
    /// Transient-oscillation coefficient Q.
    pub q_factor: f64,
}

impl CollectiveParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.gamma_n >= 1.0) {
            return Err(Error::InvalidParameter("gamma_n must be >= 1"));
        }
        if !(1.0..=2.0).contains(&self.r_factor) {
            return Err(Error::InvalidParameter("r_factor must lie in [1, 2]"));
        }
        if !(-1.0..=0.5).contains(&self.q_factor) {
            return Err(Error::InvalidParameter("q_factor must lie in [-1, 1/2]"));
        }
        Ok(())
    }
}

/// Γ_N for N atoms in a Gaussian cloud of rms size σ (σ > 0), by adaptive
/// Gauss–Kronrod quadrature. Accuracy: [`COLLECTIVE_RATE_ABS_TOL`] on Γ_N
/// itself.
pub fn collective_rate(n_atoms: usize, sigma: f64) -> Result<f64, Error> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter("sigma must be finite and > 0"));
    }
    let four_sigma_sq = 4.0 * sigma * sigma;
    let integrand = move |theta: f64| {
        let s = (0.5 * theta).sin();
        theta.sin() * (-four_sigma_sq * s * s).exp()
    };
    // The N/2 prefactor amplifies the integral error; tighten accordingly.
    let n = n_atoms.max(1) as f64;
    let tol = (0.2 * COLLECTIVE_RATE_ABS_TOL / n).clamp(1e-13, COLLECTIVE_RATE_ABS_TOL);
    let integral = quad::integrate(integrand, 0.0, core::f64::consts::PI, tol)?;
    Ok(1.0 + 0.5 * n_atoms as f64 * integral)
}

/// β^st = Ω₀ / (2Δ + iΓ_N).
pub fn steady_amplitude(omega0: f64, delta: f64, gamma_n: f64) -> C64 {
    C64::new(omega0, 0.0) / C64::new(2.0 * delta, gamma_n)
}

/// Timed-Dicke transient β(t) = β^st {1 - e^{(iΔ - Γ_N/2)t}}.
pub fn timed_dicke_beta(t: f64, omega0: f64, delta: f64, gamma_n: f64) -> C64 {
    let z = C64::new(-0.5 * gamma_n, delta);
    steady_amplitude(omega0, delta, gamma_n) * (C64::new(1.0, 0.0) - (z * t).exp())
}

/// Quantum-regression coefficients (A, B, C) of
/// ⟨σ†σ⟩(t+τ) = A + B⟨σ⟩ + B*⟨σ†⟩ + C⟨σ†σ⟩(t).
pub fn abc_coefficients(tau: f64, omega0: f64, delta: f64, gamma_n: f64) -> (f64, C64, f64) {
    let st = steady_amplitude(omega0, delta, gamma_n);
    let decay_half = (-0.5 * gamma_n * tau).exp();
    let decay = (-gamma_n * tau).exp();
    let a = st.norm_sqr() * (1.0 + decay - 2.0 * decay_half * (delta * tau).cos());
    let b = st.conj() * decay_half * (C64::cis(delta * tau) - C64::new(decay_half, 0.0));
    (a, b, decay)
}

/// Rotating-frame timed-Dicke g¹(t,τ) = (1 - e^{z(t+τ)})/(1 - e^{zt}) with
/// z = iΔ - Γ_N/2; the t → ∞ value is exactly 1.
pub fn g1_timed_dicke(t: TimePoint, tau: f64, delta: f64, gamma_n: f64) -> Result<C64, Error> {
    let z = C64::new(-0.5 * gamma_n, delta);
    match t {
        TimePoint::SteadyState => Ok(C64::new(1.0, 0.0)),
        TimePoint::Finite(t) => {
            let den = C64::new(1.0, 0.0) - (z * t).exp();
            if den.norm() < 1e-300 {
                return Err(Error::DegenerateDenominator { t });
            }
            Ok((C64::new(1.0, 0.0) - (z * (t + tau)).exp()) / den)
        }
    }
}

/// Timed-Dicke g²(t,τ); the stationary form is R·|1 - e^{(iΔ-Γ_N/2)τ}|².
pub fn g2_timed_dicke(
    t: TimePoint,
    tau: f64,
    r: f64,
    delta: f64,
    gamma_n: f64,
) -> Result<f64, Error> {
    match t {
        TimePoint::SteadyState => {
            let z = C64::new(-0.5 * gamma_n, delta);
            let one = C64::new(1.0, 0.0);
            Ok(r * (one - (z * tau).exp()).norm_sqr())
        }
        TimePoint::Finite(t) => {
            let bracket = |x: f64| {
                1.0 + (-gamma_n * x).exp()
                    - 2.0 * (-0.5 * gamma_n * x).exp() * (delta * x).cos()
            };
            let den = bracket(t);
            if den.abs() < 1e-300 {
                return Err(Error::DegenerateDenominator { t });
            }
            Ok(r * bracket(tau) / den)
        }
    }
}

/// Stationary Eberly-state g²(τ) = R + 2Q·[e^{-Γ_Nτ} - e^{-Γ_Nτ/2}cos(Δτ)].
pub fn g2_eberly(tau: f64, r: f64, q: f64, delta: f64, gamma_n: f64) -> f64 {
    r + 2.0
        * q
        * ((-gamma_n * tau).exp() - (-0.5 * gamma_n * tau).exp() * (delta * tau).cos())
}

/// Assemble the analytic family's parameters from cloud statistics
/// (continuous-S_∞ route): Γ_N by quadrature, R and Q from N|S_∞|².
pub fn derive_collective(
    n_atoms: usize,
    sigma: f64,
    theta: f64,
    delta: f64,
) -> Result<CollectiveParams, Error> {
    let gamma_n = collective_rate(n_atoms, sigma)?;
    let s = crate::cloud::gaussian_s_infinity(sigma, theta);
    let s2 = s * s;
    Ok(CollectiveParams {
        gamma_n,
        delta,
        r_factor: crate::cloud::r_factor_analytic(n_atoms, s2),
        q_factor: crate::cloud::q_factor(n_atoms, s2),
    })
}
