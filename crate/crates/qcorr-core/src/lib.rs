//! Two-time photon correlation functions g¹(t,τ) and g²(t,τ) of the light
//! scattered by N laser-driven cold two-level atoms at fixed random
//! positions.
//!
//! Everything is dimensionless: rates in units of the single-atom linewidth
//! Γ, lengths in units of 1/k₀, times in units of 1/Γ. The laser propagates
//! along +ẑ. This crate is the algorithmic core; disorder averaging, the
//! CLI and file formats live in the companion `qcorr-cli` crate.
//!
//! The modules map onto the physical pipeline:
//!
//! - [`cloud`] — random Gaussian clouds, the exp(ik₀r)/(ik₀r) pairwise
//!   scattering kernel, structure factors and the R/Q/K₂/K₄ disorder
//!   statistics;
//! - [`dynamics`] — the driven linear dipole amplitudes β_j(t), steady
//!   states and scattered intensity;
//! - [`correlations`] — exact per-realization g¹ and g² for the
//!   single-excitation, product-state and classical-dipole models;
//! - [`analytic`] — closed forms for the uniform-excitation limits
//!   (timed-Dicke and Eberly states) and the collective rate Γ_N.
//!
//! The crate is `no_std`-compatible (`alloc` required) with its default
//! `std` feature disabled.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytic;
pub mod cloud;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod tolerances;

pub use error::Error;

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Reference time t of a two-time correlator: a finite Γt or the t → ∞
/// limit.
///
/// Stationary quantities are always produced from the direct linear solve,
/// never from long integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimePoint {
    Finite(f64),
    SteadyState,
}

impl TimePoint {
    pub fn is_steady(&self) -> bool {
        matches!(self, TimePoint::SteadyState)
    }
}
