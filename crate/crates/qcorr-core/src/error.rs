//! Crate-wide error type.

/// Failure modes of sampling, dynamics and correlation evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cloud packing failed: atom {atom} still violates min_separation after {attempts} redraws")]
    CloudPacking { atom: usize, attempts: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("evolution matrix is singular")]
    SingularSystem,

    #[error("integrator step refinement did not converge at t = {t}")]
    StepRefinement { t: f64 },

    #[error("trajectory exceeded the boundedness sanity limit")]
    TrajectoryUnbounded,

    #[error("intensity below {floor:e}; correlation undefined")]
    DegenerateIntensity { floor: f64 },

    #[error("H matrix lost Hermiticity at tau = {tau} (breach {breach:e})")]
    HermiticityBreach { tau: f64, breach: f64 },

    #[error("correlation numerator has a non-negligible imaginary part at tau = {tau}")]
    NonRealCorrelation { tau: f64 },

    #[error("quadrature did not reach the requested tolerance")]
    QuadratureNonConvergence,

    #[error("scattering kernel not positive semidefinite (min eigenvalue {min_eig:e})")]
    KernelNotPsd { min_eig: f64 },

    #[error("{0} exceeds the O(N^4) budget")]
    BudgetExceeded(&'static str),

    #[error("degenerate denominator in analytic correlation at t = {t}")]
    DegenerateDenominator { t: f64 },
}
