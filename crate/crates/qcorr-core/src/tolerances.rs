//! Numerical tolerances and budgets, pinned in one place.

/// Relative agreement required between a full RK4 step and two half steps
/// (Richardson check); a failing step is bisected.
pub const INTEGRATOR_REL_TOL: f64 = 1e-6;

/// Maximum number of recursive step bisections before the integrator gives
/// up and reports stiffness beyond budget.
pub const MAX_STEP_REFINEMENTS: u32 = 24;

/// Hard ceiling on the RK4 step, in units of 1/Γ.
pub const STEP_CEILING: f64 = 0.01;

/// Rate factor in the step bound h ≤ STEP_RATE_FACTOR / (1 + |Δ₀| + Γ_N).
pub const STEP_RATE_FACTOR: f64 = 0.1;

/// H-matrix Hermiticity breach tolerance, relative to max|H|; the same
/// bound applies to the imaginary part discarded from g² values.
pub const HERMITICITY_REL_TOL: f64 = 1e-9;

/// Intensities below this are treated as degenerate (correlations
/// undefined).
pub const INTENSITY_FLOOR: f64 = 1e-30;

/// Default dimensionless minimum inter-atomic separation ε = k₀·distance.
/// Positions violating it are redrawn; keeps the exp(ir)/(ir) kernel finite
/// without measurably perturbing the Gaussian statistics.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-3;

/// Redraw budget per atom before sampling reports a packing impossibility.
pub const MAX_REDRAWS_PER_ATOM: usize = 10_000;

/// Linear-regime validity bound: the weak-field flag is raised for
/// Ω₀/Γ above this.
pub const WEAK_FIELD_RABI_MAX: f64 = 0.1;

/// Boundedness sanity factor for driven trajectories: max_j |β_j| may not
/// exceed this multiple of the drive scale.
pub const TRAJECTORY_BOUND_FACTOR: f64 = 10.0;

/// Floor on the minimum eigenvalue of the real sinc kernel (diagonal 1,
/// off-diagonal sin r / r); positive semidefiniteness guarantees decaying
/// dynamics.
pub const KERNEL_PSD_TOL: f64 = -1e-10;

/// Absolute accuracy of the collective rate Γ_N delivered by quadrature.
pub const COLLECTIVE_RATE_ABS_TOL: f64 = 1e-9;

/// O(N⁴) budget: the literal per-(p,q) product-state path refuses larger N.
pub const PRODUCT_LITERAL_MAX_ATOMS: usize = 16;
