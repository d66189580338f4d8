//! Exact per-realization two-time correlators.
//!
//! All models share the same first-order coherence; they differ in the
//! two-photon correlator:
//!
//! - **single excitation**: g²(t,τ) = |P(t)|² W(τ) / I(t)² where
//!   W(τ) = s†H(τ)s and the N×N matrix H obeys the Sylvester-type ODE
//!   dH/dτ = Mᴴ H + H M + D(τ) with H(0) = 0 and the rank-2 source
//!   D = conj(β(τ))bᵀ + conj(b)β(τ)ᵀ built from the from-ground-state
//!   amplitudes;
//! - **product state**: the per-(p,q) family H^{(p,q)} decomposes by
//!   linearity into the full-source solution (which collapses to the outer
//!   product conj(β(t+τ))β(t+τ)ᵀ, i.e. the classical term) minus rank-1
//!   deficit corrections whose detector contraction needs only three extra
//!   vector ODEs and one aggregated matrix ODE;
//! - **classical dipoles**: the four-index sum factorizes into
//!   I(t)·I(t+τ)/I(t)², τ-independent at stationarity.
//!
//! Ensemble averaging (the overline) is applied by the companion crate:
//! every function here returns single-realization numerators plus the
//! reference intensity so numerator and denominator can be averaged
//! separately.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

#[allow(unused_imports)]
use num_traits::Float;

use crate::cloud::{detection_phases, DetectionGeometry};
use crate::dynamics::{evolve_beta, field_amplitude, steady_state, BetaTrajectory, CouplingSystem};
use crate::error::Error;
use crate::linalg;
use crate::ode;
use crate::tolerances::{HERMITICITY_REL_TOL, INTENSITY_FLOOR, PRODUCT_LITERAL_MAX_ATOMS};
use crate::{C64, TimePoint};

/// Atomic-state model of a correlation curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    SingleExcitation,
    Product,
    Classical,
    AnalyticTimedDicke,
    AnalyticEberly,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::SingleExcitation => "single_excitation",
            ModelKind::Product => "product",
            ModelKind::Classical => "classical",
            ModelKind::AnalyticTimedDicke => "analytic_td",
            ModelKind::AnalyticEberly => "analytic_eberly",
        }
    }
}

/// Which H-matrix evolution a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HModel {
    SingleExcitation,
    ProductFull,
    ProductDeficit { p: usize, q: usize },
}

/// Snapshot of the H matrix at one delay.
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrixState {
    pub h: DMatrix<C64>,
    pub tau: f64,
    pub model: HModel,
}

/// Provenance carried by every curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMeta {
    pub model: ModelKind,
    pub t: TimePoint,
    pub theta: f64,
    pub phi: f64,
    pub rabi: f64,
    pub detuning: f64,
    pub cloud_seed: Option<u64>,
    pub n_realizations: u32,
}

/// A τ grid with complex (g¹) or real (g²) values and per-point standard
/// errors (zero for a single realization).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve<T> {
    pub tau: Vec<f64>,
    pub values: Vec<T>,
    pub stderr: Vec<f64>,
    pub meta: CurveMeta,
}

/// Single-realization numerator curve plus the reference intensity I(t).
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationNumerators<T> {
    pub numerators: Vec<T>,
    pub intensity: f64,
}

fn validate_tau_grid(tau: &[f64]) -> Result<(), Error> {
    ode::validate_grid(tau)?;
    if tau[0] != 0.0 {
        return Err(Error::InvalidGrid("tau grid must start at 0"));
    }
    Ok(())
}

fn check_intensity(i: f64) -> Result<(), Error> {
    if i < INTENSITY_FLOOR {
        return Err(Error::DegenerateIntensity {
            floor: INTENSITY_FLOOR,
        });
    }
    Ok(())
}

/// β at the reference time: RK4 from the ground state for finite t, the
/// direct linear solve at stationarity.
pub fn beta_at(system: &CouplingSystem, t: TimePoint) -> Result<DVector<C64>, Error> {
    match t {
        TimePoint::SteadyState => steady_state(system),
        TimePoint::Finite(t) => {
            if !(t >= 0.0) {
                return Err(Error::InvalidParameter("t must be >= 0"));
            }
            let zero = DVector::zeros(system.n_atoms());
            if t == 0.0 {
                return Ok(zero);
            }
            Ok(evolve_beta(system, &zero, &[0.0, t])?.last().clone())
        }
    }
}

fn meta_for(system: &CouplingSystem, geom: &DetectionGeometry, model: ModelKind, t: TimePoint) -> CurveMeta {
    CurveMeta {
        model,
        t,
        theta: geom.theta,
        phi: geom.phi,
        rabi: system.drive().rabi,
        detuning: system.drive().detuning,
        cloud_seed: Some(system.cloud().config().seed),
        n_realizations: 1,
    }
}

// ---------------------------------------------------------------------------
// g¹
// ---------------------------------------------------------------------------

/// Rotating-frame g¹ numerator N₁(τ) = conj(E(t))·E(t+τ) with
/// E = Σ_j e^{-ik·r_j}β_j, plus I(t). The optical carrier e^{-iω₀τ} is
/// omitted.
pub fn g1_numerators(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<RealizationNumerators<C64>, Error> {
    validate_tau_grid(tau_grid)?;
    let s = detection_phases(system.cloud(), geom);
    let beta_t = beta_at(system, t)?;
    let e_t = field_amplitude(&s, &beta_t);
    let i_t = e_t.norm_sqr();
    check_intensity(i_t)?;
    let numerators = match t {
        // Stationary continuation stays at β^st by construction.
        TimePoint::SteadyState => alloc::vec![e_t.conj() * e_t; tau_grid.len()],
        TimePoint::Finite(_) => {
            let traj = evolve_beta(system, &beta_t, tau_grid)?;
            traj.amplitudes()
                .iter()
                .map(|beta| e_t.conj() * field_amplitude(&s, beta))
                .collect()
        }
    };
    Ok(RealizationNumerators {
        numerators,
        intensity: i_t,
    })
}

/// Exact per-realization g¹(t,τ).
pub fn g1_exact(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<CorrelationCurve<C64>, Error> {
    let parts = g1_numerators(system, geom, t, tau_grid)?;
    let i_t = parts.intensity;
    Ok(CorrelationCurve {
        tau: tau_grid.to_vec(),
        values: parts.numerators.iter().map(|n| n / i_t).collect(),
        stderr: alloc::vec![0.0; tau_grid.len()],
        meta: meta_for(system, geom, ModelKind::SingleExcitation, t),
    })
}

// ---------------------------------------------------------------------------
// Single-excitation g²
// ---------------------------------------------------------------------------

/// Shared pieces of the Sylvester-type τ evolutions.
struct HDriver<'a> {
    m: &'a DMatrix<C64>,
    m_adj: DMatrix<C64>,
    b: &'a DVector<C64>,
    b_conj: DVector<C64>,
}

impl<'a> HDriver<'a> {
    fn new(system: &'a CouplingSystem) -> Self {
        let m = system.evolution_matrix();
        Self {
            m,
            // M is symmetric, so conj(M) = Mᴴ.
            m_adj: m.conjugate(),
            b: system.drive_vector(),
            b_conj: system.drive_vector().conjugate(),
        }
    }

    /// Mᴴ·h + h·M. The diagonal parts of M supply the full -ΓH decay:
    /// (iΔ₀ - 1/2) + (-iΔ₀ - 1/2) = -1 in Γ units.
    fn sylvester(&self, h: &DMatrix<C64>) -> DMatrix<C64> {
        let mut r = linalg::matmul(&self.m_adj, h);
        linalg::matmul_acc(&mut r, h, self.m);
        r
    }
}

fn hermiticity_guard(h: &DMatrix<C64>, tau: f64) -> Result<(), Error> {
    let breach = linalg::hermiticity_breach(h);
    let scale = linalg::max_abs_mat(h).max(1e-30);
    if breach > HERMITICITY_REL_TOL * scale {
        return Err(Error::HermiticityBreach { tau, breach });
    }
    Ok(())
}

/// Evolve the single-excitation H matrix across `tau_grid`.
///
/// `beta_tau` supplies the initial amplitudes (its first grid point) and
/// must cover the requested delays; the amplitudes are re-propagated
/// internally at integrator stage resolution. H(0) = 0 and Hermiticity is
/// enforced along the whole evolution.
pub fn evolve_h_single(
    system: &CouplingSystem,
    beta_tau: &BetaTrajectory,
    tau_grid: &[f64],
) -> Result<Vec<HMatrixState>, Error> {
    validate_tau_grid(tau_grid)?;
    let tau_end = *tau_grid.last().expect("validated non-empty");
    let covers = beta_tau.times().first() == Some(&tau_grid[0])
        && beta_tau.times().last().copied().unwrap_or(f64::NEG_INFINITY) >= tau_end;
    if !covers {
        return Err(Error::InvalidGrid("beta trajectory does not cover tau grid"));
    }
    let n = system.n_atoms();
    let driver = HDriver::new(system);
    let rhs = |_t: f64, y: &(DVector<C64>, DMatrix<C64>)| single_exc_rhs(&driver, y);
    let y0 = (beta_tau.amplitudes()[0].clone(), DMatrix::zeros(n, n));
    let mut out = Vec::with_capacity(tau_grid.len());
    ode::integrate_observe(rhs, y0, tau_grid, system.step_bound(), |_, tau, (_, h)| {
        hermiticity_guard(h, tau)?;
        out.push(HMatrixState {
            h: h.clone(),
            tau,
            model: HModel::SingleExcitation,
        });
        Ok(())
    })?;
    Ok(out)
}

/// dH/dτ = Mᴴ H + H M + conj(β)bᵀ + conj(b)βᵀ alongside dβ/dτ = Mβ + b.
fn single_exc_rhs(
    driver: &HDriver<'_>,
    state: &(DVector<C64>, DMatrix<C64>),
) -> (DVector<C64>, DMatrix<C64>) {
    let (beta, h) = state;
    let dbeta = driver.m * beta + driver.b;
    let mut dh = driver.sylvester(h);
    linalg::outer_acc(&mut dh, &beta.conjugate(), driver.b);
    linalg::outer_acc(&mut dh, &driver.b_conj, beta);
    (dbeta, dh)
}

/// Single-excitation g² numerators |P(t)|²·W(τ) with W(τ) = s†H(τ)s, plus
/// I(t). W(0) = 0 exactly, so the τ = 0 value is an exact zero.
pub fn g2_single_numerators(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<RealizationNumerators<f64>, Error> {
    validate_tau_grid(tau_grid)?;
    let n = system.n_atoms();
    let s = detection_phases(system.cloud(), geom);
    let beta_t = beta_at(system, t)?;
    let p = field_amplitude(&s, &beta_t).conj();
    let p_sq = p.norm_sqr();
    let i_t = p_sq; // |P(t)|² = |E(t)|² = I(t)
    check_intensity(i_t)?;

    let driver = HDriver::new(system);
    let rhs = |_t: f64, y: &(DVector<C64>, DMatrix<C64>)| single_exc_rhs(&driver, y);
    let y0 = (DVector::zeros(n), DMatrix::zeros(n, n));
    let mut numerators = Vec::with_capacity(tau_grid.len());
    ode::integrate_observe(rhs, y0, tau_grid, system.step_bound(), |_, tau, (_, h)| {
        hermiticity_guard(h, tau)?;
        let w = quadratic_form(&s, h);
        numerators.push(p_sq * w.re);
        Ok(())
    })?;
    Ok(RealizationNumerators {
        numerators,
        intensity: i_t,
    })
}

/// s† X s
fn quadratic_form(s: &DVector<C64>, x: &DMatrix<C64>) -> C64 {
    let xs = x * s;
    s.iter().zip(xs.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Exact per-realization single-excitation g²(t,τ).
pub fn g2_single_excitation(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<CorrelationCurve<f64>, Error> {
    let parts = g2_single_numerators(system, geom, t, tau_grid)?;
    let denom = parts.intensity * parts.intensity;
    Ok(CorrelationCurve {
        tau: tau_grid.to_vec(),
        values: parts.numerators.iter().map(|n| n / denom).collect(),
        stderr: alloc::vec![0.0; tau_grid.len()],
        meta: meta_for(system, geom, ModelKind::SingleExcitation, t),
    })
}

// ---------------------------------------------------------------------------
// Classical dipoles
// ---------------------------------------------------------------------------

/// Classical-dipole g² numerators I(t)·I(t+τ), plus I(t); the four-index
/// sum factorizes exactly.
pub fn g2_classical_numerators(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<RealizationNumerators<f64>, Error> {
    validate_tau_grid(tau_grid)?;
    let s = detection_phases(system.cloud(), geom);
    let beta_t = beta_at(system, t)?;
    let i_t = field_amplitude(&s, &beta_t).norm_sqr();
    check_intensity(i_t)?;
    let numerators = match t {
        TimePoint::SteadyState => alloc::vec![i_t * i_t; tau_grid.len()],
        TimePoint::Finite(_) => {
            let traj = evolve_beta(system, &beta_t, tau_grid)?;
            traj.amplitudes()
                .iter()
                .map(|beta| i_t * field_amplitude(&s, beta).norm_sqr())
                .collect()
        }
    };
    Ok(RealizationNumerators {
        numerators,
        intensity: i_t,
    })
}

/// Per-realization classical-dipole g²(t,τ) = I(t+τ)/I(t).
pub fn g2_classical(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<CorrelationCurve<f64>, Error> {
    let parts = g2_classical_numerators(system, geom, t, tau_grid)?;
    let denom = parts.intensity * parts.intensity;
    Ok(CorrelationCurve {
        tau: tau_grid.to_vec(),
        values: parts.numerators.iter().map(|n| n / denom).collect(),
        stderr: alloc::vec![0.0; tau_grid.len()],
        meta: meta_for(system, geom, ModelKind::Classical, t),
    })
}

// ---------------------------------------------------------------------------
// Product state
// ---------------------------------------------------------------------------

/// Driven amplitudes with the q-th initial entry removed:
/// F^{(q)}(0) = β(t) - e_q β_q(t), evolving under the full driven equation.
/// Equivalently F^{(q)}(τ) = β(t+τ) - Φ(τ)e_q β_q(t) with Φ = e^{Mτ}.
pub fn evolve_f_product(
    system: &CouplingSystem,
    beta_t: &DVector<C64>,
    q: usize,
    tau_grid: &[f64],
) -> Result<Vec<DVector<C64>>, Error> {
    validate_tau_grid(tau_grid)?;
    if q >= system.n_atoms() {
        return Err(Error::InvalidParameter("deficit index q out of range"));
    }
    let mut f0 = beta_t.clone();
    f0[q] = C64::new(0.0, 0.0);
    let m = system.evolution_matrix();
    let b = system.drive_vector();
    let rhs = move |_t: f64, y: &DVector<C64>| m * y + b;
    ode::integrate_collect(rhs, f0, tau_grid, system.step_bound())
}

/// Product-state g² numerators via the linear-superposition decomposition,
/// plus I(t).
///
/// The full-source part collapses to the classical term I(t)·I(t+τ); the
/// deficit corrections contract to |z(τ)|² + 2Re[E(t)·s†X₁(τ)s] where
/// z = dᵀψ, ψ and η propagate homogeneously from s and d = s∘β(t)², and
/// X₁ solves the Sylvester ODE with the rank-1 source conj(η)bᵀ. Cost is
/// one matrix ODE per realization regardless of N.
pub fn g2_product_numerators(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<RealizationNumerators<f64>, Error> {
    validate_tau_grid(tau_grid)?;
    let n = system.n_atoms();
    let s = detection_phases(system.cloud(), geom);
    let beta_t = beta_at(system, t)?;
    let e_t = field_amplitude(&s, &beta_t);
    let i_t = e_t.norm_sqr();
    check_intensity(i_t)?;

    // d_q = s_q β_q(t)²
    let d = DVector::from_iterator(
        n,
        s.iter().zip(beta_t.iter()).map(|(sq, bq)| sq * bq * bq),
    );

    let driver = HDriver::new(system);
    let steady = t.is_steady();
    type State = ((DVector<C64>, DVector<C64>), (DVector<C64>, DMatrix<C64>));
    let rhs = |_t: f64, state: &State| -> State {
        let ((beta_c, psi), (eta, x1)) = state;
        // The stationary continuation is pinned exactly to β^st.
        let dbeta_c = if steady {
            DVector::zeros(beta_c.len())
        } else {
            driver.m * beta_c + driver.b
        };
        let dpsi = driver.m * psi;
        let deta = driver.m * eta;
        let mut dx1 = driver.sylvester(x1);
        linalg::outer_acc(&mut dx1, &eta.conjugate(), driver.b);
        ((dbeta_c, dpsi), (deta, dx1))
    };
    let y0: State = ((beta_t.clone(), s.clone()), (d.clone(), DMatrix::zeros(n, n)));

    let mut numerators = Vec::with_capacity(tau_grid.len());
    ode::integrate_observe(
        rhs,
        y0,
        tau_grid,
        system.step_bound(),
        |_, _tau, ((beta_c, psi), (_eta, x1)): &State| {
            let i_tpt = field_amplitude(&s, beta_c).norm_sqr();
            let z: C64 = d.iter().zip(psi.iter()).map(|(a, b)| a * b).sum();
            let y1 = quadratic_form(&s, x1);
            numerators.push(i_t * i_tpt - z.norm_sqr() - 2.0 * (e_t * y1).re);
            Ok(())
        },
    )?;
    Ok(RealizationNumerators {
        numerators,
        intensity: i_t,
    })
}

/// Exact per-realization product-state g²(t,τ).
pub fn g2_product(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<CorrelationCurve<f64>, Error> {
    let parts = g2_product_numerators(system, geom, t, tau_grid)?;
    let denom = parts.intensity * parts.intensity;
    Ok(CorrelationCurve {
        tau: tau_grid.to_vec(),
        values: parts.numerators.iter().map(|n| n / denom).collect(),
        stderr: alloc::vec![0.0; tau_grid.len()],
        meta: meta_for(system, geom, ModelKind::Product, t),
    })
}

/// Evolve one literal per-(p,q) product-state H matrix with its deficit
/// sources and excluded initial element (reference path, small N).
pub fn evolve_h_product_pair(
    system: &CouplingSystem,
    beta_t: &DVector<C64>,
    p: usize,
    q: usize,
    tau_grid: &[f64],
) -> Result<Vec<HMatrixState>, Error> {
    validate_tau_grid(tau_grid)?;
    let n = system.n_atoms();
    if p >= n || q >= n {
        return Err(Error::InvalidParameter("pair index out of range"));
    }
    let driver = HDriver::new(system);
    // H^{(p,q)}(0) = conj(β(t))β(t)ᵀ with the (p,q) element excluded.
    let mut h0 = DMatrix::zeros(n, n);
    linalg::outer_acc(&mut h0, &beta_t.conjugate(), beta_t);
    h0[(p, q)] = C64::new(0.0, 0.0);
    let mut fp0 = beta_t.clone();
    fp0[p] = C64::new(0.0, 0.0);
    let mut fq0 = beta_t.clone();
    fq0[q] = C64::new(0.0, 0.0);

    type State = ((DVector<C64>, DVector<C64>), DMatrix<C64>);
    let rhs = |_t: f64, state: &State| -> State {
        let ((fp, fq), h) = state;
        let dfp = driver.m * fp + driver.b;
        let dfq = driver.m * fq + driver.b;
        let mut dh = driver.sylvester(h);
        linalg::outer_acc(&mut dh, &fp.conjugate(), driver.b);
        linalg::outer_acc(&mut dh, &driver.b_conj, fq);
        ((dfp, dfq), dh)
    };
    let y0: State = ((fp0, fq0), h0);
    let mut out = Vec::with_capacity(tau_grid.len());
    ode::integrate_observe(rhs, y0, tau_grid, system.step_bound(), |_, tau, (_, h)| {
        out.push(HMatrixState {
            h: h.clone(),
            tau,
            model: HModel::ProductDeficit { p, q },
        });
        Ok(())
    })?;
    Ok(out)
}

/// Literal O(N⁴)-cost product-state numerators: one matrix ODE per (p,q)
/// pair, contracted with the detection phases. Refuses N above
/// [`PRODUCT_LITERAL_MAX_ATOMS`]; retained as the reference oracle for the
/// decomposition path.
pub fn g2_product_literal_numerators(
    system: &CouplingSystem,
    geom: &DetectionGeometry,
    t: TimePoint,
    tau_grid: &[f64],
) -> Result<RealizationNumerators<f64>, Error> {
    validate_tau_grid(tau_grid)?;
    let n = system.n_atoms();
    if n > PRODUCT_LITERAL_MAX_ATOMS {
        return Err(Error::BudgetExceeded("literal product-state path"));
    }
    let s = detection_phases(system.cloud(), geom);
    let beta_t = beta_at(system, t)?;
    let i_t = field_amplitude(&s, &beta_t).norm_sqr();
    check_intensity(i_t)?;
    // w_q = s_q β_q(t); the (p,q) pair enters with conj(w_p) w_q.
    let w: Vec<C64> = s.iter().zip(beta_t.iter()).map(|(a, b)| a * b).collect();

    let mut totals = alloc::vec![C64::new(0.0, 0.0); tau_grid.len()];
    for p in 0..n {
        for q in 0..n {
            let weight = w[p].conj() * w[q];
            let states = evolve_h_product_pair(system, &beta_t, p, q, tau_grid)?;
            for (i, st) in states.iter().enumerate() {
                totals[i] += weight * quadratic_form(&s, &st.h);
            }
        }
    }
    let mut numerators = Vec::with_capacity(totals.len());
    for (i, tot) in totals.iter().enumerate() {
        let scale = tot.norm().max(i_t * i_t).max(1e-30);
        if tot.im.abs() > HERMITICITY_REL_TOL * scale {
            return Err(Error::NonRealCorrelation { tau: tau_grid[i] });
        }
        numerators.push(tot.re);
    }
    Ok(RealizationNumerators {
        numerators,
        intensity: i_t,
    })
}
