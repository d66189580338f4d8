//! Driven linear dynamics of the single-excitation amplitudes β_j(t).
//!
//! In units Γ = 1, k₀ = 1 the amplitudes obey
//!
//! ```text
//! dβ/dt = M β + b,   M = (iΔ₀ - 1/2)·I - (1/2)·γ,   b_j = -(iΩ₀/2) e^{i k₀·r_j}
//! ```
//!
//! with γ the pairwise kernel of [`crate::cloud::kernel_matrix`]. M is
//! symmetric (not Hermitian); the sinc-kernel positive semidefiniteness
//! pushes every eigenvalue's real part below zero, so the drive always
//! relaxes to the unique steady state -M⁻¹b.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Vector3};

#[allow(unused_imports)]
use num_traits::Float;

use crate::analytic;
use crate::cloud::AtomCloud;
use crate::error::Error;
use crate::linalg;
use crate::ode::{self, OdeState};
use crate::tolerances::{
    KERNEL_PSD_TOL, STEP_CEILING, STEP_RATE_FACTOR, TRAJECTORY_BOUND_FACTOR, WEAK_FIELD_RABI_MAX,
};
use crate::C64;

/// Laser drive: Rabi frequency and detuning in units of Γ. The beam axis
/// is fixed to +ẑ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    /// Ω₀/Γ.
    pub rabi: f64,
    /// Δ₀/Γ.
    pub detuning: f64,
}

impl DriveParams {
    pub fn new(rabi: f64, detuning: f64) -> Self {
        Self { rabi, detuning }
    }

    /// Laser propagation direction k₀ (unit vector, k₀ = 1 units).
    pub fn axis() -> Vector3<f64> {
        Vector3::z()
    }

    /// Linear-optics validity: the weak-field assumption Ω₀ ≪ Γ is
    /// considered violated above [`WEAK_FIELD_RABI_MAX`].
    pub fn is_linear_regime(&self) -> bool {
        self.rabi <= WEAK_FIELD_RABI_MAX
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rabi >= 0.0) || !self.rabi.is_finite() {
            return Err(Error::InvalidParameter("rabi must be finite and >= 0"));
        }
        if !self.detuning.is_finite() {
            return Err(Error::InvalidParameter("detuning must be finite"));
        }
        Ok(())
    }
}

/// Assembled evolution matrix, drive vector and the generating cloud for
/// one realization. Immutable after assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSystem {
    evolution_matrix: DMatrix<C64>,
    drive_vector: DVector<C64>,
    cloud: AtomCloud,
    drive: DriveParams,
    /// Collective-rate estimate used for step and horizon sizing.
    gamma_n_est: f64,
}

impl CouplingSystem {
    pub fn evolution_matrix(&self) -> &DMatrix<C64> {
        &self.evolution_matrix
    }

    pub fn drive_vector(&self) -> &DVector<C64> {
        &self.drive_vector
    }

    pub fn cloud(&self) -> &AtomCloud {
        &self.cloud
    }

    pub fn drive(&self) -> &DriveParams {
        &self.drive
    }

    pub fn n_atoms(&self) -> usize {
        self.drive_vector.len()
    }

    pub fn gamma_n_estimate(&self) -> f64 {
        self.gamma_n_est
    }

    /// Step bound h ≤ min(ceiling, rate_factor/(1 + |Δ₀| + Γ_N)).
    pub fn step_bound(&self) -> f64 {
        STEP_CEILING.min(STEP_RATE_FACTOR / (1.0 + self.drive.detuning.abs() + self.gamma_n_est))
    }
}

/// Build M and b for one cloud realization.
pub fn assemble_system(cloud: AtomCloud, drive: DriveParams) -> CouplingSystem {
    let n = cloud.n_atoms();
    let mut m = crate::cloud::kernel_matrix(&cloud) * C64::new(-0.5, 0.0);
    let diag = C64::new(-0.5, drive.detuning);
    for j in 0..n {
        m[(j, j)] = diag;
    }
    let half_rabi = C64::new(0.0, -0.5 * drive.rabi);
    let b = DVector::from_iterator(
        n,
        cloud.positions().iter().map(|r| half_rabi * C64::cis(r.z)),
    );
    let (n_atoms, sigma) = (cloud.config().n_atoms, cloud.config().sigma);
    let gamma_n_est = if sigma > 0.0 {
        analytic::collective_rate(n_atoms, sigma).unwrap_or(1.0 + n_atoms as f64)
    } else {
        // σ → 0 limit of 1 + N(1 - e^{-4σ²})/(4σ²).
        1.0 + n_atoms as f64
    };
    CouplingSystem {
        evolution_matrix: m,
        drive_vector: b,
        cloud,
        drive,
        gamma_n_est,
    }
}

/// Stationary amplitudes β^st solving M β + b = 0 by dense LU.
pub fn steady_state(system: &CouplingSystem) -> Result<DVector<C64>, Error> {
    let rhs = -system.drive_vector.clone();
    system
        .evolution_matrix
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem)
}

/// Amplitudes stored on a time grid (units of 1/Γ).
#[derive(Debug, Clone, PartialEq)]
pub struct BetaTrajectory {
    times: Vec<f64>,
    amplitudes: Vec<DVector<C64>>,
}

impl BetaTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amplitudes(&self) -> &[DVector<C64>] {
        &self.amplitudes
    }

    pub fn last(&self) -> &DVector<C64> {
        self.amplitudes.last().expect("trajectory is never empty")
    }
}

/// Integrate dβ/dt = Mβ + b from `beta0` across `t_grid` (which must start
/// at 0; the system is autonomous so grids are relative). Fixed-step RK4
/// with the Richardson policy of [`crate::ode`].
pub fn evolve_beta(
    system: &CouplingSystem,
    beta0: &DVector<C64>,
    t_grid: &[f64],
) -> Result<BetaTrajectory, Error> {
    if t_grid.first() != Some(&0.0) {
        return Err(Error::InvalidGrid("t_grid must start at 0"));
    }
    if beta0.len() != system.n_atoms() {
        return Err(Error::InvalidParameter("beta0 length differs from N"));
    }
    let m = &system.evolution_matrix;
    let b = &system.drive_vector;
    let rhs = move |_t: f64, y: &DVector<C64>| m * y + b;
    // Sanity bound on driven trajectories; a breach flags a pathological
    // realization rather than a recoverable state.
    let bound =
        TRAJECTORY_BOUND_FACTOR * system.drive.rabi.max(linalg::max_abs_vec(beta0));
    let mut amplitudes = Vec::with_capacity(t_grid.len());
    ode::integrate_observe(rhs, beta0.clone(), t_grid, system.step_bound(), |_, _, y| {
        if y.max_abs() > bound && bound > 0.0 {
            return Err(Error::TrajectoryUnbounded);
        }
        amplitudes.push(y.clone());
        Ok(())
    })?;
    Ok(BetaTrajectory {
        times: t_grid.to_vec(),
        amplitudes,
    })
}

/// Dimensionless single-realization intensity |Σ_j e^{-i k·r_j} β_j|².
pub fn intensity(
    cloud: &AtomCloud,
    beta: &DVector<C64>,
    geom: &crate::cloud::DetectionGeometry,
) -> f64 {
    let s = crate::cloud::detection_phases(cloud, geom);
    field_amplitude(&s, beta).norm_sqr()
}

/// Scattered field amplitude E = Σ_j s_j β_j (no conjugation).
pub(crate) fn field_amplitude(phases: &DVector<C64>, beta: &DVector<C64>) -> C64 {
    phases
        .iter()
        .zip(beta.iter())
        .map(|(s, b)| s * b)
        .sum()
}

/// Per-realization validity check: the real sinc kernel must be positive
/// semidefinite (within [`KERNEL_PSD_TOL`]), which keeps every eigenvalue
/// of M strictly decaying.
pub fn validate_realization(cloud: &AtomCloud) -> Result<(), Error> {
    let min_eig = crate::cloud::sinc_kernel_min_eigenvalue(cloud);
    if min_eig < KERNEL_PSD_TOL {
        return Err(Error::KernelNotPsd { min_eig });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{sample_cloud, AtomCloud, CloudConfig, DetectionGeometry};

    const SEED: u64 = 0xd1ce;

    fn single_atom_at_origin(drive: DriveParams) -> CouplingSystem {
        let cfg = CloudConfig::new(1, 1.0, SEED);
        let cloud = AtomCloud::from_positions(alloc::vec![Vector3::zeros()], cfg).unwrap();
        assemble_system(cloud, drive)
    }

    #[test]
    fn single_atom_assembly() {
        let sys = single_atom_at_origin(DriveParams::new(0.04, 3.0));
        assert_eq!(sys.evolution_matrix()[(0, 0)], C64::new(-0.5, 3.0));
        assert_eq!(sys.drive_vector()[0], C64::new(0.0, -0.02));
    }

    #[test]
    fn drive_vector_modulus_is_half_rabi() {
        let cloud = sample_cloud(&CloudConfig::new(30, 2.0, SEED)).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.06, -1.0));
        for b in sys.drive_vector().iter() {
            assert!((b.norm() - 0.03).abs() < 1e-15);
        }
    }

    #[test]
    fn two_atom_coupling_from_kernel() {
        let d = core::f64::consts::PI;
        let cfg = CloudConfig::new(2, 1.0, SEED);
        let cloud = AtomCloud::from_positions(
            alloc::vec![Vector3::zeros(), Vector3::new(d, 0.0, 0.0)],
            cfg,
        )
        .unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.02, 0.0));
        // M₁₂ = -(1/2)(i/π)
        let expected = C64::new(0.0, -0.5 / core::f64::consts::PI);
        assert!((sys.evolution_matrix()[(0, 1)] - expected).norm() < 1e-15);
        assert_eq!(
            sys.evolution_matrix()[(0, 1)],
            sys.evolution_matrix()[(1, 0)]
        );
    }

    #[test]
    fn off_diagonal_block_is_symmetric() {
        let cloud = sample_cloud(&CloudConfig::new(25, 3.0, SEED)).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.02, 2.0));
        let m = sys.evolution_matrix();
        for j in 0..25 {
            for k in 0..25 {
                assert_eq!(m[(j, k)], m[(k, j)]);
            }
        }
    }

    #[test]
    fn steady_state_single_atom_closed_form() {
        let (omega, delta) = (0.05, 5.0);
        let sys = single_atom_at_origin(DriveParams::new(omega, delta));
        let st = steady_state(&sys).unwrap();
        // β^st = Ω₀/(2Δ₀ + iΓ)
        let expected = C64::new(omega, 0.0) / C64::new(2.0 * delta, 1.0);
        assert!((st[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn steady_state_zero_drive_is_zero() {
        let cloud = sample_cloud(&CloudConfig::new(12, 2.0, SEED)).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.0, 1.5));
        let st = steady_state(&sys).unwrap();
        assert_eq!(linalg::max_abs_vec(&st), 0.0);
    }

    #[test]
    fn steady_state_residual_is_tiny() {
        let cloud = sample_cloud(&CloudConfig::new(60, 4.0, SEED)).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.02, 5.0));
        let st = steady_state(&sys).unwrap();
        let residual = sys.evolution_matrix() * &st + sys.drive_vector();
        let b_inf = linalg::max_abs_vec(sys.drive_vector());
        assert!(linalg::max_abs_vec(&residual) < 1e-12 * b_inf);
    }

    #[test]
    fn evolution_from_steady_state_stays_there() {
        let cloud = sample_cloud(&CloudConfig::new(10, 2.0, SEED)).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.03, 1.0));
        let st = steady_state(&sys).unwrap();
        let grid = [0.0, 1.0, 3.0];
        let traj = evolve_beta(&sys, &st, &grid).unwrap();
        for state in traj.amplitudes() {
            assert!(linalg::max_abs_diff_vec(state, &st) < 1e-9 * linalg::max_abs_vec(&st));
        }
    }

    #[test]
    fn zero_drive_from_ground_state_stays_zero() {
        let cloud = sample_cloud(&CloudConfig::new(8, 2.0, SEED)).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.0, 2.0));
        let zero = DVector::zeros(8);
        let traj = evolve_beta(&sys, &zero, &[0.0, 2.0]).unwrap();
        assert_eq!(linalg::max_abs_vec(traj.last()), 0.0);
    }

    #[test]
    fn single_atom_transient_matches_closed_form() {
        let (omega, delta) = (0.02, 5.0);
        let sys = single_atom_at_origin(DriveParams::new(omega, delta));
        let grid: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
        let traj = evolve_beta(&sys, &DVector::zeros(1), &grid).unwrap();
        let st = C64::new(omega, 0.0) / C64::new(2.0 * delta, 1.0);
        let z = C64::new(-0.5, delta);
        for (t, state) in grid.iter().zip(traj.amplitudes()) {
            let exact = st * (C64::new(1.0, 0.0) - (z * *t).exp());
            // Per-step Richardson tolerance is 1e-6; the accumulated global
            // error stays two orders below that.
            assert!(
                (state[0] - exact).norm() < 1e-7 * st.norm(),
                "t={t}: {} vs {exact}",
                state[0]
            );
        }
    }

    #[test]
    fn long_time_limit_reaches_steady_state() {
        // Holds when every collective mode decays at ~Γ/2, i.e. away from
        // subradiant close pairs (those decay at λmin/2 ≪ Γ_N and can keep
        // a generic dense cloud from converging within T = 40/Γ_N by many
        // orders of magnitude). Stationary quantities in production come
        // from the linear solve, never from long integration.
        let sys1 = single_atom_at_origin(DriveParams::new(0.02, 1.0));
        let st1 = steady_state(&sys1).unwrap();
        let horizon = 40.0 / sys1.gamma_n_estimate();
        let traj = evolve_beta(&sys1, &DVector::zeros(1), &[0.0, horizon]).unwrap();
        assert!(
            linalg::max_abs_diff_vec(traj.last(), &st1) < 1e-6 * linalg::max_abs_vec(&st1)
        );

        // Well-isolated five-atom geometry: |sinc(r)| <= 1/60 keeps the
        // sinc spectrum within 1 ± 0.07.
        let cfg = CloudConfig::new(5, 5.0, SEED);
        let positions: Vec<Vector3<f64>> =
            (0..5).map(|i| Vector3::new(60.0 * i as f64, 0.0, 0.3 * i as f64)).collect();
        let cloud = AtomCloud::from_positions(positions, cfg).unwrap();
        let sys = assemble_system(cloud, DriveParams::new(0.02, 1.0));
        let st = steady_state(&sys).unwrap();
        let horizon = 40.0 / sys.gamma_n_estimate();
        let traj = evolve_beta(&sys, &DVector::zeros(5), &[0.0, horizon]).unwrap();
        let err = linalg::max_abs_diff_vec(traj.last(), &st);
        assert!(err < 1e-6 * linalg::max_abs_vec(&st), "err {err}");
    }

    #[test]
    fn intensity_examples() {
        let cloud = sample_cloud(&CloudConfig::new(5, 2.0, SEED)).unwrap();
        let geom = DetectionGeometry::from_degrees(45.0, 0.0);
        assert_eq!(intensity(&cloud, &DVector::zeros(5), &geom), 0.0);

        // Single atom: |β|² independent of geometry.
        let c1 = sample_cloud(&CloudConfig::new(1, 2.0, SEED)).unwrap();
        let beta = DVector::from_element(1, C64::new(0.3, -0.4));
        for theta in [0.0, 0.7, 2.1] {
            let g = DetectionGeometry::new(theta, 0.3);
            assert!((intensity(&c1, &beta, &g) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn timed_dicke_intensity_factorizes() {
        // Uniform β_j = β e^{i k₀·r_j} gives I = N²|S_N|²|β|².
        let cloud = sample_cloud(&CloudConfig::new(20, 2.0, SEED)).unwrap();
        let beta_scalar = C64::new(0.01, 0.02);
        let beta = DVector::from_iterator(
            20,
            cloud.positions().iter().map(|r| beta_scalar * C64::cis(r.z)),
        );
        let geom = DetectionGeometry::from_degrees(60.0, 0.0);
        let i = intensity(&cloud, &beta, &geom);
        let sn = crate::cloud::structure_factor(&cloud, &geom);
        let expected = 400.0 * sn.norm_sqr() * beta_scalar.norm_sqr();
        assert!((i - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn weak_field_flag() {
        assert!(DriveParams::new(0.05, 0.0).is_linear_regime());
        assert!(!DriveParams::new(0.2, 0.0).is_linear_regime());
    }

    #[test]
    fn sampled_clouds_pass_psd_validation() {
        for i in 0..5 {
            let cloud = sample_cloud(&CloudConfig::new(40, 1.5, SEED + i)).unwrap();
            validate_realization(&cloud).unwrap();
        }
    }
}
