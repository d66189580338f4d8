//! Random atomic clouds and the spatial-disorder statistics of the
//! scattered light.
//!
//! Positions are in units of 1/k₀ and the laser travels along +ẑ, so the
//! incident wave vector is exactly ẑ. A cloud realization is fully
//! determined by its [`CloudConfig`] (including the seed), which is what
//! makes disorder ensembles reproducible.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Vector3};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::tolerances::{DEFAULT_MIN_SEPARATION, MAX_REDRAWS_PER_ATOM};
use crate::C64;

/// Parameters of a Gaussian cloud realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudConfig {
    /// Number of atoms N.
    pub n_atoms: usize,
    /// Dimensionless rms size σ = k₀σ_r (per-axis standard deviation).
    pub sigma: f64,
    /// Dimensionless pair-separation cutoff ε; closer draws are rejected.
    pub min_separation: f64,
    /// Seed of the position stream.
    pub seed: u64,
}

impl CloudConfig {
    pub fn new(n_atoms: usize, sigma: f64, seed: u64) -> Self {
        Self {
            n_atoms,
            sigma,
            min_separation: DEFAULT_MIN_SEPARATION,
            seed,
        }
    }

    pub fn with_min_separation(mut self, eps: f64) -> Self {
        self.min_separation = eps;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n_atoms < 1 {
            return Err(Error::InvalidParameter("n_atoms must be >= 1"));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
        }
        if !(self.min_separation > 0.0) {
            return Err(Error::InvalidParameter("min_separation must be > 0"));
        }
        Ok(())
    }
}

/// N atom positions (units of 1/k₀) together with the generating config.
///
/// Invariant: every pair is at least `min_separation` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomCloud {
    positions: Vec<Vector3<f64>>,
    config: CloudConfig,
}

impl AtomCloud {
    /// Wrap explicit positions (test geometries, mostly); the pairwise
    /// separation invariant is enforced.
    pub fn from_positions(positions: Vec<Vector3<f64>>, config: CloudConfig) -> Result<Self, Error> {
        config.validate()?;
        if positions.len() != config.n_atoms {
            return Err(Error::InvalidParameter("positions length differs from n_atoms"));
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if (positions[i] - positions[j]).norm() < config.min_separation {
                    return Err(Error::InvalidParameter("positions violate min_separation"));
                }
            }
        }
        Ok(Self { positions, config })
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn config(&self) -> &CloudConfig {
        &self.config
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }
}

/// Scattered-light detection direction k = k₀(sinθcosφ, sinθsinφ, cosθ),
/// polar angle measured from the laser axis ẑ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionGeometry {
    pub theta: f64,
    pub phi: f64,
    k_out: Vector3<f64>,
}

impl DetectionGeometry {
    pub fn new(theta: f64, phi: f64) -> Self {
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        Self {
            theta,
            phi,
            k_out: Vector3::new(st * cp, st * sp, ct),
        }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Self {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// Unit detection direction in k₀ = 1 units.
    pub fn k_out(&self) -> Vector3<f64> {
        self.k_out
    }
}

/// Draw a cloud: i.i.d. isotropic Gaussian positions with per-axis std σ,
/// redrawing any atom that lands closer than `min_separation` to an already
/// placed one. Deterministic in the seed.
pub fn sample_cloud(config: &CloudConfig) -> Result<AtomCloud, Error> {
    config.validate()?;
    let normal = Normal::new(0.0, config.sigma)
        .map_err(|_| Error::InvalidParameter("sigma not usable as std deviation"))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let mut positions: Vec<Vector3<f64>> = Vec::with_capacity(config.n_atoms);
    for atom in 0..config.n_atoms {
        let mut attempts = 0usize;
        loop {
            let candidate = Vector3::new(
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            );
            let too_close = positions
                .iter()
                .any(|p| (p - candidate).norm() < config.min_separation);
            if !too_close {
                positions.push(candidate);
                break;
            }
            attempts += 1;
            if attempts >= MAX_REDRAWS_PER_ATOM {
                return Err(Error::CloudPacking { atom, attempts });
            }
        }
    }
    Ok(AtomCloud {
        positions,
        config: *config,
    })
}

/// Pairwise scattering kernel γ_jm = exp(i·r_jm)/(i·r_jm), r_jm in k₀
/// units; zero diagonal, symmetric. Re γ is the cooperative decay,
/// Im γ the resonant dipole-dipole shift.
pub fn kernel_matrix(cloud: &AtomCloud) -> DMatrix<C64> {
    let n = cloud.n_atoms();
    let pos = cloud.positions();
    let mut g = DMatrix::zeros(n, n);
    for j in 0..n {
        for m in 0..j {
            let r = (pos[j] - pos[m]).norm();
            // e^{ir}/(ir) = sin(r)/r - i cos(r)/r
            let val = C64::new(r.sin() / r, -r.cos() / r);
            g[(j, m)] = val;
            g[(m, j)] = val;
        }
    }
    g
}

/// Detection phase factors s_j = exp(-i k·r_j).
pub fn detection_phases(cloud: &AtomCloud, geom: &DetectionGeometry) -> DVector<C64> {
    let k = geom.k_out();
    DVector::from_iterator(
        cloud.n_atoms(),
        cloud.positions().iter().map(|r| C64::cis(-k.dot(r))),
    )
}

/// Structure factor S_N(k - k₀) = (1/N) Σ_j exp(-i(k - k₀)·r_j) with
/// k₀ = ẑ. Exactly 1 at θ = 0.
pub fn structure_factor(cloud: &AtomCloud, geom: &DetectionGeometry) -> C64 {
    let q = geom.k_out() - Vector3::z();
    let sum: C64 = cloud.positions().iter().map(|r| C64::cis(-q.dot(r))).sum();
    sum / cloud.n_atoms() as f64
}

/// Continuous-density structure factor of the spherical Gaussian,
/// S_∞ = exp[-2σ²sin²(θ/2)] (real, in (0, 1]).
pub fn gaussian_s_infinity(sigma: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    (-2.0 * sigma * sigma * s * s).exp()
}

/// Monte Carlo R factor ⟨|S_N|⁴⟩ / ⟨|S_N|²⟩² over explicit realizations.
pub fn r_factor_numeric(clouds: &[AtomCloud], geom: &DetectionGeometry) -> f64 {
    assert!(clouds.len() >= 2, "need at least 2 realizations");
    let samples: Vec<f64> = clouds
        .iter()
        .map(|c| structure_factor(c, geom).norm_sqr())
        .collect();
    r_factor_from_samples(&samples)
}

/// Ratio-of-averages estimator from precomputed |S_N|² samples.
pub fn r_factor_from_samples(s2_samples: &[f64]) -> f64 {
    assert!(s2_samples.len() >= 2, "need at least 2 realizations");
    let n = s2_samples.len() as f64;
    let m2: f64 = s2_samples.iter().sum::<f64>() / n;
    let m4: f64 = s2_samples.iter().map(|x| x * x).sum::<f64>() / n;
    m4 / (m2 * m2)
}

/// Large-N analytic R factor for a continuous distribution with
/// s2 = |S_∞(k - k₀)|².
///
/// Algebraically (2 + 4x + x²)/(1 + x)² with x = N·s2, evaluated as
/// 2 - x²/(1+x)², which keeps rounding inside [1, 2] and is exact at the
/// Q-maximum point x = 1 (R = 7/4).
pub fn r_factor_analytic(n_atoms: usize, s2: f64) -> f64 {
    assert!((0.0..=1.0).contains(&s2), "s2 must lie in [0, 1]");
    let x = n_atoms as f64 * s2;
    let ratio = x / (1.0 + x);
    2.0 - ratio * ratio
}

/// Transient-oscillation coefficient Q = R - (2 + N s2)/(1 + N s2);
/// algebraically Q = N s2 / (1 + N s2)², maximal (1/4) at N s2 = 1 where
/// the g² oscillation amplitude 2Q reaches 1/2.
pub fn q_factor(n_atoms: usize, s2: f64) -> f64 {
    assert!((0.0..=1.0).contains(&s2), "s2 must lie in [0, 1]");
    let x = n_atoms as f64 * s2;
    r_factor_analytic(n_atoms, s2) - (2.0 + x) / (1.0 + x)
}

/// Restricted phase sums of Eberly-state photon statistics:
/// K₂ over ordered pairs p ≠ j and K₄ over 4-tuples with all indices
/// distinct, both real.
///
/// Evaluated in O(N) per direction by inclusion–exclusion on the full
/// moments of A = Σ_j exp(i(k₀-k)·r_j); the literal sums remain available
/// as [`k2_k4_moments_direct`].
pub fn k2_k4_moments(cloud: &AtomCloud, geom: &DetectionGeometry) -> (f64, f64) {
    let q = geom.k_out() - Vector3::z();
    let n = cloud.n_atoms();
    let nf = n as f64;
    let mut a = C64::new(0.0, 0.0);
    let mut b = C64::new(0.0, 0.0);
    for r in cloud.positions() {
        let phase = C64::cis(-q.dot(r));
        a += phase;
        b += phase * phase;
    }
    let a2 = a.norm_sqr();
    let k2 = (a2 - nf) / (nf * nf);
    if n < 4 {
        return (k2, 0.0);
    }
    // Möbius inversion over the partition lattice of {p, q, j, m}; unit
    // moduli collapse every merged block to A, B = Σφ², or N.
    let b_astar2 = (b * a.conj() * a.conj()).re;
    let distinct = a2 * a2 - 2.0 * b_astar2 - 4.0 * nf * a2 + b.norm_sqr()
        + 2.0 * nf * nf
        + 8.0 * a2
        - 6.0 * nf;
    (k2, distinct / (nf * nf * nf * nf))
}

/// Literal O(N²)/O(N⁴) evaluation of K₂ and K₄ (reference oracle).
pub fn k2_k4_moments_direct(cloud: &AtomCloud, geom: &DetectionGeometry) -> (f64, f64) {
    let q = geom.k_out() - Vector3::z();
    let n = cloud.n_atoms();
    let nf = n as f64;
    let phases: Vec<C64> = cloud
        .positions()
        .iter()
        .map(|r| C64::cis(-q.dot(r)))
        .collect();
    let mut k2 = C64::new(0.0, 0.0);
    for j in 0..n {
        for p in 0..n {
            if p != j {
                k2 += phases[p] * phases[j].conj();
            }
        }
    }
    let mut k4 = C64::new(0.0, 0.0);
    for m in 0..n {
        for j in 0..n {
            if j == m {
                continue;
            }
            for p in 0..n {
                if p == j || p == m {
                    continue;
                }
                for qq in 0..n {
                    if qq == p || qq == j || qq == m {
                        continue;
                    }
                    k4 += phases[p] * phases[qq] * (phases[j] * phases[m]).conj();
                }
            }
        }
    }
    (k2.re / (nf * nf), k4.re / (nf * nf * nf * nf))
}

/// Min eigenvalue of the real sinc kernel (diagonal 1, off-diagonal
/// sin r / r). Positive semidefiniteness guarantees decaying dynamics.
pub fn sinc_kernel_min_eigenvalue(cloud: &AtomCloud) -> f64 {
    let n = cloud.n_atoms();
    let pos = cloud.positions();
    let mut s = DMatrix::<f64>::identity(n, n);
    for j in 0..n {
        for m in 0..j {
            let r = (pos[j] - pos[m]).norm();
            let v = r.sin() / r;
            s[(j, m)] = v;
            s[(m, j)] = v;
        }
    }
    s.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
