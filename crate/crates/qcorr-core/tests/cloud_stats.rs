//! Disorder-statistics oracles: literal restricted sums, Monte Carlo
//! moments against the analytic curves, kernel positive semidefiniteness.

use qcorr_core::cloud::{
    gaussian_s_infinity, k2_k4_moments, k2_k4_moments_direct, r_factor_analytic,
    r_factor_numeric, sample_cloud, sinc_kernel_min_eigenvalue, structure_factor, AtomCloud,
    CloudConfig, DetectionGeometry,
};

#[test]
fn k_moments_inclusion_exclusion_matches_literal_n12() {
    for (i, theta_deg) in [17.0, 48.0, 90.0, 141.0].iter().enumerate() {
        let cloud = sample_cloud(&CloudConfig::new(12, 1.8, 0x2000 + i as u64)).unwrap();
        let geom = DetectionGeometry::from_degrees(*theta_deg, 23.0);
        let (k2, k4) = k2_k4_moments(&cloud, &geom);
        let (k2d, k4d) = k2_k4_moments_direct(&cloud, &geom);
        assert!((k2 - k2d).abs() < 1e-10, "theta={theta_deg}: {k2} vs {k2d}");
        assert!((k4 - k4d).abs() < 1e-10, "theta={theta_deg}: {k4} vs {k4d}");
    }
}

#[test]
fn k_moments_approach_continuous_structure_factor() {
    // K₂ ≈ |S_∞|², K₄ ≈ |S_∞|⁴ for a large random cloud, within Monte
    // Carlo scatter.
    let (sigma, theta) = (2.0, 20.0f64.to_radians());
    let s2 = gaussian_s_infinity(sigma, theta).powi(2);
    let n = 6000;
    let mut k2_acc = 0.0;
    let mut k4_acc = 0.0;
    let reps = 4;
    for i in 0..reps {
        let cloud = sample_cloud(&CloudConfig::new(n, sigma, 0x2100 + i)).unwrap();
        let geom = DetectionGeometry::new(theta, 0.0);
        let (k2, k4) = k2_k4_moments(&cloud, &geom);
        k2_acc += k2;
        k4_acc += k4;
    }
    let k2 = k2_acc / reps as f64;
    let k4 = k4_acc / reps as f64;
    assert!((k2 - s2).abs() < 0.02, "K2 {k2} vs |S∞|² {s2}");
    assert!((k4 - s2 * s2).abs() < 0.03, "K4 {k4} vs |S∞|⁴ {}", s2 * s2);
}

#[test]
fn r_numeric_matches_analytic_in_crossover() {
    // σ = 1, θ = 90°: N|S∞|² ≈ 135, R_analytic ≈ 1.015 (coherent side);
    // sampling scatter is far below the 5% window there.
    let n_atoms = 1000;
    let sigma = 1.0;
    let clouds: Vec<AtomCloud> = (0..400)
        .map(|i| sample_cloud(&CloudConfig::new(n_atoms, sigma, 0x2200 + i)).unwrap())
        .collect();
    let geom = DetectionGeometry::from_degrees(90.0, 0.0);
    let r = r_factor_numeric(&clouds, &geom);
    let s2 = gaussian_s_infinity(sigma, geom.theta).powi(2);
    let expected = r_factor_analytic(n_atoms, s2);
    assert!(
        (r - expected).abs() < 0.05 * expected,
        "R {r} vs analytic {expected}"
    );
}

#[test]
fn r_numeric_reaches_chaotic_plateau() {
    // σ ≫ 1 at 90°: fully developed speckle, R → 2. Estimator standard
    // error at 2000 realizations is ≈ 2/√2000 ≈ 0.045; allow 3.3σ.
    let clouds: Vec<AtomCloud> = (0..2000)
        .map(|i| sample_cloud(&CloudConfig::new(1000, 8.0, 0x2300 + i)).unwrap())
        .collect();
    let geom = DetectionGeometry::from_degrees(90.0, 0.0);
    let r = r_factor_numeric(&clouds, &geom);
    assert!((r - 2.0).abs() < 0.15, "R {r}");
}

#[test]
fn r_numeric_bounded_between_coherent_and_chaotic() {
    // R ∈ [1 - δ, 2 + δ] across the (σ, θ) family.
    for (i, &(sigma, theta_deg)) in [(0.3, 30.0), (1.5, 60.0), (3.0, 90.0), (8.0, 120.0)]
        .iter()
        .enumerate()
    {
        let clouds: Vec<AtomCloud> = (0..300)
            .map(|k| sample_cloud(&CloudConfig::new(200, sigma, 0x2400 + 1000 * i as u64 + k)).unwrap())
            .collect();
        let geom = DetectionGeometry::from_degrees(theta_deg, 0.0);
        let r = r_factor_numeric(&clouds, &geom);
        let delta = 3.0 * 2.0 / (300.0f64).sqrt();
        assert!(r > 1.0 - delta && r < 2.0 + delta, "σ={sigma} θ={theta_deg}: R {r}");
    }
}

#[test]
fn sinc_kernel_is_positive_semidefinite_on_sampled_clouds() {
    for (i, &(n, sigma)) in [(60usize, 0.7), (60, 2.0), (60, 5.0), (120, 1.0)]
        .iter()
        .enumerate()
    {
        for k in 0..4u64 {
            let cloud = sample_cloud(&CloudConfig::new(n, sigma, 0x2500 + 16 * i as u64 + k)).unwrap();
            let min_eig = sinc_kernel_min_eigenvalue(&cloud);
            assert!(min_eig >= -1e-10, "N={n} σ={sigma}: min eig {min_eig}");
        }
    }
}

#[test]
fn forward_structure_factor_exact_for_every_cloud() {
    for i in 0..8u64 {
        let cloud = sample_cloud(&CloudConfig::new(100, 2.5, 0x2600 + i)).unwrap();
        let s = structure_factor(&cloud, &DetectionGeometry::new(0.0, 1.3));
        assert_eq!(s, qcorr_core::C64::new(1.0, 0.0));
    }
}
