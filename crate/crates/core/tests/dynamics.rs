use magnon_bistability::dynamics::branch_stability;
use magnon_bistability::params::{mhz, nhz};
use magnon_bistability::spectroscopy::linspace;
use magnon_bistability::*;
use num_complex::Complex64;
use proptest::prelude::*;

mod common;
use common::{numerical_jacobian, I};

fn pumped_in_window() -> (SystemParams, PumpSpec, Vec<SteadyBranch>) {
    let gamma0 = mhz(5.0);
    let sys = SystemParams::symmetric(gamma0, gamma0, -16.0 * gamma0, nhz(42.1));
    let (lo, hi) = turning_points(&sys).unwrap().intensity_range();
    let pump = PumpSpec::from_intensity(0.5 * (lo + hi)).unwrap();
    let branches = steady_states(&sys, &pump).unwrap();
    assert_eq!(branches.len(), 3);
    (sys, pump, branches)
}

fn check_jacobian(sys: &SystemParams, pump: &PumpSpec, b: &SteadyBranch, tol: f64) {
    let num = numerical_jacobian(sys, pump, &StateVec::from(b));
    let h = build_hnl(sys, b.b0);
    let scale = h.entries.iter().flatten().fold(0.0f64, |m, z| m.max(z.norm()));
    for r in 0..4 {
        for c in 0..4 {
            let analytic = -I * h.entries[r][c];
            assert!(
                (analytic - num[r][c]).norm() <= tol * scale,
                "entry ({r},{c}): {analytic} vs {}",
                num[r][c]
            );
        }
    }
}

#[test]
fn fluctuation_matrix_is_the_flow_jacobian_on_all_branches() {
    let (sys, pump, branches) = pumped_in_window();
    for b in &branches {
        check_jacobian(&sys, &pump, b, 1e-5);
    }
}

#[test]
fn jacobian_with_coherent_coupling_and_unequal_damping() {
    let sys = SystemParams {
        gamma_a: 0.7,
        gamma_b: 0.3,
        coupling_gamma: 0.4,
        coupling_g: 0.9,
        delta: -3.0,
        kerr: 0.2,
        phi: 0.0,
    };
    let pump = PumpSpec::from_omega(2.5).unwrap();
    for b in steady_states(&sys, &pump).unwrap() {
        check_jacobian(&sys, &pump, &b, 1e-5);
    }
}

#[test]
fn middle_branch_departs_and_outer_branches_hold() {
    let (sys, pump, branches) = pumped_in_window();
    let gamma = sys.mean_damping();
    let t_end = 30.0 / gamma;
    for (k, b) in branches.iter().enumerate() {
        let kick = Complex64::new(1e-4 * b.b0.norm(), 0.0);
        let s0 = StateVec::new(b.a0, b.b0 + kick);
        let (_, end) = integrate(&sys, &pump, None, s0, t_end, 1e-10).unwrap().last();
        let drift = (end.b - b.b0).norm() / b.b0.norm();
        if k == 1 {
            assert!(drift > 0.1, "middle branch stayed put: {drift}");
        } else {
            assert!(drift < 1e-3, "branch {k} drifted by {drift}");
        }
    }
}

#[test]
fn vacuum_relaxes_to_lowest_branch() {
    let (sys, pump, branches) = pumped_in_window();
    let t_end = 60.0 / sys.mean_damping();
    let (_, end) = integrate(&sys, &pump, None, StateVec::default(), t_end, 1e-10).unwrap().last();
    assert!((end.b - branches[0].b0).norm() <= 1e-6 * branches[0].b0.norm());
    assert!((end.a - branches[0].a0).norm() <= 1e-6 * branches[0].a0.norm());
}

#[test]
fn stability_verdicts_match_branch_flags() {
    let (sys, _, branches) = pumped_in_window();
    for b in &branches {
        let (verdict, eigs) = branch_stability(&sys, b.b0).unwrap();
        assert_eq!(verdict == Stability::Stable, b.stable);
        assert_eq!(eigs.min_linewidth() > 0.0, b.stable);
    }
}

#[test]
fn long_lived_scan_reaches_small_linewidth_near_fold() {
    let gamma0 = mhz(5.0);
    let gamma = 2.0 * gamma0;
    let sys = SystemParams::symmetric(gamma0, gamma0, 0.0, nhz(42.1));
    let ic = critical_power(&sys.with_delta(-8.0 * gamma)).unwrap();
    let pump = PumpSpec::from_intensity(7.68 * ic).unwrap();
    let grid = linspace(-20.0 * gamma, -2.0 * gamma, 181);
    let ll = long_lived_mode_scan(&sys, &pump, &grid).unwrap();
    assert!(ll.min_linewidth < 1e-3 * gamma);
    assert!(ll.min_linewidth <= ll.grid_linewidths.iter().cloned().fold(f64::INFINITY, f64::min));
    let (verdict, _) = branch_stability(&sys.with_delta(ll.delta), ll.branch.b0).unwrap();
    assert_ne!(verdict, Stability::Unstable);
}

#[test]
fn level_attraction_around_the_exceptional_point() {
    let gamma0 = 0.3;
    let coupling = 1.0;
    let sys = SystemParams::symmetric(gamma0, coupling, 0.0, 0.0);
    let gamma = gamma0 + coupling;
    for d in [0.5, 1.0, 1.9] {
        // |δ| < 2Γ: real parts coincide, imaginary parts split.
        let e = eigenvalues(&build_hnl(&sys.with_delta(d * coupling), Complex64::new(0.0, 0.0))).unwrap();
        let upper: Vec<Complex64> = e.values.iter().filter(|z| z.re.abs() < 1e-9).copied().collect();
        assert_eq!(upper.len(), 4);
        let split = (1.0 - (d * d) / 4.0).sqrt() * coupling;
        let mut ims: Vec<f64> = upper.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + gamma + split).abs() < 1e-9 && (ims[3] + gamma - split).abs() < 1e-9);
    }
    for d in [2.1, 3.0, 6.0] {
        // |δ| > 2Γ: imaginary parts coincide at −γ, real parts split.
        let e = eigenvalues(&build_hnl(&sys.with_delta(d * coupling), Complex64::new(0.0, 0.0))).unwrap();
        let re = ((d * d) / 4.0 - 1.0).sqrt() * coupling;
        for z in e.values {
            assert!((z.im + gamma).abs() < 1e-9);
            assert!((z.re.abs() - re).abs() < 1e-9);
        }
    }
}

#[test]
fn perturbed_integration_agrees_with_stability_verdicts() {
    // Random small kicks around each branch of random bistable configurations.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let coupling = rng.gen_range(0.3..1.5);
        let gamma = 0.5 + coupling;
        let sys = SystemParams::symmetric(0.5, coupling, -rng.gen_range(4.0..8.0) * gamma, 0.05);
        let (lo, hi) = turning_points(&sys).unwrap().intensity_range();
        let pump = PumpSpec::from_intensity(lo + rng.gen_range(0.2..0.8) * (hi - lo)).unwrap();
        for b in steady_states(&sys, &pump).unwrap() {
            let (verdict, eigs) = branch_stability(&sys, b.b0).unwrap();
            let t_end = 40.0 / eigs.min_linewidth().abs().max(1e-2 * gamma);
            let size = 1e-3 * b.a0.norm().max(b.b0.norm()).max(1.0);
            let mut departed = false;
            for _ in 0..4 {
                let kick = Complex64::from_polar(size, rng.gen_range(0.0..std::f64::consts::TAU));
                let s0 = StateVec::new(b.a0, b.b0 + kick);
                let (_, end) = integrate(&sys, &pump, None, s0, t_end, 1e-10).unwrap().last();
                departed |= (end.b - b.b0).norm() > 10.0 * size;
            }
            assert_eq!(departed, verdict == Stability::Unstable, "branch {}", b.branch_index);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigenvalues_pair_and_satisfy_vieta(
        gamma_a in 0.05f64..2.0,
        gamma_b in 0.05f64..2.0,
        coupling in 0.0f64..2.0,
        g in -2.0f64..2.0,
        delta in -20.0f64..20.0,
        kerr in -1.0f64..1.0,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let sys = SystemParams { gamma_a, gamma_b, coupling_gamma: coupling, coupling_g: g, delta, kerr, phi: 0.0 };
        let h = build_hnl(&sys, Complex64::new(re, im));
        let e = eigenvalues(&h).unwrap();
        let scale = h.entries.iter().flatten().fold(1.0f64, |m, z| m.max(z.norm()));
        let sum: Complex64 = e.values.iter().sum();
        let prod: Complex64 = e.values.iter().product();
        prop_assert!((sum - h.trace()).norm() <= 1e-10 * scale);
        prop_assert!((prod - h.det()).norm() <= 1e-8 * scale.powi(4));
        // Spectrum is symmetric under λ → −λ*.
        for z in e.values {
            let partner = e.values.iter().map(|w| (w + z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-8 * scale);
        }
    }

    #[test]
    fn undriven_flow_decays(
        gamma0 in 0.1f64..2.0,
        coupling in 0.0f64..2.0,
        delta in -10.0f64..10.0,
        re in -1.0f64..1.0,
        im in -1.0f64..1.0,
    ) {
        let sys = SystemParams::symmetric(gamma0, coupling, delta, 0.1);
        let pump = PumpSpec::from_omega(0.0).unwrap();
        let s0 = StateVec::new(Complex64::new(re, im), Complex64::new(im, -re));
        let traj = integrate(&sys, &pump, None, s0, 5.0 / gamma0, 1e-9).unwrap();
        let norms: Vec<f64> = traj.states.iter().map(|s| s.norm()).collect();
        // Below the integrator's absolute tolerance the norm is noise.
        let floor = 1e-12 * s0.norm();
        prop_assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + floor));
    }
}
