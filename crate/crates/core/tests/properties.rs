use mixtel_core::entropy::{
    linear_entropy, shannon_entropy_in_basis, teleport_threshold_linear, teleport_threshold_vn, von_neumann_entropy,
};
use mixtel_core::families::{bell_diagonal, werner, werner_entropy_closed_form, werner_fef_closed_form, WernerParams};
use mixtel_core::fef::{fef_bell_diagonal_exact, fef_certified, OptimizerConfig};
use mixtel_core::linalg::{self, tensor, Subsystem};
use mixtel_core::sampling::{haar_pure, haar_unitary, hs_random_density, stream_rng};
use mixtel_core::states::{bell_basis, bell_diagonal_coeffs, partial_trace};
use proptest::prelude::*;
use rand::Rng;

fn dirichlet_weights(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let raw: Vec<f64> = (0..len).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coeffs_form_probability_vector(seed in any::<u64>(), n in 2usize..4) {
        let rho = hs_random_density(n * n, n * n, seed).unwrap();
        let coeffs = bell_diagonal_coeffs(&rho, &bell_basis(n, None).unwrap()).unwrap();
        for c in &coeffs {
            prop_assert!(*c >= -1e-9 && *c <= 1.0 + 1e-9);
        }
        prop_assert!((coeffs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reduced_state_has_unit_trace(seed in any::<u64>(), n in 2usize..4) {
        let rho = hs_random_density(n * n, n * n, seed).unwrap();
        for side in [Subsystem::First, Subsystem::Second] {
            let red = partial_trace(&rho, side);
            prop_assert!((linalg::trace(&red).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>()) {
        let rho = hs_random_density(9, 9, seed).unwrap();
        let u = haar_unitary(9, seed.wrapping_add(1)).unwrap();
        let rotated = rho.conjugate_by(&u).unwrap();
        let diff = von_neumann_entropy(&rho).unwrap() - von_neumann_entropy(&rotated).unwrap();
        prop_assert!(diff.abs() < 1e-9);
    }

    #[test]
    fn entropy_bounds(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = hs_random_density(4, rank, seed).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!((0.0..=2.0 + 1e-9).contains(&s));
        let sl = linear_entropy(&rho);
        prop_assert!((-1e-12..=0.75 + 1e-12).contains(&sl));
    }
}

#[test]
fn shannon_in_basis_dominates_von_neumann() {
    for n in [2usize, 3] {
        let mut bases = vec![bell_basis(n, None).unwrap()];
        for k in 0..5 {
            // (U⊗I)|Φ⟩ seeds give further maximally entangled bases
            let u = haar_unitary(n, 500 + k).unwrap();
            let phi = mixtel_core::states::canonical_phi(n).unwrap();
            let seed =
                mixtel_core::PureState::normalized(tensor(&u, &linalg::CMatrix::identity(n, n)) * phi.amplitudes())
                    .unwrap();
            bases.push(bell_basis(n, Some(&seed)).unwrap());
        }
        for i in 0..1000 {
            let rho = hs_random_density(n * n, n * n, 10_000 + i).unwrap();
            let s = von_neumann_entropy(&rho).unwrap();
            for b in &bases {
                assert!(shannon_entropy_in_basis(&rho, b).unwrap() >= s - 1e-9);
            }
        }
    }
}

#[test]
fn optimizer_agrees_on_bell_diagonal_states() {
    let cfg = OptimizerConfig::with_seed(77);
    for n in [2usize, 3] {
        for i in 0..100 {
            let w = dirichlet_weights(n * n, 1000 * n as u64 + i);
            let rho = bell_diagonal(n, &w).unwrap();
            let (exact, _) = fef_bell_diagonal_exact(&w).unwrap();
            let b = fef_certified(&rho, &cfg).unwrap();
            assert!((b.lower - exact).abs() <= 1e-6, "n={n} i={i}: {} vs {exact}", b.lower);
            assert!(b.gap <= 1e-6);
        }
    }
}

#[test]
fn local_unitary_invariance_of_lower_bound() {
    let cfg = OptimizerConfig::with_seed(3);
    for n in [2usize, 3] {
        for i in 0..5u64 {
            let rho = hs_random_density(n * n, n * n, 300 + i).unwrap();
            let local = tensor(&haar_unitary(n, 400 + i).unwrap(), &haar_unitary(n, 450 + i).unwrap());
            let rotated = rho.conjugate_by(&local).unwrap();
            let a = fef_certified(&rho, &cfg).unwrap();
            let b = fef_certified(&rotated, &cfg).unwrap();
            assert!(
                (a.lower - b.lower).abs() < 1e-6,
                "n={n} i={i}: {} vs {}",
                a.lower,
                b.lower
            );
        }
    }
}

#[test]
fn werner_closed_forms_agree_with_numerics() {
    let cfg = OptimizerConfig::with_seed(9);
    for n in 2..=4 {
        for k in 0..=10 {
            let params = WernerParams::new(n, k as f64 / 10.0).unwrap();
            let rho = werner(params).unwrap();
            let s = von_neumann_entropy(&rho).unwrap();
            assert!((werner_entropy_closed_form(params) - s).abs() <= 1e-9);
            let b = fef_certified(&rho, &cfg).unwrap();
            assert!((werner_fef_closed_form(params) - b.lower).abs() <= 1e-6, "n={n} k={k}");
            assert!(b.gap <= 1e-6);
            // ε > 1/N gives F > 1/N and S below the threshold
            if params.epsilon() > 1.0 / n as f64 {
                assert!(werner_fef_closed_form(params) > 1.0 / n as f64);
                assert!(s < teleport_threshold_vn(n).unwrap());
            }
        }
    }
}

#[test]
fn certified_high_fef_implies_low_linear_entropy() {
    let cfg = OptimizerConfig::with_seed(21);
    for n in [2usize, 3] {
        for i in 0..200 {
            let rho = hs_random_density(n * n, n * n, 7000 + i).unwrap();
            let b = fef_certified(&rho, &cfg).unwrap();
            if b.lower >= 1.0 / n as f64 {
                assert!(linear_entropy(&rho) <= teleport_threshold_linear(n).unwrap() + 1e-9);
            }
        }
    }
}

#[test]
fn haar_inputs_are_normalized() {
    for i in 0..20 {
        let psi = haar_pure(3, i).unwrap();
        assert!((psi.amplitudes().norm_squared() - 1.0).abs() < 1e-12);
    }
}
