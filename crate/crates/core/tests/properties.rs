mod common;

use common::{random_dephasing, random_system, random_thermal, shape, SHAPES};
use corrflux::conditions::{check_conditions, valid_c_range, verify_theorem, TheoremReport};
use corrflux::dynamics::{integrate, IntegrationSettings};
use corrflux::energetics::{decompose, effective_hamiltonians, energy_ledger, local_dissipative_rate, LedgerEvaluator};
use corrflux::mat::{hermitian_eig, identity, kron, min_eigenvalue, partial_trace, sigma_z, ComplexMatrix, Subsystem};
use corrflux::model::{detailed_balance_residual, gibbs_state, BipartiteSystem};
use corrflux::qubit_example::{analytic_chi, build_example, zz, ExampleParams};
use corrflux::random::{random_complex, random_density_matrix, random_hermitian};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative_and_trace_factorizes(seed: u64, da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        let mut r = rng(seed);
        let a = random_complex(da, &mut r);
        let b = random_complex(db, &mut r);
        let c = random_complex(dc, &mut r);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!((&left - &right).max_abs() < 1e-14);
        let t = kron(&a, &b).trace();
        prop_assert!((t - a.trace() * b.trace()).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_of_product(seed: u64, idx in 0usize..4) {
        let mut r = rng(seed);
        let s = shape(SHAPES[idx]);
        let a = random_complex(s.d_a, &mut r);
        let b = random_complex(s.d_b, &mut r);
        let ab = kron(&a, &b);
        let keep_a = partial_trace(&ab, s, Subsystem::A).unwrap();
        let keep_b = partial_trace(&ab, s, Subsystem::B).unwrap();
        prop_assert!((&keep_a - &a.scale(b.trace())).max_abs() < 1e-13);
        prop_assert!((&keep_b - &b.scale(a.trace())).max_abs() < 1e-13);
    }

    #[test]
    fn eigenvectors_are_unitary_and_diagonalize(seed: u64, d in 1usize..7) {
        let mut r = rng(seed);
        let h = random_hermitian(d, 2.0, &mut r);
        let eig = hermitian_eig(&h).unwrap();
        let u = &eig.vectors;
        prop_assert!((&(&u.dagger() * u) - &identity(d)).max_abs() < 1e-12);
        let back = &(u * &ComplexMatrix::from_real_diag(&eig.values)) * &u.dagger();
        prop_assert!((&back - &h).max_abs() < 1e-12);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn gibbs_eigenvalues_are_boltzmann_weights(seed: u64, d in 1usize..5, beta in 0.0f64..3.0) {
        let mut r = rng(seed);
        let h = random_hermitian(d, 1.0, &mut r);
        let energies = hermitian_eig(&h).unwrap().values;
        let z: f64 = energies.iter().map(|e| (-beta * e).exp()).sum();
        let mut expected: Vec<f64> = energies.iter().map(|e| (-beta * e).exp() / z).collect();
        let mut got = hermitian_eig(&gibbs_state(&h, beta).unwrap()).unwrap().values;
        expected.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_builder_satisfies_detailed_balance(seed: u64, idx in 0usize..4) {
        let mut r = rng(seed);
        let s = shape(SHAPES[idx]);
        let th = random_thermal(s, &mut r);
        for (side, beta) in [(Subsystem::A, th.beta_a), (Subsystem::B, th.beta_b)] {
            let h = th.sys.local_hamiltonian(side);
            let res = detailed_balance_residual(th.sys.channels(), side, h, beta, s).unwrap();
            prop_assert!(res < 1e-12, "residual {res}");
        }
    }

    #[test]
    fn effective_coupling_carries_the_correlation_energy(seed: u64, idx in 0usize..4) {
        let mut r = rng(seed);
        let s = shape(SHAPES[idx]);
        let sys = random_system(s, &mut r);
        let rho = random_density_matrix(s.total(), &mut r);
        let dec = decompose(&rho, s).unwrap();
        let eff = effective_hamiltonians(&sys, &dec).unwrap();
        let a = rho.trace_product(&eff.v);
        let b = dec.chi.trace_product(&eff.v);
        let c = dec.chi.trace_product(sys.interaction());
        prop_assert!((a - c).norm() < 1e-11);
        prop_assert!((b - c).norm() < 1e-11);
        prop_assert!((energy_ledger(&sys, &rho).unwrap().u_chi - c.re).abs() < 1e-11);
    }

    #[test]
    fn dissipative_rate_forms_agree(seed: u64, idx in 0usize..4) {
        let mut r = rng(seed);
        let s = shape(SHAPES[idx]);
        let sys = random_system(s, &mut r);
        let rho = random_density_matrix(s.total(), &mut r);
        let product = decompose(&rho, s).unwrap().product();
        let full = LedgerEvaluator::new(&sys).adjoint_of_hamiltonian().trace_product(&product).re;
        let per_side = local_dissipative_rate(&sys, &rho).unwrap();
        prop_assert!((full - per_side).abs() < 1e-12);
    }

    #[test]
    fn ledger_identities(seed: u64, idx in 0usize..4) {
        let mut r = rng(seed);
        let s = shape(SHAPES[idx]);
        let sys = random_system(s, &mut r);
        let rho = random_density_matrix(s.total(), &mut r);
        let l = energy_ledger(&sys, &rho).unwrap();
        prop_assert!((l.u - l.u_prod - l.u_chi).abs() < 1e-12);
        prop_assert!((l.du_dt - l.du_prod_dt - l.du_chi_dt).abs() < 1e-12);
        prop_assert!((l.u_prod - l.u_a - l.u_b).abs() < 1e-12);
    }

    #[test]
    fn c_range_endpoints_are_tight(beta_a in 0.0f64..2.0, omega_a in 0.1f64..2.0, beta_b in 0.0f64..2.0, omega_b in 0.1f64..2.0) {
        let range = valid_c_range(beta_a, omega_a, beta_b, omega_b).unwrap();
        let pi = kron(
            &gibbs_state(&sigma_z().scale_real(omega_a), beta_a).unwrap(),
            &gibbs_state(&sigma_z().scale_real(omega_b), beta_b).unwrap(),
        );
        let state = |c: f64| &pi + &zz().scale_real(c);
        for c in [range.min, range.max] {
            prop_assert!(min_eigenvalue(&state(c)) >= -1e-12);
        }
        prop_assert!(min_eigenvalue(&state(range.min - 1e-6)) < 0.0);
        prop_assert!(min_eigenvalue(&state(range.max + 1e-6)) < 0.0);
    }

    #[test]
    fn vanishing_adjoint_residual_freezes_total_energy(seed: u64, idx in 0usize..2) {
        let mut r = rng(seed);
        let s = shape(SHAPES[idx]);
        let sys = random_dephasing(s, &mut r);
        let rho = random_density_matrix(s.total(), &mut r);
        let report = check_conditions(&sys, &rho, 1e-10).unwrap();
        prop_assert!(report.condition_ii);
        prop_assert!(energy_ledger(&sys, &rho).unwrap().du_dt.abs() <= 1e-9);
    }
}

#[test]
fn example_state_stays_diagonal_and_matches_analytic_correlation() {
    let p = ExampleParams::default();
    let (sys, rho0) = build_example(&p).unwrap();
    let traj = integrate(&sys, &rho0, IntegrationSettings::new(2.0, 1e-3, 10).unwrap()).unwrap();
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        assert!(rho.off_diagonal_norm() <= 1e-10);
        let chi = decompose(rho, sys.shape()).unwrap().chi;
        assert!((&chi - &analytic_chi(&p, *t)).frobenius_norm() <= 1e-6);
    }
}

#[test]
fn trajectories_stay_physical() {
    let mut r = rng(11);
    for dims in SHAPES {
        let sys = random_system(shape(dims), &mut r);
        let rho0 = random_density_matrix(sys.shape().total(), &mut r);
        let traj = integrate(&sys, &rho0, IntegrationSettings::new(3.0, 1e-2, 1).unwrap()).unwrap();
        for d in &traj.diagnostics {
            assert!(d.trace_drift <= 1e-8);
            assert!(d.hermiticity_residual <= 1e-8);
            assert!(d.min_eigenvalue >= -1e-8);
        }
    }
}

#[test]
fn checker_and_theorem_verifier_agree() {
    let mut r = rng(12);
    // dephasing: both conditions hold and energies are conserved
    let sys = random_dephasing(shape((2, 2)), &mut r);
    let states: Vec<_> = (0..2).map(|_| random_density_matrix(4, &mut r)).collect();
    assert_eq!(verify_theorem(&sys, &states, 0.01, 2.0).unwrap().conserved(), Some(true));
    // the thermal example breaks the adjoint condition
    let (sys, rho0) = build_example(&ExampleParams::default()).unwrap();
    match verify_theorem(&sys, std::slice::from_ref(&rho0), 0.01, 1.0).unwrap() {
        TheoremReport::NotApplicable { state_index, report } => {
            assert_eq!(state_index, 0);
            assert_eq!(report, check_conditions(&sys, &rho0, 1e-10).unwrap());
        }
        other => panic!("expected NotApplicable, got {other:?}"),
    }
}

#[test]
fn thermal_product_state_is_steady() {
    let mut r = rng(13);
    for dims in SHAPES {
        let th = random_thermal(shape(dims), &mut r);
        let ss = corrflux::dynamics::steady_state(&th.sys).unwrap();
        assert!((&ss - &th.steady).max_abs() < 1e-9);
    }
}

#[test]
fn alpha_split_moves_energy_between_sides_only() {
    let mut r = rng(14);
    let sys: BipartiteSystem = random_system(shape((2, 3)), &mut r);
    let rho = random_density_matrix(6, &mut r);
    let e = {
        let dec = decompose(&rho, sys.shape()).unwrap();
        sys.interaction().trace_product(&dec.product()).re
    };
    let l0 = energy_ledger(&sys.clone().with_alpha_a(0.0).unwrap(), &rho).unwrap();
    let l1 = energy_ledger(&sys.clone().with_alpha_a(1.0).unwrap(), &rho).unwrap();
    assert!((l0.u_a - l1.u_a - e).abs() < 1e-12);
    assert!((l1.u_b - l0.u_b - e).abs() < 1e-12);
}
