mod common;

use common::{
    adjoint, ansatz_dense, apply, c, embed, matmul, prep_dense, real_dense, single, vdot,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use vqls_core::pauli::{decompose, PauliDecomposition, DEFAULT_PRUNE_EPS};
use vqls_core::problem::{build_block_system, fit_b_angle, BlockSystem, ProblemSpec};
use vqls_core::sim::{prepare_b_circuit, StateVector};
use vqls_core::vqls::{
    ansatz_state, circuit_count, local_cost, solution_direction, within_submission_limit,
    AnsatzConfig, CostMode, LocalCost, SymmetryMode,
};

struct Setup {
    sys: BlockSystem,
    phi: f64,
    decomposition: PauliDecomposition,
    cost: LocalCost,
}

fn setup() -> Setup {
    let sys = build_block_system(&ProblemSpec::reference_case()).unwrap();
    let phi = fit_b_angle(&sys.b_state).unwrap();
    let decomposition = decompose(&sys.a_reduced.to_complex(), DEFAULT_PRUNE_EPS).unwrap();
    let cost = LocalCost::new(decomposition.clone(), prepare_b_circuit(phi)).unwrap();
    Setup {
        sys,
        phi,
        decomposition,
        cost,
    }
}

/// `<psi| U (I - 1/Q sum_q |0><0|_q) U^dagger |psi> / <psi|psi>` with
/// `|psi> = A|x>`, everything as dense matrices.
fn dense_local_cost(a: &[Vec<f64>], phi: f64, x: &[Complex64]) -> f64 {
    let q = 3;
    let psi = apply(&real_dense(a), x);
    let u = prep_dense(phi);
    let dim = 8;
    let mut proj = vec![vec![c(0.0, 0.0); dim]; dim];
    for k in 0..q {
        let z = embed(&single('Z'), k, q);
        for i in 0..dim {
            for j in 0..dim {
                let id = if i == j { 1.0 } else { 0.0 };
                proj[i][j] += (c(id, 0.0) + z[i][j]) * 0.5 / q as f64;
            }
        }
    }
    let mut h = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let id = if i == j { 1.0 } else { 0.0 };
            h[i][j] = c(id, 0.0) - proj[i][j];
        }
    }
    let h = matmul(&matmul(&u, &h), &adjoint(&u));
    let num = vdot(&psi, &apply(&h, &psi));
    let den = vdot(&psi, &psi);
    num.re / den.re
}

fn rows(sys: &BlockSystem) -> Vec<Vec<f64>> {
    (0..sys.a_reduced.rows())
        .map(|i| sys.a_reduced.row(i).to_vec())
        .collect()
}

fn random_theta(rng: &mut impl Rng) -> Vec<f64> {
    (0..12).map(|_| rng.random_range(0.0..TAU)).collect()
}

#[test]
fn term_sum_equals_dense_cost() {
    let s = setup();
    let a = rows(&s.sys);
    let cfg = AnsatzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let theta = random_theta(&mut rng);
        let x = ansatz_state(&cfg, &theta).unwrap();
        let dense_x = ansatz_dense(3, &theta);
        for (p, q) in x.amplitudes().iter().zip(&dense_x) {
            assert!((p - q).norm() < 1e-12);
        }
        let got = s.cost.evaluate(&x).unwrap().value;
        let want = dense_local_cost(&a, s.phi, &dense_x);
        assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
    }
}

#[test]
fn ansatz_amplitudes_stay_real() {
    let cfg = AnsatzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let x = ansatz_state(&cfg, &random_theta(&mut rng)).unwrap();
        let worst = x
            .amplitudes()
            .iter()
            .map(|a| a.im.abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12);
        assert!((x.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn beta_and_delta_symmetries() {
    let s = setup();
    let cfg = AnsatzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let x = ansatz_state(&cfg, &random_theta(&mut rng)).unwrap();
        let b = s.cost.evaluate(&x).unwrap();
        let l = s.decomposition.term_count();
        for i in 0..l {
            assert!((b.beta[(i, i)] - c(1.0, 0.0)).norm() < 1e-12);
            for j in 0..l {
                assert!((b.beta[(i, j)] - b.beta[(j, i)].conj()).norm() < 1e-12);
                assert!((b.beta[(i, j)] - s.cost.beta_term(i, j, &x).unwrap()).norm() < 1e-12);
                for (q, d) in b.delta.iter().enumerate() {
                    assert!((d[(i, j)] - d[(j, i)].conj()).norm() < 1e-12);
                    assert!((d[(i, j)] - s.cost.delta_term(q, i, j, &x).unwrap()).norm() < 1e-12);
                }
            }
        }
        assert!(b.numerator.im.abs() < 1e-10 && b.denominator.im.abs() < 1e-10);
        assert!((-1e-12..=1.0 + 1e-12).contains(&b.value));
        assert_eq!(
            b.circuits_evaluated,
            circuit_count(3, l as u64, SymmetryMode::Baseline) as usize
        );
    }
}

#[test]
fn zero_at_the_solution_and_sign_blind() {
    let s = setup();
    let dir = solution_direction(&s.sys.a_reduced, &s.sys.b_state).unwrap();
    let x = StateVector::from_real(&dir).unwrap();
    assert!(s.cost.evaluate(&x).unwrap().value.abs() <= 1e-10);

    let cfg = AnsatzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let x = ansatz_state(&cfg, &random_theta(&mut rng)).unwrap();
        let flipped =
            StateVector::from_amplitudes(x.amplitudes().iter().map(|a| -a).collect()).unwrap();
        let a = s.cost.evaluate(&x).unwrap().value;
        let b = s.cost.evaluate(&flipped).unwrap().value;
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn sampled_cost_tracks_exact_cost() {
    let s = setup();
    let cfg = AnsatzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let theta = random_theta(&mut rng);
    let exact = local_cost(
        &cfg,
        &theta,
        &s.decomposition,
        &prepare_b_circuit(s.phi),
        CostMode::Exact,
    )
    .unwrap()
    .value;
    let mode = CostMode::Shots {
        shots: 1 << 16,
        seed: 4,
    };
    let a = local_cost(
        &cfg,
        &theta,
        &s.decomposition,
        &prepare_b_circuit(s.phi),
        mode,
    )
    .unwrap();
    let b = local_cost(
        &cfg,
        &theta,
        &s.decomposition,
        &prepare_b_circuit(s.phi),
        mode,
    )
    .unwrap();
    assert_eq!(a, b);
    assert!((a.value - exact).abs() < 0.02, "{} vs {exact}", a.value);
}

#[test]
fn sampling_needs_a_plan() {
    let s = setup();
    let x = StateVector::zero(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(s.cost.evaluate_sampled(&x, 100, &mut rng).is_err());
}

#[test]
fn term_indices_checked() {
    let s = setup();
    let x = StateVector::zero(3).unwrap();
    assert!(s.cost.beta_term(0, 7, &x).is_err());
    assert!(s.cost.delta_term(3, 0, 0, &x).is_err());
}

#[test]
fn circuit_counts() {
    assert_eq!(circuit_count(3, 7, SymmetryMode::Baseline), 196);
    for l in 1..200u64 {
        for q in 1..6u64 {
            let base = circuit_count(q, l, SymmetryMode::Baseline);
            let beta = circuit_count(q, l, SymmetryMode::BetaSymmetric);
            let full = circuit_count(q, l, SymmetryMode::FullSymmetric);
            assert_eq!(base, (q + 1) * l * l);
            assert!(full <= beta && beta <= base, "q={q} l={l}");
            if l >= 20 {
                let r = full as f64 / base as f64;
                assert!((0.45..=0.55).contains(&r), "q={q} l={l} r={r}");
            }
        }
    }
    assert!(within_submission_limit(circuit_count(
        3,
        15,
        SymmetryMode::Baseline
    )));
    assert!(!within_submission_limit(circuit_count(
        3,
        16,
        SymmetryMode::Baseline
    )));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cost_in_unit_interval(theta in prop::collection::vec(0.0..TAU, 12)) {
        let s = setup();
        let x = ansatz_state(&AnsatzConfig::default(), &theta).unwrap();
        let v = s.cost.evaluate(&x).unwrap().value;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
    }

    #[test]
    fn counts_monotone_in_terms(q in 1u64..8, l in 1u64..500) {
        for mode in SymmetryMode::ALL {
            prop_assert!(circuit_count(q, l + 1, mode) > circuit_count(q, l, mode));
        }
    }
}
