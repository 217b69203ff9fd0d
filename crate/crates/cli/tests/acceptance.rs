//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p vqls-cli --test acceptance -- --nocapture` to see the
//! report.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cell::Cell;
use std::f64::consts::TAU;

use common::{
    adjoint, ansatz_dense, apply, c, embed, matmul, pauli_dense, prep_dense, real_dense, single,
    vdot,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqls_cli::commands::{circuits_table, cmd_circuits, member_file, SolveSummary};
use vqls_cli::{cmd_estimate, cmd_solve, RunConfig};
use vqls_core::linalg::ComplexMatrix;
use vqls_core::pauli::{decompose, DEFAULT_PRUNE_EPS};
use vqls_core::problem::{build_block_system, build_m, fit_b_angle, ProblemSpec};
use vqls_core::resources::ForecastConfig;
use vqls_core::sim::{prepare_b, prepare_b_circuit};
use vqls_core::spsa::{gains, run, SpsaConfig};
use vqls_core::vqls::{
    ansatz_state, circuit_count, AnsatzConfig, Estimator, LocalCost, SolveRecord, SymmetryMode,
    SUBMISSION_LIMIT,
};
use vqls_core::{BigUint, Error};

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, pass: bool, detail: String) {
        let line = format!(
            "criterion {id:>2}: {}  {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push((id, pass, detail));
    }
}

fn stencil(r: &mut Report) {
    let m = build_m(&ProblemSpec::reference_case()).unwrap();
    let want = [
        [-0.9, 0.45, 0.0, 0.45],
        [0.45, -0.9, 0.45, 0.0],
        [0.0, 0.45, -0.9, 0.45],
        [0.45, 0.0, 0.45, -0.9],
    ];
    let mismatches = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| m[(i, j)] != want[i][j])
        .count();
    r.record(
        1,
        mismatches == 0,
        format!("4-point periodic stencil, {mismatches} of 16 entries differ from -0.9/0.45"),
    );
}

fn rhs_angle(r: &mut Report) {
    let sys = build_block_system(&ProblemSpec::reference_case()).unwrap();
    let prepared = prepare_b(-160.725).real_parts();
    let worst = prepared
        .iter()
        .zip(&sys.b_state)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let phi = fit_b_angle(&sys.b_state).unwrap();
    r.record(
        2,
        worst <= 1e-4 && (phi + 160.725).abs() <= 0.01,
        format!("max |b - prep(-160.725)| = {worst:.2e}, fitted angle = {phi:.5} deg"),
    );
}

fn decomposition(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = ComplexMatrix::from_fn(8, 8, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let d = decompose(&a, 0.0).unwrap();
        worst = worst.max(d.reconstruct().max_abs_diff(&a));
    }

    let sys = build_block_system(&ProblemSpec::reference_case()).unwrap();
    let a = sys.a_reduced.to_complex();
    let d = decompose(&a, DEFAULT_PRUNE_EPS).unwrap();
    let listed = [
        ("III", c(1.0, 0.0)),
        ("XII", c(-0.3875, 0.0)),
        ("XIX", c(-0.05625, 0.0)),
        ("XXX", c(-0.05625, 0.0)),
        ("YII", c(0.0, 0.3875)),
        ("YIX", c(0.0, 0.05625)),
        ("YXX", c(0.0, 0.05625)),
    ];
    let mut coeff_err = 0.0f64;
    for (t, (label, value)) in d.terms().iter().zip(listed) {
        let p = pauli_dense(label);
        let mut trace = c(0.0, 0.0);
        for i in 0..8 {
            for j in 0..8 {
                trace += p[j][i].conj() * a[(j, i)];
            }
        }
        let oracle = trace / 8.0;
        let label_ok = t.label() == label;
        coeff_err = coeff_err
            .max((t.coefficient - oracle).norm())
            .max((oracle - value).norm())
            .max(if label_ok { 0.0 } else { f64::INFINITY });
    }
    r.record(
        3,
        worst <= 1e-12 && d.term_count() == 7 && coeff_err <= 1e-12,
        format!(
            "roundtrip max error {worst:.2e} over 100 matrices; {} terms, max coefficient error {coeff_err:.2e}",
            d.term_count()
        ),
    );
}

fn dense_cost(a: &[Vec<f64>], phi: f64, x: &[Complex64]) -> f64 {
    let q = 3;
    let psi = apply(&real_dense(a), x);
    let u = prep_dense(phi);
    let mut h = common::eye(8);
    for k in 0..q {
        let z = embed(&single('Z'), k, q);
        for i in 0..8 {
            for j in 0..8 {
                let id = if i == j { 1.0 } else { 0.0 };
                h[i][j] -= (c(id, 0.0) + z[i][j]) * (0.5 / q as f64);
            }
        }
    }
    let h = matmul(&matmul(&u, &h), &adjoint(&u));
    (vdot(&psi, &apply(&h, &psi)) / vdot(&psi, &psi)).re
}

fn cost_equivalence(r: &mut Report) {
    let sys = build_block_system(&ProblemSpec::reference_case()).unwrap();
    let phi = fit_b_angle(&sys.b_state).unwrap();
    let d = decompose(&sys.a_reduced.to_complex(), DEFAULT_PRUNE_EPS).unwrap();
    let cost = LocalCost::new(d, prepare_b_circuit(phi)).unwrap();
    let rows: Vec<Vec<f64>> = (0..8).map(|i| sys.a_reduced.row(i).to_vec()).collect();
    let cfg = AnsatzConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let theta: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..TAU)).collect();
        let x = ansatz_state(&cfg, &theta).unwrap();
        let sum_form = cost.evaluate(&x).unwrap().value;
        let dense = dense_cost(&rows, phi, &ansatz_dense(3, &theta));
        worst = worst.max((sum_form - dense).abs());
    }
    r.record(
        4,
        worst <= 1e-10,
        format!("term-sum vs dense cost over 100 angle sets: max |diff| = {worst:.2e}"),
    );
}

fn ensemble(mode: Estimator) -> (SolveSummary, Vec<SolveRecord>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        mode,
        ensemble_size: 24,
        ..RunConfig::default()
    };
    let summary = cmd_solve(&cfg, dir.path())
        .unwrap()
        .expect("variational run");
    let records = (0..24)
        .map(|m| {
            let text = std::fs::read_to_string(dir.path().join(member_file(m))).unwrap();
            serde_json::from_str(&text).unwrap()
        })
        .collect();
    (summary, records)
}

fn convergence_and_accuracy(r: &mut Report) {
    let (summary, records) = ensemble(Estimator::Exact);
    let reached = records
        .iter()
        .filter(|rec| rec.exact_cost_trace.iter().take(201).any(|&v| v <= 1e-2))
        .count();
    let mean_iters =
        records.iter().map(|rec| rec.iterations as f64).sum::<f64>() / records.len() as f64;
    let at_40: Vec<f64> = records
        .iter()
        .filter_map(|rec| rec.exact_cost_trace.get(40).copied())
        .collect();
    let median_40 = {
        let mut v = at_40.clone();
        v.sort_by(f64::total_cmp);
        v.get(v.len() / 2).copied().unwrap_or(f64::NAN)
    };
    r.record(
        5,
        reached >= 20,
        format!(
            "{reached}/24 exact runs reach cost <= 1e-2 within 200 iterations \
             (mean stop at {mean_iters:.0}, median cost at iteration 40 = {median_40:.3})"
        ),
    );
    let e = &summary.ensemble_relative_error;
    r.record(
        6,
        e[0] <= 0.06 && e[1] <= 0.15,
        format!(
            "exact ensemble-mean relative RMSE {:.2}% (t=0.25), {:.2}% (t=0.5)",
            100.0 * e[0],
            100.0 * e[1]
        ),
    );

    let (summary, _) = ensemble(Estimator::Shots(8192));
    let e = &summary.ensemble_relative_error;
    r.record(
        7,
        e[0] <= 0.12 && e[1] <= 0.30,
        format!(
            "8192-shot ensemble-mean relative RMSE {:.2}% (t=0.25), {:.2}% (t=0.5)",
            100.0 * e[0],
            100.0 * e[1]
        ),
    );
}

fn circuits(r: &mut Report) {
    let mut exact = true;
    let mut ratio_range = (f64::INFINITY, 0.0f64);
    for q in 1..=8u64 {
        for l in 1..=400u64 {
            exact &= circuit_count(q, l, SymmetryMode::Baseline) == (q + 1) * l * l;
            if l >= 20 {
                let ratio = circuit_count(q, l, SymmetryMode::FullSymmetric) as f64
                    / circuit_count(q, l, SymmetryMode::Baseline) as f64;
                ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
            }
        }
    }
    let rows = cmd_circuits(3, 40).unwrap();
    let (_, table) = circuits_table(&rows);
    let flags_ok = rows.iter().zip(&table).all(|(row, cells)| {
        SymmetryMode::ALL
            .iter()
            .enumerate()
            .all(|(k, &m)| cells[4 + k] == (row.count(m) <= SUBMISSION_LIMIT).to_string())
    });
    let flagged = table.iter().filter(|cells| cells[4] == "false").count();
    r.record(
        8,
        exact
            && (0.45..=0.55).contains(&ratio_range.0)
            && (0.45..=0.55).contains(&ratio_range.1)
            && flags_ok,
        format!(
            "baseline = (Q+1)L^2: {exact}; full/baseline for L >= 20 in [{:.4}, {:.4}]; \
             {flagged}/40 baseline counts flagged over {SUBMISSION_LIMIT}",
            ratio_range.0, ratio_range.1
        ),
    );
}

fn resources(r: &mut Report) {
    let rows = cmd_estimate(&ForecastConfig::ten_day_global(3), &[]).unwrap();
    let row = &rows[0];
    let dt_rel = (row.dt_s - 5574.0).abs() / 5574.0;
    let digits = row.dimension.to_string();
    let log10 = (digits.len() - 1) as f64 + digits[..6].parse::<f64>().unwrap().log10() - 5.0;
    let one = BigUint::from(1u32);
    let q = row.qubits as u32;
    let ceil_ok = (&one << q) >= row.dimension && (&one << (q - 1)) < row.dimension;
    r.record(
        9,
        dt_rel <= 0.01
            && row.time_levels == 156
            && (log10 - 15.0).abs() <= 1.0
            && ceil_ok
            && q == 49,
        format!(
            "dt = {:.1} s ({:.2}% from 5574), N_T = {}, N = {} (10^{log10:.2}), qubits = {q}",
            row.dt_s,
            100.0 * dt_rel,
            row.time_levels,
            row.dimension
        ),
    );
}

fn spsa_unit(r: &mut Report) {
    let cfg = SpsaConfig::default();
    let (a0, c0) = gains(0, &cfg);
    let gains_err = (a0 - 4.0 / 11f64.powf(0.602)).abs().max((c0 - 0.1).abs());

    let calls = Cell::new(0usize);
    let cfg = SpsaConfig {
        max_iter: 37,
        tol: 0.0,
        seed: 5,
        ..SpsaConfig::default()
    };
    let f = |t: &[f64]| {
        calls.set(calls.get() + 1);
        Ok::<_, Error>(t.iter().map(|v| (v - 1.0).powi(2)).sum::<f64>())
    };
    let first = run(&[0.2, 0.4, 0.6], f, &cfg, |_| {}).unwrap();
    let per_iter_ok = calls.get() == 1 + 2 * first.iterations && first.step_evaluations == 74;
    let second = run(&[0.2, 0.4, 0.6], f, &cfg, |_| {}).unwrap();
    r.record(
        10,
        gains_err <= 1e-12 && per_iter_ok && first == second,
        format!(
            "a_0 = {a0:.12}, c_0 = {c0}, gain error {gains_err:.1e}; \
             {} step evaluations over {} iterations; replay identical: {}",
            first.step_evaluations,
            first.iterations,
            first == second
        ),
    );
}

#[test]
fn acceptance_criteria() {
    let mut report = Report { lines: Vec::new() };
    stencil(&mut report);
    rhs_angle(&mut report);
    decomposition(&mut report);
    cost_equivalence(&mut report);
    convergence_and_accuracy(&mut report);
    circuits(&mut report);
    resources(&mut report);
    spsa_unit(&mut report);

    let failed: Vec<usize> = report
        .lines
        .iter()
        .filter(|(_, pass, _)| !pass)
        .map(|(id, _, _)| *id)
        .collect();
    println!(
        "{} of {} criteria pass",
        report.lines.len() - failed.len(),
        report.lines.len()
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
