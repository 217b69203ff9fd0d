use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ansatz_state, extract_solution, AnsatzConfig, LocalCost};
use crate::error::{Error, Result};
use crate::pauli::{decompose, DEFAULT_PRUNE_EPS};
use crate::problem::{
    build_block_system, classical_solve, fit_b_angle, relative_error, rmse, ProblemSpec,
};
use crate::sim::prepare_b_circuit;
use crate::spsa::{self, SpsaConfig};

/// How the optimizer sees the cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Estimator {
    #[default]
    Exact,
    Shots(u32),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveOptions {
    pub ansatz: AnsatzConfig,
    /// `spsa.seed` is ignored; the perturbation stream derives from `seed`.
    pub spsa: SpsaConfig,
    pub estimator: Estimator,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            ansatz: AnsatzConfig::default(),
            spsa: SpsaConfig::default(),
            estimator: Estimator::Exact,
            seed: 0,
        }
    }
}

/// Everything recorded by one variational solve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveRecord {
    pub seed: u64,
    pub estimator: Estimator,
    pub theta_init: Vec<f64>,
    pub theta_final: Vec<f64>,
    /// Entry 0 is the cost at `theta_init`; entry `k` is the estimate
    /// reported by SPSA iteration `k`.
    pub cost_trace: Vec<f64>,
    /// Exact cost at each iterate, aligned with `cost_trace`.
    pub exact_cost_trace: Vec<f64>,
    /// Physical fields extracted from each iterate (all times concatenated),
    /// aligned with `cost_trace`.
    pub solution_trace: Vec<Vec<f64>>,
    /// Solution times `dt, 2 dt, ...`.
    pub times: Vec<f64>,
    /// Final extracted fields, one per solution time.
    pub u_fields: Vec<Vec<f64>>,
    /// Classical forward-Euler fields at the same times.
    pub reference: Vec<Vec<f64>>,
    pub rmse_per_time: Vec<f64>,
    pub relative_error_per_time: Vec<f64>,
    pub final_cost: f64,
    pub iterations: usize,
    pub converged: bool,
    pub term_count: usize,
    /// Angle of the right-hand-side preparation, degrees.
    pub b_angle_deg: f64,
}

/// Builds the reduced system for `problem`, expands it in Pauli strings and
/// minimizes the local cost with SPSA from a uniformly random start.
///
/// Random streams are split from `opts.seed`: stream 0 drives the SPSA
/// perturbations, stream 1 the initial angles, stream 2 measurement
/// sampling. A run that hits `max_iter` without meeting the convergence
/// rule is returned with `converged = false`.
pub fn solve(problem: &ProblemSpec, opts: &SolveOptions) -> Result<SolveRecord> {
    let sys = build_block_system(problem)?;
    let dim = sys.reduced_dimension();
    let qubits = opts.ansatz.qubits;
    if qubits >= usize::BITS as usize || 1usize << qubits != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: 1usize.checked_shl(qubits as u32).unwrap_or(0),
        });
    }
    if qubits != 3 {
        return Err(Error::InvalidConfig(alloc::format!(
            "the right-hand-side preparation is a three-qubit circuit; got {qubits} qubits"
        )));
    }
    if let Estimator::Shots(0) = opts.estimator {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }

    let b_angle_deg = fit_b_angle(&sys.b_state)?;
    let prep = prepare_b_circuit(b_angle_deg);
    let prepared = prep.run()?;
    let mismatch = prepared
        .real_parts()
        .iter()
        .zip(&sys.b_state)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if mismatch > 1e-9 {
        return Err(Error::InvalidProblem(alloc::format!(
            "right-hand side is not of the prepared template form (max deviation {mismatch:e})"
        )));
    }

    let decomposition = decompose(&sys.a_reduced.to_complex(), DEFAULT_PRUNE_EPS)?;
    let term_count = decomposition.term_count();
    let mut cost = LocalCost::new(decomposition, prep)?;
    if let Estimator::Shots(_) = opts.estimator {
        cost = cost.with_shot_plan()?;
    }

    let stream = |k: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k);
        rng
    };
    let mut init_rng = stream(1);
    let theta_init: Vec<f64> = (0..opts.ansatz.parameters())
        .map(|_| init_rng.random_range(0.0..TAU))
        .collect();
    let mut shot_rng = stream(2);

    let ansatz = opts.ansatz;
    let estimator = opts.estimator;
    let cost_fn = |theta: &[f64]| -> Result<f64> {
        let x = ansatz_state(&ansatz, theta)?;
        match estimator {
            Estimator::Exact => Ok(cost.evaluate(&x)?.value),
            Estimator::Shots(shots) => Ok(cost.evaluate_sampled(&x, shots, &mut shot_rng)?.value),
        }
    };

    let mut exact_cost_trace = Vec::new();
    let mut solution_trace = Vec::new();
    let mut monitor_error = None;
    let observer = |p: &spsa::Progress<'_>| {
        if monitor_error.is_some() {
            return;
        }
        let step = ansatz_state(&ansatz, p.theta).and_then(|x| {
            let exact = cost.evaluate(&x)?.value;
            let fields = extract_solution(&x, &sys)?;
            Ok((exact, fields.concat()))
        });
        match step {
            Ok((exact, fields)) => {
                exact_cost_trace.push(exact);
                solution_trace.push(fields);
            }
            Err(e) => monitor_error = Some(e),
        }
    };

    let spsa_cfg = SpsaConfig {
        seed: opts.seed,
        ..opts.spsa.clone()
    };
    let outcome = spsa::run(&theta_init, cost_fn, &spsa_cfg, observer)?;
    if let Some(e) = monitor_error {
        return Err(e);
    }

    let x = ansatz_state(&ansatz, &outcome.theta)?;
    let final_cost = cost.evaluate(&x)?.value;
    let u_fields = extract_solution(&x, &sys)?;
    let reference = sys.split_blocks(&classical_solve(&sys)?);
    let rmse_per_time = u_fields
        .iter()
        .zip(&reference)
        .map(|(u, r)| rmse(u, r))
        .collect::<Result<Vec<_>>>()?;
    let relative_error_per_time = u_fields
        .iter()
        .zip(&reference)
        .map(|(u, r)| relative_error(u, r))
        .collect::<Result<Vec<_>>>()?;

    Ok(SolveRecord {
        seed: opts.seed,
        estimator,
        theta_init,
        theta_final: outcome.theta,
        cost_trace: outcome.cost_trace,
        exact_cost_trace,
        solution_trace,
        times: problem.solution_times(),
        u_fields,
        reference,
        rmse_per_time,
        relative_error_per_time,
        final_cost,
        iterations: outcome.iterations,
        converged: outcome.converged,
        term_count,
        b_angle_deg,
    })
}
