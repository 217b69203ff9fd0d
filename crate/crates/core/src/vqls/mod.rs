//! Variational quantum linear solver with the local cost function.
//!
//! For `A = sum_l c_l A_l` (Pauli strings `A_l`), a preparation circuit `U`
//! with `U|0> = |b>` and a trial state `|x> = V(theta)|0>`, the local cost is
//!
//! ```text
//! C = 1/2 - 1/(2Q) * sum_q sum_{l,l'} c_l^* c_l' delta^q_{ll'}
//!                  / sum_{l,l'} c_l^* c_l' beta_{ll'}
//! beta_{ll'}    = <x| A_l^dagger A_l' |x>
//! delta^q_{ll'} = <x| A_l^dagger U Z_q U^dagger A_l' |x>
//! ```
//!
//! Conjugates sit on the left index so that both sums are Hermitian
//! quadratic forms and the cost is real.

mod cost;
mod solve;

pub use cost::{local_cost, CostBreakdown, CostMode, LocalCost};
pub use solve::{solve, Estimator, SolveOptions, SolveRecord};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, RealMatrix};
use crate::problem::BlockSystem;
use crate::sim::{Circuit, Gate, StateVector};

/// Layered ansatz: each unit is a Hadamard on every qubit, a CZ between
/// each adjacent pair `(q, q + 1)`, then one `Ry` per qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AnsatzConfig {
    pub qubits: usize,
    pub units: usize,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self {
            qubits: 3,
            units: 4,
        }
    }
}

impl AnsatzConfig {
    pub fn new(qubits: usize, units: usize) -> Self {
        Self { qubits, units }
    }

    /// Number of rotation angles, one per `Ry`.
    pub fn parameters(&self) -> usize {
        self.qubits * self.units
    }

    pub fn circuit(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.parameters() {
            return Err(Error::DimensionMismatch {
                expected: self.parameters(),
                actual: theta.len(),
            });
        }
        let mut c = Circuit::new(self.qubits);
        for unit in theta.chunks(self.qubits) {
            for q in 0..self.qubits {
                c.push(Gate::H(q))?;
            }
            for q in 0..self.qubits.saturating_sub(1) {
                c.push(Gate::Cz {
                    control: q,
                    target: q + 1,
                })?;
            }
            for (q, &angle) in unit.iter().enumerate() {
                c.push(Gate::Ry { qubit: q, angle })?;
            }
        }
        Ok(c)
    }
}

/// `V(theta)|0...0>`.
pub fn ansatz_state(cfg: &AnsatzConfig, theta: &[f64]) -> Result<StateVector> {
    cfg.circuit(theta)?.run()
}

/// How much of the `beta`/`delta` symmetry a hardware run exploits when
/// counting circuits per cost evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SymmetryMode {
    /// Every `beta_{ll'}` and `delta^q_{ll'}` separately: `(Q + 1) L^2`.
    Baseline,
    /// Unit diagonal and Hermitian `beta`: `Q L^2 + L(L - 1)/2`.
    BetaSymmetric,
    /// Additionally `delta^q` symmetric: `(Q + 1) L(L - 1)/2 + Q L`.
    FullSymmetric,
}

impl SymmetryMode {
    pub const ALL: [SymmetryMode; 3] = [
        SymmetryMode::Baseline,
        SymmetryMode::BetaSymmetric,
        SymmetryMode::FullSymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymmetryMode::Baseline => "baseline",
            SymmetryMode::BetaSymmetric => "beta_sym",
            SymmetryMode::FullSymmetric => "full_sym",
        }
    }
}

/// Largest number of circuits accepted in one hardware submission.
pub const SUBMISSION_LIMIT: u64 = 900;

/// Distinct circuits per cost evaluation for `q` qubits and `l` terms.
pub fn circuit_count(q: u64, l: u64, mode: SymmetryMode) -> u64 {
    let pairs = l * l.saturating_sub(1) / 2;
    match mode {
        SymmetryMode::Baseline => (q + 1) * l * l,
        SymmetryMode::BetaSymmetric => q * l * l + pairs,
        SymmetryMode::FullSymmetric => (q + 1) * pairs + q * l,
    }
}

pub fn within_submission_limit(count: u64) -> bool {
    count <= SUBMISSION_LIMIT
}

/// Maps a (converged) trial state back to physical fields, one vector per
/// solution time.
///
/// The state fixes only a direction: its global sign is chosen to minimize
/// `|s A x - b|`, and the scale is the least-squares factor
/// `<A x, b_raw> / |A x|^2`.
pub fn extract_solution(x: &StateVector, sys: &BlockSystem) -> Result<Vec<Vec<f64>>> {
    let dim = sys.reduced_dimension();
    if x.dimension() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: x.dimension(),
        });
    }
    let xr = x.real_parts();
    let ax = sys.a_reduced.mul_vec(&xr)?;
    let ax_sqr = dot(&ax, &ax);
    if ax_sqr < 1e-24 {
        return Err(Error::DegenerateState(ax_sqr));
    }
    let sign = sign_towards(&ax, &sys.b_state);
    let scale = sign * dot(&ax, &sys.b_raw) / ax_sqr;
    let fields: Vec<f64> = xr.iter().map(|v| scale * sign * v).collect();
    Ok(sys.split_blocks(&fields))
}

fn sign_towards(ax: &[f64], b: &[f64]) -> f64 {
    let dist = |s: f64| -> f64 {
        ax.iter()
            .zip(b)
            .map(|(a, b)| {
                let d = s * a - b;
                d * d
            })
            .sum()
    };
    if dist(1.0) <= dist(-1.0) {
        1.0
    } else {
        -1.0
    }
}

/// Normalized exact solution direction `A^{-1} b / |A^{-1} b|`, useful as a
/// reference point for the cost.
pub fn solution_direction(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let x = crate::linalg::forward_substitute_unit_lower(a, b)?;
    let n = crate::linalg::norm(&x);
    Ok(x.into_iter().map(|v| v / n).collect())
}
