use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ansatz_state, AnsatzConfig};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::pauli::{decompose, Pauli, PauliDecomposition, PauliString, DEFAULT_PRUNE_EPS};
use crate::sim::{Circuit, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// How the constituent expectation values of one cost evaluation are
/// obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMode {
    Exact,
    Shots { shots: u32, seed: u64 },
}

/// One evaluation of the local cost with all its constituents.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub value: f64,
    /// `beta_{ll'}`, `L x L`.
    pub beta: ComplexMatrix,
    /// `delta^q_{ll'}`, one `L x L` matrix per qubit.
    pub delta: Vec<ComplexMatrix>,
    /// `sum_q sum_{ll'} c_l^* c_l' delta^q_{ll'}`.
    pub numerator: Complex64,
    /// `sum_{ll'} c_l^* c_l' beta_{ll'}`, i.e. `<psi|psi>`.
    pub denominator: Complex64,
    /// Expectation values computed (exact) or measurement settings sampled
    /// (shots).
    pub circuits_evaluated: usize,
}

/// Pauli expansion of one operator `A_l U Z_q U^dagger A_l'`, as indices
/// into [`ShotPlan::strings`].
#[derive(Debug, Clone)]
struct Expansion {
    terms: Vec<(usize, Complex64)>,
}

/// Everything that does not depend on the trial state when estimating the
/// cost from samples: the distinct Pauli strings to measure and how each
/// `delta` and `beta` entry is assembled from them.
#[derive(Debug, Clone)]
struct ShotPlan {
    strings: Vec<PauliString>,
    /// `delta[q][l][l']`.
    delta: Vec<Vec<Vec<Expansion>>>,
    /// `beta[l][l'] = phase * <strings[index]>`.
    beta: Vec<Vec<(usize, Complex64)>>,
}

/// Local cost for a fixed operator and right-hand-side preparation.
#[derive(Debug, Clone)]
pub struct LocalCost {
    decomposition: PauliDecomposition,
    coefficients: Vec<Complex64>,
    prep: Circuit,
    prep_inverse: Circuit,
    /// `A_l^dagger A_l' = phase * P`, row-major `L x L`.
    products: Vec<(Complex64, PauliString)>,
    plan: Option<ShotPlan>,
}

impl LocalCost {
    /// `prep` must act on the decomposition's register and satisfy
    /// `prep|0> = |b>`.
    pub fn new(decomposition: PauliDecomposition, prep: Circuit) -> Result<Self> {
        if decomposition.term_count() == 0 {
            return Err(Error::InvalidConfig("operator has no Pauli terms".into()));
        }
        if prep.qubits() != decomposition.qubits() {
            return Err(Error::DimensionMismatch {
                expected: decomposition.qubits(),
                actual: prep.qubits(),
            });
        }
        let l = decomposition.term_count();
        let mut products = Vec::with_capacity(l * l);
        for a in decomposition.terms() {
            for b in decomposition.terms() {
                // Pauli strings are Hermitian, so A_l^dagger = A_l
                products.push(a.string.mul(&b.string)?);
            }
        }
        Ok(Self {
            coefficients: decomposition.coefficients(),
            prep_inverse: prep.inverse(),
            decomposition,
            prep,
            products,
            plan: None,
        })
    }

    pub fn qubits(&self) -> usize {
        self.decomposition.qubits()
    }

    pub fn term_count(&self) -> usize {
        self.decomposition.term_count()
    }

    pub fn decomposition(&self) -> &PauliDecomposition {
        &self.decomposition
    }

    pub fn prep(&self) -> &Circuit {
        &self.prep
    }

    fn check_terms(&self, l: usize, lp: usize) -> Result<()> {
        let len = self.term_count();
        for index in [l, lp] {
            if index >= len {
                return Err(Error::TermOutOfRange { index, len });
            }
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.qubits() {
            return Err(Error::QubitOutOfRange {
                index: q,
                qubits: self.qubits(),
            });
        }
        Ok(())
    }

    /// `<x| A_l^dagger A_l' |x>` via the Pauli product `A_l A_l' = phase P`
    /// and one expectation value.
    pub fn beta_term(&self, l: usize, lp: usize, x: &StateVector) -> Result<Complex64> {
        self.check_terms(l, lp)?;
        let (phase, p) = &self.products[l * self.term_count() + lp];
        Ok(*phase * x.expectation(p)?)
    }

    /// `<x| A_l^dagger U Z_q U^dagger A_l' |x>` as one inner product between
    /// `U^dagger A_l |x>` and `Z_q U^dagger A_l' |x>`.
    pub fn delta_term(&self, q: usize, l: usize, lp: usize, x: &StateVector) -> Result<Complex64> {
        self.check_qubit(q)?;
        self.check_terms(l, lp)?;
        let left = self.rotated(l, x)?;
        let right = self.rotated(lp, x)?;
        let zq = PauliString::single(self.qubits(), q, Pauli::Z)?;
        left.matrix_element(&zq, &right)
    }

    /// `U^dagger A_l |x>`.
    fn rotated(&self, l: usize, x: &StateVector) -> Result<StateVector> {
        let mut s = x.apply_pauli(&self.decomposition.terms()[l].string)?;
        s.run(&self.prep_inverse)?;
        Ok(s)
    }

    /// Exact cost from the statevector.
    pub fn evaluate(&self, x: &StateVector) -> Result<CostBreakdown> {
        let l = self.term_count();
        let nq = self.qubits();
        let mut beta = ComplexMatrix::zeros(l, l);
        for i in 0..l {
            for j in 0..l {
                beta[(i, j)] = self.beta_term(i, j, x)?;
            }
        }
        let rotated: Vec<StateVector> =
            (0..l).map(|i| self.rotated(i, x)).collect::<Result<_>>()?;
        let mut delta = Vec::with_capacity(nq);
        for q in 0..nq {
            let zq = PauliString::single(nq, q, Pauli::Z)?;
            let z_rotated: Vec<StateVector> = rotated
                .iter()
                .map(|s| s.apply_pauli(&zq))
                .collect::<Result<_>>()?;
            let mut d = ComplexMatrix::zeros(l, l);
            for i in 0..l {
                for j in 0..l {
                    d[(i, j)] = rotated[i].inner(&z_rotated[j])?;
                }
            }
            delta.push(d);
        }
        self.assemble(beta, delta, (nq + 1) * l * l)
    }

    /// Enables [`LocalCost::evaluate_sampled`]. Expands every
    /// `A_l U Z_q U^dagger A_l'` in Pauli strings once; the union of strings
    /// is what gets measured per evaluation.
    pub fn with_shot_plan(mut self) -> Result<Self> {
        let nq = self.qubits();
        let l = self.term_count();
        let dim = 1usize << nq;
        let u = self.prep.unitary()?;
        let u_dag = u.adjoint();
        let a_mats: Vec<ComplexMatrix> = self
            .decomposition
            .terms()
            .iter()
            .map(|t| t.string.matrix())
            .collect();

        let mut slot = vec![usize::MAX; dim * dim];
        let mut strings = Vec::new();
        let mut intern = |p: PauliString, strings: &mut Vec<PauliString>| -> usize {
            let k = p.index();
            if slot[k] == usize::MAX {
                slot[k] = strings.len();
                strings.push(p);
            }
            slot[k]
        };

        let mut delta = Vec::with_capacity(nq);
        for q in 0..nq {
            let z = PauliString::single(nq, q, Pauli::Z)?.matrix();
            let core = u.matmul(&z)?.matmul(&u_dag)?;
            let mut rows = Vec::with_capacity(l);
            for ai in &a_mats {
                let left = ai.matmul(&core)?;
                let mut row = Vec::with_capacity(l);
                for aj in &a_mats {
                    let op = left.matmul(aj)?;
                    let d = decompose(&op, DEFAULT_PRUNE_EPS)?;
                    let terms = d
                        .terms()
                        .iter()
                        .map(|t| (intern(t.string, &mut strings), t.coefficient))
                        .collect();
                    row.push(Expansion { terms });
                }
                rows.push(row);
            }
            delta.push(rows);
        }
        let mut beta = Vec::with_capacity(l);
        for i in 0..l {
            let mut row = Vec::with_capacity(l);
            for j in 0..l {
                let (phase, p) = self.products[i * l + j];
                row.push((intern(p, &mut strings), phase));
            }
            beta.push(row);
        }
        self.plan = Some(ShotPlan {
            strings,
            delta,
            beta,
        });
        Ok(self)
    }

    /// Cost with every Pauli expectation replaced by a `shots`-sample
    /// estimate. Each distinct string is measured once per evaluation and
    /// shared by all `beta`/`delta` entries that contain it.
    pub fn evaluate_sampled<R: Rng + ?Sized>(
        &self,
        x: &StateVector,
        shots: u32,
        rng: &mut R,
    ) -> Result<CostBreakdown> {
        let plan = self.plan.as_ref().ok_or_else(|| {
            Error::InvalidConfig("sampled evaluation needs LocalCost::with_shot_plan".into())
        })?;
        let mut measured = 0;
        let estimates: Vec<f64> = plan
            .strings
            .iter()
            .map(|p| {
                if !p.is_identity() {
                    measured += 1;
                }
                x.sample_expectation(p, shots, rng)
            })
            .collect::<Result<_>>()?;
        let l = self.term_count();
        let beta = ComplexMatrix::from_fn(l, l, |i, j| {
            let (k, phase) = plan.beta[i][j];
            phase * estimates[k]
        });
        let delta = plan
            .delta
            .iter()
            .map(|rows| {
                ComplexMatrix::from_fn(l, l, |i, j| {
                    rows[i][j]
                        .terms
                        .iter()
                        .fold(ZERO, |acc, &(k, w)| acc + w * estimates[k])
                })
            })
            .collect();
        self.assemble(beta, delta, measured)
    }

    fn assemble(
        &self,
        beta: ComplexMatrix,
        delta: Vec<ComplexMatrix>,
        circuits_evaluated: usize,
    ) -> Result<CostBreakdown> {
        let denominator = self.quadratic_form(&beta);
        let numerator = delta
            .iter()
            .fold(ZERO, |acc, d| acc + self.quadratic_form(d));
        if !(denominator.re > 1e-14) {
            return Err(Error::DegenerateState(denominator.re));
        }
        let q = self.qubits() as f64;
        let value = 0.5 - numerator.re / (2.0 * q * denominator.re);
        Ok(CostBreakdown {
            value,
            beta,
            delta,
            numerator,
            denominator,
            circuits_evaluated,
        })
    }

    /// `sum_{ll'} c_l^* c_l' m_{ll'}`.
    fn quadratic_form(&self, m: &ComplexMatrix) -> Complex64 {
        let c = &self.coefficients;
        let mut acc = ZERO;
        for (i, ci) in c.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                acc += ci.conj() * cj * m[(i, j)];
            }
        }
        acc
    }
}

/// One-shot cost evaluation at `theta`.
pub fn local_cost(
    ansatz: &AnsatzConfig,
    theta: &[f64],
    decomposition: &PauliDecomposition,
    prep: &Circuit,
    mode: CostMode,
) -> Result<CostBreakdown> {
    if ansatz.qubits != decomposition.qubits() {
        return Err(Error::DimensionMismatch {
            expected: decomposition.qubits(),
            actual: ansatz.qubits,
        });
    }
    let x = ansatz_state(ansatz, theta)?;
    let cost = LocalCost::new(decomposition.clone(), prep.clone())?;
    match mode {
        CostMode::Exact => cost.evaluate(&x),
        CostMode::Shots { shots, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            cost.with_shot_plan()?.evaluate_sampled(&x, shots, &mut rng)
        }
    }
}
