//! Minimal statevector simulator.
//!
//! Qubit 0 is the most significant bit of the amplitude index. The rotation
//! convention is `Ry(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`, which
//! keeps real states real.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

// f64 math comes from libm through this trait under no_std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Ry {
        qubit: usize,
        angle: f64,
    },
    Cz {
        control: usize,
        target: usize,
    },
    Cry {
        control: usize,
        target: usize,
        angle: f64,
    },
    Cx {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { qubit, angle } => Gate::Ry {
                qubit,
                angle: -angle,
            },
            Gate::Cry {
                control,
                target,
                angle,
            } => Gate::Cry {
                control,
                target,
                angle: -angle,
            },
            g => g,
        }
    }

    fn max_qubit(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::Ry { qubit: q, .. } => q,
            Gate::Cz { control, target }
            | Gate::Cx { control, target }
            | Gate::Cry {
                control, target, ..
            } => control.max(target),
        }
    }

    fn check(&self, qubits: usize) -> Result<()> {
        let q = self.max_qubit();
        if q >= qubits {
            return Err(Error::QubitOutOfRange { index: q, qubits });
        }
        match *self {
            Gate::Cz { control, target }
            | Gate::Cx { control, target }
            | Gate::Cry {
                control, target, ..
            } if control == target => Err(Error::InvalidConfig(alloc::format!(
                "two-qubit gate acts twice on qubit {control}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            gates: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.check(self.qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            qubits: self.qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn ry_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Ry { .. }))
            .count()
    }

    /// `V|0...0>`.
    pub fn run(&self) -> Result<StateVector> {
        let mut s = StateVector::zero(self.qubits)?;
        s.run(self)?;
        Ok(s)
    }

    /// Dense unitary, column `j` being the image of basis state `|j>`.
    pub fn unitary(&self) -> Result<crate::linalg::ComplexMatrix> {
        let dim = 1usize << self.qubits;
        let mut m = crate::linalg::ComplexMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut s = StateVector::basis(self.qubits, j)?;
            s.run(self)?;
            for (i, a) in s.amplitudes().iter().enumerate() {
                m[(i, j)] = *a;
            }
        }
        Ok(m)
    }
}

/// Pure state of a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub const MAX_QUBITS: usize = 24;

    pub fn zero(qubits: usize) -> Result<Self> {
        Self::basis(qubits, 0)
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        if qubits == 0 || qubits > Self::MAX_QUBITS {
            return Err(Error::InvalidConfig(alloc::format!(
                "unsupported qubit count {qubits}"
            )));
        }
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; the norm is
    /// not checked, so this also carries intermediate unnormalized vectors.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { rows: dim, cols: 1 });
        }
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.re).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b))
    }

    fn same_size(&self, other: &StateVector) -> Result<()> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                actual: other.amps.len(),
            });
        }
        Ok(())
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2], control: Option<usize>) {
        let t = self.mask(qubit);
        let c = control.map_or(0, |q| self.mask(q));
        for i in 0..self.amps.len() {
            if i & t != 0 || i & c != c {
                continue;
            }
            let a0 = self.amps[i];
            let a1 = self.amps[i | t];
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | t] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.check(self.qubits)?;
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *gate {
            Gate::H(q) => self.apply_single(q, [[h, h], [h, -h]], None),
            Gate::X(q) => self.apply_single(q, [[ZERO, ONE], [ONE, ZERO]], None),
            Gate::Z(q) => self.apply_single(q, [[ONE, ZERO], [ZERO, -ONE]], None),
            Gate::Ry { qubit, angle } => self.apply_single(qubit, ry_matrix(angle), None),
            Gate::Cx { control, target } => {
                self.apply_single(target, [[ZERO, ONE], [ONE, ZERO]], Some(control))
            }
            Gate::Cz { control, target } => {
                self.apply_single(target, [[ONE, ZERO], [ZERO, -ONE]], Some(control))
            }
            Gate::Cry {
                control,
                target,
                angle,
            } => self.apply_single(target, ry_matrix(angle), Some(control)),
        }
        Ok(())
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.qubits() != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                actual: circuit.qubits(),
            });
        }
        for g in circuit.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        self.check_label(p)?;
        Ok(StateVector {
            qubits: self.qubits,
            amps: p.apply(&self.amps)?,
        })
    }

    fn check_label(&self, p: &PauliString) -> Result<()> {
        if p.qubits() != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                actual: p.qubits(),
            });
        }
        Ok(())
    }

    /// `<psi|P|psi>`, real for any Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        Ok(self.inner(&self.apply_pauli(p)?)?.re)
    }

    /// `<self|P|other>`.
    pub fn matrix_element(&self, p: &PauliString, other: &StateVector) -> Result<Complex64> {
        self.inner(&other.apply_pauli(p)?)
    }

    /// Rotates every qubit that carries X or Y in `p` into the Z basis so
    /// that a computational-basis measurement reads out the string's
    /// eigenvalue as the parity over its support.
    pub fn rotate_to_z_basis(&self, p: &PauliString) -> Result<StateVector> {
        self.check_label(p)?;
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let hadamard = [
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ];
        // H S^dagger maps the Y eigenbasis onto Z
        let y_to_z = [
            [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
            [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
        ];
        let mut out = self.clone();
        for (q, op) in p.paulis().enumerate() {
            match op {
                Pauli::X => out.apply_single(q, hadamard, None),
                Pauli::Y => out.apply_single(q, y_to_z, None),
                Pauli::I | Pauli::Z => {}
            }
        }
        Ok(out)
    }

    /// Estimates `<psi|P|psi>` from `shots` computational-basis samples of
    /// the rotated state: the mean of `(-1)^(parity of the outcome on the
    /// string's support)`. Outcomes are drawn by inverse CDF over the basis
    /// probabilities.
    pub fn sample_expectation<R: Rng + ?Sized>(
        &self,
        p: &PauliString,
        shots: u32,
        rng: &mut R,
    ) -> Result<f64> {
        self.check_label(p)?;
        if shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if p.is_identity() {
            return Ok(1.0);
        }
        let rotated = self.rotate_to_z_basis(p)?;
        let probs = rotated.probabilities();
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for pr in &probs {
            acc += pr;
            cdf.push(acc);
        }
        let total = acc;
        let support = p.support() as usize;
        let mut sum: i64 = 0;
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let outcome = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            sum += if (outcome & support).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            };
        }
        Ok(sum as f64 / shots as f64)
    }
}

fn ry_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Circuit preparing `(cos(phi/2), -sin(phi/2), sin(phi/2), -cos(phi/2), 0, 0, 0, 0) / sqrt(2)`
/// from `|000>`, with `phi` in degrees. Qubit 0 stays in `|0>`.
///
/// `Ry(phi)` on qubit 2 gives `(c, s)`; `H` on qubit 1 copies it into both
/// halves; the CX swaps the `q1 = 1` half to `(s, c)` and the final `Z`
/// flips the sign of the odd components.
pub fn prepare_b_circuit(phi_deg: f64) -> Circuit {
    let phi = phi_deg.to_radians();
    let mut c = Circuit::new(3);
    for g in [
        Gate::Ry {
            qubit: 2,
            angle: phi,
        },
        Gate::H(1),
        Gate::Cx {
            control: 1,
            target: 2,
        },
        Gate::Z(2),
    ] {
        c.push(g).expect("static gates are in range");
    }
    c
}

pub fn prepare_b(phi_deg: f64) -> StateVector {
    prepare_b_circuit(phi_deg)
        .run()
        .expect("three-qubit register is valid")
}
