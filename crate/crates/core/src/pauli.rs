//! Pauli-string coordinates of dense operators.
//!
//! A string on `Q` qubits is stored as an X mask and a Z mask over amplitude
//! bits (bit `Q - 1 - q` belongs to qubit `q`), so that
//! `P = i^{#Y} X^x Z^z` and `P|j> = i^{#Y} (-1)^{|j & z|} |j ^ x>`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Coefficients at or below this magnitude are treated as floating-point
/// residue and dropped.
pub const DEFAULT_PRUNE_EPS: f64 = 1e-12;

/// Single-qubit Pauli operator. The ordering `I < X < Y < Z` fixes the
/// canonical term order of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// Tensor product of single-qubit Paulis on a fixed number of qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    qubits: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PauliString {
    pub const MAX_QUBITS: usize = 31;

    pub fn identity(qubits: usize) -> Self {
        Self {
            qubits,
            x_mask: 0,
            z_mask: 0,
        }
    }

    /// Parses a word over `{I, X, Y, Z}`; character 0 acts on qubit 0.
    pub fn from_label(label: &str) -> Result<Self> {
        let qubits = label.chars().count();
        if qubits == 0 || qubits > Self::MAX_QUBITS {
            return Err(Error::InvalidLabel(label.into()));
        }
        let mut ops = Vec::with_capacity(qubits);
        for c in label.chars() {
            ops.push(Pauli::from_char(c).ok_or_else(|| Error::InvalidLabel(label.into()))?);
        }
        Ok(Self::from_paulis(&ops))
    }

    pub fn from_paulis(ops: &[Pauli]) -> Self {
        let qubits = ops.len();
        let mut s = Self::identity(qubits);
        for (q, op) in ops.iter().enumerate() {
            s = s.with(q, *op);
        }
        s
    }

    /// `op` on `qubit`, identity elsewhere.
    pub fn single(qubits: usize, qubit: usize, op: Pauli) -> Result<Self> {
        if qubit >= qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                qubits,
            });
        }
        Ok(Self::identity(qubits).with(qubit, op))
    }

    /// Builds the string whose canonical index is `index`: base-4 digits,
    /// most significant digit on qubit 0, `I = 0, X = 1, Y = 2, Z = 3`.
    pub fn from_index(qubits: usize, index: usize) -> Self {
        let mut s = Self::identity(qubits);
        for q in 0..qubits {
            let digit = (index >> (2 * (qubits - 1 - q))) & 3;
            s = s.with(q, Pauli::ALL[digit]);
        }
        s
    }

    pub fn index(&self) -> usize {
        (0..self.qubits).fold(0, |acc, q| acc * 4 + self.get(q) as usize)
    }

    fn bit(&self, qubit: usize) -> u64 {
        1u64 << (self.qubits - 1 - qubit)
    }

    fn with(mut self, qubit: usize, op: Pauli) -> Self {
        let bit = self.bit(qubit);
        let (x, z) = op.bits();
        self.x_mask = (self.x_mask & !bit) | if x { bit } else { 0 };
        self.z_mask = (self.z_mask & !bit) | if z { bit } else { 0 };
        self
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let bit = self.bit(qubit);
        Pauli::from_bits(self.x_mask & bit != 0, self.z_mask & bit != 0)
    }

    pub fn paulis(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.qubits).map(move |q| self.get(q))
    }

    pub fn label(&self) -> String {
        self.paulis().map(Pauli::as_char).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Amplitude bits flipped by the string.
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    /// Amplitude bits that pick up a sign.
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    /// Bits carrying a non-identity operator.
    pub fn support(&self) -> u64 {
        self.x_mask | self.z_mask
    }

    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// `P|j> = phase(j) |j ^ x_mask>`.
    #[inline]
    pub fn phase_on(&self, j: usize) -> Complex64 {
        let sign_flips = ((j as u64) & self.z_mask).count_ones();
        i_power(self.y_count() + 2 * sign_flips)
    }

    /// Applies the string to a vector of amplitudes.
    pub fn apply(&self, amps: &[Complex64]) -> Result<alloc::vec::Vec<Complex64>> {
        let dim = 1usize << self.qubits;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amps.len(),
            });
        }
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); dim];
        let x = self.x_mask as usize;
        for (j, &a) in amps.iter().enumerate() {
            out[j ^ x] = self.phase_on(j) * a;
        }
        Ok(out)
    }

    /// Dense matrix of the string.
    pub fn matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.qubits;
        let mut m = ComplexMatrix::zeros(dim, dim);
        let x = self.x_mask as usize;
        for j in 0..dim {
            m[(j ^ x, j)] = self.phase_on(j);
        }
        m
    }

    /// `self * other = phase * result`.
    pub fn mul(&self, other: &Self) -> Result<(Complex64, Self)> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                actual: other.qubits,
            });
        }
        let mut power = 0u32;
        for q in 0..self.qubits {
            power += single_product_power(self.get(q), other.get(q));
        }
        let out = Self {
            qubits: self.qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
        };
        Ok((i_power(power), out))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.paulis() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

fn i_power(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Exponent `k` in `a b = i^k c` for single-qubit Paulis.
fn single_product_power(a: Pauli, b: Pauli) -> u32 {
    use Pauli::*;
    match (a, b) {
        (X, Y) | (Y, Z) | (Z, X) => 1,
        (Y, X) | (Z, Y) | (X, Z) => 3,
        _ => 0,
    }
}

/// A weighted Pauli string `c_l A_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: Complex64, string: PauliString) -> Self {
        Self {
            coefficient,
            string,
        }
    }

    pub fn from_label(coefficient: Complex64, label: &str) -> Result<Self> {
        Ok(Self::new(coefficient, PauliString::from_label(label)?))
    }

    pub fn label(&self) -> String {
        self.string.label()
    }
}

/// `A = sum_l c_l A_l` with terms in canonical label order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliDecomposition {
    qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliDecomposition {
    /// Validates and canonicalizes a term list: labels must share one qubit
    /// count and be distinct. Terms are sorted into `I < X < Y < Z` order.
    pub fn from_terms(qubits: usize, mut terms: Vec<PauliTerm>) -> Result<Self> {
        if qubits == 0 || qubits > PauliString::MAX_QUBITS {
            return Err(Error::InvalidConfig(alloc::format!(
                "unsupported qubit count {qubits}"
            )));
        }
        for t in &terms {
            if t.string.qubits() != qubits {
                return Err(Error::DimensionMismatch {
                    expected: qubits,
                    actual: t.string.qubits(),
                });
            }
        }
        terms.sort_by_key(|t| t.string.index());
        if let Some(w) = terms.windows(2).find(|w| w[0].string == w[1].string) {
            return Err(Error::InvalidLabel(alloc::format!(
                "duplicate label {}",
                w[0].string
            )));
        }
        Ok(Self { qubits, terms })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dimension(&self) -> usize {
        1 << self.qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of retained terms `L`.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    /// `sum_l c_l A_l` as a dense matrix.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.dimension();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            let x = t.string.x_mask() as usize;
            for j in 0..dim {
                m[(j ^ x, j)] += t.coefficient * t.string.phase_on(j);
            }
        }
        m
    }
}

/// Pauli coordinates `c_l = tr(A_l A) / 2^Q` of a square matrix of
/// power-of-two dimension, keeping terms with `|c_l| > prune_eps`.
///
/// The coordinates are produced by one 2x2 butterfly per qubit applied in
/// place over the whole matrix, `O(N^2 log N)` work in total. For the
/// row/column bit pair of one qubit the butterfly maps
/// `(a00, a01, a10, a11)` to the I, X, Y, Z coordinates
/// `((a00 + a11)/2, (a01 + a10)/2, i(a01 - a10)/2, (a00 - a11)/2)`, stored
/// back at positions `00, 01, 10, 11`. After all qubits, entry `(r, c)`
/// holds the coordinate of the string whose digit on each qubit is
/// `2 r_q + c_q`.
pub fn decompose(a: &ComplexMatrix, prune_eps: f64) -> Result<PauliDecomposition> {
    let dim = a.rows();
    if !a.is_square() || dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let qubits = dim.trailing_zeros() as usize;
    if qubits == 0 || qubits > PauliString::MAX_QUBITS {
        return Err(Error::NotPowerOfTwo {
            rows: a.rows(),
            cols: a.cols(),
        });
    }

    let mut t = a.clone();
    let half = Complex64::new(0.5, 0.0);
    let i_half = Complex64::new(0.0, 0.5);
    for b in 0..qubits {
        let m = 1usize << b;
        for r in (0..dim).filter(|r| r & m == 0) {
            for c in (0..dim).filter(|c| c & m == 0) {
                let a00 = t[(r, c)];
                let a01 = t[(r, c | m)];
                let a10 = t[(r | m, c)];
                let a11 = t[(r | m, c | m)];
                t[(r, c)] = (a00 + a11) * half;
                t[(r, c | m)] = (a01 + a10) * half;
                t[(r | m, c)] = (a01 - a10) * i_half;
                t[(r | m, c | m)] = (a00 - a11) * half;
            }
        }
    }

    let mut terms = Vec::new();
    for index in 0..dim * dim {
        let string = PauliString::from_index(qubits, index);
        let (mut r, mut c) = (0usize, 0usize);
        for q in 0..qubits {
            let digit = (index >> (2 * (qubits - 1 - q))) & 3;
            let bit = qubits - 1 - q;
            r |= (digit >> 1) << bit;
            c |= (digit & 1) << bit;
        }
        let coefficient = t[(r, c)];
        if coefficient.norm() > prune_eps {
            terms.push(PauliTerm::new(coefficient, string));
        }
    }
    Ok(PauliDecomposition { qubits, terms })
}
