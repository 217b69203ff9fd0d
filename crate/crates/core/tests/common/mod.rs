//! Dense reference implementations built from explicit Kronecker products,
//! sharing no code with the library's bitmask simulator.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            for j in 0..m {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint(a: &Dense) -> Dense {
    let n = a.len();
    (0..a[0].len())
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

pub fn apply(a: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn single(ch: char) -> Dense {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match ch {
        'I' => vec![vec![o, z], vec![z, o]],
        'X' => vec![vec![z, o], vec![o, z]],
        'Y' => vec![vec![z, -i], vec![i, z]],
        'Z' => vec![vec![o, z], vec![z, -o]],
        _ => panic!("bad pauli {ch}"),
    }
}

/// Left-most label character acts on the most significant bit.
pub fn pauli_dense(label: &str) -> Dense {
    label
        .chars()
        .fold(vec![vec![c(1.0, 0.0)]], |acc, ch| kron(&acc, &single(ch)))
}

/// `op` on `qubit` of an `n`-qubit register, identity elsewhere.
pub fn embed(op: &Dense, qubit: usize, n: usize) -> Dense {
    let id = single('I');
    let mut acc = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        acc = kron(&acc, if q == qubit { op } else { &id });
    }
    acc
}

pub fn hadamard() -> Dense {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]
}

pub fn ry(angle: f64) -> Dense {
    let (s, co) = (angle / 2.0).sin_cos();
    vec![vec![c(co, 0.0), c(-s, 0.0)], vec![c(s, 0.0), c(co, 0.0)]]
}

/// Diagonal CZ on qubits `a`, `b` (qubit 0 = most significant bit).
pub fn cz(a: usize, b: usize, n: usize) -> Dense {
    let dim = 1 << n;
    let mut out = eye(dim);
    for (j, row) in out.iter_mut().enumerate() {
        let ba = (j >> (n - 1 - a)) & 1;
        let bb = (j >> (n - 1 - b)) & 1;
        if ba == 1 && bb == 1 {
            row[j] = c(-1.0, 0.0);
        }
    }
    out
}

/// CX with control `a` and target `b`.
pub fn cx(a: usize, b: usize, n: usize) -> Dense {
    let dim = 1 << n;
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for j in 0..dim {
        let ctrl = (j >> (n - 1 - a)) & 1;
        let k = if ctrl == 1 { j ^ (1 << (n - 1 - b)) } else { j };
        out[k][j] = c(1.0, 0.0);
    }
    out
}

/// Layered ansatz state: per unit H on all, CZ chain, Ry on all.
pub fn ansatz_dense(qubits: usize, theta: &[f64]) -> Vec<Complex64> {
    let dim = 1 << qubits;
    let mut u = eye(dim);
    for unit in theta.chunks(qubits) {
        for q in 0..qubits {
            u = matmul(&embed(&hadamard(), q, qubits), &u);
        }
        for q in 0..qubits - 1 {
            u = matmul(&cz(q, q + 1, qubits), &u);
        }
        for (q, &a) in unit.iter().enumerate() {
            u = matmul(&embed(&ry(a), q, qubits), &u);
        }
    }
    u.iter().map(|row| row[0]).collect()
}

/// Right-hand-side preparation: Ry(phi) on q2, H on q1, CX(1 -> 2), Z on q2.
pub fn prep_dense(phi_deg: f64) -> Dense {
    let n = 3;
    let mut u = embed(&ry(phi_deg.to_radians()), 2, n);
    u = matmul(&embed(&hadamard(), 1, n), &u);
    u = matmul(&cx(1, 2, n), &u);
    matmul(&embed(&single('Z'), 2, n), &u)
}

pub fn real_dense(rows: &[Vec<f64>]) -> Dense {
    rows.iter()
        .map(|r| r.iter().map(|&v| c(v, 0.0)).collect())
        .collect()
}
