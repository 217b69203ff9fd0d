//! The periodic 1-D diffusion problem obtained by linearizing the
//! advection-diffusion equation, its forward-Euler block system, and the
//! classical and analytic references used to judge variational solutions.
//!
//! Grid convention: `x_j = j * L / (n - 1)` for `j = 0..n`, with the
//! three-point stencil wrapping indices modulo `n`. With `n = 4`, `nu = 0.05`
//! and `L = 1` this yields a stencil of `-0.9` on the diagonal and `0.45` on
//! the periodic neighbours.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

// f64 math comes from libm through this trait under no_std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{forward_substitute_unit_lower, norm, RealMatrix};

/// Discretization parameters of the linearized advection-diffusion problem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ProblemSpec {
    /// Number of grid points `n`.
    pub grid_points: usize,
    /// Diffusion coefficient `nu`.
    pub diffusion: f64,
    /// Domain length `L_D`.
    pub domain_length: f64,
    /// Time step in seconds.
    pub dt: f64,
    /// Number of discrete times `N_T`, counting `t = 0`.
    pub time_levels: usize,
    /// Wavenumber of the sinusoidal initial condition.
    pub wavenumber: f64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self::reference_case()
    }
}

impl ProblemSpec {
    /// Four grid points, `nu = 0.05`, unit domain, `dt = 0.25 s`, three time
    /// levels and a single sine wave over the domain.
    pub fn reference_case() -> Self {
        Self {
            grid_points: 4,
            diffusion: 5e-2,
            domain_length: 1.0,
            dt: 0.25,
            time_levels: 3,
            wavenumber: 2.0 * PI,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 grid points, got {}",
                self.grid_points
            )));
        }
        if self.time_levels < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 time levels, got {}",
                self.time_levels
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.diffusion >= 0.0) || !self.diffusion.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "diffusion must be non-negative, got {}",
                self.diffusion
            )));
        }
        if !(self.dx() > 0.0) || !self.dx().is_finite() {
            return Err(Error::InvalidProblem(format!(
                "grid spacing must be positive, got {}",
                self.dx()
            )));
        }
        if !self.wavenumber.is_finite() {
            return Err(Error::InvalidProblem("wavenumber must be finite".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.domain_length / (self.grid_points as f64 - 1.0)
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.grid_points).map(|j| j as f64 * dx).collect()
    }

    /// Dimension of the reduced system, `(N_T - 1) * n`.
    pub fn reduced_dimension(&self) -> usize {
        (self.time_levels - 1) * self.grid_points
    }

    /// Times `dt, 2 dt, ...` of the unknown blocks of the reduced system.
    pub fn solution_times(&self) -> Vec<f64> {
        (1..self.time_levels).map(|k| k as f64 * self.dt).collect()
    }
}

/// Periodic diffusion stencil `M`. The quadratic advection term has no
/// linear part, so at first-order truncation it drops out entirely.
pub fn build_m(spec: &ProblemSpec) -> Result<RealMatrix> {
    spec.validate()?;
    let n = spec.grid_points;
    if n < 3 {
        return Err(Error::InvalidProblem(format!(
            "periodic three-point stencil needs n >= 3, got {n}"
        )));
    }
    // nu * (1/dx)^2 with the square taken first keeps entries like 0.45
    // exactly representable where nu / dx^2 is off by an ulp
    let inv_dx = (n as f64 - 1.0) / spec.domain_length;
    let coupling = spec.diffusion * (inv_dx * inv_dx);
    let mut m = RealMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = -2.0 * coupling;
        m[(i, (i + 1) % n)] = coupling;
        m[(i, (i + n - 1) % n)] = coupling;
    }
    Ok(m)
}

/// `u(x, 0) = sin(kappa x)` sampled on the grid.
pub fn initial_condition(spec: &ProblemSpec) -> Vec<f64> {
    spec.grid()
        .into_iter()
        .map(|x| (spec.wavenumber * x).sin())
        .collect()
}

/// One forward-Euler step operator `I + M dt`.
pub fn step_operator(spec: &ProblemSpec) -> Result<RealMatrix> {
    let m = build_m(spec)?;
    let n = spec.grid_points;
    Ok(RealMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id + m[(i, j)] * spec.dt
    }))
}

/// The stacked forward-Euler system and its right-hand side.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockSystem {
    pub grid_points: usize,
    pub time_levels: usize,
    /// All `N_T` blocks including the trivial `u(0) = u0` row.
    pub a_full: RealMatrix,
    /// `a_full` without its first block row and column.
    pub a_reduced: RealMatrix,
    /// `((I + M dt) u0, 0, ..., 0)`.
    pub b_raw: Vec<f64>,
    /// `b_raw` normalized to unit length.
    pub b_state: Vec<f64>,
    pub b_norm: f64,
    pub u0: Vec<f64>,
}

impl BlockSystem {
    pub fn reduced_dimension(&self) -> usize {
        self.a_reduced.rows()
    }

    /// Splits a reduced-dimension vector into per-time blocks.
    pub fn split_blocks(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.chunks(self.grid_points).map(<[f64]>::to_vec).collect()
    }
}

pub fn build_block_system(spec: &ProblemSpec) -> Result<BlockSystem> {
    let step = step_operator(spec)?;
    let n = spec.grid_points;
    let nt = spec.time_levels;
    let dim = nt * n;

    let mut a_full = RealMatrix::identity(dim);
    for k in 1..nt {
        for i in 0..n {
            for j in 0..n {
                a_full[(k * n + i, (k - 1) * n + j)] = -step[(i, j)];
            }
        }
    }
    let reduced = dim - n;
    let a_reduced = RealMatrix::from_fn(reduced, reduced, |i, j| a_full[(i + n, j + n)]);

    let u0 = initial_condition(spec);
    let mut b_raw = vec![0.0; reduced];
    b_raw[..n].copy_from_slice(&step.mul_vec(&u0)?);
    let b_norm = norm(&b_raw);
    if b_norm == 0.0 {
        return Err(Error::InvalidProblem(
            "right-hand side vanishes; the initial condition is identically zero".into(),
        ));
    }
    let b_state = b_raw.iter().map(|v| v / b_norm).collect();

    Ok(BlockSystem {
        grid_points: n,
        time_levels: nt,
        a_full,
        a_reduced,
        b_raw,
        b_state,
        b_norm,
        u0,
    })
}

/// Exact solution of the reduced system, blocks ordered by time.
pub fn classical_solve(sys: &BlockSystem) -> Result<Vec<f64>> {
    forward_substitute_unit_lower(&sys.a_reduced, &sys.b_raw)
}

/// Heat-kernel solution `exp(-kappa^2 nu t) sin(kappa x)` of the linearized
/// equation.
pub fn analytic_solution(spec: &ProblemSpec, t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidProblem(format!(
            "time must be non-negative, got {t}"
        )));
    }
    let k = spec.wavenumber;
    let decay = (-k * k * spec.diffusion * t).exp();
    Ok(initial_condition(spec)
        .into_iter()
        .map(|u| decay * u)
        .collect())
}

pub fn rmse(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            actual: a.len(),
        });
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// RMSE normalized by the root-mean-square of the reference `b`.
pub fn relative_error(a: &[f64], b: &[f64]) -> Result<f64> {
    let err = rmse(a, b)?;
    let zeros = vec![0.0; b.len()];
    let scale = rmse(b, &zeros)?;
    if scale == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(err / scale)
}

/// Recovers the angle `phi` (degrees) of the template
/// `(cos(phi/2), -sin(phi/2), sin(phi/2), -cos(phi/2)) / sqrt(2)` from the
/// four leading components of a right-hand-side state.
pub fn fit_b_angle(b_state: &[f64]) -> Result<f64> {
    if b_state.len() < 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: b_state.len(),
        });
    }
    let cos_part = b_state[0] - b_state[3];
    let sin_part = b_state[2] - b_state[1];
    Ok(2.0 * sin_part.atan2(cos_part).to_degrees())
}
