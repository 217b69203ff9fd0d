//! Size estimates for running the linearized forecast system on a quantum
//! register: CFL time step, stacked-system dimension, and qubit count.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

// f64 math comes from libm through this trait under no_std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Equatorial length of one degree of arc.
pub const KM_PER_DEGREE: f64 = 111.32;

/// Global forecast model to size. The truncation order has no default.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ForecastConfig {
    pub horizontal_resolution_deg: f64,
    pub vertical_levels: u64,
    pub prognostic_variables: u64,
    /// Forecast length in seconds.
    pub forecast_length_s: f64,
    /// Maximum wind speed in m/s.
    pub u_max: f64,
    pub cfl: f64,
    /// Truncation order of the linearization.
    pub tau: u32,
    #[cfg_attr(feature = "serde", serde(default = "default_km_per_degree"))]
    pub km_per_degree: f64,
}

#[cfg(feature = "serde")]
fn default_km_per_degree() -> f64 {
    KM_PER_DEGREE
}

impl ForecastConfig {
    /// 5 degree grid, one level, five variables, ten days at 100 m/s with
    /// CFL 1.
    pub fn ten_day_global(tau: u32) -> Self {
        Self {
            horizontal_resolution_deg: 5.0,
            vertical_levels: 1,
            prognostic_variables: 5,
            forecast_length_s: 10.0 * 86_400.0,
            u_max: 100.0,
            cfl: 1.0,
            tau,
            km_per_degree: KM_PER_DEGREE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizontal_resolution_deg > 0.0) {
            return Err(Error::InvalidConfig("resolution must be positive".into()));
        }
        if self.vertical_levels == 0 || self.prognostic_variables == 0 {
            return Err(Error::InvalidConfig(
                "level and variable counts must be at least 1".into(),
            ));
        }
        if self.tau == 0 {
            return Err(Error::InvalidConfig("tau must be at least 1".into()));
        }
        if !(self.forecast_length_s >= 0.0) || !(self.cfl > 0.0) || !(self.km_per_degree > 0.0) {
            return Err(Error::InvalidConfig(
                "forecast length, CFL number and km/degree must be positive".into(),
            ));
        }
        if !(self.u_max > 0.0) || !self.u_max.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "u_max must be positive, got {}",
                self.u_max
            )));
        }
        Ok(())
    }

    /// `variables * levels * (360/res) * (180/res)`, rounded.
    pub fn grid_unknowns(&self) -> u64 {
        let res = self.horizontal_resolution_deg;
        let cells = (360.0 / res) * (180.0 / res);
        (self.prognostic_variables as f64 * self.vertical_levels as f64 * cells).round() as u64
    }
}

/// CFL-limited time step (s) and the number of discrete times including
/// `t = 0`.
pub fn cfl_timestep(cfg: &ForecastConfig) -> Result<(f64, u64)> {
    cfg.validate()?;
    let dx_m = cfg.horizontal_resolution_deg * cfg.km_per_degree * 1000.0;
    let dt = cfg.cfl * dx_m / cfg.u_max;
    let steps = (cfg.forecast_length_s / dt).floor() as u64;
    Ok((dt, steps + 1))
}

/// `N = N_T n (n^tau - 1) / (n - 1)` in exact integer arithmetic.
pub fn vector_dimension(n: u64, tau: u32, time_levels: u64) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 unknowns per time, got {n}"
        )));
    }
    if tau == 0 {
        return Err(Error::InvalidConfig("tau must be at least 1".into()));
    }
    let nb = BigUint::from(n);
    let numerator = num_traits::pow(nb.clone(), tau as usize) - BigUint::one();
    let denominator = BigUint::from(n - 1);
    let remainder = &numerator % &denominator;
    if !remainder.is_zero() {
        return Err(Error::InvalidConfig(format!(
            "n^tau - 1 not divisible by n - 1 (remainder {remainder})"
        )));
    }
    Ok(BigUint::from(time_levels) * nb * (numerator / denominator))
}

/// `ceil(log2 N)`: qubits whose Hilbert space is at least `N` dimensional.
pub fn qubit_count(dimension: &BigUint) -> u64 {
    if *dimension <= BigUint::one() {
        return 0;
    }
    (dimension - BigUint::one()).bits()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub resolution_deg: f64,
    pub dt_s: f64,
    pub time_levels: u64,
    pub unknowns: u64,
    pub dimension: BigUint,
    pub qubits: u64,
}

pub fn estimate(cfg: &ForecastConfig) -> Result<SweepRow> {
    let (dt, nt) = cfl_timestep(cfg)?;
    let n = cfg.grid_unknowns();
    let dimension = vector_dimension(n, cfg.tau, nt)?;
    let qubits = qubit_count(&dimension);
    Ok(SweepRow {
        resolution_deg: cfg.horizontal_resolution_deg,
        dt_s: dt,
        time_levels: nt,
        unknowns: n,
        dimension,
        qubits,
    })
}

/// Applies [`estimate`] at each resolution, keeping every other field of
/// `template`.
pub fn sweep(template: &ForecastConfig, resolutions: &[f64]) -> Result<Vec<SweepRow>> {
    if resolutions.is_empty() {
        return Err(Error::InvalidConfig("empty resolution list".into()));
    }
    resolutions
        .iter()
        .map(|&r| {
            estimate(&ForecastConfig {
                horizontal_resolution_deg: r,
                ..template.clone()
            })
        })
        .collect()
}
