//! Simultaneous perturbation stochastic approximation.
//!
//! Gains follow Spall's standard form `a_k = a / (k + 1 + A)^alpha`,
//! `c_k = c / (k + 1)^gamma` with `k` counted from zero. Every step spends
//! exactly two objective evaluations; angles are wrapped into `[0, 2 pi)`
//! after each update.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// f64 math comes from libm through this trait under no_std
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// When a run counts as converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConvergenceRule {
    /// `|C_k - C_{k-1}| < tol` for `patience` consecutive iterations.
    /// Stops on the early plateaus of the local cost, often well above 0.1.
    SuccessiveDifference,
    /// `C_k < tol` for `patience` consecutive iterations.
    #[default]
    BelowTolerance,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SpsaConfig {
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`.
    pub stability: f64,
    /// Step-size numerator `a`.
    pub a: f64,
    /// Perturbation size `c`.
    pub c: f64,
    pub tol: f64,
    pub patience: usize,
    pub max_iter: usize,
    pub rule: ConvergenceRule,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            alpha: 0.602,
            gamma: 0.101,
            stability: 10.0,
            a: 4.0,
            c: 0.1,
            tol: 2e-2,
            patience: 5,
            max_iter: 500,
            rule: ConvergenceRule::BelowTolerance,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.alpha) || !positive(self.gamma) {
            return Err(Error::InvalidConfig(
                "alpha and gamma must be positive".into(),
            ));
        }
        if !positive(self.c) {
            return Err(Error::InvalidConfig("c must be positive".into()));
        }
        if !(self.stability >= 0.0) || !(self.a >= 0.0) {
            return Err(Error::InvalidConfig("A and a must be non-negative".into()));
        }
        if self.patience == 0 {
            return Err(Error::InvalidConfig("patience must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig("tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// Step and perturbation sizes `(a_k, c_k)` for iteration `k >= 0`.
pub fn gains(k: usize, cfg: &SpsaConfig) -> (f64, f64) {
    let k1 = k as f64 + 1.0;
    (
        cfg.a / (k1 + cfg.stability).powf(cfg.alpha),
        cfg.c / k1.powf(cfg.gamma),
    )
}

pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta % TAU;
    let r = if r < 0.0 { r + TAU } else { r };
    // -tiny % TAU + TAU can round up to TAU itself
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// One optimizer with its own perturbation stream.
#[derive(Debug, Clone)]
pub struct Spsa {
    cfg: SpsaConfig,
    rng: ChaCha8Rng,
    evaluations: usize,
}

/// Result of one SPSA step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub theta: Vec<f64>,
    /// `(C+ + C-) / 2`, the objective estimate available without an extra
    /// evaluation.
    pub cost: f64,
    pub cost_plus: f64,
    pub cost_minus: f64,
    pub perturbation: Vec<f64>,
}

impl Spsa {
    pub fn new(cfg: SpsaConfig) -> Result<Self> {
        cfg.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(Self {
            cfg,
            rng,
            evaluations: 0,
        })
    }

    pub fn config(&self) -> &SpsaConfig {
        &self.cfg
    }

    /// Objective evaluations spent by [`Spsa::step`] so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Rademacher draw: each component is `+1` or `-1` with equal odds.
    pub fn perturbation(&mut self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|_| if self.rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect()
    }

    pub fn step<E>(
        &mut self,
        theta: &[f64],
        k: usize,
        cost_fn: &mut impl FnMut(&[f64]) -> core::result::Result<f64, E>,
    ) -> core::result::Result<Step, E> {
        let (ak, ck) = gains(k, &self.cfg);
        let delta = self.perturbation(theta.len());
        let plus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let cost_plus = cost_fn(&plus)?;
        self.evaluations += 1;
        let cost_minus = cost_fn(&minus)?;
        self.evaluations += 1;
        let diff = cost_plus - cost_minus;
        let next = theta
            .iter()
            .zip(&delta)
            .map(|(t, d)| wrap_angle(t - ak * diff / (2.0 * ck * d)))
            .collect();
        Ok(Step {
            theta: next,
            cost: 0.5 * (cost_plus + cost_minus),
            cost_plus,
            cost_minus,
            perturbation: delta,
        })
    }
}

/// Per-iteration view handed to the observer of [`run`].
#[derive(Debug)]
pub struct Progress<'a> {
    /// 1-based iteration count; 0 for the initial point.
    pub iteration: usize,
    pub theta: &'a [f64],
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub theta: Vec<f64>,
    /// `cost_trace[0]` is the cost at the initial point, `cost_trace[k]` the
    /// estimate returned by step `k`.
    pub cost_trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Evaluations made inside steps, always `2 * iterations`.
    pub step_evaluations: usize,
}

/// Minimizes `cost_fn` from `theta_init`.
///
/// The initial point is evaluated once to seed the trace; after that each
/// iteration runs one [`Spsa::step`] and appends its estimate. The run stops
/// when the configured [`ConvergenceRule`] has held for `patience`
/// consecutive iterations, or after `max_iter` iterations.
pub fn run<E>(
    theta_init: &[f64],
    mut cost_fn: impl FnMut(&[f64]) -> core::result::Result<f64, E>,
    cfg: &SpsaConfig,
    mut observer: impl FnMut(&Progress<'_>),
) -> core::result::Result<Outcome, E>
where
    E: From<Error>,
{
    let mut opt = Spsa::new(cfg.clone())?;
    let mut theta: Vec<f64> = theta_init.to_vec();
    let initial = cost_fn(&theta)?;
    let mut trace = Vec::with_capacity(cfg.max_iter.min(4096) + 1);
    trace.push(initial);
    observer(&Progress {
        iteration: 0,
        theta: &theta,
        cost: initial,
    });

    let mut streak = 0usize;
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..cfg.max_iter {
        let step = opt.step(&theta, k, &mut cost_fn)?;
        theta = step.theta;
        let prev = *trace.last().expect("trace is seeded");
        trace.push(step.cost);
        iterations = k + 1;
        observer(&Progress {
            iteration: iterations,
            theta: &theta,
            cost: step.cost,
        });
        let ok = match cfg.rule {
            ConvergenceRule::SuccessiveDifference => (step.cost - prev).abs() < cfg.tol,
            ConvergenceRule::BelowTolerance => step.cost < cfg.tol,
        };
        streak = if ok { streak + 1 } else { 0 };
        if streak >= cfg.patience {
            converged = true;
            break;
        }
    }
    Ok(Outcome {
        theta,
        cost_trace: trace,
        converged,
        iterations,
        step_evaluations: opt.evaluations(),
    })
}
