//! The five subcommands. Each one is a plain function so that tests can
//! drive them without spawning the binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vqls_core::linalg::ComplexMatrix;
use vqls_core::pauli::{decompose, DEFAULT_PRUNE_EPS};
use vqls_core::problem::{
    analytic_solution, build_block_system, classical_solve, relative_error, rmse, ProblemSpec,
};
use vqls_core::resources::{sweep, ForecastConfig, SweepRow};
use vqls_core::vqls::{circuit_count, solve, within_submission_limit, SolveRecord, SymmetryMode};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Scientific notation with 17 significant digits, enough to round-trip
/// any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn member_file(member: usize) -> String {
    format!("member_{member:03}.json")
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::json(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path, e))
}

/// Writes a header and rows of preformatted cells.
pub fn write_table<W: Write>(
    sink: W,
    label: &Path,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)
        .map_err(|e| CliError::csv(label, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::csv(label, e))?;
    }
    w.flush().map_err(|e| CliError::io(label, e))
}

fn write_csv_file(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_table(file, path, &header, rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSummary {
    pub member: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub final_cost: f64,
    /// Smallest exact cost over all recorded iterates.
    pub min_exact_cost: f64,
    pub rmse: Vec<f64>,
    pub relative_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub ensemble_size: usize,
    pub converged_members: usize,
    pub times: Vec<f64>,
    /// Member-averaged fields, one vector per solution time.
    pub mean_fields: Vec<Vec<f64>>,
    pub reference: Vec<Vec<f64>>,
    pub ensemble_rmse: Vec<f64>,
    pub ensemble_relative_error: Vec<f64>,
    pub members: Vec<MemberSummary>,
}

fn reference_rows(times: &[f64], x: &[f64], fields: &[Vec<f64>]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (t, u) in times.iter().zip(fields) {
        for (j, (xj, uj)) in x.iter().zip(u).enumerate() {
            rows.push(vec![num(*t), j.to_string(), num(*xj), num(*uj)]);
        }
    }
    rows
}

/// Classical forward-Euler and analytic fields at `t = 0, dt, 2 dt, ...`.
fn write_references(problem: &ProblemSpec, out: &Path) -> Result<Vec<Vec<f64>>> {
    let sys = build_block_system(problem)?;
    let mut times = vec![0.0];
    times.extend(problem.solution_times());
    let mut classical = vec![sys.u0.clone()];
    classical.extend(sys.split_blocks(&classical_solve(&sys)?));
    let analytic = times
        .iter()
        .map(|&t| analytic_solution(problem, t))
        .collect::<vqls_core::Result<Vec<_>>>()?;
    let x = problem.grid();
    let header = ["time", "point", "x", "u"];
    write_csv_file(
        &out.join("classical.csv"),
        &header,
        &reference_rows(&times, &x, &classical),
    )?;
    write_csv_file(
        &out.join("analytic.csv"),
        &header,
        &reference_rows(&times, &x, &analytic),
    )?;
    Ok(analytic)
}

fn run_members(cfg: &RunConfig, out: &Path) -> Result<Vec<SolveRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..cfg.ensemble_size)
            .into_par_iter()
            .map(|member| {
                let record = solve(&cfg.problem, &cfg.solve_options(member))?;
                write_json(&out.join(member_file(member)), &record)?;
                Ok(record)
            })
            .collect()
    })
}

/// Runs the ensemble described by `cfg` and writes every output into `out`.
/// Returns `None` when `cfg.classical_only` is set.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<Option<SolveSummary>> {
    cfg.validate()?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let analytic = write_references(&cfg.problem, out)?;
    let mut files = vec!["classical.csv".to_string(), "analytic.csv".to_string()];

    let summary = if cfg.classical_only {
        None
    } else {
        let records = run_members(cfg, out)?;
        files.extend((0..records.len()).map(member_file));
        let summary = summarize(&records)?;
        write_ensemble_files(cfg, out, &records, &summary, &analytic)?;
        files.extend(
            ["ensemble_mean.csv", "rmse.csv", "summary.json"]
                .iter()
                .map(|s| s.to_string()),
        );
        Some(summary)
    };

    let manifest = Manifest {
        tool: "vqls".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "solve".into(),
        config: cfg.clone(),
        files,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(summary)
}

pub fn summarize(records: &[SolveRecord]) -> Result<SolveSummary> {
    let first = records
        .first()
        .ok_or_else(|| CliError::Config("empty ensemble".into()))?;
    let count = records.len() as f64;
    let mean_fields: Vec<Vec<f64>> = (0..first.u_fields.len())
        .map(|t| {
            (0..first.u_fields[t].len())
                .map(|j| records.iter().map(|r| r.u_fields[t][j]).sum::<f64>() / count)
                .collect()
        })
        .collect();
    let reference = first.reference.clone();
    let ensemble_rmse = mean_fields
        .iter()
        .zip(&reference)
        .map(|(u, r)| rmse(u, r))
        .collect::<vqls_core::Result<Vec<_>>>()?;
    let ensemble_relative_error = mean_fields
        .iter()
        .zip(&reference)
        .map(|(u, r)| relative_error(u, r))
        .collect::<vqls_core::Result<Vec<_>>>()?;
    let members = records
        .iter()
        .enumerate()
        .map(|(member, r)| MemberSummary {
            member,
            seed: r.seed,
            iterations: r.iterations,
            converged: r.converged,
            final_cost: r.final_cost,
            min_exact_cost: r
                .exact_cost_trace
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min),
            rmse: r.rmse_per_time.clone(),
            relative_error: r.relative_error_per_time.clone(),
        })
        .collect();
    Ok(SolveSummary {
        ensemble_size: records.len(),
        converged_members: records.iter().filter(|r| r.converged).count(),
        times: first.times.clone(),
        mean_fields,
        reference,
        ensemble_rmse,
        ensemble_relative_error,
        members,
    })
}

fn write_ensemble_files(
    cfg: &RunConfig,
    out: &Path,
    records: &[SolveRecord],
    summary: &SolveSummary,
    analytic: &[Vec<f64>],
) -> Result<()> {
    let x = cfg.problem.grid();
    let n = records.len() as f64;
    let mut rows = Vec::new();
    for (t, time) in summary.times.iter().enumerate() {
        for (j, xj) in x.iter().enumerate() {
            let mean = summary.mean_fields[t][j];
            let var = if records.len() > 1 {
                records
                    .iter()
                    .map(|r| (r.u_fields[t][j] - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0)
            } else {
                0.0
            };
            rows.push(vec![
                num(*time),
                j.to_string(),
                num(*xj),
                num(mean),
                num(var.sqrt()),
                num(summary.reference[t][j]),
                // analytic[0] is t = 0
                num(analytic[t + 1][j]),
            ]);
        }
    }
    write_csv_file(
        &out.join("ensemble_mean.csv"),
        &[
            "time",
            "point",
            "x",
            "u_mean",
            "u_std",
            "classical",
            "analytic",
        ],
        &rows,
    )?;

    let mut rows = Vec::new();
    for m in &summary.members {
        for (t, time) in summary.times.iter().enumerate() {
            rows.push(vec![
                "member".into(),
                m.member.to_string(),
                m.seed.to_string(),
                num(*time),
                num(m.rmse[t]),
                num(m.relative_error[t]),
            ]);
        }
    }
    for (t, time) in summary.times.iter().enumerate() {
        rows.push(vec![
            "ensemble_mean".into(),
            String::new(),
            String::new(),
            num(*time),
            num(summary.ensemble_rmse[t]),
            num(summary.ensemble_relative_error[t]),
        ]);
    }
    write_csv_file(
        &out.join("rmse.csv"),
        &["scope", "member", "seed", "time", "rmse", "relative_rmse"],
        &rows,
    )?;
    write_json(&out.join("summary.json"), summary)
}

pub fn trace_file(member: usize) -> String {
    format!("trace_{member:03}.csv")
}

/// Per-iteration cost and field values of one member, with the classical
/// fields repeated on every row.
pub fn cmd_trace(run_dir: &Path, member: usize, out: &Path) -> Result<PathBuf> {
    let manifest_path = run_dir.join("manifest.json");
    let manifest: Manifest = read_json(&manifest_path)?;
    if member >= manifest.config.ensemble_size {
        return Err(CliError::Config(format!(
            "member {member} out of range for an ensemble of {}",
            manifest.config.ensemble_size
        )));
    }
    let record_path = run_dir.join(member_file(member));
    if !record_path.is_file() {
        return Err(CliError::MissingMember {
            member,
            path: record_path,
        });
    }
    let record: SolveRecord = read_json(&record_path)?;

    let mut header = vec!["iteration".to_string(), "cost".into(), "exact_cost".into()];
    for prefix in ["u", "ref"] {
        for (t, fields) in record.reference.iter().enumerate() {
            for j in 0..fields.len() {
                header.push(format!("{prefix}_t{}_p{}", t + 1, j + 1));
            }
        }
    }
    let reference: Vec<String> = record.reference.concat().into_iter().map(num).collect();
    let rows: Vec<Vec<String>> = record
        .cost_trace
        .iter()
        .zip(&record.exact_cost_trace)
        .zip(&record.solution_trace)
        .enumerate()
        .map(|(k, ((cost, exact), fields))| {
            let mut row = vec![k.to_string(), num(*cost), num(*exact)];
            row.extend(fields.iter().map(|v| num(*v)));
            row.extend(reference.iter().cloned());
            row
        })
        .collect();

    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let path = out.join(trace_file(member));
    let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_table(file, &path, &header, &rows)?;
    Ok(path)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Rows(Vec<Vec<Entry>>),
    Object { rows: Vec<Vec<Entry>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub qubits: usize,
    pub terms: Vec<TermJson>,
}

/// Reads a square matrix from JSON: either an array of rows or
/// `{"rows": [...]}`, entries real numbers or `{"re": .., "im": ..}`.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let parsed: MatrixFile = read_json(path)?;
    let rows = match parsed {
        MatrixFile::Rows(r) | MatrixFile::Object { rows: r } => r,
    };
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input {
            path: path.into(),
            reason: "matrix must be square and non-empty".into(),
        });
    }
    let data = rows
        .into_iter()
        .flatten()
        .map(|e| match e {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex { re, im } => Complex64::new(re, im),
        })
        .collect();
    Ok(ComplexMatrix::from_row_major(n, n, data)?)
}

/// Pauli decomposition of the matrix in `input`, or of the reduced system
/// matrix of `problem` when no file is given.
pub fn cmd_decompose(
    input: Option<&Path>,
    problem: &ProblemSpec,
    prune_eps: Option<f64>,
) -> Result<DecompositionJson> {
    let matrix = match input {
        Some(path) => read_matrix(path)?,
        None => build_block_system(problem)?.a_reduced.to_complex(),
    };
    let d = decompose(&matrix, prune_eps.unwrap_or(DEFAULT_PRUNE_EPS))?;
    Ok(DecompositionJson {
        qubits: d.qubits(),
        terms: d
            .terms()
            .iter()
            .map(|t| TermJson {
                label: t.label(),
                re: t.coefficient.re,
                im: t.coefficient.im,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircuitRow {
    pub terms: u64,
    pub baseline: u64,
    pub beta_sym: u64,
    pub full_sym: u64,
}

impl CircuitRow {
    pub fn count(&self, mode: SymmetryMode) -> u64 {
        match mode {
            SymmetryMode::Baseline => self.baseline,
            SymmetryMode::BetaSymmetric => self.beta_sym,
            SymmetryMode::FullSymmetric => self.full_sym,
        }
    }
}

pub fn cmd_circuits(qubits: u64, max_terms: u64) -> Result<Vec<CircuitRow>> {
    if qubits == 0 || max_terms == 0 {
        return Err(CliError::Config(
            "qubits and max terms must be at least 1".into(),
        ));
    }
    Ok((1..=max_terms)
        .map(|l| CircuitRow {
            terms: l,
            baseline: circuit_count(qubits, l, SymmetryMode::Baseline),
            beta_sym: circuit_count(qubits, l, SymmetryMode::BetaSymmetric),
            full_sym: circuit_count(qubits, l, SymmetryMode::FullSymmetric),
        })
        .collect())
}

pub fn circuits_table(rows: &[CircuitRow]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["terms".to_string()];
    for mode in SymmetryMode::ALL {
        header.push(mode.name().into());
    }
    for mode in SymmetryMode::ALL {
        header.push(format!("{}_submittable", mode.name()));
    }
    let body = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.terms.to_string()];
            row.extend(SymmetryMode::ALL.iter().map(|&m| r.count(m).to_string()));
            row.extend(
                SymmetryMode::ALL
                    .iter()
                    .map(|&m| within_submission_limit(r.count(m)).to_string()),
            );
            row
        })
        .collect();
    (header, body)
}

pub fn cmd_estimate(cfg: &ForecastConfig, resolutions: &[f64]) -> Result<Vec<SweepRow>> {
    if resolutions.is_empty() {
        return Ok(sweep(cfg, &[cfg.horizontal_resolution_deg])?);
    }
    Ok(sweep(cfg, resolutions)?)
}

pub fn estimate_table(rows: &[SweepRow]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["resolution_deg", "dt_s", "n_t", "n", "dimension", "qubits"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let body = rows
        .iter()
        .map(|r| {
            vec![
                num(r.resolution_deg),
                num(r.dt_s),
                r.time_levels.to_string(),
                r.unknowns.to_string(),
                r.dimension.to_string(),
                r.qubits.to_string(),
            ]
        })
        .collect();
    (header, body)
}
