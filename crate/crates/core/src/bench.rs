//! Seeded experiment runners: kernel statistics over random lattices and the
//! full-versus-reduced variational comparison, with CSV and JSON output.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::constraints_for;
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::MAX_QUBITS;
use crate::hnf::kernel_lattice;
use crate::lattice::{sample_basis, SymmetryKind};
use crate::oracle::kernel_stats;
use crate::spectral::{eigenvalues, fourier_basis};
use crate::vqe::{run_vqe, OptimizerConfig, DEFAULT_BUDGET};

pub const SCHEMA_VERSION: u32 = 1;
pub const WORKERS_ENV: &str = "SVP_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: SymmetryKind,
    pub n: usize,
    pub k: usize,
    pub lattice_count: usize,
    pub seed: u64,
    pub budget: usize,
    pub optimizer: OptimizerConfig,
}

impl ExperimentConfig {
    pub fn new(kind: SymmetryKind, n: usize, k: usize, lattice_count: usize, seed: u64) -> Self {
        ExperimentConfig {
            kind,
            n,
            k,
            lattice_count,
            seed,
            budget: DEFAULT_BUDGET,
            optimizer: OptimizerConfig::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lattice_count == 0 {
            return invalid("lattice count must be at least 1");
        }
        if self.n < 2 {
            return invalid(format!("lattice dimension must be at least 2, got {}", self.n));
        }
        if self.k == 0 {
            return invalid("K must be at least 1");
        }
        let required = self.n.saturating_mul(self.k);
        if required > MAX_QUBITS {
            return Err(Error::ResourceLimit {
                required,
                limit: MAX_QUBITS,
            });
        }
        Ok(())
    }

    fn lattice_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

/// Runs `f` on every lattice index, in parallel, returning results in index
/// order. The worker count comes from `SVP_WORKERS` when set.
fn run_indexed<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let workers = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0);
    let job = || (0..count).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?
            .install(job),
        None => job(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRecord {
    pub schema_version: u32,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub principal: usize,
    /// Dimension of the integer kernel of the principal operator.
    pub kernel_dim: usize,
    pub oracle_length_sq: f64,
    pub kernel_length_sq: Option<f64>,
    pub gamma: Option<f64>,
    pub in_kernel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Summary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub lattices: usize,
    /// Lattices with no nonzero kernel vector in the box (no γ).
    pub skipped: usize,
    pub fraction_gamma_1: f64,
    pub p90_gamma: Option<f64>,
    pub median_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Output {
    pub records: Vec<KernelRecord>,
    pub summary: Table1Summary,
}

/// Smallest value `v` of `values` with at least `fraction` of them `≤ v`.
pub fn percentile(values: &[f64], fraction: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&fraction) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((fraction * sorted.len() as f64).ceil() as usize).max(1);
    Some(sorted[rank - 1])
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

pub fn table1_experiment(cfg: &ExperimentConfig) -> Result<Table1Output> {
    cfg.validate()?;
    let fourier = fourier_basis(cfg.kind, cfg.n)?;
    let records = run_indexed(cfg.lattice_count, |i| {
        let seed = cfg.lattice_seed(i);
        let gram = sample_basis(cfg.kind, seed, cfg.n)?.gram();
        let spectrum = eigenvalues(&gram, &fourier)?;
        let stats = kernel_stats(&gram, &fourier, &spectrum, cfg.k)?;
        let kernel_dim = kernel_lattice(cfg.kind, cfg.n, spectrum.principal)?.dim();
        Ok(KernelRecord {
            schema_version: SCHEMA_VERSION,
            seed,
            n: cfg.n,
            k: cfg.k,
            principal: spectrum.principal,
            kernel_dim,
            oracle_length_sq: stats.oracle.length_sq,
            kernel_length_sq: stats.kernel_length_sq,
            gamma: stats.gamma,
            in_kernel: stats.in_kernel,
        })
    })?;
    let gammas: Vec<f64> = records.iter().filter_map(|r| r.gamma).collect();
    let hits = records.iter().filter(|r| r.in_kernel).count();
    let summary = Table1Summary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        lattices: records.len(),
        skipped: records.len() - gammas.len(),
        fraction_gamma_1: hits as f64 / records.len() as f64,
        p90_gamma: percentile(&gammas, 0.9),
        median_gamma: median(&gammas),
    };
    Ok(Table1Output { records, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub schema_version: u32,
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub principal: usize,
    /// Columns of the winning constraints matrix.
    pub kernel_dim: usize,
    pub constraints_origin: String,
    pub energy_full: f64,
    pub energy_reduced: f64,
    pub lambda: f64,
    pub qubits_full: usize,
    pub qubits_reduced: usize,
    pub vector_full: Vec<i64>,
    pub vector_reduced: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    /// `None` for the overflow bin.
    pub upper: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub lattices: usize,
    /// Lattices whose principal operator has no usable constraints matrix.
    pub skipped: usize,
    pub median_lambda: Option<f64>,
    pub fraction_lambda_lt_1: Option<f64>,
    pub mean_qubit_ratio: Option<f64>,
    pub histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutput {
    pub records: Vec<CompareRecord>,
    pub summary: CompareSummary,
}

pub const HISTOGRAM_WIDTH: f64 = 0.25;
pub const HISTOGRAM_BINS: usize = 12;

/// Bins of width [`HISTOGRAM_WIDTH`] from 0, plus one overflow bin.
pub fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let mut bins: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistogramBin {
            lower: i as f64 * HISTOGRAM_WIDTH,
            upper: Some((i + 1) as f64 * HISTOGRAM_WIDTH),
            count: 0,
        })
        .collect();
    bins.push(HistogramBin {
        lower: HISTOGRAM_BINS as f64 * HISTOGRAM_WIDTH,
        upper: None,
        count: 0,
    });
    for &v in values {
        let i = ((v / HISTOGRAM_WIDTH).floor().max(0.0) as usize).min(HISTOGRAM_BINS);
        bins[i].count += 1;
    }
    bins
}

/// Full and reduced variational runs on one lattice. `None` when the
/// principal operator has no constraints matrix that fits the simulator.
pub fn compare_lattice(cfg: &ExperimentConfig, seed: u64) -> Result<Option<CompareRecord>> {
    let basis = sample_basis(cfg.kind, seed, cfg.n)?;
    let gram = basis.gram();
    let fourier = fourier_basis(cfg.kind, cfg.n)?;
    let principal = eigenvalues(&gram, &fourier)?.principal;
    let candidates: Vec<_> = constraints_for(cfg.kind, cfg.n, principal)?
        .into_iter()
        .filter(|a| a.cols() > 0 && a.cols() * cfg.k <= MAX_QUBITS)
        .collect();
    if candidates.is_empty() {
        return Ok(None);
    }
    let full = run_vqe(&gram, None, cfg.k, seed, cfg.budget, &cfg.optimizer)?;
    let mut best: Option<(usize, crate::vqe::VqeResult)> = None;
    for (j, a) in candidates.iter().enumerate() {
        let stream = seed ^ ((j as u64 + 1) << 48);
        let r = run_vqe(&gram, Some(a), cfg.k, stream, cfg.budget, &cfg.optimizer)?;
        if best.as_ref().is_none_or(|(_, b)| r.energy < b.energy) {
            best = Some((j, r));
        }
    }
    let (j, reduced) = best.expect("at least one candidate");
    Ok(Some(CompareRecord {
        schema_version: SCHEMA_VERSION,
        seed,
        n: cfg.n,
        k: cfg.k,
        principal,
        kernel_dim: candidates[j].cols(),
        constraints_origin: candidates[j].origin.clone(),
        energy_full: full.energy,
        energy_reduced: reduced.energy,
        lambda: reduced.energy / full.energy,
        qubits_full: full.qubits_used,
        qubits_reduced: reduced.qubits_used,
        vector_full: full.lattice_vector,
        vector_reduced: reduced.lattice_vector,
    }))
}

pub fn compare_experiment(cfg: &ExperimentConfig) -> Result<CompareOutput> {
    cfg.validate()?;
    if cfg.budget == 0 {
        return invalid("iteration budget must be at least 1");
    }
    let results = run_indexed(cfg.lattice_count, |i| compare_lattice(cfg, cfg.lattice_seed(i)))?;
    let lattices = results.len();
    let records: Vec<CompareRecord> = results.into_iter().flatten().collect();
    let lambdas: Vec<f64> = records.iter().map(|r| r.lambda).collect();
    let (fraction, ratio) = if records.is_empty() {
        (None, None)
    } else {
        let count = records.len() as f64;
        let below = lambdas.iter().filter(|&&l| l < 1.0).count() as f64;
        let ratio: f64 = records
            .iter()
            .map(|r| r.qubits_full as f64 / r.qubits_reduced as f64)
            .sum();
        (Some(below / count), Some(ratio / count))
    };
    let summary = CompareSummary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        lattices,
        skipped: lattices - records.len(),
        median_lambda: median(&lambdas),
        fraction_lambda_lt_1: fraction,
        mean_qubit_ratio: ratio,
        histogram: histogram(&lambdas),
    };
    Ok(CompareOutput { records, summary })
}

pub fn write_csv<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct CompareRow<'a> {
    schema_version: u32,
    seed: u64,
    n: usize,
    k: usize,
    principal: usize,
    kernel_dim: usize,
    constraints_origin: &'a str,
    energy_full: f64,
    energy_reduced: f64,
    lambda: f64,
    qubits_full: usize,
    qubits_reduced: usize,
    vector_full: String,
    vector_reduced: String,
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

/// CSV rows with vectors flattened to space-separated integers.
pub fn compare_csv_rows(records: &[CompareRecord]) -> Vec<impl Serialize + '_> {
    records
        .iter()
        .map(|r| CompareRow {
            schema_version: r.schema_version,
            seed: r.seed,
            n: r.n,
            k: r.k,
            principal: r.principal,
            kernel_dim: r.kernel_dim,
            constraints_origin: &r.constraints_origin,
            energy_full: r.energy_full,
            energy_reduced: r.energy_reduced,
            lambda: r.lambda,
            qubits_full: r.qubits_full,
            qubits_reduced: r.qubits_reduced,
            vector_full: join(&r.vector_full),
            vector_reduced: join(&r.vector_reduced),
        })
        .collect()
}
