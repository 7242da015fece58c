//! Monte Carlo harness: sample, count, aggregate, compare, persist.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::k_constant::k_ell;
use crate::kac_rice::expected_zeros;
use crate::par::{self, Execution};
use crate::quadrature::QuadratureConfig;
use crate::schemes::{effective_basis, trial_seed, CoefficientSampler, CoefficientScheme, SchemeKind};
use crate::trig::CosinePolynomial;
use crate::zeros::{GridConfig, ZeroCounter};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_HEADER: [&str; 6] = ["trial", "seed", "n", "ell", "scheme", "zero_count"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scheme: CoefficientScheme,
    pub n: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub interval: (f64, f64),
    pub grid: GridConfig,
    /// Also integrate the Kac-Rice density for `theory_kacrice`.
    pub with_kacrice: bool,
    /// Worker threads; `None` uses the global pool. Never affects results.
    #[serde(skip)]
    pub workers: Option<usize>,
    #[serde(skip)]
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(scheme: CoefficientScheme, n: usize, trials: usize, master_seed: u64) -> Self {
        Self {
            scheme,
            n,
            trials,
            master_seed,
            interval: (0.0, 2.0 * PI),
            grid: GridConfig::default(),
            with_kacrice: false,
            workers: None,
            execution: Execution::default(),
        }
    }

    pub fn with_interval(mut self, a: f64, b: f64) -> Self {
        self.interval = (a, b);
        self
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_kacrice(mut self, on: bool) -> Self {
        self.with_kacrice = on;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        self.scheme.validate()?;
        self.grid.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub per_trial_counts: Vec<usize>,
    pub mean: f64,
    /// Unbiased sample standard deviation over `sqrt(trials)`.
    pub stderr: f64,
    pub theory_kacrice: Option<f64>,
    /// Large-`n` prediction for the count on `(0, 2 pi)`.
    pub theory_asymptotic: f64,
    #[serde(skip)]
    pub elapsed: f64,
}

/// Large-`n` expected zero count on `(0, 2 pi)` for `scheme`.
pub fn theory_asymptotic(scheme: &CoefficientScheme, n: usize) -> Result<f64> {
    let n = n as f64;
    let base = 2.0 * n / 3f64.sqrt();
    Ok(match scheme.kind {
        SchemeKind::Iid | SchemeKind::ContiguousEqualBlocks => base,
        SchemeKind::PalindromicBlocks if scheme.ell == 1 => n + n / 3f64.sqrt(),
        SchemeKind::PalindromicBlocks => base * k_ell(scheme.ell, &QuadratureConfig::default())?.value,
    })
}

pub fn mean_and_stderr(counts: &[usize]) -> (f64, f64) {
    let len = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / len;
    if counts.len() < 2 {
        return (mean, 0.0);
    }
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, (var / len).sqrt())
}

pub fn run_mc(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let sampler = CoefficientSampler::new(&cfg.scheme, cfg.n)?;
    let counter = ZeroCounter::new(cfg.n, cfg.grid)?;
    let counts: Vec<Result<usize>> = par::with_workers(cfg.workers, || {
        par::map_range(cfg.execution, 0..cfg.trials, |t| {
            let coeffs = sampler.sample(cfg.master_seed, t as u64);
            let poly = CosinePolynomial::new(coeffs)?;
            counter.count(&poly, cfg.interval)
        })
    })?;
    let per_trial_counts = counts.into_iter().collect::<Result<Vec<_>>>()?;
    let (mean, stderr) = mean_and_stderr(&per_trial_counts);
    let theory_kacrice = if cfg.with_kacrice {
        let basis = effective_basis(&cfg.scheme, cfg.n)?;
        let qcfg = QuadratureConfig::default().with_execution(cfg.execution);
        Some(expected_zeros(&basis, cfg.interval, &qcfg)?.value)
    } else {
        None
    };
    Ok(ExperimentResult {
        config: cfg.clone(),
        per_trial_counts,
        mean,
        stderr,
        theory_kacrice,
        theory_asymptotic: theory_asymptotic(&cfg.scheme, cfg.n)?,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryComparison {
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub kacrice: Option<f64>,
    pub asymptote: f64,
    pub z_score_vs_kacrice: Option<f64>,
    pub rel_dev_vs_asymptote: f64,
}

pub fn compare_with_theory(result: &ExperimentResult, kacrice: Option<f64>) -> TheoryComparison {
    let kacrice = kacrice.or(result.theory_kacrice);
    TheoryComparison {
        mc_mean: result.mean,
        mc_stderr: result.stderr,
        kacrice,
        asymptote: result.theory_asymptotic,
        z_score_vs_kacrice: kacrice.map(|k| (result.mean - k) / result.stderr),
        rel_dev_vs_asymptote: result.mean / result.theory_asymptotic - 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Serialize)]
struct ConfigEcho<'a> {
    scheme: SchemeKind,
    ell: usize,
    sigma: f64,
    n: usize,
    trials: usize,
    master_seed: u64,
    interval: [f64; 2],
    grid: &'a GridConfig,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    config: ConfigEcho<'a>,
    mean: f64,
    stderr: f64,
    theory_kacrice: Option<f64>,
    theory_asymptotic: f64,
    per_trial_file: String,
    version: &'static str,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Writes the per-trial CSV and the JSON summary.
///
/// `Csv` puts the table at `path` and the summary beside it with a `.json`
/// extension; `Json` puts the summary at `path` and the table at `.csv`.
/// Returns `(csv_path, json_path)`.
pub fn write_results(result: &ExperimentResult, path: &Path, format: OutputFormat) -> Result<(PathBuf, PathBuf)> {
    let (csv_path, json_path) = match format {
        OutputFormat::Csv => (path.to_path_buf(), path.with_extension("json")),
        OutputFormat::Json => (path.with_extension("csv"), path.to_path_buf()),
    };
    write_counts_csv(result, &csv_path)?;

    let cfg = &result.config;
    let summary = Summary {
        config: ConfigEcho {
            scheme: cfg.scheme.kind,
            ell: cfg.scheme.reported_ell(),
            sigma: cfg.scheme.sigma,
            n: cfg.n,
            trials: cfg.trials,
            master_seed: cfg.master_seed,
            interval: [cfg.interval.0, cfg.interval.1],
            grid: &cfg.grid,
        },
        mean: result.mean,
        stderr: result.stderr,
        theory_kacrice: result.theory_kacrice,
        theory_asymptotic: result.theory_asymptotic,
        per_trial_file: csv_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        version: VERSION,
    };
    let file = File::create(&json_path).map_err(io_err(&json_path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &summary).map_err(|source| Error::Json { path: json_path.clone(), source })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(&json_path))?;
    Ok((csv_path, json_path))
}

fn write_counts_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let cfg = &result.config;
    let ell = cfg.scheme.reported_ell().to_string();
    let n = cfg.n.to_string();
    for (t, &count) in result.per_trial_counts.iter().enumerate() {
        let seed = trial_seed(cfg.master_seed, t as u64).to_string();
        w.write_record([t.to_string().as_str(), &seed, &n, &ell, cfg.scheme.kind.name(), &count.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads the `zero_count` column of a per-trial CSV, in trial order.
pub fn read_counts_csv(path: &Path) -> Result<Vec<usize>> {
    #[derive(Deserialize)]
    struct Row {
        trial: usize,
        zero_count: usize,
    }
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut rows: Vec<Row> = r.deserialize().collect::<std::result::Result<_, _>>().map_err(csv_err)?;
    rows.sort_by_key(|row| row.trial);
    Ok(rows.into_iter().map(|row| row.zero_count).collect())
}
