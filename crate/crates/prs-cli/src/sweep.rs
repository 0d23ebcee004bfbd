//! The Monte Carlo sweep: iterate the exponent grid, run every algorithm's
//! trials on a worker pool, and emit a per-trial CSV plus a JSON summary
//! with per-cell success rates.

use crate::config::{config_hash, SweepConfig};
use crate::trial::{run_trial, Algorithm, ModelSide, TrialRecord, CSV_COLUMNS};
use prs::model::ModelParams;
use prs::rng::derive_seed;
use serde::Serialize;
use std::io::Write;
use std::sync::Mutex;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One unit of work, identified by its global row index; the per-trial seed
/// is derived from the base seed and that index.
#[derive(Debug, Clone)]
pub struct Job {
    pub index: usize,
    pub cell: CellKey,
    pub params: ModelParams,
    pub algorithm: Algorithm,
    pub side: ModelSide,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Expand the grid into jobs, in the deterministic order
/// `n -> alpha -> beta -> gamma -> algorithm -> trial -> side`. Detection
/// algorithms run on a null and a planted sample per trial; recovery
/// algorithms on a planted sample only.
pub fn build_jobs(config: &SweepConfig, base_seed: u64) -> Result<Vec<Job>, String> {
    let algorithms = config.parsed_algorithms();
    let mut jobs = Vec::new();
    for &n in &config.n {
        for alpha in config.alpha.values() {
            for beta in config.beta.values() {
                for gamma in config.gamma.values() {
                    let params =
                        ModelParams::from_exponents(n, alpha, beta, gamma).map_err(|e| {
                            format!("cell n={n} alpha={alpha} beta={beta} gamma={gamma}: {e}")
                        })?;
                    let cell = CellKey {
                        n,
                        alpha,
                        beta,
                        gamma,
                    };
                    for algorithm in &algorithms {
                        let sides: &[ModelSide] = if algorithm.is_detection() {
                            &[ModelSide::Null, ModelSide::Planted]
                        } else {
                            &[ModelSide::Planted]
                        };
                        for _trial in 0..config.trials {
                            for &side in sides {
                                let index = jobs.len();
                                jobs.push(Job {
                                    index,
                                    cell,
                                    params,
                                    algorithm: *algorithm,
                                    side,
                                    seed: derive_seed(base_seed, index as u64),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(jobs)
}

/// Row count the grid must produce: cells x trials x (2 per detection
/// algorithm for the null and planted sides, 1 per recovery algorithm).
pub fn expected_rows(config: &SweepConfig) -> usize {
    let cells = config.n.len()
        * config.alpha.values().len()
        * config.beta.values().len()
        * config.gamma.values().len();
    let per_trial: usize = config
        .parsed_algorithms()
        .iter()
        .map(|a| if a.is_detection() { 2 } else { 1 })
        .sum();
    cells * config.trials * per_trial
}

/// Run all jobs on a worker pool; results come back in index order
/// regardless of completion order.
pub fn run_jobs(jobs: &[Job], workers: usize) -> Vec<TrialRecord> {
    let workers = workers.max(1).min(jobs.len().max(1));
    let results: Mutex<Vec<Option<TrialRecord>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for w in 0..workers {
            let results = &results;
            scope.spawn(move || {
                for job in jobs.iter().skip(w).step_by(workers) {
                    let record = run_trial(&job.params, &job.algorithm, job.side, job.seed);
                    results.lock().unwrap()[job.index] = Some(record);
                }
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

#[derive(Debug, Serialize)]
pub struct DetectionSummary {
    pub null_rows: usize,
    pub planted_rows: usize,
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
    pub total_error: f64,
}

#[derive(Debug, Serialize)]
pub struct RecoverySummary {
    pub rows: usize,
    pub exact: usize,
    pub exact_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_norm_hamming: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_norm_kt: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct AlgoSummary {
    pub algorithm: String,
    pub rows: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RecoverySummary>,
}

#[derive(Debug, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k: f64,
    pub p: f64,
    pub q: f64,
    pub algorithms: Vec<AlgoSummary>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub version: String,
    pub config_hash: String,
    pub base_seed: u64,
    pub total_rows: usize,
    pub expected_rows: usize,
    pub cells: Vec<CellSummary>,
}

pub fn summarize(
    config: &SweepConfig,
    base_seed: u64,
    jobs: &[Job],
    records: &[TrialRecord],
) -> Summary {
    let mut cells: Vec<CellSummary> = Vec::new();
    let algorithms = config.parsed_algorithms();
    for (job, record) in jobs.iter().zip(records.iter()) {
        let cell = match cells.iter_mut().find(|c| {
            c.n == job.cell.n
                && c.alpha == job.cell.alpha
                && c.beta == job.cell.beta
                && c.gamma == job.cell.gamma
        }) {
            Some(c) => c,
            None => {
                cells.push(CellSummary {
                    n: job.cell.n,
                    alpha: job.cell.alpha,
                    beta: job.cell.beta,
                    gamma: job.cell.gamma,
                    k: job.params.k(),
                    p: job.params.p(),
                    q: job.params.q(),
                    algorithms: algorithms
                        .iter()
                        .map(|a| AlgoSummary {
                            algorithm: a.id(),
                            rows: 0,
                            failures: 0,
                            detection: None,
                            recovery: None,
                        })
                        .collect(),
                });
                cells.last_mut().unwrap()
            }
        };
        let algo = cell
            .algorithms
            .iter_mut()
            .find(|a| a.algorithm == record.algorithm)
            .expect("every record's algorithm is configured");
        algo.rows += 1;
        if record.status != "ok" {
            algo.failures += 1;
        }
        if job.algorithm.is_detection() {
            let det = algo.detection.get_or_insert(DetectionSummary {
                null_rows: 0,
                planted_rows: 0,
                false_positive_rate: 0.0,
                false_negative_rate: 0.0,
                total_error: 0.0,
            });
            // Accumulate counts; rates are normalized afterwards.
            match job.side {
                ModelSide::Null => {
                    det.null_rows += 1;
                    if record.decision.as_deref() == Some("planted") {
                        det.false_positive_rate += 1.0;
                    }
                }
                ModelSide::Planted => {
                    det.planted_rows += 1;
                    if record.decision.as_deref() != Some("planted") {
                        det.false_negative_rate += 1.0;
                    }
                }
            }
        } else {
            let rec = algo.recovery.get_or_insert(RecoverySummary {
                rows: 0,
                exact: 0,
                exact_rate: 0.0,
                mean_norm_hamming: None,
                mean_norm_kt: None,
            });
            rec.rows += 1;
            let exact = record.status == "ok"
                && record.d_kt == Some(0)
                && record.d_hamming.is_none_or(|d| d == 0);
            if exact {
                rec.exact += 1;
            }
            if let Some(nh) = record.norm_hamming {
                *rec.mean_norm_hamming.get_or_insert(0.0) += nh;
            }
            if let Some(nk) = record.norm_kt {
                *rec.mean_norm_kt.get_or_insert(0.0) += nk;
            }
        }
    }
    for cell in &mut cells {
        for algo in &mut cell.algorithms {
            if let Some(det) = &mut algo.detection {
                if det.null_rows > 0 {
                    det.false_positive_rate /= det.null_rows as f64;
                }
                if det.planted_rows > 0 {
                    det.false_negative_rate /= det.planted_rows as f64;
                }
                det.total_error = det.false_positive_rate + det.false_negative_rate;
            }
            if let Some(rec) = &mut algo.recovery {
                if rec.rows > 0 {
                    rec.exact_rate = rec.exact as f64 / rec.rows as f64;
                    if let Some(m) = &mut rec.mean_norm_hamming {
                        *m /= rec.rows as f64;
                    }
                    if let Some(m) = &mut rec.mean_norm_kt {
                        *m /= rec.rows as f64;
                    }
                }
            }
        }
    }
    let expected = expected_rows(config);
    assert_eq!(
        records.len(),
        expected,
        "job expansion disagrees with the grid"
    );
    Summary {
        version: ARTIFACT_VERSION.to_string(),
        config_hash: format!("{:016x}", config_hash(config)),
        base_seed,
        total_rows: records.len(),
        expected_rows: expected,
        cells,
    }
}

/// Write the per-trial CSV: a `#` header block (artifact version, config
/// hash, base seed), the column row, then one row per trial in index order.
pub fn write_csv<W: Write>(
    w: &mut W,
    config: &SweepConfig,
    base_seed: u64,
    records: &[TrialRecord],
) -> std::io::Result<()> {
    writeln!(w, "# prs-sweep v{ARTIFACT_VERSION}")?;
    writeln!(w, "# config_hash {:016x}", config_hash(config))?;
    writeln!(w, "# base_seed {base_seed}")?;
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    for record in records {
        writeln!(w, "{}", record.to_csv_row())?;
    }
    Ok(())
}

/// Parse a sweep CSV back into records, skipping the header block.
pub fn parse_csv(text: &str) -> Result<Vec<TrialRecord>, String> {
    let mut rows = Vec::new();
    let mut saw_columns = false;
    for line in text.lines() {
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !saw_columns {
            if line != CSV_COLUMNS.join(",") {
                return Err(format!("unexpected column header '{line}'"));
            }
            saw_columns = true;
            continue;
        }
        rows.push(TrialRecord::parse_csv_row(line)?);
    }
    Ok(rows)
}
