//! One Monte Carlo trial: sample a model, run an algorithm, score the
//! outcome. Failures become explicit rows, never dropped.

use prs::detect::{run_detection, StatKind};
use prs::metrics::{hamming, kendall_tau};
use prs::model::{sample_null, sample_planted, ModelParams};
use prs::recover::{
    mle_recover, ordered_clique_recover, ordered_clique_recover_enhanced, ranking_by_wins,
    spectral_recover,
};
use prs::spectral::PowerOpts;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Degree2,
    SpectralDetect,
    Exhaustive,
    RankingByWins,
    SpectralRecover,
    Mle,
    OrderedClique,
    /// Guess-augmented ordered-clique recovery with the given guess size.
    OrderedCliqueEnhanced(usize),
}

impl Algorithm {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "degree2" => Ok(Algorithm::Degree2),
            "spectral" => Ok(Algorithm::SpectralDetect),
            "exhaustive" => Ok(Algorithm::Exhaustive),
            "rbw" => Ok(Algorithm::RankingByWins),
            "spectral_recover" => Ok(Algorithm::SpectralRecover),
            "mle" => Ok(Algorithm::Mle),
            "ordered_clique" => Ok(Algorithm::OrderedClique),
            other => {
                if let Some(b) = other.strip_prefix("ordered_clique_enhanced:") {
                    let b: usize = b
                        .parse()
                        .map_err(|_| format!("bad guess size in '{other}'"))?;
                    return Ok(Algorithm::OrderedCliqueEnhanced(b));
                }
                if other == "ordered_clique_enhanced" {
                    return Ok(Algorithm::OrderedCliqueEnhanced(1));
                }
                Err(format!(
                    "unknown algorithm '{other}' (expected degree2, spectral, exhaustive, rbw, \
                     spectral_recover, mle, ordered_clique, ordered_clique_enhanced[:b])"
                ))
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            Algorithm::Degree2 => "degree2".into(),
            Algorithm::SpectralDetect => "spectral".into(),
            Algorithm::Exhaustive => "exhaustive".into(),
            Algorithm::RankingByWins => "rbw".into(),
            Algorithm::SpectralRecover => "spectral_recover".into(),
            Algorithm::Mle => "mle".into(),
            Algorithm::OrderedClique => "ordered_clique".into(),
            Algorithm::OrderedCliqueEnhanced(b) => format!("ordered_clique_enhanced:{b}"),
        }
    }

    pub fn is_detection(&self) -> bool {
        matches!(
            self,
            Algorithm::Degree2 | Algorithm::SpectralDetect | Algorithm::Exhaustive
        )
    }

    pub fn detect_kind(&self) -> Option<StatKind> {
        match self {
            Algorithm::Degree2 => Some(StatKind::Degree2),
            Algorithm::SpectralDetect => Some(StatKind::Spectral),
            Algorithm::Exhaustive => Some(StatKind::Exhaustive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSide {
    Null,
    Planted,
}

impl ModelSide {
    pub fn id(&self) -> &'static str {
        match self {
            ModelSide::Null => "null",
            ModelSide::Planted => "planted",
        }
    }
}

/// One output row. Detection rows carry `statistic`/`threshold`/`decision`;
/// recovery rows carry the distances and normalized errors (clamped to
/// `[0, 1]`). `status` is `ok` or `failed(<reason>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: String,
    pub n: usize,
    pub k: f64,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub model: String,
    pub statistic: Option<f64>,
    pub threshold: Option<f64>,
    pub decision: Option<String>,
    pub d_hamming: Option<u64>,
    pub d_kt: Option<u64>,
    pub norm_hamming: Option<f64>,
    pub norm_kt: Option<f64>,
    pub eig_iterations: Option<usize>,
    pub status: String,
}

pub const CSV_COLUMNS: &[&str] = &[
    "algorithm",
    "n",
    "k",
    "p",
    "q",
    "seed",
    "model",
    "statistic",
    "threshold",
    "decision",
    "d_hamming",
    "d_kt",
    "norm_hamming",
    "norm_kt",
    "eig_iterations",
    "status",
];

impl TrialRecord {
    fn blank(params: &ModelParams, algorithm: &Algorithm, side: ModelSide, seed: u64) -> Self {
        TrialRecord {
            algorithm: algorithm.id(),
            n: params.n(),
            k: params.k(),
            p: params.p(),
            q: params.q(),
            seed,
            model: side.id().into(),
            statistic: None,
            threshold: None,
            decision: None,
            d_hamming: None,
            d_kt: None,
            norm_hamming: None,
            norm_kt: None,
            eig_iterations: None,
            status: "ok".into(),
        }
    }

    pub fn to_csv_row(&self) -> String {
        fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        [
            self.algorithm.clone(),
            self.n.to_string(),
            self.k.to_string(),
            self.p.to_string(),
            self.q.to_string(),
            self.seed.to_string(),
            self.model.clone(),
            opt(&self.statistic),
            opt(&self.threshold),
            opt(&self.decision),
            opt(&self.d_hamming),
            opt(&self.d_kt),
            opt(&self.norm_hamming),
            opt(&self.norm_kt),
            opt(&self.eig_iterations),
            self.status.clone(),
        ]
        .join(",")
    }

    pub fn parse_csv_row(line: &str) -> Result<TrialRecord, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_COLUMNS.len() {
            return Err(format!(
                "expected {} fields, got {}",
                CSV_COLUMNS.len(),
                fields.len()
            ));
        }
        fn opt<T: std::str::FromStr>(s: &str, name: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<T>()
                .map(Some)
                .map_err(|_| format!("bad {name} field '{s}'"))
        }
        Ok(TrialRecord {
            algorithm: fields[0].to_string(),
            n: fields[1].parse().map_err(|_| "bad n field".to_string())?,
            k: fields[2].parse().map_err(|_| "bad k field".to_string())?,
            p: fields[3].parse().map_err(|_| "bad p field".to_string())?,
            q: fields[4].parse().map_err(|_| "bad q field".to_string())?,
            seed: fields[5]
                .parse()
                .map_err(|_| "bad seed field".to_string())?,
            model: fields[6].to_string(),
            statistic: opt(fields[7], "statistic")?,
            threshold: opt(fields[8], "threshold")?,
            decision: if fields[9].is_empty() {
                None
            } else {
                Some(fields[9].to_string())
            },
            d_hamming: opt(fields[10], "d_hamming")?,
            d_kt: opt(fields[11], "d_kt")?,
            norm_hamming: opt(fields[12], "norm_hamming")?,
            norm_kt: opt(fields[13], "norm_kt")?,
            eig_iterations: opt(fields[14], "eig_iterations")?,
            status: fields[15].to_string(),
        })
    }
}

fn failure_status(err: impl std::fmt::Display) -> String {
    let mut msg = err.to_string();
    msg.retain(|c| c != ',' && c != '\n');
    if msg.len() > 120 {
        msg.truncate(120);
    }
    format!("failed({msg})")
}

/// Sample the requested model side, run the algorithm, and score the result
/// against the sampled ground truth. Pure given `(params, algorithm, side,
/// trial_seed)`.
pub fn run_trial(
    params: &ModelParams,
    algorithm: &Algorithm,
    side: ModelSide,
    trial_seed: u64,
) -> TrialRecord {
    let mut record = TrialRecord::blank(params, algorithm, side, trial_seed);
    let opts = PowerOpts::with_seed(trial_seed);
    if let Some(kind) = algorithm.detect_kind() {
        let graph = match side {
            ModelSide::Null => sample_null(params, trial_seed),
            ModelSide::Planted => sample_planted(params, trial_seed).graph,
        };
        match run_detection(&graph, params, kind, &opts) {
            Ok(report) => {
                record.statistic = Some(report.statistic_value);
                record.threshold = Some(report.threshold);
                record.decision = Some(report.decision.to_string());
                record.eig_iterations = report.eig_iterations;
            }
            Err(e) => record.status = failure_status(e),
        }
        return record;
    }
    // Recovery algorithms run against the planted model only.
    let inst = sample_planted(params, trial_seed);
    let k = params.k();
    let estimate = match algorithm {
        Algorithm::RankingByWins => Ok(prs::metrics::RankingEstimate::new(ranking_by_wins(
            &inst.graph,
        ))),
        Algorithm::SpectralRecover => spectral_recover(&inst.graph, k, &opts),
        Algorithm::Mle => mle_recover(&inst.graph, k.round() as usize).map(|(est, _value)| est),
        Algorithm::OrderedClique => ordered_clique_recover(&inst.graph, k, &opts),
        Algorithm::OrderedCliqueEnhanced(b) => {
            ordered_clique_recover_enhanced(&inst.graph, k, *b, &opts)
        }
        _ => unreachable!("detection handled above"),
    };
    match estimate {
        Ok(est) => {
            let dkt = kendall_tau(&inst.ranking, &est.ranking);
            record.d_kt = Some(dkt);
            let pair_scale = (k * (k - 1.0) / 2.0).max(1.0);
            record.norm_kt = Some((dkt as f64 / pair_scale).min(1.0));
            if !matches!(algorithm, Algorithm::RankingByWins) {
                // Ranking By Wins ranks all of [n]; it estimates no support.
                let dh = hamming(&inst.community, &est.support_sorted()) as u64;
                record.d_hamming = Some(dh);
                record.norm_hamming = Some((dh as f64 / k.max(1.0)).min(1.0));
            }
        }
        Err(e) => record.status = failure_status(e),
    }
    record
}
