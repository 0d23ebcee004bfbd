//! Command-line harness for the planted ranked subgraph model.
//!
//! Subcommands: `sample`, `detect`, `recover`, `oracle`, `sweep`. All
//! randomness is seeded explicitly; there is no wall-clock default, so any
//! invocation repeated with the same flags produces byte-identical output.
//!
//! Exit codes: 0 on success, 2 on invalid configuration or arguments, 3 on
//! an algorithm failure in single-run mode.

use clap::{Args, Parser, Subcommand};
use prs::lowdeg::{
    advantage_exact, chi2_exact, inversion_mgf, inversion_mgf_bound, ordering_sign_expectation,
    planted_monomial_expectation, EdgeSet, LowDegParams,
};
use prs::metrics::{hamming, kendall_tau};
use prs::model::{sample_null, sample_planted, DirectedAdjacency, ModelParams};
use prs::recover::{
    mle_recover, ordered_clique_recover, ordered_clique_recover_enhanced, ranking_by_wins,
    spectral_recover,
};
use prs::spectral::PowerOpts;
use prs_cli::config::SweepConfig;
use prs_cli::sweep::{build_jobs, run_jobs, summarize, write_csv};
use prs_cli::trial::Algorithm;
use serde_json::json;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

const EXIT_INVALID: i32 = 2;
const EXIT_ALGORITHM: i32 = 3;

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn algorithm(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_ALGORITHM,
            message: message.into(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "prs",
    version,
    about = "Planted ranked subgraph model: sampling, detection, recovery, oracles, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph (null model) or instance file (planted model).
    Sample(SampleArgs),
    /// Run a detection test on a graph file or a freshly sampled graph.
    Detect(DetectArgs),
    /// Run a recovery algorithm; scores against ground truth when available.
    Recover(RecoverArgs),
    /// Exact small-instance oracles, printed as JSON.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run a Monte Carlo sweep over a grid of log-density exponents.
    Sweep(SweepArgs),
}

/// Model parameters: give `--k --p --q` directly, or `--alpha --beta
/// --gamma` as log-density exponents (`k = n^beta`, `p = n^-gamma`,
/// `q = n^-alpha`).
#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<ModelParams, CliError> {
        match (self.k, self.p, self.q, self.alpha, self.beta, self.gamma) {
            (Some(k), Some(p), Some(q), None, None, None) => {
                ModelParams::new(self.n, k, p, q).map_err(|e| CliError::invalid(e.to_string()))
            }
            (None, None, None, Some(alpha), Some(beta), Some(gamma)) => {
                ModelParams::from_exponents(self.n, alpha, beta, gamma)
                    .map_err(|e| CliError::invalid(e.to_string()))
            }
            _ => Err(CliError::invalid(
                "give either --k --p --q or --alpha --beta --gamma (not a mixture)",
            )),
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Base seed; same seed, same bytes.
    #[arg(long)]
    seed: u64,
    /// Which model to sample.
    #[arg(long, value_parser = ["null", "planted"])]
    model: String,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Detection statistic: degree2, spectral, or exhaustive.
    #[arg(long)]
    algo: String,
    /// Graph or instance file to test; omit to sample via --model.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Model to sample when no input file is given.
    #[arg(long, value_parser = ["null", "planted"])]
    model: Option<String>,
    /// Seed for sampling and the eigensolver start vector.
    #[arg(long)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Recovery algorithm: rbw, spectral_recover, mle, ordered_clique, or
    /// ordered_clique_enhanced[:b].
    #[arg(long)]
    algo: String,
    /// Instance (scored) or graph file; omit to sample a planted instance.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Seed for sampling and the eigensolver start vector.
    #[arg(long)]
    seed: u64,
    /// Write the estimate file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Sign expectation of an edge set under a uniform ordering.
    SignExpectation {
        /// Comma-separated 1-indexed pairs, e.g. 1-2,1-3.
        #[arg(long)]
        edges: String,
    },
    /// Planted expectation of the monomial indexed by an edge set.
    Monomial {
        #[arg(long)]
        edges: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Exact low-degree advantage (n <= 7, degree <= 6).
    Advantage {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        degree: usize,
    },
    /// Exact chi-squared divergence at a fixed community size (n <= 4).
    Chi2 {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        community_size: usize,
    },
    /// Inversion MGF: exact value (h <= 9) and the closed-form bound.
    InversionMgf {
        #[arg(long)]
        h: usize,
        #[arg(long)]
        x: f64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Base seed; overrides the config's base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix; writes <out>.csv and <out>.summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Recover(args) => cmd_recover(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::invalid(format!("cannot create {}: {e}", p.display()))),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let params = args.params.resolve()?;
    let mut out = open_out(&args.out)?;
    let result = match args.model.as_str() {
        "null" => {
            let graph = sample_null(&params, args.seed);
            prs::io::save_graph(&graph, &mut out)
        }
        _ => {
            let inst = sample_planted(&params, args.seed);
            prs::io::save_instance(&inst.graph, &inst.community, &inst.ranking, &mut out)
        }
    };
    result.map_err(|e| CliError::invalid(e.to_string()))
}

fn load_input(path: &PathBuf) -> Result<prs::io::LoadedFile, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    prs::io::load(&mut BufReader::new(file)).map_err(|e| CliError::invalid(e.to_string()))
}

fn obtain_graph(
    input: &Option<PathBuf>,
    model: &Option<String>,
    params: &ModelParams,
    seed: u64,
) -> Result<DirectedAdjacency, CliError> {
    match input {
        Some(path) => {
            let loaded = load_input(path)?;
            if loaded.graph.n() != params.n() {
                return Err(CliError::invalid(format!(
                    "file has n = {}, flags say n = {}",
                    loaded.graph.n(),
                    params.n()
                )));
            }
            Ok(loaded.graph)
        }
        None => match model.as_deref() {
            Some("null") => Ok(sample_null(params, seed)),
            Some("planted") => Ok(sample_planted(params, seed).graph),
            _ => Err(CliError::invalid(
                "give --in <file> or --model null|planted to sample",
            )),
        },
    }
}

fn cmd_detect(args: DetectArgs) -> Result<(), CliError> {
    let params = args.params.resolve()?;
    let algo = Algorithm::parse(&args.algo).map_err(CliError::invalid)?;
    let kind = algo
        .detect_kind()
        .ok_or_else(|| CliError::invalid(format!("'{}' is not a detection test", args.algo)))?;
    let graph = obtain_graph(&args.input, &args.model, &params, args.seed)?;
    let opts = PowerOpts::with_seed(args.seed);
    let report = prs::detect::run_detection(&graph, &params, kind, &opts)
        .map_err(|e| CliError::algorithm(e.to_string()))?;
    let doc = json!({
        "algorithm": algo.id(),
        "n": params.n(),
        "k": params.k(),
        "p": params.p(),
        "q": params.q(),
        "seed": args.seed,
        "statistic": report.statistic_value,
        "threshold": report.threshold,
        "decision": report.decision.to_string(),
        "eig_iterations": report.eig_iterations,
    });
    let mut out = open_out(&args.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| CliError::invalid(e.to_string()))?;
    Ok(())
}

fn cmd_recover(args: RecoverArgs) -> Result<(), CliError> {
    let params = args.params.resolve()?;
    let algo = Algorithm::parse(&args.algo).map_err(CliError::invalid)?;
    let opts = PowerOpts::with_seed(args.seed);
    // Ground truth comes from the instance file or the inline sample.
    let (graph, truth) = match &args.input {
        Some(path) => {
            let loaded = load_input(path)?;
            if loaded.graph.n() != params.n() {
                return Err(CliError::invalid(format!(
                    "file has n = {}, flags say n = {}",
                    loaded.graph.n(),
                    params.n()
                )));
            }
            let truth = loaded.community.clone().zip(loaded.ranking.clone());
            (loaded.graph, truth)
        }
        None => {
            let inst = sample_planted(&params, args.seed);
            (inst.graph, Some((inst.community, inst.ranking)))
        }
    };
    let k = params.k();
    let estimate = match algo {
        Algorithm::RankingByWins => Ok(prs::metrics::RankingEstimate::new(ranking_by_wins(&graph))),
        Algorithm::SpectralRecover => spectral_recover(&graph, k, &opts),
        Algorithm::Mle => mle_recover(&graph, k.round() as usize).map(|(est, _)| est),
        Algorithm::OrderedClique => ordered_clique_recover(&graph, k, &opts),
        Algorithm::OrderedCliqueEnhanced(b) => ordered_clique_recover_enhanced(&graph, k, b, &opts),
        _ => {
            return Err(CliError::invalid(format!(
                "'{}' is not a recovery algorithm",
                args.algo
            )))
        }
    }
    .map_err(|e| CliError::algorithm(e.to_string()))?;
    if let Some(path) = &args.out {
        let mut out = open_out(&Some(path.clone()))?;
        prs::io::save_estimate(params.n(), &estimate, &mut out)
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    let mut doc = json!({
        "algorithm": algo.id(),
        "n": params.n(),
        "k": params.k(),
        "p": params.p(),
        "q": params.q(),
        "seed": args.seed,
        "support_size": estimate.len(),
    });
    if let Some((community, ranking)) = truth {
        let dh = hamming(&community, &estimate.support_sorted()) as u64;
        let dkt = kendall_tau(&ranking, &estimate.ranking);
        let pair_scale = (k * (k - 1.0) / 2.0).max(1.0);
        doc["d_hamming"] = json!(dh);
        doc["d_kt"] = json!(dkt);
        doc["norm_hamming"] = json!((dh as f64 / k.max(1.0)).min(1.0));
        doc["norm_kt"] = json!((dkt as f64 / pair_scale).min(1.0));
    }
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn parse_edges(text: &str) -> Result<EdgeSet, CliError> {
    let mut pairs = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let (a, b) = token
            .split_once('-')
            .ok_or_else(|| CliError::invalid(format!("bad edge token '{token}'")))?;
        let parse = |s: &str| -> Result<usize, CliError> {
            let v: usize = s
                .trim()
                .parse()
                .map_err(|_| CliError::invalid(format!("bad vertex '{s}'")))?;
            if v == 0 {
                return Err(CliError::invalid("vertices are 1-indexed"));
            }
            Ok(v - 1)
        };
        pairs.push((parse(a)?, parse(b)?));
    }
    EdgeSet::from_pairs(&pairs).map_err(|e| CliError::invalid(e.to_string()))
}

fn cmd_oracle(cmd: OracleCommand) -> Result<(), CliError> {
    let doc = match cmd {
        OracleCommand::SignExpectation { edges } => {
            let set = parse_edges(&edges)?;
            let ratio =
                ordering_sign_expectation(&set).map_err(|e| CliError::invalid(e.to_string()))?;
            json!({
                "op": "sign_expectation",
                "edges": edges,
                "numerator": ratio.num(),
                "denominator": ratio.den(),
                "value": ratio.to_f64(),
            })
        }
        OracleCommand::Monomial { edges, params } => {
            let set = parse_edges(&edges)?;
            let model = params.resolve()?;
            let value = planted_monomial_expectation(&set, &model)
                .map_err(|e| CliError::invalid(e.to_string()))?;
            json!({ "op": "monomial_expectation", "edges": edges, "value": value })
        }
        OracleCommand::Advantage { params, degree } => {
            let model = params.resolve()?;
            let value = advantage_exact(&LowDegParams { degree, model })
                .map_err(|e| CliError::invalid(e.to_string()))?;
            json!({ "op": "advantage", "degree": degree, "value": value })
        }
        OracleCommand::Chi2 {
            params,
            community_size,
        } => {
            let model = params.resolve()?;
            let value =
                chi2_exact(&model, community_size).map_err(|e| CliError::invalid(e.to_string()))?;
            json!({ "op": "chi2", "community_size": community_size, "value": value })
        }
        OracleCommand::InversionMgf { h, x } => {
            let exact = inversion_mgf(h, x).map_err(|e| CliError::invalid(e.to_string()))?;
            json!({
                "op": "inversion_mgf",
                "h": h,
                "x": x,
                "exact": exact,
                "bound": inversion_mgf_bound(h, x),
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::invalid(format!("{}: {e}", args.config.display())))?;
    let config: SweepConfig =
        serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("config: {e}")))?;
    config
        .validate()
        .map_err(|e| CliError::invalid(e.to_string()))?;
    let base_seed = args
        .seed
        .or(config.base_seed)
        .ok_or_else(|| CliError::invalid("no seed: give --seed or set base_seed in the config"))?;
    let out_prefix = args
        .out
        .clone()
        .or_else(|| config.out.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::invalid("no output: give --out or set out in the config"))?;
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|v| v.get())
            .unwrap_or(1)
    });
    let jobs = build_jobs(&config, base_seed).map_err(CliError::invalid)?;
    eprintln!("sweep: {} rows on {} workers", jobs.len(), workers);
    let started = std::time::Instant::now();
    let records = run_jobs(&jobs, workers);
    eprintln!("sweep: finished in {:.1}s", started.elapsed().as_secs_f64());
    let summary = summarize(&config, base_seed, &jobs, &records);

    let csv_path = out_prefix.with_extension("csv");
    let mut csv = BufWriter::new(
        File::create(&csv_path)
            .map_err(|e| CliError::invalid(format!("{}: {e}", csv_path.display())))?,
    );
    write_csv(&mut csv, &config, base_seed, &records)
        .map_err(|e| CliError::invalid(e.to_string()))?;

    let json_path = out_prefix.with_extension("summary.json");
    let mut summary_out = BufWriter::new(
        File::create(&json_path)
            .map_err(|e| CliError::invalid(format!("{}: {e}", json_path.display())))?,
    );
    writeln!(
        summary_out,
        "{}",
        serde_json::to_string_pretty(&summary).unwrap()
    )
    .map_err(|e| CliError::invalid(e.to_string()))?;
    eprintln!(
        "sweep: wrote {} and {}",
        csv_path.display(),
        json_path.display()
    );
    Ok(())
}
