use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockrec::bounds::exact_recovery_xmax;
use blockrec::chain::{generate_decoupled, generate_perturbation};
use blockrec::experiment::{render_certificates, render_sweep, run_campaign, run_sweep, ExperimentConfig, SweepMode};
use blockrec::io::{approx_to_json, estimate_to_json, read_matrix, recovery_to_json, write_matrix, write_partition, MatrixFormat};
use blockrec::recovery::{estimate_k, recover_empirical, recover_exact, recover_one_approx, RecoveryOptions, Threshold};
use blockrec::{Error, Execution};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 2;
const EXIT_DEGENERATE_GAP: u8 = 3;
const EXIT_NO_GAP: u8 = 4;
const EXIT_NO_CANDIDATE: u8 = 5;
const EXIT_BOUND_VIOLATION: u8 = 6;

/// Recover planted block structure from perturbed Markov chains and check the
/// perturbation bounds that make it work.
#[derive(Parser)]
#[command(name = "blockrec", version)]
struct Cli {
    /// Run on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a block-decoupled chain T0 and a perturbation E.
    Generate(GenerateArgs),
    /// Recover all clusters of a transition matrix.
    Recover(RecoverArgs),
    /// Approximately recover one cluster (equal cluster sizes).
    Approx(ApproxArgs),
    /// Sweep x over a grid for one seeded instance.
    Sweep(ExperimentArgs),
    /// Check the perturbation bounds over a seeded campaign.
    VerifyBounds(ExperimentArgs),
    /// Pick the number of clusters by off-block residual.
    EstimateK(EstimateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixExt {
    Mtx,
    Csv,
}

#[derive(Args)]
struct GenerateArgs {
    /// Comma-separated block sizes.
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write T(x) = T0 + xE.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    min_entry: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = MatrixExt::Mtx)]
    matrix_format: MatrixExt,
}

#[derive(Args)]
struct SpectralArgs {
    /// frobenius or spectral (residual norm for the empirical search).
    #[arg(long, default_value = "frobenius")]
    norm: String,
    /// Singular subspace to cluster on: right or left.
    #[arg(long, default_value = "right")]
    side: String,
    #[arg(long)]
    gap_tol: Option<f64>,
}

impl SpectralArgs {
    fn options(&self, exec: Execution) -> Result<RecoveryOptions, Error> {
        let mut opts = RecoveryOptions { exec, ..RecoveryOptions::default() };
        opts.norm = self.norm.parse()?;
        opts.side = self.side.parse()?;
        if let Some(tol) = self.gap_tol {
            opts.gap_tol = tol;
        }
        Ok(opts)
    }
}

#[derive(Args)]
struct RecoverArgs {
    /// Transition matrix (.mtx, .mm or .csv).
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// oracle_epsilon, known_sizes or empirical.
    #[arg(long, default_value = "empirical")]
    mode: String,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[command(flatten)]
    spectral: SpectralArgs,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ApproxArgs {
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    input: PathBuf,
    /// Largest cluster count to try.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Flags shared by sweep and verify-bounds; each overrides the matching
/// config-file key.
#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated x values.
    #[arg(long)]
    x: Option<String>,
    /// min:max:points.
    #[arg(long)]
    x_grid: Option<String>,
    /// Comma-separated modes (sweep only).
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    side: Option<String>,
    /// csv or jsonl (sweep only; certificates are always JSON lines).
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    instances: Option<String>,
    #[arg(long)]
    max_n: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the generation-time header line and runtimes.
    #[arg(long)]
    no_timestamp: bool,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = [
            ("sizes", &self.sizes),
            ("seed", &self.seed),
            ("x_list", &self.x),
            ("x_grid", &self.x_grid),
            ("modes", &self.mode),
            ("norm", &self.norm),
            ("side", &self.side),
            ("format", &self.format),
            ("instances", &self.instances),
            ("max_n", &self.max_n),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if self.no_timestamp {
            cfg.timestamp = false;
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DegenerateGap { .. } => EXIT_DEGENERATE_GAP,
        Error::NoGap => EXIT_NO_GAP,
        Error::NoCandidate { .. } => EXIT_NO_CANDIDATE,
        _ => EXIT_CONFIG,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<(), Error> {
    emit(out, &format!("{}\n", serde_json::to_string(value)?))
}

fn load(path: &Path) -> Result<blockrec::Matrix, Error> {
    read_matrix(path).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
        other => other,
    })
}

fn generate(args: &GenerateArgs) -> Result<u8, Error> {
    let sizes = blockrec::experiment::parse_list::<usize>("sizes", &args.sizes)?;
    let chain = generate_decoupled(&sizes, args.seed, args.min_entry)?;
    if chain.k() < 2 {
        eprintln!("warning: k = {} < 2; there is nothing to recover", chain.k());
    }
    let inst = generate_perturbation(&chain, args.seed)?;
    let ext = match args.matrix_format {
        MatrixExt::Mtx => MatrixFormat::MatrixMarket.extension(),
        MatrixExt::Csv => MatrixFormat::Csv.extension(),
    };
    fs::create_dir_all(&args.out)?;
    write_matrix(&args.out.join(format!("t0.{ext}")), chain.matrix())?;
    write_matrix(&args.out.join(format!("e.{ext}")), inst.e())?;
    write_partition(&args.out.join("partition.json"), chain.partition())?;
    if let Some(x) = args.x {
        write_matrix(&args.out.join(format!("tx.{ext}")), &inst.transition_at(x)?)?;
    }

    let sigma_gap = inst.sigma_gap();
    let norm_e = inst.norm_e();
    println!("n = {}", inst.n());
    println!("k = {}", inst.k());
    println!("sigma_gap = {sigma_gap:e}");
    println!("norm_e = {norm_e:e}");
    println!("x_max = {:e}", inst.x_max());
    if chain.k() >= 2 {
        println!("x_star = {:e}", exact_recovery_xmax(chain.partition(), sigma_gap, norm_e)?);
    }
    Ok(0)
}

fn recover(args: &RecoverArgs, exec: Execution) -> Result<u8, Error> {
    let t = load(&args.input)?;
    let opts = args.spectral.options(exec)?;
    let mode: SweepMode = args.mode.parse()?;
    let result = match mode {
        SweepMode::OracleEpsilon => {
            let epsilon = args.epsilon.ok_or_else(|| Error::Config("mode oracle_epsilon needs --epsilon".into()))?;
            recover_exact(&t, args.k, Threshold::OracleEpsilon { epsilon }, &opts)?
        }
        SweepMode::KnownSizes => {
            let (n1, n2) = args
                .n1
                .zip(args.n2)
                .ok_or_else(|| Error::Config("mode known_sizes needs --n1 and --n2".into()))?;
            recover_exact(&t, args.k, Threshold::KnownSizes { n1, n2 }, &opts)?
        }
        SweepMode::Empirical => recover_empirical(&t, args.k, &opts)?,
        SweepMode::ApproxOne => return Err(Error::Config("use the approx subcommand for approx_one".into())),
    };
    if !result.diagnostics.consistent {
        eprintln!(
            "warning: the recovered partition has {} blocks and overlapping within/cross distances; no bound certifies it",
            result.partition.k()
        );
    }
    emit_json(args.out.as_deref(), &recovery_to_json(&result))?;
    Ok(0)
}

fn approx(args: &ApproxArgs, exec: Execution) -> Result<u8, Error> {
    let t = load(&args.input)?;
    let r = recover_one_approx(&t, args.k, args.epsilon, &args.spectral.options(exec)?)?;
    emit_json(args.out.as_deref(), &approx_to_json(&r))?;
    Ok(0)
}

fn estimate(args: &EstimateArgs, exec: Execution) -> Result<u8, Error> {
    let t = load(&args.input)?;
    let e = estimate_k(&t, args.k, &args.spectral.options(exec)?)?;
    emit_json(args.out.as_deref(), &estimate_to_json(&e))?;
    Ok(0)
}

fn sweep(args: &ExperimentArgs, exec: Execution) -> Result<u8, Error> {
    let cfg = args.config()?;
    let out = run_sweep(&cfg, exec)?;
    emit(cfg.out.as_deref(), &render_sweep(&out, cfg.format, cfg.timestamp))?;
    Ok(0)
}

fn verify_bounds(args: &ExperimentArgs, exec: Execution) -> Result<u8, Error> {
    let cfg = args.config()?;
    let out = run_campaign(&cfg, exec)?;
    emit(cfg.out.as_deref(), &render_certificates(&out, cfg.timestamp))?;
    eprintln!("{}", out.summary);
    Ok(if out.summary.violations > 0 { EXIT_BOUND_VIOLATION } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Recover(a) => recover(a, exec),
        Command::Approx(a) => approx(a, exec),
        Command::Sweep(a) => sweep(a, exec),
        Command::VerifyBounds(a) => verify_bounds(a, exec),
        Command::EstimateK(a) => estimate(a, exec),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
