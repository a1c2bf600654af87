//! Command-line front end: kernel analysis, rate-loss curves, code
//! construction, encoding, decoding, Monte Carlo simulation, and a built-in
//! verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.

mod verify;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use sparse_polar::channels::{parse_channel_spec, DiscreteBms, TriSymbol};
use sparse_polar::construct::{self, FrozenRule};
use sparse_polar::decode;
use sparse_polar::drs::{self, GammaMethod};
use sparse_polar::graph::Scheme;
use sparse_polar::kernel::{validate_kernel, BitMatrix};
use sparse_polar::sim;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sparse-polar",
    about = "Polar-based codes with sparse generator matrices",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a polarization kernel from a 0/1 text file
    Kernel(KernelArgs),
    /// Rate-loss (gamma) table as CSV
    Gamma(GammaArgs),
    /// Build a code file (graph + frozen set + reliabilities)
    Construct(ConstructArgs),
    /// Encode a message with a code file
    Encode(EncodeArgs),
    /// Decode received symbols with a code file
    Decode(DecodeArgs),
    /// Monte Carlo block-error-rate sweep as CSV
    Simulate(SimulateArgs),
    /// Run the built-in verification suite
    Verify,
}

#[derive(Args)]
struct KernelArgs {
    /// text file, one 0/1 row per line
    #[arg(long)]
    file: PathBuf,
    /// emit CSV instead of key=value lines
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct GammaArgs {
    /// comma-separated list of n values
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// lambda values; threshold is 2^floor(n*lambda)
    #[arg(long = "lambda-list", value_delimiter = ',')]
    lambda_list: Vec<f64>,
    /// explicit thresholds (alternative to lambda-list)
    #[arg(long = "wub-list", value_delimiter = ',')]
    wub_list: Vec<u64>,
    /// closed-form | exact-split | curve
    #[arg(long, default_value = "closed-form")]
    method: String,
    /// output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    n: usize,
    /// threshold exponent; w_ub = 2^floor(n*lambda)
    #[arg(long)]
    lambda: Option<f64>,
    /// explicit weight threshold
    #[arg(long)]
    wub: Option<u64>,
    /// standard | drs | adrs
    #[arg(long, default_value = "drs")]
    scheme: String,
    /// channel spec: "bec 0.5", "bsc 0.1", or a file via @path
    #[arg(long)]
    channel: String,
    #[arg(long)]
    k: usize,
    /// match-standard | direct
    #[arg(long, default_value = "match-standard")]
    rule: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo reliability samples (non-erasure channels)
    #[arg(long = "mc-trials", default_value_t = 50_000)]
    mc_trials: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// message bits file (K bits of 0/1)
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// noise-stream index for augmented graphs
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// received symbols: 0/1/e characters for erasure channels, symbol
    /// indices otherwise
    #[arg(long = "in")]
    input: PathBuf,
    /// channel spec (needed to map symbols to likelihoods)
    #[arg(long)]
    channel: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "lambda-list", value_delimiter = ',', required = true)]
    lambda_list: Vec<f64>,
    #[arg(long)]
    channel: String,
    #[arg(long = "k-grid", value_delimiter = ',', required = true)]
    k_grid: Vec<usize>,
    /// standard | drs | adrs
    #[arg(long, default_value = "drs")]
    scheme: String,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path too
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Kernel(a) => cmd_kernel(a),
        Command::Gamma(a) => cmd_gamma(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify => return verify::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            let code = if e.root_cause().is::<std::io::Error>() {
                3
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}

fn read_file(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", text),
    }
    Ok(())
}

fn channel_from_arg(arg: &str) -> anyhow::Result<DiscreteBms> {
    let spec = if let Some(path) = arg.strip_prefix('@') {
        read_file(Path::new(path))?
    } else {
        arg.to_string()
    };
    Ok(parse_channel_spec(&spec)?)
}

fn scheme_from_arg(arg: &str) -> anyhow::Result<Scheme> {
    arg.parse::<Scheme>().map_err(Into::into)
}

fn rule_from_arg(arg: &str) -> anyhow::Result<FrozenRule> {
    match arg {
        "match-standard" => Ok(FrozenRule::MatchStandard),
        "direct" => Ok(FrozenRule::Direct),
        other => Err(anyhow!("unknown rule '{}'", other)),
    }
}

fn cmd_kernel(a: KernelArgs) -> anyhow::Result<()> {
    let text = read_file(&a.file)?;
    let m = BitMatrix::parse_text(&text)?;
    let report = validate_kernel(&m)?;
    if a.csv {
        print!("{}", report.to_csv());
    } else {
        print!("{}", report.to_key_value());
    }
    Ok(())
}

fn cmd_gamma(a: GammaArgs) -> anyhow::Result<()> {
    if a.lambda_list.is_empty() && a.wub_list.is_empty() {
        return Err(anyhow!("need --lambda-list or --wub-list"));
    }
    let mut csv = String::from("n,lambda,w_ub,gamma\n");
    for &n in &a.n {
        for &lambda in &a.lambda_list {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(anyhow!("lambda {} outside [0,1]", lambda));
            }
            match a.method.as_str() {
                "curve" => {
                    let g = drs::rate_loss_curve(n, lambda);
                    csv.push_str(&format!("{},{},,{}\n", n, lambda, g));
                }
                m => {
                    let w_ub = sim::lambda_threshold(n, lambda);
                    let report = drs::gamma(n, w_ub as usize, parse_gamma_method(m)?)?;
                    csv.push_str(&format!("{},{},{},{}\n", n, lambda, w_ub, report.gamma));
                }
            }
        }
        for &w_ub in &a.wub_list {
            let report = drs::gamma(n, w_ub as usize, parse_gamma_method(&a.method)?)?;
            csv.push_str(&format!("{},{},{},{}\n", n, report.lambda, w_ub, report.gamma));
        }
    }
    write_output(a.out.as_deref(), &csv)
}

fn parse_gamma_method(m: &str) -> anyhow::Result<GammaMethod> {
    match m {
        "closed-form" => Ok(GammaMethod::ClosedForm),
        "exact-split" => Ok(GammaMethod::ExactSplit),
        other => Err(anyhow!("unknown gamma method '{}' (use closed-form, exact-split, or curve)", other)),
    }
}

fn threshold_from(n: usize, lambda: Option<f64>, wub: Option<u64>) -> anyhow::Result<u64> {
    match (lambda, wub) {
        (None, Some(w)) if w >= 1 => Ok(w),
        (Some(l), None) if (0.0..=1.0).contains(&l) => Ok(sim::lambda_threshold(n, l)),
        (Some(_), Some(_)) => Err(anyhow!("give either --lambda or --wub, not both")),
        _ => Err(anyhow!("need --lambda in [0,1] or --wub >= 1")),
    }
}

fn cmd_construct(a: ConstructArgs) -> anyhow::Result<()> {
    let w = channel_from_arg(&a.channel)?;
    let scheme = scheme_from_arg(&a.scheme)?;
    let w_ub = threshold_from(a.n, a.lambda, a.wub)?;
    let rule = rule_from_arg(&a.rule)?;
    let code = construct::build_code(a.n, w_ub, scheme, &w, a.k, rule, a.seed, a.mc_trials)?;
    fs::write(&a.out, construct::write_code(&code))
        .with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!(
        "wrote {}: scheme={} n={} w_ub={} K={} block={} rate_raw={:.4} rate_adjusted={:.4}",
        a.out.display(),
        scheme,
        a.n,
        w_ub,
        a.k,
        code.block_len(),
        code.rate_raw(),
        code.rate_adjusted()
    );
    Ok(())
}

fn parse_bits(text: &str) -> anyhow::Result<Vec<u8>> {
    let mut bits = Vec::new();
    for ch in text.chars() {
        match ch {
            '0' => bits.push(0),
            '1' => bits.push(1),
            c if c.is_whitespace() || c == ',' => {}
            other => return Err(anyhow!("unexpected bit character '{}'", other)),
        }
    }
    Ok(bits)
}

fn cmd_encode(a: EncodeArgs) -> anyhow::Result<()> {
    let code = construct::read_code(&read_file(&a.code)?)?;
    let bits = parse_bits(&read_file(&a.input)?)?;
    let u = code.place_message(&bits)?;
    let x = code.graph.encode_seeded(&u, a.trial);
    let mut line: String = x.iter_bits().map(|b| if b { '1' } else { '0' }).collect();
    line.push('\n');
    fs::write(&a.out, line).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}

fn cmd_decode(a: DecodeArgs) -> anyhow::Result<()> {
    let code = construct::read_code(&read_file(&a.code)?)?;
    let w = channel_from_arg(&a.channel)?;
    let text = read_file(&a.input)?;
    let use_erasure = w.bec_epsilon().is_some() && code.graph.scheme() != Scheme::Adrs;
    let mut out = String::new();
    if use_erasure {
        let symbols: Vec<TriSymbol> = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(TriSymbol::from_char)
            .collect::<sparse_polar::Result<_>>()?;
        let dec = decode::decode_bec(&code.graph, &code.frozen, &symbols)?;
        let est: String = dec.estimates.iter().map(|s| s.to_char()).collect();
        let info: String = code
            .info_indices()
            .into_iter()
            .map(|i| dec.estimates[i].to_char())
            .collect();
        let ok = code
            .info_indices()
            .into_iter()
            .all(|i| !dec.estimates[i].is_erased());
        out.push_str(&format!("estimates {}\n", est));
        out.push_str(&format!("info {}\n", info));
        out.push_str(&format!("status {}\n", if ok { "ok" } else { "erasures" }));
    } else {
        let symbols: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| anyhow!("bad symbol '{}'", t)))
            .collect::<anyhow::Result<_>>()?;
        if symbols.iter().any(|&s| s >= w.alphabet_size()) {
            return Err(anyhow!("symbol index outside channel alphabet"));
        }
        let llrs: Vec<f64> = symbols.iter().map(|&s| w.llr(s)).collect();
        let dec = decode::decode_llr(&code.graph, &code.frozen, &llrs)?;
        let est: String = dec
            .estimates
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect();
        let info: String = code
            .info_indices()
            .into_iter()
            .map(|i| if dec.estimates[i] == 1 { '1' } else { '0' })
            .collect();
        out.push_str(&format!("estimates {}\n", est));
        out.push_str(&format!("info {}\n", info));
        out.push_str("status ok\n");
    }
    fs::write(&a.out, out).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let w = channel_from_arg(&a.channel)?;
    let scheme = scheme_from_arg(&a.scheme)?;
    eprintln!(
        "simulating n={} scheme={} lambdas={:?} K={:?} trials={} seed={}",
        a.n, scheme, a.lambda_list, a.k_grid, a.trials, a.seed
    );
    let rows = sim::rate_sweep(
        a.n,
        &a.lambda_list,
        &w,
        &a.k_grid,
        scheme,
        FrozenRule::MatchStandard,
        a.trials,
        a.seed,
    )?;
    for r in &rows {
        eprintln!(
            "  lambda={} K={} bler={} [{}, {}]",
            r.lambda, r.k, r.bler, r.ci_lo, r.ci_hi
        );
    }
    write_output(a.out.as_deref(), &sim::export_csv(&rows))
}
