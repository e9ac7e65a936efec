//! `baxterq`: build operators, run the identity catalog, compute spectra,
//! Bethe roots and oracle convergence tables.
//!
//! Exit codes: 0 everything passed, 1 a check failed (or a computation
//! failed), 2 usage or validation error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use baxterq_core::bulk::{LatticeModel, Perturbation};
use baxterq_core::exact::{format_rational, parse_rational, rat};
use baxterq_core::fock::{convergence_scan, default_oracle_point, DEFAULT_CUTOFFS};
use baxterq_core::io::{
    bethe_csv, numeric_json, oracle_csv, precision_digits, reports_csv, spectrum_csv, OperatorDocument,
    OracleDocument, ReportDocument, SpectrumDocument, SCHEMA_VERSION,
};
use baxterq_core::operators::{hamiltonian_operator, q_operator_at, q_operator_for, transfer_matrix, Assembly};
use baxterq_core::spectral::{energies, SpectralConfig, SpectralContext, SpectrumRecord};
use baxterq_core::verify::{run_check, run_named, CheckConfig, Sampling, Verdict, CATALOG, DEFAULT_CUTOFF, DEFAULT_SEED};
use baxterq_core::{ChainParams, Error, OperatorKind, Rational, Sign, SpinBasis};

/// Bethe residual, TQ residual and pairing thresholds for `spectrum`/`bethe`.
const RESIDUAL_TOLERANCE: f64 = 1e-8;
const PAIRING_TOLERANCE: f64 = 1e-9;
const MAX_ORACLE_LENGTH: usize = 2;

#[derive(Parser, Debug)]
#[command(name = "baxterq", version, about = "Exact Q-operators and Bethe data for the open XXX chain")]
struct Cli {
    #[command(flatten)]
    chain: ChainArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ChainArgs {
    /// Chain length.
    #[arg(short = 'L', long = "length", global = true, default_value_t = 2)]
    length: usize,
    /// Left boundary parameter, as "num/den".
    #[arg(short = 'p', global = true, allow_hyphen_values = true)]
    p: Option<String>,
    /// Right boundary parameter, as "num/den".
    #[arg(short = 'q', global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// Seed for random sample points.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity checks.
    Verify(VerifyArgs),
    /// Build an operator and write it as exact JSON.
    Build(BuildArgs),
    /// Per-state spectral data for every magnon sector.
    Spectrum(SpectrumArgs),
    /// Bethe roots and residuals.
    Bethe(BetheArgs),
    /// Truncated Fock-space sums against exact Q entries.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run the whole catalog (the default).
    #[arg(long, conflicts_with = "relation")]
    all: bool,
    /// Run only these checks (repeatable).
    #[arg(long, short = 'r')]
    relation: Vec<String>,
    /// Fock cutoff for truncated checks.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: usize,
    /// Sample this many random points (pairs) instead of a conclusive grid.
    #[arg(long)]
    pairs: Option<usize>,
    /// Add +1 to one building-block entry, e.g. "L+:0:1", "Khat:1:1", "R:0:3".
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<String>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// T, Q+, Q- or H.
    #[arg(long = "op", allow_hyphen_values = true)]
    op: String,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
    /// Diagonalisation point.
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
}

#[derive(Args, Debug)]
struct BetheArgs {
    /// Number of down spins; all sectors if omitted.
    #[arg(long)]
    sector: Option<usize>,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Comma-separated cutoffs.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_CUTOFFS.to_vec())]
    cutoff: Vec<usize>,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
    /// Single entry "row,col" as bitstrings; all nonzero entries if omitted.
    #[arg(long)]
    entry: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<String>,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameters(_)
            | Error::ParseRational { .. }
            | Error::ScaleLimit(_)
            | Error::UnknownRelation(_)
            | Error::Format(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Verify(a) => cmd_verify(&cli.chain, a),
        Command::Build(a) => cmd_build(&cli.chain, a),
        Command::Spectrum(a) => cmd_spectrum(&cli.chain, a),
        Command::Bethe(a) => cmd_bethe(&cli.chain, a),
        Command::Oracle(a) => cmd_oracle(&cli.chain, a),
    }
}

fn params(chain: &ChainArgs, default: (Rational, Rational)) -> Result<ChainParams, Failure> {
    let p = chain.p.as_deref().map(parse_rational).transpose()?.unwrap_or(default.0);
    let q = chain.q.as_deref().map(parse_rational).transpose()?.unwrap_or(default.1);
    Ok(ChainParams::new(chain.length, p, q)?)
}

fn default_params(chain: &ChainArgs) -> Result<ChainParams, Failure> {
    let d = ChainParams::default_for(chain.length.max(1));
    params(chain, (d.p, d.q))
}

fn emit(chain: &ChainArgs, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &chain.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Check(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn digits() -> Result<usize, Failure> {
    Ok(precision_digits()?)
}

fn cmd_verify(chain: &ChainArgs, args: &VerifyArgs) -> Outcome {
    let params = default_params(chain)?;
    let digits = digits()?;
    let mut config = CheckConfig::new(params.clone());
    config.cutoff = args.cutoff;
    config.seed = chain.seed;
    if let Some(n) = args.pairs {
        config.sampling = Sampling::Points(n);
    }
    if let Some(p) = &args.perturb {
        config.perturbation = Some(p.parse::<Perturbation>()?);
    }
    let reports = if args.relation.is_empty() {
        CATALOG.iter().map(|n| run_named(n, &config)).collect::<Result<Vec<_>, _>>()?
    } else {
        args.relation.iter().map(|n| run_check(n, &config)).collect::<Result<Vec<_>, _>>()?
    };
    for r in &reports {
        eprintln!("{:<26} {:<8} {}", r.name, format!("{:?}", r.verdict).to_lowercase(), r.max_deviation);
    }
    let ok = reports.iter().all(|r| r.verdict != Verdict::Fail);
    let text = match chain.format {
        Format::Json => numeric_json(&ReportDocument::new(&params, config.cutoff, config.seed, reports, digits), digits)?,
        Format::Csv => reports_csv(&reports)?,
    };
    emit(chain, &text)?;
    Ok(ok)
}

fn cmd_build(chain: &ChainArgs, args: &BuildArgs) -> Outcome {
    let params = default_params(chain)?;
    let kind: OperatorKind = args.op.parse()?;
    if chain.format != Format::Json {
        return Err(Failure::Usage("build writes JSON only".into()));
    }
    let op = match kind {
        OperatorKind::T => transfer_matrix(&params)?,
        OperatorKind::H => hamiltonian_operator(&params)?,
        OperatorKind::QPlus | OperatorKind::QMinus => {
            let model = LatticeModel::from_params(&params);
            let sign = kind.sign().expect("Q operator has a sign");
            q_operator_for(&model, params.length, sign, Assembly::BlockDiagonal)?
        }
    };
    emit(chain, &OperatorDocument::from_operator(&op)?.to_json()?)?;
    Ok(true)
}

fn spectral_config(chain: &ChainArgs, z0: &Option<String>) -> Result<SpectralConfig, Failure> {
    let mut config = SpectralConfig { seed: chain.seed, ..SpectralConfig::default() };
    if let Some(z) = z0 {
        config.z0 = parse_rational(z)?;
    }
    Ok(config)
}

fn record_ok(r: &SpectrumRecord) -> bool {
    r.paired
        && r.pairing_deviation <= PAIRING_TOLERANCE
        && r.max_residual() < RESIDUAL_TOLERANCE
        && r.tq_residual < RESIDUAL_TOLERANCE
}

fn spectrum_document(
    params: &ChainParams,
    sign: Sign,
    config: &SpectralConfig,
    records: Vec<SpectrumRecord>,
    with_energies: bool,
    digits: usize,
) -> Result<SpectrumDocument, Failure> {
    let energies = if with_energies { Some(energies(params, &records)?) } else { None };
    Ok(SpectrumDocument {
        schema_version: SCHEMA_VERSION,
        precision_digits: digits,
        length: params.length,
        p: format_rational(&params.p),
        q: format_rational(&params.q),
        sign,
        z0: format_rational(&config.z0),
        records,
        energies,
    })
}

fn cmd_spectrum(chain: &ChainArgs, args: &SpectrumArgs) -> Outcome {
    let params = default_params(chain)?;
    let sign: Sign = args.sign.parse()?;
    let digits = digits()?;
    let config = spectral_config(chain, &args.z0)?;
    let records = SpectralContext::new(&params, config.clone())?.all(sign)?;
    let mut ok = records.iter().all(record_ok);
    for r in records.iter().filter(|r| !record_ok(r)) {
        eprintln!("flagged: sector {} state {}: paired {}, residual {:e}", r.sector, r.index, r.paired, r.max_residual());
    }
    let text = match chain.format {
        Format::Json => {
            let doc = spectrum_document(&params, sign, &config, records, true, digits)?;
            let e = doc.energies.as_ref().expect("energies requested");
            ok &= e.transfer_matches_exact && e.max_deviation < RESIDUAL_TOLERANCE;
            eprintln!(
                "energies: T'(0) relation exact = {}, max deviation {:e}",
                e.transfer_matches_exact, e.max_deviation
            );
            numeric_json(&doc, digits)?
        }
        Format::Csv => spectrum_csv(&records, digits)?,
    };
    emit(chain, &text)?;
    Ok(ok)
}

fn cmd_bethe(chain: &ChainArgs, args: &BetheArgs) -> Outcome {
    let params = default_params(chain)?;
    let sign: Sign = args.sign.parse()?;
    let digits = digits()?;
    let config = spectral_config(chain, &args.z0)?;
    let ctx = SpectralContext::new(&params, config.clone())?;
    let records = match args.sector {
        Some(s) => ctx.sector(sign, s)?,
        None => ctx.all(sign)?,
    };
    for r in records.iter().filter(|r| !record_ok(r)) {
        eprintln!("flagged: sector {} state {}: paired {}, residual {:e}", r.sector, r.index, r.paired, r.max_residual());
    }
    let ok = records.iter().all(record_ok);
    let text = match chain.format {
        Format::Json => numeric_json(&spectrum_document(&params, sign, &config, records, false, digits)?, digits)?,
        Format::Csv => bethe_csv(&records, digits)?,
    };
    emit(chain, &text)?;
    Ok(ok)
}

fn cmd_oracle(chain: &ChainArgs, args: &OracleArgs) -> Outcome {
    let (p0, _, z_default) = default_oracle_point();
    let params = params(chain, (p0.clone(), p0))?;
    if params.length > MAX_ORACLE_LENGTH {
        return Err(Failure::Usage(format!("oracle supports L <= {MAX_ORACLE_LENGTH}")));
    }
    if args.cutoff.is_empty() {
        return Err(Failure::Usage("at least one cutoff required".into()));
    }
    let sign: Sign = args.sign.parse()?;
    let digits = digits()?;
    let z0 = match &args.z0 {
        Some(z) => parse_rational(z)?,
        None => z_default,
    };
    let model = LatticeModel::from_params(&params);
    let l = params.length;
    let basis = SpinBasis::new(l);
    let entries: Vec<(usize, usize)> = match &args.entry {
        Some(e) => {
            let (r, c) = e
                .split_once(',')
                .ok_or_else(|| Failure::Usage(format!("entry {e:?}: expected row,col bitstrings")))?;
            vec![(basis.parse_bitstring(r.trim())?, basis.parse_bitstring(c.trim())?)]
        }
        None => {
            let exact = q_operator_at(&model, l, sign, &z0, Assembly::Full)?;
            let mut out = Vec::new();
            for i in 0..basis.dim() {
                for j in 0..basis.dim() {
                    if *exact.get(i, j) != rat(0, 1) {
                        out.push((i, j));
                    }
                }
            }
            out
        }
    };
    let scans = entries
        .iter()
        .map(|&(a, b)| convergence_scan(&model, sign, l, a, b, &z0, &args.cutoff))
        .collect::<Result<Vec<_>, _>>()?;
    for s in &scans {
        eprintln!("({}, {}) final error {:e}, monotone {}", s.row, s.col, s.final_error(), s.monotone);
    }
    let ok = scans.iter().all(|s| s.monotone);
    let text = match chain.format {
        Format::Json => numeric_json(&OracleDocument { schema_version: SCHEMA_VERSION, precision_digits: digits, scans }, digits)?,
        Format::Csv => oracle_csv(&scans, digits)?,
    };
    emit(chain, &text)?;
    Ok(ok)
}
