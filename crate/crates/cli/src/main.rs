//! `lutmap`: generate, inspect, solve and verify technology-mapping QBFs.
//!
//! Exit codes: 0 OK or SAT-verified, 10 SAT, 20 UNSAT, 30 UNKNOWN, 1 error.

use std::collections::BTreeMap;
use std::fs::File;
use std::fmt::Write as _;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lutmap_core::cnf::Role;
use lutmap_core::model::SignalKind;
use lutmap_core::solve::{solve_embedded_with, solve_external, Branching, SolveOptions};
use lutmap_core::testset::{generate_test_set, DEFAULT_WIDTHS};
use lutmap_core::verify::verify_implements;
use lutmap_core::{
    assemble, parse_qdimacs, write_qdimacs, CarryChainAdder, CircuitModel, Configuration, Encoding, ModelFile,
    QbfProblem, SolverAnswer, Verdict,
};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_UNKNOWN: u8 = 30;

#[derive(Parser)]
#[command(name = "lutmap", version, about = "Technology mapping as quantified boolean satisfiability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a carry-chain adder model and write its QBF in QDIMACS.
    Generate(GenerateArgs),
    /// Print prefix, matrix and configuration-bit statistics of a QDIMACS file.
    Stats {
        file: PathBuf,
    },
    /// Decide a QDIMACS problem.
    Solve(SolveArgs),
    /// Check that a configuration makes a model implement its target.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Adder width in bits.
    #[arg(long, required_unless_present = "testset", conflicts_with = "testset")]
    width: Option<usize>,
    #[arg(long, value_enum, required_unless_present = "testset", conflicts_with = "testset")]
    encoding: Option<EncodingArg>,
    /// Inputs per LUT.
    #[arg(long, default_value_t = CarryChainAdder::DEFAULT_LUT_ARITY)]
    lut_arity: usize,
    /// Observe the final carry as an extra output (the default).
    #[arg(long, overrides_with = "no_carry_out")]
    carry_out: bool,
    /// Observe only the sum bits.
    #[arg(long, overrides_with = "carry_out", conflicts_with = "testset")]
    no_carry_out: bool,
    /// Write the full benchmark family (widths 4 to 7, all encodings) into the `-o` directory.
    #[arg(long)]
    testset: bool,
    /// Also write the model and its target as JSON.
    #[arg(long, conflicts_with = "testset")]
    model: Option<PathBuf>,
    /// Output file, or directory with `--testset`.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// Use the built-in expansion solver (the default).
    #[arg(long, conflicts_with = "solver")]
    embedded: bool,
    /// External QBF solver command; the problem file path is appended.
    #[arg(long)]
    solver: Option<String>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Branching heuristic of the embedded solver.
    #[arg(long, value_enum, default_value_t = BranchingArg::Vsids)]
    branching: BranchingArg,
    /// Model JSON used to decode and verify a SAT certificate.
    #[arg(long, requires = "output")]
    decode: Option<PathBuf>,
    /// Where to write the decoded configuration.
    #[arg(short, long, requires = "decode")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Naive,
    Shrinking,
    Choose,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Encoding {
        match e {
            EncodingArg::Naive => Encoding::NaiveCmux,
            EncodingArg::Shrinking => Encoding::ShrinkingCmux,
            EncodingArg::Choose => Encoding::Choose,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchingArg {
    Vsids,
    Static,
}

/// On-disk configuration: config bits keyed by signal name.
#[derive(Debug, Serialize, Deserialize)]
struct ConfigFile {
    bits: BTreeMap<String, bool>,
}

impl ConfigFile {
    fn from_configuration(model: &CircuitModel, config: &Configuration) -> ConfigFile {
        let bits = config.bits.iter().map(|(&id, &v)| (model.signal(id).name.clone(), v)).collect();
        ConfigFile { bits }
    }

    fn to_configuration(&self, model: &CircuitModel) -> Result<Configuration> {
        let by_name: BTreeMap<&str, _> =
            model.signals_of_kind(SignalKind::Config).map(|s| (s.name.as_str(), s.id)).collect();
        let mut config = Configuration::new();
        for (name, &value) in &self.bits {
            let id = by_name.get(name.as_str()).with_context(|| format!("`{name}` is not a config signal of the model"))?;
            config.set(*id, value);
        }
        Ok(config)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Stats { file } => stats(&file),
        Command::Solve(args) => solve(args),
        Command::Verify { model, config } => verify(&model, &config),
    }
}

fn generate(args: GenerateArgs) -> Result<u8> {
    if args.testset {
        let manifest = generate_test_set(&DEFAULT_WIDTHS, &Encoding::ALL, args.lut_arity, &args.output)?;
        println!("wrote {} problems to {}", manifest.entries.len(), args.output.display());
        return Ok(EXIT_OK);
    }
    let (Some(width), Some(encoding)) = (args.width, args.encoding) else {
        bail!("--width and --encoding are required without --testset");
    };
    let adder = CarryChainAdder { width, encoding: encoding.into(), lut_arity: args.lut_arity, carry_out: !args.no_carry_out };
    let model = adder.build()?;
    let target = adder.target();
    let problem = assemble(&model, &target)?;
    write_qdimacs(&problem, create(&args.output)?).with_context(|| format!("writing {}", args.output.display()))?;
    if let Some(path) = &args.model {
        write_json(path, &ModelFile { model, target })?;
    }
    println!(
        "wrote {} ({} config, {} input, {} node variables, {} clauses)",
        args.output.display(),
        problem.prefix.config.len(),
        problem.prefix.inputs.len(),
        problem.prefix.nodes.len(),
        problem.matrix.len()
    );
    Ok(EXIT_OK)
}

fn stats(path: &Path) -> Result<u8> {
    let problem = read_problem(path)?;
    let p = &problem.prefix;
    let mut out = String::new();
    writeln!(out, "variables\t{}", problem.var_count())?;
    writeln!(out, "config\t{}", p.config.len())?;
    writeln!(out, "inputs\t{}", p.inputs.len())?;
    writeln!(out, "nodes\t{}", p.nodes.len())?;
    writeln!(out, "clauses\t{}", problem.matrix.len())?;
    writeln!(out, "literals\t{}", problem.matrix.literal_count())?;
    writeln!(out, "max_clause_len\t{}", problem.matrix.max_clause_len())?;

    let named: Vec<&str> = p
        .config
        .iter()
        .filter_map(|v| problem.symbols.get(v))
        .filter(|s| s.role == Role::Config)
        .map(|s| s.name.as_str())
        .collect();
    if named.is_empty() {
        return emit(&out);
    }
    let mut selectors: BTreeMap<&str, usize> = BTreeMap::new();
    let (mut lut_bits, mut other_bits) = (0usize, 0usize);
    for name in named {
        let (prefix, last) = name.rsplit_once('.').unwrap_or(("", name));
        let tagged = |tag: char| last.strip_prefix(tag).is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
        if tagged('s') {
            *selectors.entry(prefix).or_default() += 1;
        } else if tagged('t') {
            lut_bits += 1;
        } else {
            other_bits += 1;
        }
    }
    writeln!(out, "lut_bits\t{lut_bits}")?;
    writeln!(out, "selector_bits\t{}", selectors.values().sum::<usize>())?;
    if other_bits > 0 {
        writeln!(out, "other_config_bits\t{other_bits}")?;
    }
    for (name, bits) in &selectors {
        writeln!(out, "selector\t{name}\t{bits}")?;
    }
    emit(&out)
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<u8> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(EXIT_OK),
    }
}

fn solve(args: SolveArgs) -> Result<u8> {
    let problem = read_problem(&args.file)?;
    let model_file = args.decode.as_deref().map(read_model).transpose()?;
    let timeout = match args.timeout {
        Some(s) if !(s.is_finite() && s > 0.0) => bail!("--timeout must be a positive number of seconds"),
        Some(s) => Some(Duration::from_secs_f64(s)),
        None => None,
    };
    let answer = match &args.solver {
        Some(command) => solve_external(&problem, command, timeout.unwrap_or(Duration::MAX))?,
        None => {
            let branching = match args.branching {
                BranchingArg::Vsids => Branching::Vsids,
                BranchingArg::Static => Branching::Static,
            };
            let options = SolveOptions { branching, timeout, ..SolveOptions::default() };
            let run = solve_embedded_with(&problem, &options)?;
            log::info!("{} copies, {} variables, {} clauses, {:?}", run.copies, run.sat_vars, run.sat_clauses, run.stats);
            run.answer
        }
    };
    let certificate = match answer {
        SolverAnswer::Unsat => {
            println!("UNSAT");
            return Ok(EXIT_UNSAT);
        }
        SolverAnswer::Unknown => {
            println!("UNKNOWN");
            return Ok(EXIT_UNKNOWN);
        }
        SolverAnswer::Sat(certificate) => certificate,
    };
    println!("SAT");
    let (Some(mf), Some(out)) = (model_file, args.output) else {
        return Ok(EXIT_SAT);
    };
    check_symbols(&problem, &mf.model)?;
    if !certificate.unassigned.is_empty() {
        log::warn!("solver left {} configuration variables unassigned; using false", certificate.unassigned.len());
    }
    let config = certificate.to_configuration(&problem)?;
    write_json(&out, &ConfigFile::from_configuration(&mf.model, &config))?;
    report(verify_implements(&mf.model, &config, &mf.target)?)
}

fn verify(model: &Path, config: &Path) -> Result<u8> {
    let mf = read_model(model)?;
    let file: ConfigFile = read_json(config)?;
    let config = file.to_configuration(&mf.model)?;
    report(verify_implements(&mf.model, &config, &mf.target)?)
}

fn report(verdict: Verdict) -> Result<u8> {
    match verdict {
        Verdict::Ok { checked, exhaustive } => {
            let how = if exhaustive { "all" } else { "sampled" };
            println!("OK: {how} {checked} input words agree with the target");
            Ok(EXIT_OK)
        }
        Verdict::Counterexample(cex) => {
            println!("counterexample: {cex}");
            Ok(EXIT_ERROR)
        }
    }
}

/// Every config symbol must name the model signal it refers to.
fn check_symbols(problem: &QbfProblem, model: &CircuitModel) -> Result<()> {
    for v in &problem.prefix.config {
        let Some(symbol) = problem.symbols.get(v) else { continue };
        let Some(id) = symbol.signal else { continue };
        match model.signals.get(id.index()) {
            Some(s) if s.kind == SignalKind::Config && s.name == symbol.name => {}
            _ => bail!("variable {} (`{}`) does not match a config signal of the model", v.0, symbol.name),
        }
    }
    Ok(())
}

fn read_problem(path: &Path) -> Result<QbfProblem> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let problem = parse_qdimacs(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?;
    problem.validate().with_context(|| format!("checking {}", path.display()))?;
    Ok(problem)
}

fn read_model(path: &Path) -> Result<ModelFile> {
    let mf: ModelFile = read_json(path)?;
    mf.validate().with_context(|| format!("checking {}", path.display()))?;
    Ok(mf)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut sink = create(path)?;
    serde_json::to_writer_pretty(&mut sink, value).with_context(|| format!("writing {}", path.display()))?;
    writeln!(sink)?;
    sink.flush().with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}
