//! The `qsparse` command line: `run`, `bench` and `export`.
//!
//! Exit codes: 0 success, 1 other failures, 2 bad arguments or input,
//! 3 capacity, 4 I/O or store.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    emit_results, run_drop_study, run_grid, BenchPoint, Benchmark, DropStudyConfig, GridBackend, GridConfig,
    ResultFormat, Status, DEFAULT_REPEATS, DEFAULT_TIME_CUTOFF_S,
};
use crate::circuit::{
    addition_circuit, grover_circuit, optimal_grover_iterations, parse_circuit, serialize_circuit,
    superposition_circuit, Circuit,
};
use crate::dense::run_dense_with_cap;
use crate::error::{Error, Result};
use crate::selector::{run_mixed, MixedResult};
use crate::sparse::{measure_probability, run_sparse};
use crate::state::{
    sample_measurement, BasisIndex, DropConfig, SparseBackend, StateView, DEFAULT_DROP_LIMIT, DENSE_CAP,
};

pub const DENSE_CAP_ENV: &str = "QSPARSE_DENSE_CAP";

const TOP_ENTRIES: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "qsparse", version, about = "Sparse quantum circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one circuit and print a report.
    Run(RunArgs),
    /// Run a benchmark suite and write a result table.
    Bench(BenchArgs),
    /// Write a generated circuit as JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Superposition,
    Addition,
    Grover,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Generate a benchmark circuit.
    #[arg(long = "gen", value_enum)]
    kind: Option<GenKind>,
    /// Total qubits.
    #[arg(long)]
    n: Option<usize>,
    /// Nondeterministic qubits; for grover, the search register size.
    #[arg(long)]
    r: Option<usize>,
    /// Adder width.
    #[arg(long)]
    k: Option<usize>,
    /// Grover iterations, optimal when omitted.
    #[arg(long)]
    iters: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RunBackend {
    Array,
    Store,
    Dense,
    Mixed,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Circuit JSON file.
    #[arg(long, conflicts_with = "kind")]
    circuit: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long, value_enum, default_value = "array")]
    backend: RunBackend,
    /// Keep at most this many entries after each Hadamard, or `off`.
    #[arg(long, default_value = "off")]
    drop_limit: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `pattern@qubits`: a register value, then a register name, `all`, or a
    /// comma list of qubits (first listed is the low bit).
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    dense_cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Superposition,
    Addition,
    Grover,
    DropSuperposition,
    DropAddition,
    DropGrover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Largest total qubit count of a grid (for drop-grover, bounds the search size).
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    #[arg(long)]
    n_min: Option<usize>,
    /// Total qubits of a drop study.
    #[arg(long)]
    n: Option<usize>,
    /// Restrict a grid to one nondeterministic-qubit count.
    #[arg(long)]
    r: Option<usize>,
    /// Comma list of grid backends.
    #[arg(long, value_delimiter = ',', value_enum)]
    backends: Vec<RunBackend>,
    #[arg(long, default_value_t = DEFAULT_DROP_LIMIT)]
    limit: usize,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: usize,
    /// Per-cell time budget in seconds.
    #[arg(long, default_value_t = DEFAULT_TIME_CUTOFF_S)]
    timeout: f64,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the extension of `--out`.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// One cell at a time (the default).
    #[arg(long, conflicts_with = "parallel")]
    serial: bool,
    /// Spread grid lanes over worker threads.
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    dense_cap: Option<usize>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long)]
    out: PathBuf,
}

/// Runs the command line with `args` (program name first) and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args, stdout),
        Command::Bench(args) => cmd_bench(&args, stdout),
        Command::Export(args) => cmd_export(&args, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "qsparse: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) => 2,
        Error::Capacity(_) => 3,
        Error::Io(_) | Error::Csv(_) => 4,
        #[cfg(feature = "store")]
        Error::Store(_) => 4,
        _ => 1,
    }
}

fn dense_cap(flag: Option<usize>) -> Result<usize> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(DENSE_CAP_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("{DENSE_CAP_ENV} must be a qubit count, got {value:?}"))),
        Err(_) => Ok(DENSE_CAP),
    }
}

fn generate(gen: &GenArgs) -> Result<Circuit> {
    let Some(kind) = gen.kind else {
        return Err(Error::config("one of --circuit or --gen is required"));
    };
    let width_from_n = |n: usize| {
        if n < 5 || !(n - 5).is_multiple_of(3) {
            Err(Error::config(format!("--n {n} is not of the form 3k + 5")))
        } else {
            Ok((n - 5) / 3)
        }
    };
    match kind {
        GenKind::Superposition => {
            let n = gen.n.ok_or_else(|| Error::config("superposition needs --n"))?;
            superposition_circuit(n, gen.r.unwrap_or(0))
        }
        GenKind::Addition => {
            let k = match (gen.k, gen.n) {
                (Some(k), _) => k,
                (None, Some(n)) => width_from_n(n)?,
                (None, None) => return Err(Error::config("addition needs --k or --n")),
            };
            addition_circuit(k, gen.r.unwrap_or(0))
        }
        GenKind::Grover => {
            let r = match (gen.r, gen.k, gen.n) {
                (Some(r), _, _) | (None, Some(r), _) => r,
                (None, None, Some(n)) => width_from_n(n)?,
                _ => return Err(Error::config("grover needs --r")),
            };
            grover_circuit(r, gen.iters.unwrap_or_else(|| optimal_grover_iterations(r)))
        }
    }
}

fn load_circuit(args: &RunArgs) -> Result<Circuit> {
    match &args.circuit {
        Some(path) => parse_circuit(&std::fs::read_to_string(path)?),
        None => generate(&args.gen),
    }
}

fn parse_drop_limit(text: &str) -> Result<DropConfig> {
    if text == "off" {
        return Ok(DropConfig::disabled());
    }
    let limit = text
        .parse()
        .map_err(|_| Error::config(format!("--drop-limit takes a count or `off`, got {text:?}")))?;
    DropConfig::with_limit(limit)
}

struct MeasureSpec {
    text: String,
    value: u64,
    qubits: Vec<usize>,
}

fn parse_measure(text: &str, circuit: &Circuit) -> Result<MeasureSpec> {
    let bad = |why: &str| Error::config(format!("--measure {text:?}: {why}"));
    let (pattern, target) = text.split_once('@').ok_or_else(|| bad("expected pattern@qubits"))?;
    let qubits: Vec<usize> = if target == "all" {
        (0..circuit.n_qubits()).collect()
    } else if let Some(register) = circuit.register(target) {
        register.to_vec()
    } else {
        target
            .split(',')
            .map(|q| q.trim().parse::<usize>().map_err(|_| bad("unknown register or qubit")))
            .collect::<Result<_>>()?
    };
    if qubits.iter().any(|&q| q >= circuit.n_qubits()) {
        return Err(bad("qubit out of range"));
    }
    let value = match pattern.strip_prefix("0b") {
        Some(bits) => u64::from_str_radix(bits, 2),
        None => pattern.parse(),
    }
    .map_err(|_| bad("pattern must be an integer"))?;
    if qubits.len() < 64 && value >> qubits.len() != 0 {
        return Err(bad("pattern does not fit the qubits"));
    }
    Ok(MeasureSpec { text: text.to_string(), value, qubits })
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<()> {
    let circuit = load_circuit(args)?;
    let drop = parse_drop_limit(&args.drop_limit)?;
    let cap = dense_cap(args.dense_cap)?;
    let measure = args.measure.as_deref().map(|m| parse_measure(m, &circuit)).transpose()?;

    let start = Instant::now();
    let (label, dropped_mass, state): (String, Option<f64>, Box<dyn StateView>) = match args.backend {
        RunBackend::Array | RunBackend::Store => {
            let backend =
                if args.backend == RunBackend::Array { SparseBackend::Array } else { SparseBackend::IndexedStore };
            let report = run_sparse(&circuit, backend, drop)?;
            (backend.to_string(), Some(report.dropped_mass), Box::new(report.final_state))
        }
        RunBackend::Dense => ("dense".into(), None, Box::new(run_dense_with_cap(&circuit, cap)?)),
        RunBackend::Mixed => {
            let run = run_mixed(&circuit, drop, cap)?;
            let label = format!("mixed -> {}", run.choice);
            match run.result {
                MixedResult::Sparse(report) => (label, Some(report.dropped_mass), Box::new(report.final_state)),
                MixedResult::Dense(state) => (label, None, Box::new(state)),
            }
        }
    };
    let elapsed = start.elapsed();

    let n = circuit.n_qubits();
    let mut support = state.support()?;
    writeln!(out, "backend: {label}")?;
    writeln!(out, "qubits: {n}")?;
    writeln!(out, "gates: {}", circuit.gates().len())?;
    writeln!(out, "support: {}", support.len())?;
    support.sort_by(|a, b| b.1.norm_sqr().total_cmp(&a.1.norm_sqr()).then(a.0.cmp(&b.0)));
    writeln!(out, "top entries:")?;
    for (idx, amp) in support.iter().take(TOP_ENTRIES) {
        writeln!(out, "  {}  {:+.9}{:+.9}i  p={:.9}", idx.ket(n), amp.re, amp.im, amp.norm_sqr())?;
    }
    if let Some(m) = &measure {
        let pattern = BasisIndex::from_register_value(m.value, &m.qubits);
        let p = measure_probability(state.as_ref(), pattern, &m.qubits)?;
        writeln!(out, "measure {}: {p:.9}", m.text)?;
    }
    match dropped_mass {
        Some(mass) => writeln!(out, "dropped_mass: {mass:.9}")?,
        None => writeln!(out, "dropped_mass: n/a")?,
    }
    let sample = sample_measurement(state.as_ref(), args.seed)?;
    writeln!(out, "sample (seed {}): {}", args.seed, sample.ket(n))?;
    writeln!(out, "time: {:.6} s", elapsed.as_secs_f64())?;
    Ok(())
}

fn grid_backend(b: RunBackend) -> GridBackend {
    match b {
        RunBackend::Array => GridBackend::Array,
        RunBackend::Store => GridBackend::Store,
        RunBackend::Dense => GridBackend::Dense,
        RunBackend::Mixed => GridBackend::Mixed,
    }
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let cap = dense_cap(args.dense_cap)?;
    let format = match args.format {
        Some(FormatArg::Csv) => ResultFormat::Csv,
        Some(FormatArg::Json) => ResultFormat::Json,
        None => ResultFormat::from_path(&args.out),
    };
    let grid = |benchmark: Benchmark, first: usize| -> Result<Vec<BenchPoint>> {
        let n_min = args.n_min.unwrap_or(first);
        if n_min > args.n_max {
            return Err(Error::config(format!("--n-min {n_min} exceeds --n-max {}", args.n_max)));
        }
        let mut config = GridConfig::new(benchmark, (n_min..=args.n_max).collect());
        if let Some(r) = args.r {
            config.r_rule = crate::bench::RRule::Fixed(r);
        }
        if !args.backends.is_empty() {
            config.backends = args.backends.iter().map(|&b| grid_backend(b)).collect();
        }
        config.repeats = args.repeats;
        config.time_cutoff_s = args.timeout;
        config.seed = args.seed;
        config.dense_cap = cap;
        config.serial = !args.parallel;
        run_grid(&config)
    };
    let drop_study = |benchmark: Benchmark, n: usize, rs: Vec<usize>| -> Result<Vec<BenchPoint>> {
        let mut config = DropStudyConfig::new(benchmark, n, rs);
        config.limit = args.limit;
        config.repeats = args.repeats;
        config.seed = args.seed;
        config.dense_cap = cap;
        run_drop_study(&config)
    };
    let points = match args.suite {
        Suite::Superposition => grid(Benchmark::Superposition, 1)?,
        Suite::Addition => grid(Benchmark::Addition, 8)?,
        Suite::Grover => grid(Benchmark::Grover, 8)?,
        Suite::DropSuperposition => {
            let n = args.n.unwrap_or(20);
            drop_study(Benchmark::Superposition, n, (0..=n).collect())?
        }
        Suite::DropAddition => {
            let n = args.n.unwrap_or(26);
            if !Benchmark::Addition.admits_total(n) {
                return Err(Error::config(format!("--n {n} is not of the form 3k + 5")));
            }
            drop_study(Benchmark::Addition, n, (0..=Benchmark::Addition.max_nondet(n)).collect())?
        }
        Suite::DropGrover => {
            let r_max = args.n_max.saturating_sub(5) / 3;
            if r_max == 0 {
                return Err(Error::config("--n-max leaves no grover instance"));
            }
            drop_study(Benchmark::Grover, 0, (1..=r_max).collect())?
        }
    };
    emit_results(&points, format, &args.out)?;
    let count = |s: Status| points.iter().filter(|p| p.status == s).count();
    writeln!(
        out,
        "wrote {} rows to {}: {} ok, {} capacity cutoff, {} time cutoff",
        points.len(),
        args.out.display(),
        count(Status::Ok),
        count(Status::CapacityCutoff),
        count(Status::TimeCutoff)
    )?;
    Ok(())
}

fn cmd_export(args: &ExportArgs, out: &mut dyn Write) -> Result<()> {
    let circuit = generate(&args.gen)?;
    let mut text = serialize_circuit(&circuit);
    text.push('\n');
    std::fs::write(&args.out, text)?;
    writeln!(out, "wrote {} qubits, {} gates to {}", circuit.n_qubits(), circuit.gates().len(), args.out.display())?;
    Ok(())
}
