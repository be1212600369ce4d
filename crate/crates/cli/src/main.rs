use std::fmt;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use hirzebruch_core::decimal::RationalJson;
use hirzebruch_core::{
    build_hirzebruch_polytope, convergence_csv, count_brute_force, count_closed_form, count_slice_sum,
    ensure_cell_budget, monomial_basis, quantization_dimension, ratio_convergence, run_sweep, run_verification,
    sweep, symplectic_volume, vertices, BernoulliConvention, CountMethod, CountResult, Error, FibrationParams,
    OutputFormat, QuantizationRecord, SweepSpec, VerifyConfig,
};
use serde::Serialize;

/// Environment variable naming the directory sweeps write to when
/// `--output` is not given.
const OUTPUT_DIR_VAR: &str = "HIRZEBRUCH_OUTPUT_DIR";

/// Brute-force enumeration refuses boxes larger than this without `--force`.
const BRUTE_FORCE_CELL_LIMIT: u64 = 100_000_000;

#[derive(Parser, Debug)]
#[command(name = "hirzebruch", version)]
#[command(about = "Exact quantization dimensions of projective spaces and generalized Hirzebruch fibrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct ParamArgs {
    /// Complex dimension of the base projective space (d ≥ 1)
    #[arg(long)]
    d: u64,
    /// Base symplectic parameter
    #[arg(long)]
    a: u64,
    /// Fiber symplectic parameter
    #[arg(long)]
    b: u64,
    /// Twisting parameter
    #[arg(long)]
    n: u64,
}

impl ParamArgs {
    fn params(&self) -> Result<FibrationParams, Failure> {
        Ok(FibrationParams::new(self.d, self.a, self.b, self.n)?)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    SliceSum,
    ClosedForm,
    BruteForce,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SingleMethod {
    SliceSum,
    ClosedForm,
    BruteForce,
}

impl From<SingleMethod> for CountMethod {
    fn from(m: SingleMethod) -> Self {
        match m {
            SingleMethod::SliceSum => CountMethod::SliceSum,
            SingleMethod::ClosedForm => CountMethod::ClosedForm,
            SingleMethod::BruteForce => CountMethod::BruteForce,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ConventionArg {
    Plus,
    Minus,
}

impl From<ConventionArg> for BernoulliConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Plus => BernoulliConvention::BPlus,
            ConventionArg::Minus => BernoulliConvention::BMinus,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantization dimension Q_{a,b,d}(n) as a JSON record
    Quantize {
        #[command(flatten)]
        params: ParamArgs,
        /// Counting method; `all` cross-checks the three methods
        #[arg(long, value_enum, default_value = "slice-sum")]
        method: MethodArg,
        /// Allow brute-force enumeration of more than 10^8 cells
        #[arg(long)]
        force: bool,
    },
    /// Moment polytope data: inequalities, vertices or monomial basis
    #[command(group(ArgGroup::new("what").required(true).args(["vertices", "inequalities", "basis"])))]
    Polytope {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        vertices: bool,
        #[arg(long)]
        inequalities: bool,
        #[arg(long)]
        basis: bool,
        /// Allow enumerating more than 10^8 cells for --basis
        #[arg(long)]
        force: bool,
    },
    /// Exact symplectic volume
    Volume {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the verification suite and print its report
    Verify {
        /// Largest d in the brute-force oracle grid
        #[arg(long, default_value_t = 3)]
        max_d: u64,
        /// Largest a, b, n in the brute-force oracle grid
        #[arg(long, default_value_t = 3)]
        max_param: u64,
        /// Twists for the asymptotic check, comma separated and strictly increasing
        #[arg(long, default_value = "10,100,1000")]
        n_list: String,
        /// Brute-force cell budget per polytope
        #[arg(long, default_value_t = hirzebruch_core::verify::DEFAULT_MAX_CELLS)]
        max_cells: u64,
    },
    /// Evaluate a parameter box and write one row per (d, a, b, n)
    Sweep {
        /// Range for d, as `lo:hi` or a single value
        #[arg(long, value_parser = parse_range)]
        d: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        a: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        b: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u64>,
        /// Counting methods to tabulate, comma separated
        #[arg(long, value_enum, value_delimiter = ',', default_value = "slice-sum")]
        methods: Vec<SingleMethod>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Output file; defaults to sweep.<ext> in $HIRZEBRUCH_OUTPUT_DIR or the working directory
        #[arg(long)]
        output: Option<PathBuf>,
        /// Allow brute-force enumeration of more than 10^8 cells
        #[arg(long)]
        force: bool,
    },
    /// Ratio Q/Vol against the Bernoulli series for growing twists
    Asymptotics {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value = "10,100,1000")]
        n_list: String,
        #[arg(long, value_enum, default_value = "plus")]
        convention: ConventionArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    match s.split_once(':') {
        Some((lo, hi)) => {
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(format!("empty range {lo}:{hi}"));
            }
            Ok(lo..=hi)
        }
        None => parse(s).map(|v| v..=v),
    }
}

fn parse_n_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|e| Failure::Usage(format!("bad --n-list entry {x:?}: {e}")))
        })
        .collect()
}

/// Failure classes with stable exit codes.
#[derive(Debug)]
enum Failure {
    Verification(String),
    Usage(String),
    Resource(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Resource(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Resource(m) => write!(f, "{m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(_) => Failure::Resource(e.to_string()),
            Error::Overflow(_) | Error::NonIntegral(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Failure::Io(e.to_string()))
}

fn brute_force_guard(params: FibrationParams, force: bool) -> Result<(), Failure> {
    if !force {
        ensure_cell_budget(&build_hirzebruch_polytope(params), BRUTE_FORCE_CELL_LIMIT)
            .map_err(|e| Failure::Resource(format!("{e}; pass --force to enumerate anyway")))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct QuantizeOutput {
    #[serde(flatten)]
    record: QuantizationRecord,
    counts: Vec<CountResult>,
}

fn cmd_quantize(params: ParamArgs, method: MethodArg, force: bool) -> Result<(), Failure> {
    let p = params.params()?;
    let brute = || -> Result<CountResult, Failure> {
        brute_force_guard(p, force)?;
        Ok(count_brute_force(&build_hirzebruch_polytope(p))?)
    };
    let counts = match method {
        MethodArg::SliceSum => vec![count_slice_sum(p)],
        MethodArg::ClosedForm => vec![count_closed_form(p)],
        MethodArg::BruteForce => vec![brute()?],
        MethodArg::All => vec![brute()?, count_slice_sum(p), count_closed_form(p)],
    };
    let record = quantization_dimension(p);
    let disagree: Vec<String> = counts
        .iter()
        .filter(|c| c.value != record.dimension)
        .map(|c| format!("{} gives {}", c.method, c.value))
        .collect();
    print_json(&QuantizeOutput { record: record.clone(), counts })?;
    if !disagree.is_empty() {
        return Err(Failure::Verification(format!(
            "{p}: dimension {} but {}",
            record.dimension,
            disagree.join(", ")
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerticesOutput {
    vertices: Vec<Vec<i64>>,
    degenerate: bool,
}

fn cmd_polytope(params: ParamArgs, show_vertices: bool, inequalities: bool, basis: bool, force: bool) -> Result<(), Failure> {
    let p = params.params()?;
    if show_vertices {
        let vs = vertices(p);
        print_json(&VerticesOutput {
            vertices: vs.vertices.into_iter().map(|v| v.0).collect(),
            degenerate: vs.degenerate,
        })
    } else if inequalities {
        print_json(&build_hirzebruch_polytope(p))
    } else {
        debug_assert!(basis);
        brute_force_guard(p, force)?;
        print_json(&monomial_basis(&build_hirzebruch_polytope(p))?)
    }
}

fn cmd_volume(params: ParamArgs) -> Result<(), Failure> {
    print_json(&RationalJson(symplectic_volume(params.params()?)))
}

fn cmd_verify(max_d: u64, max_param: u64, n_list: &str, max_cells: u64) -> Result<(), Failure> {
    let cfg = VerifyConfig {
        oracle_max_d: max_d,
        oracle_max_param: max_param,
        n_list: parse_n_list(n_list)?,
        max_cells,
        ..VerifyConfig::default()
    };
    let report = run_verification(&cfg)?;
    for c in &report.checks {
        let status = match (c.certified, c.passed()) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, _) => "INFO",
        };
        eprintln!("{status} {} ({} cases, {} failures)", c.name, c.cases, c.failures);
        if !c.certified {
            if let Some(note) = &c.note {
                eprintln!("     {note}");
            }
        }
    }
    print_json(&report)?;
    if let Some(reason) = &report.aborted {
        return Err(Failure::Resource(format!("verification aborted: {reason}")));
    }
    if !report.pass {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.certified && !c.passed())
            .map(|c| c.name.as_str())
            .collect();
        return Err(Failure::Verification(failed.join(", ")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    d: RangeInclusive<u64>,
    a: RangeInclusive<u64>,
    b: RangeInclusive<u64>,
    n: RangeInclusive<u64>,
    methods: Vec<SingleMethod>,
    format: FormatArg,
    output: Option<PathBuf>,
    force: bool,
) -> Result<(), Failure> {
    let format = match format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let spec = SweepSpec {
        d,
        a,
        b,
        n,
        methods: methods.into_iter().map(CountMethod::from).collect(),
        format,
        max_cells: (!force).then_some(BRUTE_FORCE_CELL_LIMIT),
    };
    let path = output.unwrap_or_else(|| {
        let dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from).unwrap_or_default();
        dir.join(match format {
            OutputFormat::Csv => "sweep.csv",
            OutputFormat::Json => "sweep.json",
        })
    });
    let rows = run_sweep(&spec)?;
    let text = sweep::render(&rows, &spec);
    fs::write(&path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.methods_agree())
        .map(|r| r.record.params.to_string())
        .collect();
    if !bad.is_empty() {
        return Err(Failure::Verification(format!("methods disagree at {}", bad.join(", "))));
    }
    Ok(())
}

fn cmd_asymptotics(
    d: u64,
    a: u64,
    b: u64,
    n_list: &str,
    convention: ConventionArg,
    format: FormatArg,
) -> Result<(), Failure> {
    let n_list = parse_n_list(n_list)?;
    let rows = ratio_convergence(a, b, d, &n_list, convention.into())?;
    match format {
        FormatArg::Csv => {
            print!("{}", convergence_csv(&rows));
            Ok(())
        }
        FormatArg::Json => print_json(&rows),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Quantize { params, method, force } => cmd_quantize(params, method, force),
        Command::Polytope {
            params,
            vertices,
            inequalities,
            basis,
            force,
        } => cmd_polytope(params, vertices, inequalities, basis, force),
        Command::Volume { params } => cmd_volume(params),
        Command::Verify {
            max_d,
            max_param,
            n_list,
            max_cells,
        } => cmd_verify(max_d, max_param, &n_list, max_cells),
        Command::Sweep {
            d,
            a,
            b,
            n,
            methods,
            format,
            output,
            force,
        } => cmd_sweep(d, a, b, n, methods, format, output, force),
        Command::Asymptotics {
            d,
            a,
            b,
            n_list,
            convention,
            format,
        } => cmd_asymptotics(d, a, b, &n_list, convention, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hirzebruch: {f}");
            ExitCode::from(f.code())
        }
    }
}
