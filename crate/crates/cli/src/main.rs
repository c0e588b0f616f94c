use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use c10_cfe::cfe::CoefficientList;
use c10_cfe::classify::{child_positions, classify, ScanThresholds};
use c10_cfe::digits::{digits_up_to, DigitBudget, Position, DEFAULT_MAX_DIGITS};
use c10_cfe::natural::{decimal_len, to_decimal};
use c10_cfe::oracles::HwmIndex;
use c10_cfe::verify::{
    analyze_child, chain_observation, compute_hwm, required_digits, verify_computation, Status,
    VerifyOptions, DEFAULT_GUARD_DIGITS,
};
use c10_cfe::Error;

mod report;

/// Highest HWM computed without `--deep`.
const CI_MAX_HWM: u32 = 8;

#[derive(Parser)]
#[command(
    name = "c10cfe",
    version,
    about = "Continued fraction of Champernowne's constant"
)]
struct Cli {
    /// Largest number of C10 digits any command may materialize.
    #[arg(long, global = true, env = "C10_MAX_DIGITS", default_value_t = DEFAULT_MAX_DIGITS)]
    max_digits: u64,

    /// Extra digits of C10 beyond an error's exponent when measuring it.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD_DIGITS)]
    guard_digits: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write C10 through a position, leading "0" included.
    Digits {
        #[arg(long)]
        position: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form predictions for an HWM or the child that follows it.
    Predict {
        #[arg(long)]
        hwm: u32,
        /// Predict the 2nd-generation HWM between HWM #N and HWM #(N+1).
        #[arg(long)]
        child: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compute the coefficients up to HWM #N and write them one per line.
    Compute {
        #[arg(long)]
        hwm: u32,
        #[arg(long)]
        out: PathBuf,
        /// Also write the convergent numerator to FILE.numerator.
        #[arg(long)]
        emit_numerator: bool,
        /// Allow HWM #9 and above.
        #[arg(long)]
        deep: bool,
    },
    /// Compute the convergent before HWM #N and check every prediction.
    Verify {
        #[arg(long)]
        hwm: u32,
        /// Measure NCD and the error against materialized digits.
        #[arg(long)]
        error: bool,
        /// Allow HWM #9 and above.
        #[arg(long)]
        deep: bool,
        /// Also compute HWM #(N+1)'s convergent to expose HWM #N itself.
        #[arg(long)]
        chain: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Label HWM generations in a coefficient file.
    Classify {
        #[arg(long)]
        coefficients: PathBuf,
        /// Lines of "hwm,min_length"; defaults to the built-in table.
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Analyse the convergent truncated before a 2nd-generation HWM.
    Child {
        #[arg(long)]
        coefficient_index: usize,
        #[arg(long)]
        coefficients: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Time the convergent computation for each HWM up to N.
    Bench {
        #[arg(long)]
        max_hwm: u32,
        /// Allow HWM #9 and above.
        #[arg(long)]
        deep: bool,
    },
}

enum Outcome {
    Ok,
    Violation,
}

#[derive(Debug)]
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<Outcome, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("c10cfe: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(Failure(msg)) => {
            eprintln!("c10cfe: {}", msg.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let budget = DigitBudget(cli.max_digits);
    let guard = cli.guard_digits;
    match cli.command {
        Command::Digits { position, out } => digits(position, out.as_deref(), budget),
        Command::Predict { hwm, child, format } => predict(hwm, child, format),
        Command::Compute {
            hwm,
            out,
            emit_numerator,
            deep,
        } => compute(hwm, &out, emit_numerator, deep, budget),
        Command::Verify {
            hwm,
            error,
            deep,
            chain,
            format,
        } => verify(hwm, error, deep, chain, format, budget, guard),
        Command::Classify {
            coefficients,
            thresholds,
            format,
        } => classify_file(&coefficients, thresholds.as_deref(), format),
        Command::Child {
            coefficient_index,
            coefficients,
            format,
        } => child(coefficient_index, &coefficients, format, budget, guard),
        Command::Bench { max_hwm, deep } => bench(max_hwm, deep, budget),
    }
}

fn hwm_arg(n: u32, deep: bool) -> Result<HwmIndex, Failure> {
    if n < 4 {
        return Err(Failure(format!(
            "HWM #{n} is below the first computable HWM #4"
        )));
    }
    if n > CI_MAX_HWM && !deep {
        return Err(Failure(format!(
            "HWM #{n} is beyond the default profile (HWM #{CI_MAX_HWM}); pass --deep to run it"
        )));
    }
    Ok(HwmIndex::new(n)?)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_coefficients(path: &Path) -> Result<CoefficientList, Failure> {
    CoefficientList::read_from(open(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn digits(position: u64, out: Option<&Path>, budget: DigitBudget) -> CmdResult {
    let prefix = digits_up_to(Position(position), budget)?;
    let write = |w: &mut dyn Write| -> io::Result<()> {
        let ascii: Vec<u8> = prefix.digits().iter().map(|d| b'0' + d).collect();
        w.write_all(&ascii)?;
        w.write_all(b"\n")?;
        w.flush()
    };
    match out {
        Some(path) => write(&mut create(path)?)?,
        None => write(&mut io::stdout().lock())?,
    }
    Ok(Outcome::Ok)
}

fn predict(n: u32, child: bool, format: Format) -> CmdResult {
    let record = report::prediction(HwmIndex::new(n)?, child)?;
    match format {
        Format::Json => print_json(&record)?,
        Format::Csv => print!("{}", report::prediction_csv(&record)),
        Format::Text => print!("{}", report::prediction_text(&record)),
    }
    Ok(Outcome::Ok)
}

fn compute(n: u32, out: &Path, emit_numerator: bool, deep: bool, budget: DigitBudget) -> CmdResult {
    let n = hwm_arg(n, deep)?;
    let c = compute_hwm(n, budget)?;
    let mut w = create(out)?;
    c.coefficients.write_to(&mut w)?;
    w.flush()?;
    if emit_numerator {
        let mut path = out.as_os_str().to_owned();
        path.push(".numerator");
        let mut w = create(Path::new(&path))?;
        writeln!(w, "{}", to_decimal(c.convergent.numerator()))?;
        w.flush()?;
    }
    println!(
        "HWM {n}: {} coefficients, {} coefficient digits, {} C10 digits used{}",
        c.coefficients.len(),
        c.coefficients.total_digits(),
        c.c10_digits_used,
        if c.degenerate_split {
            ", final term split"
        } else {
            ""
        }
    );
    Ok(Outcome::Ok)
}

fn verify(
    n: u32,
    error: bool,
    deep: bool,
    chain: bool,
    format: ReportFormat,
    budget: DigitBudget,
    guard: u64,
) -> CmdResult {
    let n = hwm_arg(n, deep)?;
    let opts = VerifyOptions {
        budget,
        guard_digits: guard,
        compute_error: error,
    };
    budget.check(required_digits(n, &opts)?)?;
    if chain {
        let next = HwmIndex::new(n.get() + 1)?;
        budget.check(required_digits(
            next,
            &VerifyOptions {
                compute_error: false,
                ..opts
            },
        )?)?;
    }
    let c = compute_hwm(n, budget)?;
    let profile = verify_computation(&c, &opts)?;
    let chained = if chain {
        let next = compute_hwm(HwmIndex::new(n.get() + 1)?, budget)?;
        Some(chain_observation(&c, &next)?)
    } else {
        None
    };
    let chain_ok = chained.as_ref().is_none_or(|c| c.confirmed());
    match format {
        ReportFormat::Json => {
            let mut v = serde_json::to_value(&profile)?;
            if let (Some(c), Value::Object(map)) = (&chained, &mut v) {
                map.insert("chain".into(), serde_json::to_value(c)?);
            }
            print_json(&v)?;
        }
        ReportFormat::Text => {
            print!("{}", report::profile_text(&profile));
            if let Some(c) = &chained {
                print!("{}", report::chain_text(c));
            }
        }
    }
    Ok(if profile.status == Status::Confirmed && chain_ok {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn classify_file(path: &Path, thresholds: Option<&Path>, format: Format) -> CmdResult {
    let list = read_coefficients(path)?;
    let thresholds = match thresholds {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            ScanThresholds::parse(&text).map_err(|e| Failure(format!("{}: {e}", p.display())))?
        }
        None => ScanThresholds::published(),
    };
    let entries = match classify(&list.digit_lengths(), &thresholds) {
        Ok(entries) => entries,
        Err(e @ Error::AnchorFailure { .. }) => {
            eprintln!("c10cfe: {e}");
            return Ok(Outcome::Violation);
        }
        Err(e) => return Err(e.into()),
    };
    let children = child_positions(&entries);
    match format {
        Format::Csv => print!("{}", report::classification_csv(&entries)),
        Format::Json => print_json(&json!({
            "schema_version": report::SCHEMA_VERSION,
            "entries": entries,
            "children": children,
        }))?,
        Format::Text => print!("{}", report::classification_text(&entries, &children)),
    }
    Ok(if children.consistent() {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn child(
    index: usize,
    path: &Path,
    format: ReportFormat,
    budget: DigitBudget,
    guard: u64,
) -> CmdResult {
    let list = read_coefficients(path)?;
    if index == 0 || index >= list.len() {
        return Err(Failure(format!(
            "coefficient index {index} is outside 1..{}",
            list.len()
        )));
    }
    let opts = VerifyOptions {
        budget,
        guard_digits: guard,
        compute_error: true,
    };
    let profile = analyze_child(&list, index, &opts)?;
    match format {
        ReportFormat::Json => print_json(&profile)?,
        ReportFormat::Text => print!("{}", report::child_text(&profile)),
    }
    Ok(if profile.status == Status::Confirmed {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

fn bench(max: u32, deep: bool, budget: DigitBudget) -> CmdResult {
    let top = hwm_arg(max, deep)?;
    let mut rows = Vec::new();
    for n in 4..=top.get() {
        let start = Instant::now();
        let c = compute_hwm(HwmIndex::new(n)?, budget)?;
        let secs = start.elapsed().as_secs_f64();
        rows.push(report::BenchRow {
            hwm: n,
            seconds: secs,
            c10_digits: c.c10_digits_used,
            numerator_digits: decimal_len(c.convergent.numerator()),
            coefficients: c.coefficients.len(),
        });
    }
    print!("{}", report::bench_text(&rows));
    Ok(Outcome::Ok)
}
