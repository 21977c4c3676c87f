use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use collatz_sieve::numeric::{self, default_max_steps, verify_range, NumericError, RangeOptions};
use collatz_sieve::properties::{top_tso, PropertyId};
use collatz_sieve::reports::{
    compare_counts, coverage_report, export_tree, leaf_counts, pso_histogram,
    read_reference_column, table_summary, trajectory_table, ComparisonRow, Metadata, ParityFilter,
    ReportDocument, ReportError, Tabular, TreeFormat,
};
use collatz_sieve::sieve::{
    leaf_cross_check, sieve, NodeStatus, SieveBudget, SieveError, SieveResult,
};
use collatz_sieve::ResidueClass;

const EXIT_FAILED: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "collatz-sieve",
    version,
    about = "Collatz stopping times by trajectory walking and residue-class sieving"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory, TSO, PSO and peak of one start value.
    Traj {
        n: BigUint,
        #[arg(long)]
        max_steps: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Verify every start value in a range and report the extremes.
    Verify {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 1 << 16)]
        chunk: usize,
        #[arg(long)]
        json: bool,
    },
    /// Sieve a residue class and cross-check its leaves numerically.
    Sieve {
        #[command(flatten)]
        run: SieveArgs,
        #[arg(long, value_enum, requires = "out")]
        export: Option<ExportFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Members sampled per leaf by the cross-check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Audit trajectory identities up to a limit.
    Properties {
        #[arg(long)]
        limit: u64,
        /// Comma-separated subset of property ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Also list the K longest trajectories.
        #[arg(long)]
        top: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Tables and ledgers as CSV or JSON.
    Report {
        #[command(subcommand)]
        report: Report,
    },
}

#[derive(Args)]
struct SieveArgs {
    /// Root class as `M,R`.
    #[arg(long, value_parser = parse_class)]
    class: ResidueClass,
    #[arg(long)]
    max_steps: u64,
    /// Largest modulus, as `2^J` or a decimal number.
    #[arg(long, value_parser = parse_modulus)]
    max_modulus: BigUint,
}

#[derive(Args)]
struct Output {
    /// Write to a `.csv` or `.json` file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of CSV on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Compare {
    /// Reference CSV with a `pso` column.
    #[arg(long, requires = "column")]
    compare: Option<PathBuf>,
    #[arg(long, requires = "compare")]
    column: Option<String>,
}

#[derive(Subcommand)]
enum Report {
    /// `(n, PSO, TSO)` summary rows.
    Table3 {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 200)]
        to: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Full trajectories.
    Table1 {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 10)]
        to: u64,
        #[command(flatten)]
        output: Output,
    },
    /// PSO counts over members `M·x + R` of a class.
    Histogram {
        #[arg(long, value_parser = parse_class)]
        class: ResidueClass,
        #[arg(long, default_value_t = 0)]
        x_from: u64,
        #[arg(long)]
        x_to: u64,
        #[arg(long, default_value = "all")]
        parity: ParityFilter,
        #[command(flatten)]
        compare: Compare,
        #[command(flatten)]
        output: Output,
    },
    /// Density ledger of the quartet and octet stages, optionally deeper.
    Coverage {
        #[arg(long, default_value_t = 100)]
        max_steps: u64,
        /// Extra stages over the four quartets, as `2^J` moduli.
        #[arg(long, value_parser = parse_modulus)]
        deeper: Vec<BigUint>,
        #[command(flatten)]
        output: Output,
    },
    /// Terminal leaves per PSO of one sieve run.
    LeafCounts {
        #[command(flatten)]
        run: SieveArgs,
        #[command(flatten)]
        compare: Compare,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Dot,
}

fn parse_class(s: &str) -> Result<ResidueClass, String> {
    let (m, r) = s.split_once(',').ok_or("expected M,R")?;
    let m: BigUint = m.trim().parse().map_err(|e| format!("modulus: {e}"))?;
    let r: BigUint = r.trim().parse().map_err(|e| format!("remainder: {e}"))?;
    ResidueClass::new(m, r).map_err(|e| e.to_string())
}

fn parse_modulus(s: &str) -> Result<BigUint, String> {
    match s.split_once('^') {
        Some(("2", j)) => {
            let j: u32 = j.parse().map_err(|e| format!("exponent: {e}"))?;
            Ok(BigUint::from(1u32) << j)
        }
        Some(_) => Err("only powers of two (2^J) are supported".into()),
        None => s.parse().map_err(|e| format!("{e}")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
    Numeric(NumericError),
    Sieve(SieveError),
    Report(ReportError),
}

impl From<NumericError> for CliError {
    fn from(e: NumericError) -> Self {
        CliError::Numeric(e)
    }
}

impl From<SieveError> for CliError {
    fn from(e: SieveError) -> Self {
        match e {
            SieveError::Numeric(n) => CliError::Numeric(n),
            other => CliError::Sieve(other),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Report(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) | CliError::Sieve(SieveError::MismatchFound(_)) => EXIT_FAILED,
            CliError::Numeric(NumericError::BudgetExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => m.clone(),
            CliError::Numeric(e) => e.to_string(),
            CliError::Sieve(e) => e.to_string(),
            CliError::Report(e) => e.to_string(),
        }
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Traj { n, max_steps, json } => {
            traj(&n, max_steps.unwrap_or_else(default_max_steps), json)
        }
        Command::Verify {
            from,
            to,
            chunk,
            json,
        } => verify(from, to, chunk, json),
        Command::Sieve {
            run,
            export,
            out,
            samples,
        } => sieve_cmd(&run, export, out, samples),
        Command::Properties {
            limit,
            only,
            top,
            json,
        } => properties(limit, &only, top, json),
        Command::Report { report } => report_cmd(report),
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    let s = serde_json::to_string_pretty(value).map_err(ReportError::from)?;
    println!("{s}");
    Ok(())
}

#[derive(Serialize)]
struct TrajOutput {
    n: String,
    trajectory: Vec<String>,
    tso: u64,
    pso: Option<u64>,
    pst: Option<String>,
    peak: String,
}

fn traj(n: &BigUint, max_steps: u64, json: bool) -> CliResult {
    let summary = numeric::summarize(n, max_steps)?;
    let terms = numeric::trajectory(n, max_steps)?;
    let out = TrajOutput {
        n: n.to_string(),
        trajectory: terms.iter().map(|t| t.to_string()).collect(),
        tso: summary.tso,
        pso: summary.pso,
        pst: summary.pst.map(|p| p.to_string()),
        peak: summary.peak.to_string(),
    };
    if json {
        return print_json(&out);
    }
    println!("n          {}", out.n);
    println!("trajectory {}", out.trajectory.join(", "));
    println!("tso        {}", out.tso);
    match (out.pso, &out.pst) {
        (Some(k), Some(t)) => println!("pso        {k} (term {t})"),
        _ => println!("pso        NA"),
    }
    println!("peak       {}", out.peak);
    Ok(())
}

fn verify(from: u64, to: u64, chunk: usize, json: bool) -> CliResult {
    if chunk == 0 {
        return Err(CliError::Usage("--chunk must be positive".into()));
    }
    let opts = RangeOptions {
        chunk,
        ..RangeOptions::default()
    };
    let report = verify_range(from, to, &opts)?;
    if json {
        return print_json(&report);
    }
    println!(
        "verified   {} values in {}..={}",
        report.verified, report.lo, report.hi
    );
    println!(
        "max pso    {} at n={}",
        report.max_pso.value, report.max_pso.n
    );
    println!(
        "max tso    {} at n={}",
        report.max_tso.value, report.max_tso.n
    );
    println!(
        "max peak   {} at n={}",
        report.max_peak.value, report.max_peak.n
    );
    println!(
        "cache      {} hits, {} on demand, {} entries",
        report.cache.hits, report.cache.on_demand, report.cache.entries
    );
    Ok(())
}

fn run_sieve(args: &SieveArgs) -> Result<SieveResult, CliError> {
    Ok(sieve(
        &args.class,
        &SieveBudget::new(args.max_steps, args.max_modulus.clone()),
    )?)
}

fn sieve_cmd(
    args: &SieveArgs,
    export: Option<ExportFormat>,
    out: Option<PathBuf>,
    samples: usize,
) -> CliResult {
    let result = run_sieve(args)?;
    let s = &result.stats;
    println!("root       {}", result.root);
    println!("budget     {}", result.budget);
    println!(
        "nodes      {} (max modulus {})",
        result.nodes.len(),
        s.max_modulus_reached
    );
    println!(
        "leaves     {} terminal, {} eventually terminal, {} exhausted",
        s.terminal, s.eventually_terminal, s.exhausted
    );
    println!("density    {}", result.leaf_density_sum());
    for leaf in result.leaves() {
        let status = match &leaf.status {
            NodeStatus::Terminal { pso } => format!("pso {pso}"),
            NodeStatus::EventuallyTerminal { pso, threshold } => {
                format!("pso {pso} for x > {threshold}")
            }
            NodeStatus::Exhausted(reason) => format!("exhausted ({reason:?})").to_lowercase(),
            NodeStatus::Split => unreachable!(),
        };
        println!(
            "  {:<24} step {:<4} {status}",
            leaf.class.to_string(),
            leaf.step
        );
    }
    if let (Some(format), Some(path)) = (export, out) {
        let format = match format {
            ExportFormat::Json => TreeFormat::Json,
            ExportFormat::Dot => TreeFormat::Dot,
        };
        std::fs::write(&path, export_tree(&result, format)?).map_err(ReportError::from)?;
        println!("exported   {}", path.display());
    }
    let check = leaf_cross_check(&result, samples)?;
    println!(
        "cross-check ok: {} leaves, {} members, {} exceptional members walked",
        check.leaves_checked, check.members_checked, check.exceptional_verified
    );
    Ok(())
}

fn properties(limit: u64, only: &[String], top: Option<usize>, json: bool) -> CliResult {
    let ids = if only.is_empty() {
        PropertyId::ALL.to_vec()
    } else {
        only.iter()
            .map(|name| {
                PropertyId::from_name(name).ok_or_else(|| {
                    let known: Vec<_> = PropertyId::ALL.iter().map(|p| p.name()).collect();
                    CliError::Usage(format!(
                        "unknown property {name:?} (known: {})",
                        known.join(", ")
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let reports = ids
        .iter()
        .map(|p| p.check(limit))
        .collect::<Result<Vec<_>, _>>()?;
    let longest = top.map(|k| top_tso(limit, k)).transpose()?;
    if json {
        #[derive(Serialize)]
        struct Out<'a> {
            reports: &'a [collatz_sieve::properties::PropertyReport],
            #[serde(skip_serializing_if = "Option::is_none")]
            longest: Option<&'a [collatz_sieve::properties::LongTrajectory]>,
        }
        print_json(&Out {
            reports: &reports,
            longest: longest.as_deref(),
        })?;
    } else {
        for r in &reports {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            print!(
                "{verdict} {:<20} {}..={} checked {} skipped {}",
                r.property.name(),
                r.lo,
                r.hi,
                r.checked,
                r.vacuous
            );
            match &r.witness {
                Some(w) => println!(" counterexample n={}: {}", w.n, w.details),
                None => println!(),
            }
        }
        for t in longest.iter().flatten() {
            println!("long       n={} tso={}", t.n, t.tso);
        }
    }
    match reports.iter().find(|r| !r.passed) {
        Some(r) => Err(CliError::Failed(format!(
            "property {} has a counterexample",
            r.property.name()
        ))),
        None => Ok(()),
    }
}

fn emit<T: Serialize + Tabular>(doc: &ReportDocument<T>, output: &Output) -> CliResult {
    match &output.out {
        Some(path) => doc.write_to(path)?,
        None if output.json => print!("{}", doc.to_json()?),
        None => print!("{}", doc.to_csv()?),
    }
    Ok(())
}

/// Print the diff on stderr so it never mixes with the table itself.
fn side_by_side(computed: &BTreeMap<u64, u64>, compare: &Compare) -> CliResult {
    let (Some(path), Some(column)) = (&compare.compare, &compare.column) else {
        return Ok(());
    };
    let reference = read_reference_column(path, column)?;
    let rows = compare_counts(computed, &reference);
    let agree = rows.iter().filter(|r| r.agree).count();
    let meta = Metadata::new("comparison")
        .param("reference", path.display())
        .param("column", column);
    let doc = ReportDocument::<ComparisonRow>::new(meta, rows);
    eprint!("{}", doc.to_csv()?);
    eprintln!("agreement {agree}/{} against {column}", doc.rows.len());
    Ok(())
}

fn report_cmd(report: Report) -> CliResult {
    match report {
        Report::Table3 { from, to, output } => emit(&table_summary(from, to)?, &output),
        Report::Table1 { from, to, output } => emit(&trajectory_table(from, to)?, &output),
        Report::Histogram {
            class,
            x_from,
            x_to,
            parity,
            compare,
            output,
        } => {
            if x_from > x_to {
                return Err(CliError::Usage("--x-from must not exceed --x-to".into()));
            }
            let hist = pso_histogram(&class, x_from, x_to, parity)?;
            emit(&hist.to_document(), &output)?;
            side_by_side(&hist.counts(), &compare)
        }
        Report::Coverage {
            max_steps,
            deeper,
            output,
        } => {
            let quartets = |modulus: BigUint| -> Result<Vec<SieveResult>, CliError> {
                (0u32..4)
                    .map(|r| {
                        let root = ResidueClass::new(4u32, r).expect("valid quartet");
                        Ok(sieve(&root, &SieveBudget::new(max_steps, modulus.clone()))?)
                    })
                    .collect()
            };
            let mut stages = vec![
                ("quartet".to_string(), quartets(BigUint::from(4u32))?),
                ("octet".to_string(), quartets(BigUint::from(32u32))?),
            ];
            for m in deeper {
                stages.push((format!("modulus-{m}"), quartets(m)?));
            }
            let view: Vec<(&str, &[SieveResult])> = stages
                .iter()
                .map(|(l, r)| (l.as_str(), r.as_slice()))
                .collect();
            emit(&coverage_report(&view), &output)
        }
        Report::LeafCounts {
            run,
            compare,
            output,
        } => {
            let result = run_sieve(&run)?;
            let counts = leaf_counts(&result);
            let meta = Metadata::new("leaf-counts")
                .param("root", &result.root)
                .param("budget", &result.budget);
            let rows = counts
                .iter()
                .map(|(&pso, &leaves)| LeafCountRow { pso, leaves })
                .collect();
            emit(&ReportDocument::new(meta, rows), &output)?;
            side_by_side(&counts, &compare)
        }
    }
}

#[derive(Serialize)]
struct LeafCountRow {
    pso: u64,
    leaves: u64,
}

impl Tabular for LeafCountRow {
    fn header() -> &'static [&'static str] {
        &["pso", "leaves"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.pso.to_string(), self.leaves.to_string()]
    }
}
