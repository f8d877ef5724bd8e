use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use switchbox::construct::{build_by_index, BuildParams};
use switchbox::field::default_modulus;
use switchbox::io::{load_permutation, AnalysisReport, IoError, PermFile};
use switchbox::repro::{self, RowStatus, TableRow};
use switchbox::subset::{parse_hex, SetFile};
use switchbox::{CheckMode, FieldCtx, PermError};

#[derive(Parser)]
#[command(
    name = "switchbox",
    version,
    about = "Differentially 4-uniform permutations from a switched inverse function"
)]
struct Cli {
    /// Worker threads (default: $SWITCHBOX_JOBS, else all cores).
    #[arg(long, global = true, env = "SWITCHBOX_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and verify a field modulus.
    Field(FieldArgs),
    /// Build one of the seven constructions.
    Build(BuildArgs),
    /// Analyze a permutation table (JSON or one value per line).
    Analyze(AnalyzeArgs),
    /// Regenerate the reference tables for n = 6, 10, 12.
    Tables(TablesArgs),
    /// Regenerate the three worked examples at n = 12.
    Examples(OutArg),
    /// Count x with Tr(x) = Tr(x/(1+x)) = 1.
    Count(CountArgs),
    /// Seeded random-S1 nonlinearity statistics at n = 12.
    Sample(SampleArgs),
}

#[derive(Args)]
struct OutArg {
    /// Output file; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    n: u32,
    /// Hex coefficient mask, e.g. 0x1099.
    #[arg(long, value_parser = hex_arg)]
    modulus: Option<u32>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = hex_arg)]
    modulus: Option<u32>,
    /// Construction index 1..=7.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
    theorem: u8,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    k1: Option<u32>,
    #[arg(long)]
    k2: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    /// Set file {n, modulus, exponents|elements} for S1.
    #[arg(long)]
    s1: Option<PathBuf>,
    /// Skip the brute-force uniformity check.
    #[arg(long)]
    fast: bool,
    /// Permutation JSON to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the analysis report here (`.csv` or JSON).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    /// Modulus for plain-text tables (JSON files carry their own).
    #[arg(long, value_parser = hex_arg)]
    modulus: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// One of 6, 10, 12; all three when omitted.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["6", "10", "12"]))]
    n: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, default_value_t = 12)]
    n: u32,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use 10000 samples.
    #[arg(long)]
    full: bool,
    /// `.csv` writes per-sample rows, JSON writes the summary with samples.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn hex_arg(s: &str) -> Result<u32, String> {
    parse_hex(s).ok_or_else(|| format!("{s:?} is not a hex modulus"))
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn write_json(path: &Path, value: &impl Serialize) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn field_ctx(n: u32, modulus: Option<u32>) -> Result<Arc<FieldCtx>, Failure> {
    let m = match modulus {
        Some(m) => m,
        None => default_modulus(n)
            .ok_or_else(|| Failure::Usage(format!("no built-in modulus for n = {n}")))?,
    };
    Ok(Arc::new(FieldCtx::new(n, m)?))
}

fn cmd_field(a: FieldArgs) -> Outcome {
    #[derive(Serialize)]
    struct Info {
        n: u32,
        modulus: String,
        irreducible: bool,
        primitive: bool,
        generator: String,
        omega: Option<String>,
        trace_mask: String,
    }
    let ctx = field_ctx(a.n, a.modulus)?;
    let info = Info {
        n: ctx.n(),
        modulus: format!("{:#x}", ctx.modulus()),
        irreducible: true,
        primitive: ctx.is_primitive(),
        generator: format!("{}", ctx.generator()),
        omega: ctx.omega().ok().map(|w| w.to_string()),
        trace_mask: format!("{:#x}", ctx.trace_mask()),
    };
    println!("{}", serde_json::to_string_pretty(&info)?);
    Ok(())
}

fn cmd_build(a: BuildArgs) -> Outcome {
    let ctx = field_ctx(a.n, a.modulus)?;
    let s1 = match &a.s1 {
        Some(path) => Some(SetFile::parse(&fs::read_to_string(path)?)?.to_set(&ctx)?),
        None => None,
    };
    let params = BuildParams {
        k: a.k,
        k1: a.k1,
        k2: a.k2,
        l: a.l,
        s1,
    };
    let mode = if a.fast {
        CheckMode::Fast
    } else {
        CheckMode::Full
    };
    let r = build_by_index(&ctx, a.theorem, &params, mode)?;
    let report = AnalysisReport::from_construction(&r);
    println!(
        "{}: |S| = {}, uniformity {}, NL {}, degree {}, bound {}",
        r.provenance,
        r.set.len(),
        report.uniformity,
        report.nonlinearity,
        report.degree,
        report
            .bounds
            .best
            .map(|b| b.to_string())
            .unwrap_or_else(|| "-".into()),
    );
    if let Some(out) = &a.out {
        write_json(out, &PermFile::from_perm(&r.perm))?;
    }
    if let Some(path) = &a.report {
        write_report(path, &report)?;
    }
    Ok(())
}

fn write_report(path: &Path, report: &AnalysisReport) -> Outcome {
    if is_csv(path) {
        fs::write(
            path,
            format!("{}\n{}\n", AnalysisReport::CSV_HEADER, report.csv_row()),
        )?;
        Ok(())
    } else {
        write_json(path, report)
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> Outcome {
    let text = fs::read_to_string(&a.input)?;
    let p = match load_permutation(&text, a.modulus) {
        Ok(p) => p,
        Err(IoError::Perm(e @ PermError::NotAPermutation(_))) => {
            return Err(Failure::Usage(format!("NotAPermutation: {e}")))
        }
        Err(e) => return Err(e.into()),
    };
    let report = AnalysisReport::analyze(&p, "input", None);
    match &a.out {
        Some(path) => write_report(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}

fn cmd_tables(a: TablesArgs) -> Outcome {
    let ns: Vec<u32> = match &a.n {
        Some(n) => vec![n.parse().expect("validated by clap")],
        None => vec![6, 10, 12],
    };
    #[derive(Serialize)]
    struct TableDoc {
        n: u32,
        rows: Vec<TableRow>,
    }
    let mut docs = Vec::new();
    let mut mismatches = 0;
    for n in ns {
        let rows = repro::reproduce_table(n)?;
        for r in &rows {
            println!(
                "n={n:<2} {:<16} [{}] NL {} (published {}) {} bound {} (published {}) {}",
                r.set_label,
                r.construction,
                r.nonlinearity,
                r.published_nl,
                r.diff_spectrum.display(),
                r.best_bound,
                r.published_bound,
                r.status,
            );
            if r.status == RowStatus::Mismatch || !r.invariants_ok || !r.bound_ok() {
                mismatches += 1;
            }
        }
        docs.push(TableDoc { n, rows });
    }
    if let Some(path) = &a.out {
        if is_csv(path) {
            let mut out = format!("n,{}\n", TableRow::CSV_HEADER);
            for d in &docs {
                for r in &d.rows {
                    out.push_str(&format!("{},{}\n", d.n, r.csv_row()));
                }
            }
            fs::write(path, out)?;
        } else {
            write_json(path, &docs)?;
        }
    }
    if mismatches > 0 {
        return Err(Failure::Mismatch(format!("{mismatches} row(s) mismatched")));
    }
    Ok(())
}

fn cmd_examples(a: OutArg) -> Outcome {
    let reports = repro::run_examples()?;
    for r in &reports {
        println!(
            "example {}: |S1| = {}, NL with difference {}, NL S1 only {} (published {:?}) {}",
            r.example,
            r.s1_size,
            r.nl_with_difference,
            r.nl_s1_only,
            r.published_nl,
            if r.matches { "MATCH" } else { "MISMATCH" },
        );
    }
    if let Some(path) = &a.out {
        write_json(path, &reports)?;
    }
    if reports.iter().any(|r| !r.matches) {
        return Err(Failure::Mismatch("example mismatch".into()));
    }
    Ok(())
}

fn cmd_count(a: CountArgs) -> Outcome {
    let ctx = FieldCtx::with_default(a.n)?;
    println!("{}", repro::count_trace_closure(&ctx));
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    let count = if a.full { 10_000 } else { a.count };
    if count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let stats = repro::sample_random_s1(count, a.seed)?;
    for (name, s) in [
        ("S1", &stats.s1_only),
        ("S1 u (F16 \\ F4)", &stats.with_difference),
    ] {
        println!(
            "{name:<16} samples {} average {:.3} max {} min {}",
            s.count,
            s.average(),
            s.max,
            s.min
        );
    }
    if let Some(path) = &a.out {
        if is_csv(path) {
            fs::write(path, stats.csv())?;
        } else {
            write_json(path, &stats)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            eprintln!("switchbox: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Field(a) => cmd_field(a),
        Command::Build(a) => cmd_build(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Examples(a) => cmd_examples(a),
        Command::Count(a) => cmd_count(a),
        Command::Sample(a) => cmd_sample(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("switchbox: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("switchbox: {msg}");
            ExitCode::from(2)
        }
    }
}
