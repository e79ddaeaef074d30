mod render;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use multiplets::analysis::{self, HlConstant, DEFAULT_PRIME_BOUND, DEFAULT_REL_TOL};
use multiplets::counter::{self, CountJob, CountOptions, CountOutcome, DEFAULT_SEGMENT_LENGTH};
use multiplets::literal::parse_integer;
use multiplets::sieve::{self, RangeBounds};
use multiplets::verify::{self, PredictConfig, RatioConfig, VerifyConfig};
use multiplets::{Error, ErrorKind, OffsetPattern};

use render::{opt, sci, Format, Table};

const EXIT_DOMAIN: u8 = 1;
const EXIT_THRESHOLD: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "multiplets",
    version,
    about = "Count prime constellations and check their density constants"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, value_parser = parse_threads)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the primes in [FROM, TO].
    Sieve {
        #[arg(long, value_parser = parse_int)]
        from: u64,
        #[arg(long, value_parser = parse_int)]
        to: u64,
    },
    /// Count occurrences of a pattern with smallest element up to LIMIT.
    Count {
        /// Comma-separated offsets, e.g. 0,2,6,8.
        #[arg(long)]
        pattern: OffsetPattern,
        /// Largest smallest-element to count; accepts 1e10, 2.5e9, 1_000.
        #[arg(long, value_parser = parse_int)]
        limit: u64,
        /// Numbers per sieve segment.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_SEGMENT_LENGTH)]
        segment: u64,
        /// Resume from and save progress to this file.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Segments between checkpoint writes.
        #[arg(long, default_value_t = 16)]
        checkpoint_every: u64,
        /// Stop after this many segments (the checkpoint keeps the progress).
        #[arg(long, hide = true)]
        stop_after: Option<u64>,
    },
    /// Hardy-Littlewood numbers c_m, e.g. --m 2..5.
    Hl {
        #[arg(long, value_parser = parse_m_range)]
        m: MRange,
        /// Largest prime in the Hardy-Littlewood products.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
    },
    /// Integral of dx / ln(x)^m from 2 to UPPER.
    Li {
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = parse_real)]
        upper: f64,
        #[arg(long, default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
    },
    /// Predicted factors for pairs (p, p + gap), optionally measured to LIMIT.
    Predict {
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_int)]
        gaps: Vec<u64>,
        #[arg(long, value_parser = parse_int)]
        limit: Option<u64>,
        /// Numbers per sieve segment.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_SEGMENT_LENGTH)]
        segment: u64,
        /// Largest prime in the Hardy-Littlewood products.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
    },
    /// Count the basic tuples to LIMIT and compare with the conjectured factors.
    Verify {
        #[arg(long, value_parser = parse_int)]
        limit: u64,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        /// Verify this pattern only.
        #[arg(long)]
        pattern: Option<OffsetPattern>,
        /// Maximum allowed |estimate - conjecture| for every checked row.
        #[arg(long)]
        threshold: Option<f64>,
        /// Numbers per sieve segment.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_SEGMENT_LENGTH)]
        segment: u64,
        /// Largest prime in the Hardy-Littlewood products.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
    },
    /// Measure C(m) / c_m and list nearby small-denominator fractions.
    Ratios {
        #[arg(long)]
        m: usize,
        #[arg(long, value_parser = parse_int)]
        limit: u64,
        #[arg(long, value_parser = parse_int, default_value_t = 100)]
        max_denominator: u64,
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        /// Numbers per sieve segment.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_SEGMENT_LENGTH)]
        segment: u64,
        /// Largest prime in the Hardy-Littlewood products.
        #[arg(long, value_parser = parse_int, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
    },
}

#[derive(Debug, Clone, Copy)]
struct MRange {
    first: usize,
    last: usize,
}

fn parse_int(s: &str) -> Result<u64, String> {
    parse_integer(s).map_err(|e| e.to_string())
}

fn parse_real(s: &str) -> Result<f64, String> {
    s.replace('_', "")
        .parse::<f64>()
        .map_err(|_| format!("{s:?} is not a number"))
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("threads must be a positive integer, got {s:?}")),
        Ok(n) => Ok(n),
    }
}

fn parse_m_range(s: &str) -> Result<MRange, String> {
    let bad = || format!("expected M or A..B, got {s:?}");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let first = a.trim().parse().map_err(|_| bad())?;
    let last = b.trim().parse().map_err(|_| bad())?;
    if first > last {
        return Err(bad());
    }
    Ok(MRange { first, last })
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Threshold,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_DOMAIN)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Threshold) => ExitCode::from(EXIT_THRESHOLD),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Domain => EXIT_DOMAIN,
                ErrorKind::Resource | ErrorKind::Integrity => EXIT_RESOURCE,
            })
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RESOURCE)
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let threads = cli.threads.unwrap_or_else(counter::default_threads);
    let format = cli.format;
    match cli.command {
        Command::Sieve { from, to } => cmd_sieve(from, to, format, out),
        Command::Count {
            pattern,
            limit,
            segment,
            checkpoint,
            checkpoint_every,
            stop_after,
        } => {
            let job = CountJob::new(pattern, limit, segment)?;
            let options = CountOptions {
                threads,
                checkpoint,
                checkpoint_every,
                halt_after: stop_after,
                ..CountOptions::default()
            };
            cmd_count(&job, &options, format, out)
        }
        Command::Hl { m, prime_bound } => cmd_hl(m, prime_bound, threads, format, out),
        Command::Li { m, upper, rel_tol } => cmd_li(m, upper, rel_tol, format, out),
        Command::Predict {
            gaps,
            limit,
            segment,
            prime_bound,
        } => {
            let config = PredictConfig {
                gaps,
                limit,
                segment_length: segment,
                prime_bound,
                threads,
            };
            cmd_predict(&config, format, out)
        }
        Command::Verify {
            limit,
            max_m,
            pattern,
            threshold,
            segment,
            prime_bound,
        } => {
            let config = VerifyConfig {
                limit,
                max_m,
                pattern,
                segment_length: segment,
                prime_bound,
                threads,
                threshold,
            };
            cmd_verify(&config, format, out)
        }
        Command::Ratios {
            m,
            limit,
            max_denominator,
            tolerance,
            segment,
            prime_bound,
        } => {
            let config = RatioConfig {
                m,
                limit,
                max_denominator,
                tolerance,
                segment_length: segment,
                prime_bound,
                threads,
            };
            cmd_ratios(&config, format, out)
        }
    }
}

#[derive(Serialize)]
struct SieveRecord {
    from: u64,
    to: u64,
    count: usize,
    primes: Vec<u64>,
}

#[derive(Serialize)]
struct PrimeRow {
    prime: u64,
}

fn cmd_sieve(from: u64, to: u64, format: Format, out: &mut impl Write) -> Result<(), Failure> {
    let segment = sieve::primes_in_range(RangeBounds::new(from, to)?)?;
    match format {
        Format::Json => render::json(
            &SieveRecord {
                from,
                to,
                count: segment.len(),
                primes: segment.into_primes(),
            },
            out,
        )?,
        Format::Csv => {
            let rows: Vec<PrimeRow> = segment
                .primes()
                .iter()
                .map(|&prime| PrimeRow { prime })
                .collect();
            render::csv(&rows, out)?;
        }
        Format::Table => {
            writeln!(out, "{} primes in [{from}, {to}]", segment.len())?;
            for chunk in segment.primes().chunks(10) {
                let line: Vec<String> = chunk.iter().map(u64::to_string).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CountRecord {
    pattern: String,
    limit: u64,
    segment_length: u64,
    complete: bool,
    covered_through: u64,
    segments_processed: u64,
    count: u64,
}

fn cmd_count(
    job: &CountJob,
    options: &CountOptions,
    format: Format,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let outcome = counter::run(job, options)?;
    let (record, elapsed) = match &outcome {
        CountOutcome::Complete(c) => (
            CountRecord {
                pattern: job.pattern().to_string(),
                limit: job.limit(),
                segment_length: job.segment_length(),
                complete: true,
                covered_through: job.limit(),
                segments_processed: c.segments_processed,
                count: c.count,
            },
            Some(c.elapsed),
        ),
        CountOutcome::Halted {
            covered_through,
            partial_count,
            segments_processed,
        } => (
            CountRecord {
                pattern: job.pattern().to_string(),
                limit: job.limit(),
                segment_length: job.segment_length(),
                complete: false,
                covered_through: *covered_through,
                segments_processed: *segments_processed,
                count: *partial_count,
            },
            None,
        ),
    };
    match format {
        Format::Json => render::json(&record, out)?,
        Format::Csv => render::csv(&[record], out)?,
        Format::Table => {
            let mut t = Table::new(["pattern", "limit", "count", "segments", "elapsed"]);
            t.row(vec![
                record.pattern.clone(),
                record.limit.to_string(),
                record.count.to_string(),
                record.segments_processed.to_string(),
                elapsed.map_or_else(|| "-".into(), |d| format!("{:.2}s", d.as_secs_f64())),
            ]);
            t.write(out)?;
            if !record.complete {
                writeln!(
                    out,
                    "stopped early: counted through {}; rerun with the same checkpoint to continue",
                    record.covered_through
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_hl(
    m: MRange,
    prime_bound: u64,
    threads: usize,
    format: Format,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let ms: Vec<usize> = (m.first..=m.last).collect();
    let constants: Vec<HlConstant> = analysis::hl_constants(&ms, prime_bound, threads)?;
    match format {
        Format::Json => render::json(&constants, out)?,
        Format::Csv => render::csv(&constants, out)?,
        Format::Table => {
            let mut t = Table::new(["m", "c_m", "published", "prime_bound", "tail_bound"]);
            for c in &constants {
                t.row(vec![
                    c.m.to_string(),
                    format!("{:.10}", c.value),
                    verify::published(c.m)
                        .map_or_else(|| "-".into(), |p| p.hl_constant.to_string()),
                    c.prime_bound.to_string(),
                    format!("{:.2e}", c.tail_bound),
                ]);
            }
            t.write(out)?;
        }
    }
    Ok(())
}

fn cmd_li(
    m: u32,
    upper: f64,
    rel_tol: f64,
    format: Format,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let li = analysis::log_integral(m, upper, rel_tol)?;
    match format {
        Format::Json => render::json(&li, out)?,
        Format::Csv => render::csv(&[li], out)?,
        Format::Table => {
            let mut t = Table::new(["m", "upper", "value", "abs_error_estimate"]);
            t.row(vec![
                li.m.to_string(),
                li.upper.to_string(),
                format!("{:.6}", li.value),
                format!("{:.2e}", li.abs_error_estimate),
            ]);
            t.write(out)?;
        }
    }
    Ok(())
}

fn cmd_predict(
    config: &PredictConfig,
    format: Format,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let rows = verify::run_predict(config)?;
    // Every row shares the limit, so the first row's warnings cover them all.
    if let Some(e) = rows.first().and_then(|r| r.empirical.as_ref()) {
        for w in &e.warnings {
            eprintln!("warning: {w}");
        }
    }
    let records: Vec<_> = rows.iter().map(|r| r.record()).collect();
    match format {
        Format::Json => render::json(&records, out)?,
        Format::Csv => render::csv(&records, out)?,
        Format::Table => {
            let mut t = Table::new([
                "gap",
                "factor",
                "predicted",
                "limit",
                "count",
                "c_estimate",
                "rel_deviation",
            ]);
            for r in &records {
                t.row(vec![
                    r.gap.to_string(),
                    format!("{:.6}", r.factor),
                    format!("{:.7}", r.predicted),
                    r.limit.map_or_else(|| "-".into(), |v| v.to_string()),
                    r.count.map_or_else(|| "-".into(), |v| v.to_string()),
                    opt(r.c_estimate, 6),
                    sci(r.relative_deviation),
                ]);
            }
            t.write(out)?;
        }
    }
    Ok(())
}

fn cmd_verify(config: &VerifyConfig, format: Format, out: &mut impl Write) -> Result<(), Failure> {
    let report = verify::run_verify(config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let records: Vec<_> = report.rows.iter().map(|r| r.record()).collect();
    match format {
        Format::Json => render::json(&records, out)?,
        Format::Csv => render::csv(&records, out)?,
        Format::Table => {
            let mut t = Table::new([
                "pattern",
                "limit",
                "count",
                "c_estimate",
                "conjectured",
                "deviation",
                "rel_dev",
                "ratio",
                "status",
                "published_count",
                "published_pdf",
            ]);
            for (row, r) in report.rows.iter().zip(&records) {
                let published = verify::published(row.pattern.m())
                    .filter(|_| config.pattern.is_none() || row.pattern.is_basic());
                let status = match r.passed {
                    Some(true) => "ok",
                    Some(false) => "EXCEEDED",
                    None => "measured",
                };
                t.row(vec![
                    r.pattern.clone(),
                    r.limit.to_string(),
                    r.count.to_string(),
                    opt(r.c_estimate, 6),
                    opt(r.conjectured, 7),
                    sci(r.deviation),
                    sci(r.relative_deviation),
                    opt(r.ratio, 4),
                    status.into(),
                    published.map_or_else(
                        || "-".into(),
                        |p| format!("{} @ {:e}", p.count, p.limit as f64),
                    ),
                    published.map_or_else(|| "-".into(), |p| p.pdf.to_string()),
                ]);
            }
            t.write(out)?;
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Threshold)
    }
}

#[derive(Serialize)]
struct RatioJson<'a> {
    record: analysis::PdfRecord,
    candidates: &'a [analysis::RationalCandidate],
    convergents: &'a [(u64, u64)],
}

#[derive(Serialize)]
struct RatioCsvRow {
    pattern: String,
    limit: u64,
    count: u64,
    c_estimate: f64,
    c_m: f64,
    ratio: f64,
    numerator: u64,
    denominator: u64,
    distance: f64,
}

fn cmd_ratios(config: &RatioConfig, format: Format, out: &mut impl Write) -> Result<(), Failure> {
    let report = verify::run_ratios(config)?;
    for w in &report.estimate.warnings {
        eprintln!("warning: {w}");
    }
    let record = analysis::PdfRecord::new(&report.estimate, Some(&report.hl));
    match format {
        Format::Json => render::json(
            &RatioJson {
                record,
                candidates: &report.candidates,
                convergents: &report.convergents,
            },
            out,
        )?,
        Format::Csv => {
            let rows: Vec<RatioCsvRow> = report
                .candidates
                .iter()
                .map(|c| RatioCsvRow {
                    pattern: record.pattern.clone(),
                    limit: record.limit,
                    count: record.count,
                    c_estimate: record.c_estimate,
                    c_m: report.hl.value,
                    ratio: report.ratio,
                    numerator: c.numerator,
                    denominator: c.denominator,
                    distance: c.distance,
                })
                .collect();
            render::csv(&rows, out)?;
        }
        Format::Table => {
            writeln!(
                out,
                "pattern {}  limit {}  count {}  C = {:.6}  c_{} = {:.9}  ratio = {:.6}",
                record.pattern,
                record.limit,
                record.count,
                record.c_estimate,
                config.m,
                report.hl.value,
                report.ratio
            )?;
            if let Some(p) = verify::published(config.m) {
                writeln!(
                    out,
                    "published: count {} at {:e}, C = {}, ratio = {:.4}",
                    p.count,
                    p.limit as f64,
                    p.pdf,
                    p.pdf / p.hl_constant
                )?;
            }
            let conv: Vec<String> = report
                .convergents
                .iter()
                .map(|(p, q)| format!("{p}/{q}"))
                .collect();
            writeln!(out, "convergents: {}", conv.join(" "))?;
            let mut t = Table::new(["fraction", "value", "distance"]);
            for c in &report.candidates {
                t.row(vec![
                    format!("{}/{}", c.numerator, c.denominator),
                    format!("{:.6}", c.numerator as f64 / c.denominator as f64),
                    format!("{:.2e}", c.distance),
                ]);
            }
            t.write(out)?;
        }
    }
    Ok(())
}
