use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use embedded_trees::label_marks::marked_system;
use embedded_trees::leaf_depths::dary_leaf_depth_table;
use embedded_trees::oracle::{run_suite, SuiteParams, VerificationReport, SUITES};
use embedded_trees::series::Marks;
use embedded_trees::small_labels::{integer_coeffs, small_label_system, tj_closed};
use embedded_trees::ternary::{dary_count, dary_power_coeff};
use embedded_trees::trees::StepSet;
use embedded_trees::{Error, Result};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

const USAGE: u8 = 2;
const MISMATCH: u8 = 1;
const DEFAULT_ORDER: usize = 30;

/// Exact counting sequences for naturally embedded trees.
#[derive(Parser, Debug)]
#[command(name = "embedded-trees", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(clap::Args, Debug)]
struct Options {
    /// Tree arity
    #[arg(long, global = true, default_value_t = 3)]
    d: usize,
    /// Label bound (small-label, label-mark) or largest label (verify)
    #[arg(long, global = true, allow_negative_numbers = true)]
    j: Option<i64>,
    /// Mark window: marks u0..um
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Largest tree size; defaults to the order
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Truncation order of power series [default: 30 for seq, per suite for verify]
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Exponent k for power-coeff
    #[arg(long, global = true, default_value_t = 1)]
    k: u64,
    /// Largest tree size enumerated by the oracle
    #[arg(long, global = true, env = "EMBEDDED_TREES_CAP")]
    cap: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a counting sequence or table
    Seq {
        #[arg(value_enum)]
        family: Family,
    },
    /// Compare formulas against exhaustive enumeration
    Verify {
        /// Suite name, or `all`
        suite: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Count,
    SmallLabel,
    LabelMark,
    LeafDepth,
    PowerCoeff,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Count => "count",
            Family::SmallLabel => "small-label",
            Family::LabelMark => "label-mark",
            Family::LeafDepth => "leaf-depth",
            Family::PowerCoeff => "power-coeff",
        }
    }

    fn is_table(self) -> bool {
        matches!(self, Family::LabelMark | Family::LeafDepth)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    JsonLines,
}

/// One output row. `m` is the depth profile for leaf-depth and the mark
/// exponents for label-mark; `value` is a decimal integer.
#[derive(Serialize, Debug)]
struct Record {
    family: &'static str,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<Vec<u32>>,
    value: String,
}

impl Record {
    fn new(family: Family, n: usize, value: &BigInt) -> Self {
        Record {
            family: family.name(),
            n,
            s: None,
            m: None,
            value: value.to_string(),
        }
    }
}

fn sequence(family: Family, o: &Options) -> Result<Vec<Record>> {
    let n_max = o.n_max.unwrap_or(o.order.unwrap_or(DEFAULT_ORDER));
    let d = o.d as u64;
    if d < 2 {
        return Err(Error::InvalidArgument(format!("arity must be at least 2, got {d}")));
    }
    let values: Vec<BigInt> = match family {
        Family::Count => (0..=n_max as u64).map(|n| dary_count(d, n)).collect(),
        Family::PowerCoeff => (0..=n_max as u64).map(|n| dary_power_coeff(d, n, o.k)).collect(),
        Family::SmallLabel => {
            let j = o.j.unwrap_or(0);
            let series = if o.d == 3 && j >= -1 {
                tj_closed(j, n_max)?
            } else {
                small_label_system(&StepSet::natural(o.d)?, j, n_max)?
            };
            integer_coeffs(&series)?
        }
        Family::LabelMark => return label_marks(o, n_max),
        Family::LeafDepth => return leaf_depths(d, n_max),
    };
    Ok(values
        .iter()
        .enumerate()
        .map(|(n, v)| Record::new(family, n, v))
        .collect())
}

fn label_marks(o: &Options, n_max: usize) -> Result<Vec<Record>> {
    if o.d != 3 {
        return Err(Error::InvalidArgument(
            "label-mark is defined for ternary trees only".into(),
        ));
    }
    let j = o.j.unwrap_or(0);
    let m = o.m.unwrap_or(0);
    let family = marked_system(&Marks::indexed("u", m + 1), j, n_max)?;
    let series = family.get(j);
    let mut out = Vec::new();
    for n in 0..=n_max {
        for (e, c) in series.coeff(n).terms() {
            let value = embedded_trees::series::to_integer(c)?;
            out.push(Record {
                m: Some(e.to_vec()),
                ..Record::new(Family::LabelMark, n, &value)
            });
        }
    }
    Ok(out)
}

fn leaf_depths(d: u64, n_max: usize) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for n in 0..=n_max {
        for ((s, m), c) in dary_leaf_depth_table(d, n as u64) {
            out.push(Record {
                s: Some(s),
                m: Some(m.0),
                ..Record::new(Family::LeafDepth, n, &c)
            });
        }
    }
    Ok(out)
}

fn join(m: &[u32], sep: &str) -> String {
    m.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn write_records(family: Family, records: &[Record], format: Format, out: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Text if family.is_table() => {
            for r in records {
                let s = r.s.map(|s| format!("s={s} ")).unwrap_or_default();
                let m = join(r.m.as_deref().unwrap_or_default(), ",");
                writeln!(out, "n={} {s}m=({m}) {}", r.n, r.value)?;
            }
        }
        Format::Text => {
            let values: Vec<&str> = records.iter().map(|r| r.value.as_str()).collect();
            writeln!(out, "{}", values.join(","))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["family", "n", "s", "m", "value"])?;
            for r in records {
                let s = r.s.map(|s| s.to_string()).unwrap_or_default();
                let m = r.m.as_deref().map(|m| join(m, ";")).unwrap_or_default();
                w.write_record([r.family, &r.n.to_string(), &s, &m, &r.value])?;
            }
            w.flush()?;
        }
        Format::JsonLines => {
            for r in records {
                writeln!(out, "{}", serde_json::to_string(r).map_err(io::Error::other)?)?;
            }
        }
    }
    Ok(())
}

fn write_report(report: &VerificationReport, format: Format, out: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Text => write!(out, "{}", report.to_text()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["suite", "case", "status", "expected", "actual", "witness"])?;
            for c in &report.cases {
                let status = if c.is_match() { "match" } else { "mismatch" };
                let opt = |o: &Option<String>| o.clone().unwrap_or_default();
                w.write_record([
                    &report.suite,
                    &c.name,
                    status,
                    &opt(&c.expected),
                    &opt(&c.actual),
                    &opt(&c.witness),
                ])?;
            }
            w.flush()
        }
        Format::JsonLines => {
            for c in &report.cases {
                let mut v = serde_json::to_value(c).map_err(io::Error::other)?;
                v["suite"] = report.suite.clone().into();
                writeln!(out, "{v}")?;
            }
            let summary = json!({
                "suite": report.suite,
                "parameters": report.parameters,
                "cases": report.cases.len(),
                "mismatches": report.mismatches().count(),
                "passed": report.passed(),
            });
            writeln!(out, "{summary}")
        }
    }
}

fn run(cli: Cli) -> std::result::Result<ExitCode, (u8, String)> {
    let o = &cli.opts;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let io_err = |e: io::Error| (MISMATCH, e.to_string());
    let lib_err = |e: Error| match e {
        Error::InvalidArgument(_) | Error::UnknownSuite(_) => (USAGE, e.to_string()),
        other => (MISMATCH, other.to_string()),
    };
    match &cli.command {
        Command::Seq { family } => {
            let records = sequence(*family, o).map_err(lib_err)?;
            write_records(*family, &records, o.format, &mut out).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            if suite != "all" && !SUITES.contains(&suite.as_str()) {
                return Err((
                    USAGE,
                    format!("unknown suite '{suite}'; expected one of all, {}", SUITES.join(", ")),
                ));
            }
            let params = SuiteParams {
                d: Some(o.d),
                j_max: o.j,
                m_max: o.m,
                n_max: o.n_max,
                order: o.order,
                cap: o.cap,
            };
            let start = Instant::now();
            let report = run_suite(suite, &params).map_err(lib_err)?;
            write_report(&report, o.format, &mut out).map_err(io_err)?;
            out.flush().map_err(io_err)?;
            eprintln!("{suite}: {:.2?}", start.elapsed());
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(MISMATCH)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
