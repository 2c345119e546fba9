//! Command-line front end. Exit codes: 0 success, 1 usage, 2 bad input or
//! I/O, 3 a machine failed verification (or every benchmark row failed).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::analyze::{profile, select_subset, SubsetStrategy};
use crate::assign::{Algorithm, Fill, Permutation};
use crate::bench::{run_bench, BenchConfig, Parallelism};
use crate::machine::ExportFormat;
use crate::pipeline::{sweep_parallelization, synthesize, Synthesis, SynthesisConfig};
use crate::seq::{parse_patterns, parse_sequence_file, TernarySequence};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        if e.is_verification() {
            CliError::Verify(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn input(e: impl ToString) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "bmsynth", version, about = "Synthesize binary machines that regenerate bit sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and verify one machine, writing machine.json and machine.txt.
    Synth(SynthArgs),
    /// Random-sequence benchmark of both algorithms.
    Bench(BenchArgs),
    /// Gate count for every degree of parallelization in a range.
    Sweep(SweepArgs),
    /// Specified-bit profile of a pattern set, optionally with a subset plan.
    Analyze(AnalyzeArgs),
    /// Both algorithms on one sequence.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Tag order: counter, lfsr, lfsr:<hex>[:<seed>], random:<seed>, explicit:<list> or explicit:@FILE.
    #[arg(long, default_value = "lfsr")]
    perm: String,
    /// Don't-care fill of the baseline: balance, zeros or random:<seed>.
    #[arg(long, default_value = "balance")]
    fill: Fill,
}

impl Common {
    fn template(&self, algorithm: Algorithm) -> Result<SynthesisConfig, CliError> {
        let perm = match self.perm.strip_prefix("explicit:@") {
            Some(path) => Permutation::explicit_from_text(&read(Path::new(path))?).map_err(input)?,
            None => self.perm.parse().map_err(input)?,
        };
        Ok(SynthesisConfig {
            algorithm,
            perm,
            fill: self.fill,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_name = "FILE")]
    seq: PathBuf,
    /// Bits per cycle, or `sweep` to take the cheapest.
    #[arg(short, default_value = "1")]
    p: Parallelism,
    #[arg(long, default_value = "presented")]
    algorithm: Algorithm,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `key = value` lines or a JSON object.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Overrides the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Report directory; defaults to the config's `output`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// What to print on standard output.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    seq: PathBuf,
    #[arg(long)]
    p_min: Option<usize>,
    #[arg(long)]
    p_max: Option<usize>,
    #[arg(long, default_value = "presented")]
    algorithm: Algorithm,
    #[command(flatten)]
    common: Common,
    /// Add per-row wall time (makes the report non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long, value_name = "FILE")]
    patterns: PathBuf,
    /// Drop this share of the most specified patterns.
    #[arg(long, conflicts_with = "budget")]
    drop: Option<f64>,
    /// Keep the sparsest patterns whose machine fits in this many gates.
    #[arg(long)]
    budget: Option<usize>,
    /// Scan chains of the pilot machine.
    #[arg(short, default_value_t = 1)]
    p: usize,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_name = "FILE")]
    seq: PathBuf,
    #[arg(short, default_value = "1")]
    p: Parallelism,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_sequence(path: &Path) -> Result<TernarySequence, CliError> {
    parse_sequence_file(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn json_text(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

/// Synthesizes at a fixed `p` or at the cheapest `p` of a sweep.
fn synthesize_at(a: &TernarySequence, p: Parallelism, template: &SynthesisConfig) -> Result<(usize, Synthesis), CliError> {
    let p = match p {
        Parallelism::Fixed(p) => p,
        Parallelism::Sweep => {
            let report = sweep_parallelization(a, None, template);
            match report.best() {
                Some((p, _)) => p,
                None => {
                    let first = report.rows.first().and_then(|r| r.outcome.clone().err());
                    return Err(CliError::Input(first.unwrap_or_else(|| "no usable p".into())));
                }
            }
        }
    };
    Ok((p, synthesize(a, &SynthesisConfig { p, ..template.clone() })?))
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let a = read_sequence(&args.seq)?;
    let template = args.common.template(args.algorithm)?;
    let (p, s) = synthesize_at(&a, args.p, &template)?;
    write(&args.out, "machine.json", &s.machine.export(ExportFormat::Json))?;
    write(&args.out, "machine.txt", &s.machine.export(ExportFormat::StructuralText))?;
    if matches!(args.p, Parallelism::Sweep) {
        print!("p={p} ");
    }
    println!("{}", s.summary());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<i32, CliError> {
    let mut config = BenchConfig::parse(&read(&args.config)?).map_err(input)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let started = Instant::now();
    let report = run_bench(&config).map_err(input)?;
    eprintln!("bench: {} rows in {:.1}s", report.rows.len(), started.elapsed().as_secs_f64());
    let csv = report.to_csv();
    let json = report.to_json();
    if let Some(dir) = args.out.or_else(|| config.output.clone()) {
        write(&dir, "bench.csv", &csv)?;
        write(&dir, "bench.json", &json)?;
    }
    print!("{}", match args.format {
        Format::Csv => csv,
        Format::Json => json,
    });
    if report.all_failed() {
        eprintln!("bench: every row failed");
        return Ok(3);
    }
    Ok(0)
}

#[derive(Serialize)]
struct SweepJson<'a> {
    sequence_length: usize,
    algorithm: Algorithm,
    best_p: Option<usize>,
    rows: Vec<SweepJsonRow<'a>>,
}

#[derive(Serialize)]
struct SweepJsonRow<'a> {
    p: usize,
    stages: Option<usize>,
    gates: Option<usize>,
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let a = read_sequence(&args.seq)?;
    let template = args.common.template(args.algorithm)?;
    let default = crate::pipeline::default_sweep_range(a.len());
    let lo = args.p_min.unwrap_or(*default.start());
    let hi = args.p_max.unwrap_or(*default.end());
    if lo == 0 || lo > hi {
        return Err(CliError::Input(format!("empty p range {lo}..={hi}")));
    }
    let report = sweep_parallelization(&a, Some(lo..=hi), &template);
    let rows: Vec<SweepJsonRow> = report
        .rows
        .iter()
        .map(|r| SweepJsonRow {
            p: r.p,
            stages: r.outcome.as_ref().ok().map(|o| o.stages),
            gates: r.outcome.as_ref().ok().map(|o| o.gates),
            error: r.outcome.as_ref().err().map(String::as_str),
            elapsed_ms: args.timing.then(|| r.elapsed.as_secs_f64() * 1e3),
        })
        .collect();
    let mut header = vec!["p", "stages", "gates", "status"];
    if args.timing {
        header.push("elapsed_ms");
    }
    let csv = csv_text(
        &header,
        rows.iter().map(|r| {
            let mut row = vec![
                r.p.to_string(),
                r.stages.map(|s| s.to_string()).unwrap_or_default(),
                r.gates.map(|g| g.to_string()).unwrap_or_default(),
                r.error.unwrap_or("ok").to_string(),
            ];
            if let Some(ms) = r.elapsed_ms {
                row.push(format!("{ms:.3}"));
            }
            row
        }),
    );
    let json = json_text(&SweepJson {
        sequence_length: a.len(),
        algorithm: report.algorithm,
        best_p: report.best().map(|b| b.0),
        rows,
    });
    if let Some(dir) = &args.out {
        write(dir, "sweep.csv", &csv)?;
        write(dir, "sweep.json", &json)?;
    }
    print!("{}", match args.format {
        Format::Csv => csv,
        Format::Json => json,
    });
    if report.best().is_none() {
        return Err(CliError::Input("no degree of parallelization in the range succeeded".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeJson {
    patterns: usize,
    width: usize,
    total_fraction: f64,
    entropy_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<PlanJson>,
}

#[derive(Serialize)]
struct PlanJson {
    strategy: SubsetStrategy,
    #[serde(flatten)]
    plan: crate::analyze::SubsetPlan,
    kept_entropy_bits: f64,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let ps = parse_patterns(&read(&args.patterns)?).map_err(|e| CliError::Input(format!("{}: {e}", args.patterns.display())))?;
    let prof = profile(&ps);
    let strategy = match (args.drop, args.budget) {
        (Some(fraction), _) => Some(SubsetStrategy::DropMostSpecifiedPrefix { fraction }),
        (None, Some(budget)) => Some(SubsetStrategy::GreedyBySpecifiedBits { budget }),
        (None, None) => None,
    };
    let plan = match strategy {
        Some(strategy) => {
            let pilot = SynthesisConfig {
                p: args.p,
                ..args.common.template(Algorithm::Presented)?
            };
            let plan = select_subset(&ps, strategy, &pilot).map_err(|e| match e {
                crate::analyze::AnalyzeError::Pilot(inner) => CliError::from(inner),
                other => input(other),
            })?;
            let kept_entropy_bits = if plan.kept.is_empty() {
                0.0
            } else {
                profile(&ps.subset(&plan.kept).map_err(input)?).entropy_bits
            };
            Some(PlanJson {
                strategy,
                plan,
                kept_entropy_bits,
            })
        }
        None => None,
    };
    let kept = |i: usize| plan.as_ref().map(|p| p.plan.kept.binary_search(&i).is_ok());
    let mut header = vec!["pattern_index", "specified_bits", "specified_fraction"];
    if plan.is_some() {
        header.push("kept");
    }
    let csv = csv_text(
        &header,
        prof.per_pattern.iter().map(|s| {
            let mut row = vec![
                s.pattern_index.to_string(),
                s.specified_bits.to_string(),
                format!("{:.6}", s.specified_fraction),
            ];
            if let Some(k) = kept(s.pattern_index) {
                row.push(k.to_string());
            }
            row
        }),
    );
    let json = json_text(&AnalyzeJson {
        patterns: ps.count(),
        width: ps.width(),
        total_fraction: prof.total_fraction,
        entropy_bits: prof.entropy_bits,
        plan,
    });
    if let Some(dir) = &args.out {
        write(dir, "analyze.csv", &csv)?;
        write(dir, "analyze.json", &json)?;
    }
    print!("{}", match args.format {
        Format::Csv => csv,
        Format::Json => json,
    });
    Ok(())
}

#[derive(Serialize)]
struct CompareRow {
    algorithm: Algorithm,
    p: usize,
    stages: usize,
    gates: usize,
}

#[derive(Serialize)]
struct CompareJson {
    sequence_length: usize,
    rows: Vec<CompareRow>,
    reduction_percent: Option<f64>,
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let a = read_sequence(&args.seq)?;
    let mut rows = Vec::new();
    for algorithm in [Algorithm::Baseline, Algorithm::Presented] {
        let (p, s) = synthesize_at(&a, args.p, &args.common.template(algorithm)?)?;
        println!("{algorithm}: p={p} {}", s.summary());
        rows.push(CompareRow {
            algorithm,
            p,
            stages: s.stages(),
            gates: s.gates(),
        });
    }
    let (g1, g2) = (rows[0].gates, rows[1].gates);
    let reduction_percent = (g1 > 0).then(|| (g1 as f64 - g2 as f64) / g1 as f64 * 100.0);
    match reduction_percent {
        Some(r) => println!("reduction_percent={r:.2}"),
        None => println!("reduction_percent=undefined"),
    }
    if let Some(dir) = &args.out {
        let csv = csv_text(
            &["algorithm", "p", "stages", "gates"],
            rows.iter()
                .map(|r| vec![r.algorithm.to_string(), r.p.to_string(), r.stages.to_string(), r.gates.to_string()]),
        );
        write(dir, "compare.csv", &csv)?;
        write(
            dir,
            "compare.json",
            &json_text(&CompareJson {
                sequence_length: a.len(),
                rows,
                reduction_percent,
            }),
        )?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a).map(|_| 0),
        Command::Bench(a) => cmd_bench(a),
        Command::Sweep(a) => cmd_sweep(a).map(|_| 0),
        Command::Analyze(a) => cmd_analyze(a).map(|_| 0),
        Command::Compare(a) => cmd_compare(a).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["bmsynth"]), 1);
        assert_eq!(run(["bmsynth", "synth"]), 1);
        assert_eq!(run(["bmsynth", "synth", "--seq", "x", "-p", "lots"]), 1);
        assert_eq!(run(["bmsynth", "--help"]), 0);
    }

    #[test]
    fn missing_file_exits_two() {
        assert_eq!(run(["bmsynth", "synth", "--seq", "/nonexistent/seq.txt"]), 2);
    }
}
