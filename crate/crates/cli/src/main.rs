use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use incidence_core::bounds::{
    eval_cell_decomposition, eval_g2_bound, eval_g3_bound, eval_main_bound, eval_three_surface_cases,
    eval_total_and_dominance, eval_two_surface_cases, eval_zero_set_cases, bound_table_csv, BoundParams, BoundResult,
    BoundRow, ConstantsProfile,
};
use incidence_core::config::{gen_planted, load_config, to_json, GeneratorSpec, DEFAULT_RANGE};
use incidence_core::counting::{classify_by_partition, count_incidences, detect_rich_flat2, detect_rich_hyperplane};
use incidence_core::exact::{parse_rational, ExactScalar};
use incidence_core::harness::{
    partition_points, run_experiment, run_grid, ConfigSource, ConstantsSpec, DetectedFlat, ExperimentSpec,
    GridSpec, HarnessError, OutputFormat, PartitionSpec,
};
use incidence_core::partition::{build_partition, census, PartitionParams, PartitionPolynomial};
use serde_json::json;

/// Exact incidence experiments for lines and 2-planes in R⁴.
#[derive(Parser)]
#[command(name = "incidence-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a configuration file.
    Gen(GenArgs),
    /// Count incidences, optionally attributing them to the cells of a partition.
    Count(CountArgs),
    /// Build a polynomial partition of a configuration's points.
    Partition(PartitionArgs),
    /// Detect 2-flats and hyperplanes holding many objects.
    Degeneracy(DegeneracyArgs),
    /// Evaluate every bound at one parameter point.
    Bounds(BoundArgs),
    /// Evaluate the bounds over a parameter grid.
    Grid(GridArgs),
    /// Run a full experiment and compare the counts with the bounds.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Generic,
    Star,
    Flat,
    Hyperplane,
    Mixed,
}

#[derive(Args)]
struct Output {
    /// Output file; defaults to the directory in INCIDENCE_LAB_OUT, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Treat bounds outside their hypotheses as failures (exit code 3).
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, value_enum, default_value = "generic")]
    kind: Kind,
    #[arg(long = "L", default_value_t = 10)]
    lines: usize,
    #[arg(long = "S", default_value_t = 10)]
    planes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planted multiplicity (rich flat for `flat` and `mixed`, hyperplane for `hyperplane`).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Planted hyperplane multiplicity for `mixed`.
    #[arg(long, default_value_t = 3)]
    k2: usize,
    #[arg(long, default_value_t = DEFAULT_RANGE)]
    range: i64,
    /// Common point for `star`, as four integers.
    #[arg(long, value_parser = center, default_value = "0,0,0,0")]
    center: [i64; 4],
}

impl GeneratorArgs {
    fn spec(&self) -> GeneratorSpec {
        let (lines, planes, range) = (self.lines, self.planes, self.range);
        match self.kind {
            Kind::Generic => GeneratorSpec::Generic { lines, planes, range },
            Kind::Star => GeneratorSpec::Star {
                lines,
                planes,
                center: self.center,
            },
            Kind::Flat => GeneratorSpec::PlantedRichFlat { lines, planes, k: self.k, range },
            Kind::Hyperplane => GeneratorSpec::PlantedRichHyperplane { lines, planes, k: self.k, range },
            Kind::Mixed => GeneratorSpec::Mixed { lines, planes, flat_k: self.k, hyperplane_k: self.k2, range },
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PartitionFlags {
    /// Number of partition rounds.
    #[arg(long = "J", default_value_t = 4)]
    rounds: usize,
    #[arg(long, value_parser = rational, default_value = "1/10")]
    delta: ExactScalar,
    #[arg(long = "partition-seed", default_value_t = 0)]
    partition_seed: u64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    config: PathBuf,
    /// A partition dump to attribute incidences to cells.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    flags: PartitionFlags,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DegeneracyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Fixed threshold for both detectors; defaults to L^(1/2+ε) and S^(1/2+ε).
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long, value_parser = rational, default_value = "1/10")]
    epsilon: ExactScalar,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ConstantArgs {
    #[arg(long, value_parser = rational, default_value = "1")]
    c1: ExactScalar,
    #[arg(long, value_parser = rational, default_value = "1")]
    c2: ExactScalar,
    #[arg(long, value_parser = rational, default_value = "1")]
    c4: ExactScalar,
    /// Each summand of the total must stay below this multiple of the main bound.
    #[arg(long, value_parser = rational, default_value = "100")]
    dominance: ExactScalar,
}

impl ConstantArgs {
    fn spec(&self) -> ConstantsSpec {
        ConstantsSpec { c1: self.c1.clone(), c2: self.c2.clone(), c4: self.c4.clone() }
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "L")]
    lines: u64,
    #[arg(long = "S")]
    planes: u64,
    #[arg(long = "D", default_value_t = 2)]
    degree: u64,
    #[arg(long, value_parser = rational, default_value = "1/10")]
    epsilon: ExactScalar,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long = "L", value_delimiter = ',', required = true)]
    lines: Vec<u64>,
    /// Plane counts; omit to use log-spaced values inside the regime window.
    #[arg(long = "S", value_delimiter = ',')]
    planes: Vec<u64>,
    /// Number of regime-window plane counts per L when --S is omitted.
    #[arg(long, default_value_t = 3)]
    per_l: usize,
    #[arg(long = "D", value_delimiter = ',', default_value = "2")]
    degrees: Vec<u64>,
    #[arg(long, value_delimiter = ',', value_parser = rational, default_value = "1/10")]
    epsilon: Vec<ExactScalar>,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// A JSON experiment spec; other experiment flags are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Use this configuration file instead of generating one.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Partition before counting.
    #[arg(long)]
    partitioned: bool,
    #[command(flatten)]
    flags: PartitionFlags,
    #[arg(long = "D")]
    degree: Option<u64>,
    #[arg(long, value_parser = rational, default_value = "1/10")]
    epsilon: ExactScalar,
    #[command(flatten)]
    constants: ConstantArgs,
    #[command(flatten)]
    output: Output,
}

fn center(text: &str) -> Result<[i64; 4], String> {
    let coords: Vec<i64> = text.split(',').map(|c| c.trim().parse::<i64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    coords.try_into().map_err(|_| format!("expected four comma-separated integers, got {text}"))
}

fn rational(text: &str) -> Result<ExactScalar, String> {
    parse_rational(text).ok_or_else(|| format!("not a rational number: {text}"))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

macro_rules! harness_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                HarnessError::from(e).into()
            }
        }
    )*};
}

harness_from!(
    incidence_core::config::ConfigError,
    incidence_core::partition::PartitionError,
    incidence_core::bounds::BoundError,
    incidence_core::counting::CountingError,
    std::io::Error
);

fn emit(out: &Option<PathBuf>, default_name: &str, content: &str) -> Result<(), Failure> {
    let target = match out {
        Some(p) => Some(p.clone()),
        None => std::env::var_os("INCIDENCE_LAB_OUT").map(|dir| Path::new(&dir).join(default_name)),
    };
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, content)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn result_json(r: &BoundResult) -> serde_json::Value {
    json!({
        "value": r.value.to_f64(),
        "lower": r.value.lo().to_string(),
        "upper": r.value.hi().to_string(),
        "hypothesis_satisfied": r.hypothesis_satisfied,
        "hypothesis_detail": r.hypothesis_detail,
    })
}

fn gen(args: &GenArgs) -> Result<u8, Failure> {
    let generated = gen_planted(&args.generator.spec(), args.generator.seed)?;
    emit(&args.output.out, "config.json", &to_json(&generated.config))?;
    Ok(0)
}

fn count(args: &CountArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args.config)?;
    let report = match &args.partition {
        Some(path) => classify_by_partition(&cfg, &PartitionPolynomial::parse_dump(&std::fs::read_to_string(path)?)?),
        None => count_incidences(&cfg),
    };
    let text = match args.output.format {
        Format::Text => pretty(&report.to_json()),
        Format::Csv => report.to_csv(),
    };
    let name = match args.output.format {
        Format::Text => "incidences.json",
        Format::Csv => "incidences.csv",
    };
    emit(&args.output.out, name, &text)?;
    Ok(0)
}

fn partition(args: &PartitionArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args.config)?;
    let report = count_incidences(&cfg);
    let points = partition_points(&cfg, &report);
    let params = PartitionParams::new(args.flags.rounds, args.flags.delta.clone()).with_seed(args.flags.partition_seed);
    let part = build_partition(&points, &params)?;
    let cells = census(&points, &part, part.rounds());
    eprintln!(
        "{} points, {} rounds, degree {}, {} nonempty cells, largest {} (cap {}), {} on the zero set",
        points.len(),
        part.rounds(),
        part.total_degree(),
        cells.cells.len(),
        cells.max_cell(),
        params.cell_cap(points.len(), part.rounds()),
        cells.on_zero_set
    );
    emit(&args.output.out, "partition.txt", &part.dump())?;
    Ok(0)
}

fn degeneracy(args: &DegeneracyArgs) -> Result<u8, Failure> {
    let cfg = load_config(&args.config)?;
    let e = ExactScalar::new(1.into(), 2.into()) + &args.epsilon;
    let default = |n: usize| -> usize {
        if n == 0 {
            return 2;
        }
        let v = incidence_core::bounds::Enclosure::pow(&ExactScalar::from_integer(n.into()), &e);
        usize::try_from(v.hi().ceil().to_integer()).unwrap_or(usize::MAX).max(2)
    };
    let ft = args.threshold.unwrap_or_else(|| default(cfg.num_lines()));
    let ht = args.threshold.unwrap_or_else(|| default(cfg.num_planes()));
    let flats: Vec<DetectedFlat> = detect_rich_flat2(cfg.lines(), ft)?.iter().map(DetectedFlat::from).collect();
    let hyper: Vec<DetectedFlat> = detect_rich_hyperplane(cfg.planes(), ht)?.iter().map(DetectedFlat::from).collect();
    let v = json!({
        "flat_threshold": ft,
        "hyperplane_threshold": ht,
        "rich_flats": flats,
        "rich_hyperplanes": hyper,
    });
    emit(&args.output.out, "degeneracy.json", &pretty(&v))?;
    Ok(0)
}

fn bounds(args: &BoundArgs) -> Result<u8, Failure> {
    let p = BoundParams::new(args.lines, args.planes, args.degree, args.epsilon.clone())?;
    let c: ConstantsProfile = args.constants.spec().profile()?;
    let total = eval_total_and_dominance(&p, &c, &args.constants.dominance)?;
    let text = match args.output.format {
        Format::Csv => bound_table_csv(&[BoundRow::evaluate(&p, &c, &args.constants.dominance)?]),
        Format::Text => {
            let cells = eval_cell_decomposition(&p)?;
            let two = eval_two_surface_cases(&p, &c)?;
            let three = eval_three_surface_cases(&p, &c)?;
            let zero = eval_zero_set_cases(&p, &c)?;
            let v = json!({
                "L": p.l, "S": p.s, "D": p.d, "epsilon": p.epsilon.to_string(),
                "C1": c.c1().to_string(), "C2": c.c2().to_string(), "C3": c.c3().to_string(), "C4": c.c4().to_string(),
                "main": result_json(&eval_main_bound(&p)?),
                "cells": {
                    "lines_per_cell": cells.l_i.to_string(),
                    "planes_per_cell": cells.s_i.to_string(),
                    "cell_count": cells.cell_count.to_string(),
                    "summed_bound": cells.summed_cell_bound.to_f64(),
                    "dominated_by_main": cells.dominated_by_main,
                },
                "g2": result_json(&eval_g2_bound(&p)?.bound),
                "g3": result_json(&eval_g3_bound(&p)?.bound),
                "two_surface": two.iter().map(result_json).collect::<Vec<_>>(),
                "three_surface": [result_json(&three.case1), result_json(&three.case2)],
                "kst_intermediate": result_json(&three.kst_intermediate),
                "zero_set": zero.cases.iter().map(result_json).collect::<Vec<_>>(),
                "zero_set_sum": zero.sum.to_f64(),
                "total": result_json(&total.total),
                "ratio": total.ratio.to_f64(),
                "dominance_constant": total.dominance_constant.to_string(),
                "dominated": total.dominated,
            });
            pretty(&v)
        }
    };
    let name = match args.output.format {
        Format::Text => "bounds.json",
        Format::Csv => "bounds.csv",
    };
    emit(&args.output.out, name, &text)?;
    Ok(if args.output.strict && !total.total.hypothesis_satisfied { 3 } else { 0 })
}

fn grid(args: &GridArgs) -> Result<u8, Failure> {
    let spec = if args.planes.is_empty() {
        GridSpec::regime(&args.lines, args.per_l, &args.degrees, &args.epsilon)
    } else {
        GridSpec::product(&args.lines, &args.planes, &args.degrees, &args.epsilon)
    };
    let c = args.constants.spec().profile()?;
    let report = run_grid(&spec, &c, &args.constants.dominance)?;
    emit(&args.output.out, "grid.csv", &report.to_csv())?;
    eprintln!("{}", report.summary.text);
    let out_of_regime = report.summary.in_regime_rows < report.summary.rows;
    Ok(if args.output.strict && out_of_regime { 3 } else { 0 })
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<ExperimentSpec>(&text)
                .map_err(|e| Failure { code: 1, message: format!("bad spec {}: {e}", path.display()) })?
        }
        None => {
            let source = match &args.config {
                Some(path) => ConfigSource::File { path: path.clone() },
                None => ConfigSource::Generate { generator: args.generator.spec(), seed: args.generator.seed },
            };
            let mut spec = ExperimentSpec::new(source, args.epsilon.clone());
            spec.bounds.d = args.degree;
            spec.constants = args.constants.spec();
            spec.dominance_constant = args.constants.dominance.clone();
            spec.strict = args.output.strict;
            if args.partitioned {
                spec.partition = Some(PartitionSpec {
                    rounds: args.flags.rounds,
                    delta: args.flags.delta.clone(),
                    seed: args.flags.partition_seed,
                });
            }
            spec
        }
    };
    let report = run_experiment(&spec)?;
    let format: OutputFormat = args.output.format.into();
    let name = match format {
        OutputFormat::Text => "report.json",
        OutputFormat::Csv => "report.csv",
    };
    emit(&args.output.out, name, &report.render(format))?;
    for v in &report.verdicts {
        let status = serde_json::to_value(v.status).expect("status");
        eprintln!("{}: {} <= {} {}", v.bound, v.empirical, v.value, status.as_str().unwrap_or_default());
    }
    Ok(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Count(a) => count(a),
        Command::Partition(a) => partition(a),
        Command::Degeneracy(a) => degeneracy(a),
        Command::Bounds(a) => bounds(a),
        Command::Grid(a) => grid(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
