//! Command-line front end: `gen`, `solve`, `validate`, `bench`, `gantt`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::gantt::{gantt, GanttFormat};
use super::matrix::{load_suite, run_matrix, MatrixConfig};
use crate::budget::Budget;
use crate::hybrid::{run, Engine};
use crate::instance::{
    build_grid_chip, build_preset_chip, generate_instance, read_instance, write_instance, Chip, GridColoring,
    Variant,
};
use crate::schedule::{read_schedule, validate, write_schedule};

#[derive(Parser)]
#[command(name = "qcc", version, about = "Schedule phase-separation circuits on qubit chips")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a suite of random instances.
    Gen(GenArgs),
    /// Solve one instance with an engine or hybrid policy.
    Solve(SolveArgs),
    /// Check a schedule against its instance; exit status 0 iff valid.
    Validate { instance: PathBuf, schedule: PathBuf },
    /// Run every engine on every instance of a suite directory.
    Bench(BenchArgs),
    /// Draw a schedule.
    Gantt(GanttArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Qcc,
    #[value(name = "qcc-i")]
    QccI,
    #[value(name = "qcc-x")]
    QccX,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Qcc => Variant::Qcc,
            VariantArg::QccI => Variant::QccI,
            VariantArg::QccX => Variant::QccX,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Router,
    Cp,
    Half,
    Last,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Router => Engine::Router,
            EngineArg::Cp => Engine::Cp,
            EngineArg::Half => Engine::Half,
            EngineArg::Last => Engine::Last,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Svg,
}

#[derive(Args)]
struct BudgetArgs {
    /// Wall-clock budget in milliseconds.
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    /// Node budget; makes runs reproducible and overrides --budget.
    #[arg(long)]
    node_budget: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        match self.node_budget {
            Some(n) => Budget::Nodes(n),
            None => Budget::millis(self.budget),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// `rigetti-8`, `rigetti-21`, `grid:N` or `grid:N:blue`.
    #[arg(long)]
    chip: String,
    /// Number of goals per instance.
    #[arg(long, conflicts_with = "density", required_unless_present = "density")]
    goals: Option<usize>,
    /// Goals as a fraction of all state pairs.
    #[arg(long)]
    density: Option<f64>,
    #[arg(long, value_enum, default_value = "qcc")]
    variant: VariantArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    stages: u8,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "half")]
    engine: EngineArg,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of `*.instance.json` files.
    suite: PathBuf,
    /// Engines to compare; all four when omitted.
    #[arg(long = "engine", value_enum)]
    engines: Vec<EngineArg>,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Wall-clock budget in milliseconds for chips of 16 or more qubits.
    #[arg(long)]
    large_budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "bench-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GanttArgs {
    instance: PathBuf,
    schedule: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Validate { instance, schedule } => cmd_validate(&instance, &schedule),
        Command::Bench(a) => cmd_bench(a),
        Command::Gantt(a) => cmd_gantt(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn parse_chip(spec: &str) -> Result<(Chip, String), Box<dyn std::error::Error>> {
    if let Some(rest) = spec.strip_prefix("grid:") {
        let mut parts = rest.split(':');
        let side: usize = parts.next().unwrap_or("").parse()?;
        let coloring = match parts.next() {
            None | Some("alt") => GridColoring::Alternating,
            Some("blue") => GridColoring::AllBlue,
            Some(other) => return Err(format!("unknown grid coloring `{other}`").into()),
        };
        return Ok((build_grid_chip(side, coloring)?, format!("grid{side}")));
    }
    Ok((build_preset_chip(spec)?, spec.to_string()))
}

fn cmd_gen(a: GenArgs) -> CliResult {
    let (chip, chip_name) = parse_chip(&a.chip)?;
    let n = chip.qubit_count();
    let pairs = n * (n - 1) / 2;
    let goals = match (a.goals, a.density) {
        (Some(g), _) => g,
        (None, Some(d)) if (0.0..=1.0).contains(&d) => (d * pairs as f64).round() as usize,
        _ => return Err("--density must lie in [0, 1]".into()),
    };
    let variant = Variant::from(a.variant);
    fs::create_dir_all(&a.out_dir)?;
    for k in 0..a.count {
        let inst = generate_instance(&chip, goals, a.stages, variant, a.seed.wrapping_add(k as u64))?;
        let name = format!(
            "{chip_name}-{}-s{}-g{goals}-{k:03}.instance.json",
            variant.label().to_ascii_lowercase(),
            a.stages
        );
        let path = a.out_dir.join(name);
        write_instance(&inst, &path)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.trim_end_matches(".json").trim_end_matches(".instance").to_string()
}

fn cmd_solve(a: SolveArgs) -> CliResult {
    let inst = read_instance(&a.instance)?;
    let engine = Engine::from(a.engine);
    let report = run(&inst, engine, a.budget.budget(), a.seed)?;
    fs::create_dir_all(&a.out_dir)?;
    let base = format!("{}.{}", stem(&a.instance), engine.label());
    let report_path = a.out_dir.join(format!("{base}.report.json"));
    fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    match &report.schedule {
        Some(s) => {
            let path = a.out_dir.join(format!("{base}.schedule.json"));
            write_schedule(s, &path)?;
            println!(
                "{}: makespan {} swaps {} ({:?}) -> {}",
                engine.label(),
                s.makespan,
                s.swap_count,
                report.status,
                path.display()
            );
        }
        None => println!("{}: no schedule ({:?})", engine.label(), report.status),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(instance: &Path, schedule: &Path) -> CliResult {
    let inst = read_instance(instance)?;
    let s = read_schedule(schedule)?;
    let report = validate(&inst, &s);
    println!("{report}");
    Ok(if report.valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_bench(a: BenchArgs) -> CliResult {
    let suite = load_suite(&a.suite)?;
    let engines: Vec<Engine> = if a.engines.is_empty() {
        Engine::ALL.to_vec()
    } else {
        a.engines.iter().map(|&e| e.into()).collect()
    };
    let mut cfg = MatrixConfig::new(engines, a.budget.budget(), a.out_dir.join("runs"));
    if let (Some(ms), None) = (a.large_budget, a.budget.node_budget) {
        cfg.large_budget = Budget::millis(ms);
        cfg.large_from = 16;
    }
    cfg.seed = a.seed;
    cfg.workers = a.workers;
    let (entries, table) = run_matrix(&suite, &cfg)?;
    for e in entries.iter().filter(|e| e.outcome.is_err()) {
        eprintln!("{} {}: {}", e.id, e.engine.label(), e.outcome.as_ref().unwrap_err());
    }
    fs::write(a.out_dir.join("results.txt"), table.to_string())?;
    fs::write(a.out_dir.join("results.json"), serde_json::to_string_pretty(&table)? + "\n")?;
    print!("{table}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_gantt(a: GanttArgs) -> CliResult {
    let inst = read_instance(&a.instance)?;
    let s = read_schedule(&a.schedule)?;
    let format = match a.format {
        FormatArg::Text => GanttFormat::Text,
        FormatArg::Svg => GanttFormat::Svg,
    };
    let out = gantt(&inst, &s, format)?;
    match a.out {
        Some(path) => fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(ExitCode::SUCCESS)
}
