//! `wizards`: solve and explore Conway's wizards puzzles from the terminal.
//!
//! Results go to stdout, diagnostics to stderr. Exit status is 0 on success
//! (and on a certified solve), 2 when a solve ran out of buses without a
//! certificate, and 1 on any error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use wizards_core::report::{render_analysis, render_explanation, render_scan};
use wizards_core::{
    analyze_cached, enumerate_partitions, render_report, solve_with, AnalysisOptions, CountBounds,
    Engine, Format, PartitionConstraints, Registry, ScanCache, Termination, TextOptions,
    VariantSpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "wizards",
    version,
    about = "Solver for Conway's wizards puzzles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find the valid bus numbers, stopping at the first certified bus.
    Solve(RunArgs),
    /// Analyze one bus.
    Analyze(RunArgs),
    /// Analyze every bus up to --max-bus, without stopping early.
    Scan(RunArgs),
    /// List the built-in variants.
    Variants(FormatArgs),
    /// Explain, in prose, what happens at one bus.
    Explain(RunArgs),
    /// Dump the partitions of one bus, one per line.
    #[command(hide = true)]
    Partitions(PartitionArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Built-in variant name.
    #[arg(long, conflicts_with = "variant_file")]
    variant: Option<String>,
    /// JSON file describing a custom variant.
    #[arg(long)]
    variant_file: Option<PathBuf>,
    #[arg(long)]
    bus: Option<u32>,
    #[arg(long, default_value_t = 200)]
    max_bus: u32,
    /// Override the variant's minimum number of children.
    #[arg(long)]
    count_min: Option<u32>,
    /// Override the variant's maximum number of children.
    #[arg(long)]
    count_max: Option<u32>,
    #[arg(long, default_value = "text")]
    format: String,
    /// Line-oriented cache of per-bus analyses (solve and scan).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Show at most this many ambiguity classes per bus in text output.
    #[arg(long)]
    max_classes_shown: Option<usize>,
}

#[derive(Args, Debug)]
struct FormatArgs {
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long)]
    bus: u32,
    #[arg(long)]
    count_min: Option<u32>,
    #[arg(long)]
    count_max: Option<u32>,
    #[arg(long)]
    max_part: Option<u32>,
}

enum Status {
    Done,
    Inconclusive,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Inconclusive) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Solve(args) => solve(&args),
        Command::Analyze(args) => analyze(&args, false),
        Command::Explain(args) => analyze(&args, true),
        Command::Scan(args) => scan(&args),
        Command::Variants(args) => variants(&args),
        Command::Partitions(args) => partitions(&args),
    }
}

struct Prepared {
    variant: VariantSpec,
    engine: Engine,
    format: Format,
    text: TextOptions,
}

fn prepare(args: &RunArgs) -> anyhow::Result<Prepared> {
    let format: Format = args.format.parse()?;
    let mut variant = match (&args.variant, &args.variant_file) {
        (_, Some(path)) => VariantSpec::from_json_file(path)
            .with_context(|| format!("cannot load variant from {}", path.display()))?,
        (name, None) => Registry::builtin().get(name.as_deref().unwrap_or("original"))?,
    };
    if args.count_min.is_some() || args.count_max.is_some() {
        let current = variant.constraints();
        variant = variant.with_count_bounds(CountBounds {
            min_count: args.count_min.or(current.min_count),
            max_count: args.count_max.or(current.max_count),
        })?;
    }
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let engine = Engine::new(AnalysisOptions {
        jobs: args.jobs,
        ..Default::default()
    })?;
    Ok(Prepared {
        variant,
        engine,
        format,
        text: TextOptions {
            max_classes_shown: args.max_classes_shown,
        },
    })
}

fn open_cache(args: &RunArgs, variant: &VariantSpec) -> anyhow::Result<Option<ScanCache>> {
    let Some(path) = &args.cache else {
        return Ok(None);
    };
    let (cache, warnings) = ScanCache::load_for(path, variant)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(Some(cache))
}

fn max_bus(args: &RunArgs) -> anyhow::Result<u32> {
    if args.max_bus == 0 {
        bail!("--max-bus must be at least 1");
    }
    Ok(args.max_bus)
}

/// Per-bus analysis through the optional cache, saving after each new bus.
fn analyzer<'a>(
    p: &'a Prepared,
    cache: &'a mut Option<ScanCache>,
    path: Option<&'a PathBuf>,
) -> impl FnMut(u32) -> wizards_core::Result<wizards_core::BusAnalysis> + 'a {
    move |bus| match (cache.as_mut(), path) {
        (Some(cache), Some(path)) => {
            let (analysis, fresh) = analyze_cached(&p.engine, cache, &p.variant, bus)?;
            if fresh {
                cache.save(path)?;
            }
            Ok(analysis)
        }
        _ => p.engine.analyze_bus(bus, &p.variant),
    }
}

fn solve(args: &RunArgs) -> anyhow::Result<Status> {
    let p = prepare(args)?;
    let max_bus = max_bus(args)?;
    let mut cache = open_cache(args, &p.variant)?;
    let outcome = solve_with(
        &p.variant,
        max_bus,
        analyzer(&p, &mut cache, args.cache.as_ref()),
    )?;
    print!("{}", render_report(&outcome, p.format, p.text)?);
    Ok(match outcome.termination {
        Termination::Certified { .. } => Status::Done,
        Termination::BudgetExhausted { .. } => Status::Inconclusive,
    })
}

fn scan(args: &RunArgs) -> anyhow::Result<Status> {
    let p = prepare(args)?;
    let max_bus = max_bus(args)?;
    let mut cache = open_cache(args, &p.variant)?;
    let mut analyze = analyzer(&p, &mut cache, args.cache.as_ref());
    let analyses = (1..=max_bus)
        .map(&mut analyze)
        .collect::<Result<Vec<_>, _>>()?;
    print!("{}", render_scan(&p.variant, &analyses, p.format, p.text)?);
    Ok(Status::Done)
}

fn analyze(args: &RunArgs, explain: bool) -> anyhow::Result<Status> {
    let p = prepare(args)?;
    let Some(bus) = args.bus else {
        bail!("--bus is required");
    };
    if bus == 0 {
        bail!("--bus must be at least 1");
    }
    let analysis = p.engine.analyze_bus(bus, &p.variant)?;
    let out = if explain {
        render_explanation(&analysis, p.text)
    } else {
        render_analysis(&analysis, p.format, p.text)?
    };
    print!("{out}");
    Ok(Status::Done)
}

fn variants(args: &FormatArgs) -> anyhow::Result<Status> {
    let registry = Registry::builtin();
    match args.format.parse::<Format>()? {
        Format::Json => {
            let all: Vec<&VariantSpec> = registry.iter().collect();
            println!("{}", serde_json::to_string_pretty(&all)?);
        }
        Format::Csv => {
            println!("name,key,target_index,min_count,max_count");
            for v in registry.iter() {
                let key: Vec<String> = v.key().iter().map(|d| d.to_string()).collect();
                let c = v.constraints();
                println!(
                    "{},{},{},{},{}",
                    v.name(),
                    key.join(" "),
                    v.target_index(),
                    c.min_count.map(|n| n.to_string()).unwrap_or_default(),
                    c.max_count.map(|n| n.to_string()).unwrap_or_default()
                );
            }
        }
        Format::Text => {
            for v in registry.iter() {
                let key: Vec<String> = v.key().iter().map(|d| d.to_string()).collect();
                let c = v.constraints();
                let mut line = format!(
                    "{:<12} key ({}) target {}",
                    v.name(),
                    key.join(", "),
                    v.target()
                );
                if let Some(lo) = c.min_count {
                    line.push_str(&format!(" min_count {lo}"));
                }
                if let Some(hi) = c.max_count {
                    line.push_str(&format!(" max_count {hi}"));
                }
                println!("{line}");
            }
        }
    }
    Ok(Status::Done)
}

fn partitions(args: &PartitionArgs) -> anyhow::Result<Status> {
    let mut c = PartitionConstraints::new(args.bus).with_count(args.count_min, args.count_max);
    c.max_part = args.max_part;
    let mut out = String::new();
    for p in enumerate_partitions(&c)? {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    print!("{out}");
    Ok(Status::Done)
}
