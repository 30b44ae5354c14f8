use std::io::{self, BufWriter};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use linkquery::experiment::{self, ConfigBuilder, GraphSource};
use linkquery::generators::GeneratorSpec;
use linkquery::graph::graph_stats;
use linkquery::io as lqio;
use linkquery::strategies::{StrategyName, TbfOrder};

#[derive(Parser)]
#[command(
    name = "linkquery",
    version,
    about = "Budgeted link-query measurement of complex networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run strategies over seeds and write traces, report, bias and chart.
    Run(RunArgs),
    /// Print the statistics of a graph.
    Stats(GraphArgs),
    /// Write a synthetic graph as an edge list.
    Gen(GenArgs),
    /// Recompute sample bias from a saved trace file by replaying its runs.
    Bias(BiasArgs),
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge list file.
    #[arg(long, conflicts_with = "gen")]
    graph: Option<PathBuf>,
    /// Generator: er:n,p | pa:n,m0 | ws:n,k,beta
    #[arg(long)]
    gen: Option<String>,
    /// Seed for --gen.
    #[arg(long)]
    graph_seed: Option<u64>,
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource> {
        match (&self.graph, &self.gen) {
            (Some(path), _) => Ok(GraphSource::EdgeList(path.clone())),
            (None, Some(spec)) => {
                let mut spec: GeneratorSpec = spec.parse()?;
                spec.seed = self.graph_seed.unwrap_or(0);
                Ok(GraphSource::Generator(spec))
            }
            (None, None) => bail!("one of --graph or --gen is required"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    graph: GraphArgs,
    /// Strategy as name[:k], repeatable (random, v-random, cs, v-cs, c, v-c,
    /// tbf, v-tbf, tbfc, v-tbfc).
    #[arg(long = "strategy")]
    strategies: Vec<StrategyName>,
    /// Number of queries, or a percentage of all pairs such as 2%.
    #[arg(long)]
    budget: Option<String>,
    /// Seeds: a..b, a,b,c, or a single seed.
    #[arg(long)]
    seeds: Option<String>,
    /// Keep every stride-th point of each trace in traces.csv.
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write curves.svg.
    #[arg(long)]
    svg: bool,
    /// Re-rank test-between-found pairs by live degrees.
    #[arg(long)]
    tbf_dynamic: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    gen: String,
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BiasArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// traces.csv written by `run`.
    #[arg(long)]
    trace: PathBuf,
    /// Output bias CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tbf_dynamic: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let mut builder = ConfigBuilder::new();
    if let Some(path) = &args.config {
        builder.apply_file(path)?;
    }
    if let Some(path) = &args.graph.graph {
        builder.set("graph", &path.to_string_lossy())?;
    }
    if let Some(spec) = &args.graph.gen {
        builder.set("gen", spec)?;
    }
    if let Some(seed) = args.graph.graph_seed {
        builder.set("graph_seed", &seed.to_string())?;
    }
    if !args.strategies.is_empty() {
        builder.set_strategies(args.strategies.clone());
    }
    let flags = [
        ("budget", args.budget.clone()),
        ("seeds", args.seeds.clone()),
        ("stride", args.stride.map(|x| x.to_string())),
        ("jobs", args.jobs.map(|x| x.to_string())),
        (
            "out_dir",
            args.out_dir
                .as_ref()
                .map(|p| p.to_string_lossy().into_owned()),
        ),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            builder.set(key, &value)?;
        }
    }
    if args.svg {
        builder.set("svg", "true")?;
    }
    if args.tbf_dynamic {
        builder.set("tbf_order", "dynamic")?;
    }
    let config = builder.build()?;
    let outcome = experiment::run_experiment(&config)?;

    println!(
        "graph: n={} m={}  budget={}  runs={}",
        outcome.reference.node_count,
        outcome.reference.edge_count,
        outcome.budget,
        outcome.runs.len()
    );
    println!(
        "{:<14} {:>12} {:>10} {:>10} {:>10} {:>9}",
        "strategy", "m'", "%tested", "%found", "E", "R"
    );
    for row in &outcome.report {
        let fmt = |x: Option<f64>, d: usize| x.map_or("NA".to_string(), |x| format!("{x:.d$}"));
        println!(
            "{:<14} {:>12.1} {:>10.3} {:>10.3} {:>10} {:>9}",
            row.strategy,
            row.m_prime,
            row.pct_tested,
            row.pct_found,
            fmt(row.eff_norm, 4),
            fmt(row.eff_rel, 2)
        );
    }
    println!("outputs written to {}", config.out_dir.display());
    Ok(())
}

fn stats(args: GraphArgs) -> Result<()> {
    let (g, _) = args.source()?.load()?;
    let s = graph_stats(&g);
    println!("nodes: {}", s.node_count);
    println!("edges: {}", s.edge_count);
    println!("density: {:.6}", s.density);
    println!("avg_degree: {:.4}", s.avg_degree);
    println!("max_degree: {}", s.max_degree);
    println!("clustering: {:.6}", s.clustering);
    println!("transitivity: {:.6}", s.transitivity);
    Ok(())
}

fn gen(args: GenArgs) -> Result<()> {
    let mut spec: GeneratorSpec = args.gen.parse()?;
    spec.seed = args.graph_seed;
    let g = spec.generate()?;
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            lqio::write_edge_list(&g, BufWriter::new(file))?;
        }
        None => lqio::write_edge_list(&g, BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn bias(args: BiasArgs) -> Result<()> {
    let (g, _) = args.graph.source()?.load()?;
    let rows = lqio::read_trace_csv(&args.trace)?;
    let order = if args.tbf_dynamic {
        TbfOrder::Dynamic
    } else {
        TbfOrder::Static
    };
    let samples = experiment::recompute_bias(&g, &rows, order)?;
    let reference = graph_stats(&g);
    match &args.out {
        Some(path) => lqio::write_bias_csv(&reference, &samples, path)?,
        None => lqio::write_bias(&reference, &samples, io::stdout().lock())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Stats(args) => stats(args),
        Command::Gen(args) => gen(args),
        Command::Bias(args) => bias(args),
    }
}
