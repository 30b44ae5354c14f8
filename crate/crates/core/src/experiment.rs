//! Experiment configuration and the (strategy, seed) sweep runner.
//!
//! A config is a flat `key = value` file; command-line flags are applied on
//! top of it with [`ConfigBuilder::set`]. Runs execute in parallel, but all
//! outputs are assembled in (strategy, seed) order so they are byte-identical
//! across runs and thread counts.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::bias::{sample_stats, SampleStats};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::graph::{graph_stats, Graph, GraphStats};
use crate::io::{self, ReportRow, SampleStatsMean, TraceRow};
use crate::metrics::{build_report, EfficiencyReport};
use crate::strategies::{execute, StrategyName, TbfOrder};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    EdgeList(PathBuf),
    Generator(GeneratorSpec),
}

impl GraphSource {
    /// The graph, plus node labels when read from an edge list.
    pub fn load(&self) -> Result<(Graph, Option<Vec<String>>)> {
        match self {
            GraphSource::EdgeList(path) => {
                let loaded = io::load_edge_list(path)?;
                if loaded.duplicates + loaded.self_loops > 0 {
                    eprintln!(
                        "warning: {}: dropped {} duplicate edge(s) and {} self-loop(s)",
                        path.display(),
                        loaded.duplicates,
                        loaded.self_loops
                    );
                }
                Ok((loaded.graph, Some(loaded.labels)))
            }
            GraphSource::Generator(spec) => Ok((spec.generate()?, None)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Queries(usize),
    /// Percent of all node pairs.
    PercentOfPairs(f64),
}

impl Budget {
    pub fn parse(s: &str) -> Result<Budget> {
        let bad = || Error::Config(format!("bad budget '{s}'"));
        if let Some(pct) = s.strip_suffix('%') {
            let pct: f64 = pct.trim().parse().map_err(|_| bad())?;
            if !(pct > 0.0 && pct <= 100.0) {
                return Err(bad());
            }
            Ok(Budget::PercentOfPairs(pct))
        } else {
            let q: usize = s.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Budget::Queries(q))
        }
    }

    pub fn resolve(&self, g: &Graph) -> usize {
        match *self {
            Budget::Queries(q) => q,
            Budget::PercentOfPairs(pct) => {
                ((g.pair_count() as f64 * pct / 100.0).round() as usize).max(1)
            }
        }
    }
}

/// `a..b` (end exclusive), `a,b,c`, or a single seed.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("bad seeds '{s}'"));
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        (a..b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub strategies: Vec<StrategyName>,
    pub budget: Budget,
    pub seeds: Vec<u64>,
    pub stride: usize,
    pub jobs: usize,
    pub out_dir: PathBuf,
    pub svg: bool,
    pub tbf_order: TbfOrder,
}

/// Accumulates config keys; later `set` calls override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    graph: Option<PathBuf>,
    generator: Option<String>,
    graph_seed: u64,
    strategies: Vec<StrategyName>,
    budget: Option<Budget>,
    seeds: Option<Vec<u64>>,
    stride: Option<usize>,
    jobs: Option<usize>,
    out_dir: Option<PathBuf>,
    svg: bool,
    tbf_order: TbfOrder,
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected a boolean, got '{value}'"
        ))),
    }
}

fn parse_positive(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(x) if x >= 1 => Ok(x),
        _ => Err(Error::Config(format!(
            "{key}: expected a positive integer, got '{value}'"
        ))),
    }
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads `key = value` lines; `#` starts a comment line.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut strategies = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "expected key = value".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let located = |e: Error| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: e.to_string(),
            };
            if key == "strategy" {
                for s in value.split(',') {
                    strategies.push(s.trim().parse().map_err(located)?);
                }
            } else {
                self.set(key, value).map_err(located)?;
            }
        }
        if !strategies.is_empty() {
            self.strategies = strategies;
        }
        Ok(())
    }

    pub fn set_strategies(&mut self, strategies: Vec<StrategyName>) {
        self.strategies = strategies;
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "graph" => {
                self.graph = Some(PathBuf::from(value));
                self.generator = None;
            }
            "gen" => {
                value.parse::<GeneratorSpec>()?;
                self.generator = Some(value.to_string());
                self.graph = None;
            }
            "graph_seed" => {
                self.graph_seed = value
                    .parse()
                    .map_err(|_| Error::Config(format!("bad graph_seed '{value}'")))?
            }
            "strategy" => {
                self.strategies = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_>>()?
            }
            "budget" => self.budget = Some(Budget::parse(value)?),
            "seeds" => self.seeds = Some(parse_seeds(value)?),
            "stride" => self.stride = Some(parse_positive(key, value)?),
            "jobs" => self.jobs = Some(parse_positive(key, value)?),
            "out_dir" => self.out_dir = Some(PathBuf::from(value)),
            "svg" => self.svg = parse_bool(key, value)?,
            "tbf_order" => {
                self.tbf_order = match value {
                    "static" => TbfOrder::Static,
                    "dynamic" => TbfOrder::Dynamic,
                    _ => return Err(Error::Config(format!("bad tbf_order '{value}'"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn build(self) -> Result<ExperimentConfig> {
        let graph = match (self.graph, self.generator) {
            (Some(path), _) => GraphSource::EdgeList(path),
            (None, Some(spec)) => {
                let mut spec: GeneratorSpec = spec.parse()?;
                spec.seed = self.graph_seed;
                GraphSource::Generator(spec)
            }
            (None, None) => return Err(Error::Config("no graph or generator given".into())),
        };
        if self.strategies.is_empty() {
            return Err(Error::Config("at least one strategy is required".into()));
        }
        Ok(ExperimentConfig {
            graph,
            strategies: self.strategies,
            budget: self
                .budget
                .ok_or_else(|| Error::Config("budget is required".into()))?,
            seeds: self.seeds.unwrap_or_else(|| vec![0]),
            stride: self.stride.unwrap_or(1),
            jobs: self.jobs.unwrap_or(1),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            svg: self.svg,
            tbf_order: self.tbf_order,
        })
    }
}

/// Result of one (strategy, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub strategy: StrategyName,
    pub seed: u64,
    /// `(q, m'(q))` at the downsampling points.
    pub curve: Vec<(usize, u64)>,
    pub queries: usize,
    /// `None` when normalization is undefined on this graph, or the run
    /// stopped early and scored below the worst strategy.
    pub report: Option<EfficiencyReport>,
    pub sample: SampleStats,
}

pub fn run_single(
    g: &Graph,
    strategy: StrategyName,
    budget: usize,
    seed: u64,
    order: TbfOrder,
    points: &[usize],
) -> Result<RunRecord> {
    let spec = strategy.spec(budget, seed).with_tbf_order(order);
    let state = execute(g, &spec)?;
    let sample = sample_stats(&state);
    let mut trace = state.into_trace();
    let queries = trace.queries();
    trace.pad_to(budget);
    let curve = points
        .iter()
        .map(|&q| (q, trace.links_at(q).expect("points are within the budget")))
        .collect();
    let report = match build_report(&trace, g, budget) {
        Ok(r) => Some(r),
        // A run that stops early on a dense graph can fall below the worst
        // strategy, which assumes every one of the `budget` queries is made.
        Err(
            Error::UndefinedNormalization
            | Error::UndefinedRelative
            | Error::EfficiencyOutOfRange(_),
        ) => None,
        Err(e) => return Err(e),
    };
    Ok(RunRecord {
        strategy,
        seed,
        curve,
        queries,
        report,
        sample,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub reference: GraphStats,
    pub budget: usize,
    pub runs: Vec<RunRecord>,
    pub report: Vec<ReportRow>,
    pub bias: Vec<(String, SampleStatsMean)>,
    pub mean_curves: Vec<(String, Vec<(usize, f64)>)>,
}

pub const TRACE_FILE: &str = "traces.csv";
pub const MEAN_CURVE_FILE: &str = "mean_curves.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const BIAS_FILE: &str = "bias.csv";
pub const LABEL_FILE: &str = "labels.tsv";
pub const SVG_FILE: &str = "curves.svg";

/// Runs every (strategy, seed) pair on `g`, in parallel on `jobs` threads;
/// results come back in (strategy, seed) order.
pub fn run_grid(
    g: &Graph,
    strategies: &[StrategyName],
    seeds: &[u64],
    budget: usize,
    stride: usize,
    order: TbfOrder,
    jobs: usize,
) -> Result<Vec<RunRecord>> {
    let points = io::sample_points(budget, stride);
    let tasks: Vec<(StrategyName, u64)> = strategies
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(s, seed)| run_single(g, s, budget, seed, order, &points))
            .collect()
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn runs_of<'a>(runs: &'a [RunRecord], s: &'a StrategyName) -> impl Iterator<Item = &'a RunRecord> {
    runs.iter().filter(move |r| r.strategy == *s)
}

/// Seed-averaged efficiency rows, one per strategy.
pub fn summarize_report(
    runs: &[RunRecord],
    strategies: &[StrategyName],
    budget: usize,
) -> Vec<ReportRow> {
    strategies
        .iter()
        .map(|s| {
            let reports: Vec<Option<EfficiencyReport>> =
                runs_of(runs, s).map(|r| r.report).collect();
            let all: Option<Vec<EfficiencyReport>> = reports.iter().copied().collect();
            let m_prime = mean(runs_of(runs, s).map(|r| r.curve.last().map_or(0, |c| c.1) as f64));
            ReportRow {
                strategy: s.to_string(),
                k: s.k_label(),
                q: budget,
                m_prime,
                pct_tested: 100.0 * mean(reports.iter().flatten().map(|r| r.pct_pairs_tested)),
                pct_found: 100.0 * mean(reports.iter().flatten().map(|r| r.pct_links_found)),
                eff_norm: all.as_ref().map(|a| mean(a.iter().map(|r| r.normalized))),
                eff_rel: all.as_ref().map(|a| mean(a.iter().map(|r| r.relative))),
            }
        })
        .collect()
}

pub fn summarize_bias(
    runs: &[RunRecord],
    strategies: &[StrategyName],
) -> Vec<(String, SampleStatsMean)> {
    strategies
        .iter()
        .map(|s| {
            let samples: Vec<SampleStats> = runs_of(runs, s).map(|r| r.sample).collect();
            (s.to_string(), SampleStatsMean::of(&samples))
        })
        .collect()
}

pub fn mean_curves(
    runs: &[RunRecord],
    strategies: &[StrategyName],
) -> Vec<(String, Vec<(usize, f64)>)> {
    strategies
        .iter()
        .map(|s| {
            let selected: Vec<&RunRecord> = runs_of(runs, s).collect();
            let len = selected.first().map_or(0, |r| r.curve.len());
            let curve = (0..len)
                .map(|i| {
                    let q = selected[0].curve[i].0;
                    (q, mean(selected.iter().map(|r| r.curve[i].1 as f64)))
                })
                .collect();
            (s.to_string(), curve)
        })
        .collect()
}

fn write_mean_curves(curves: &[(String, Vec<(usize, f64)>)], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["strategy", "q", "mean_m_prime"])?;
    for (name, curve) in curves {
        for &(q, m) in curve {
            w.write_record([name.clone(), q.to_string(), format!("{m:.4}")])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn trace_rows(runs: &[RunRecord]) -> Vec<TraceRow> {
    runs.iter()
        .flat_map(|r| {
            r.curve.iter().map(move |&(q, m)| TraceRow {
                strategy: r.strategy.to_string(),
                seed: r.seed,
                q,
                m_prime: m,
            })
        })
        .collect()
}

/// Runs the configured sweep and writes all tables into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (g, labels) = config.graph.load()?;
    let budget = config.budget.resolve(&g);
    let runs = run_grid(
        &g,
        &config.strategies,
        &config.seeds,
        budget,
        config.stride,
        config.tbf_order,
        config.jobs,
    )?;
    let outcome = ExperimentOutcome {
        reference: graph_stats(&g),
        budget,
        report: summarize_report(&runs, &config.strategies, budget),
        bias: summarize_bias(&runs, &config.strategies),
        mean_curves: mean_curves(&runs, &config.strategies),
        runs,
    };

    let dir = &config.out_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut traces = io::TraceWriter::create(&dir.join(TRACE_FILE))?;
    for run in &outcome.runs {
        let name = run.strategy.to_string();
        for &(q, m) in &run.curve {
            traces.write_row(&name, run.seed, q, m)?;
        }
    }
    traces.finish()?;
    write_mean_curves(&outcome.mean_curves, &dir.join(MEAN_CURVE_FILE))?;
    io::write_report_csv(&outcome.report, &dir.join(REPORT_FILE))?;
    io::write_bias_csv(&outcome.reference, &outcome.bias, &dir.join(BIAS_FILE))?;
    if let Some(labels) = labels {
        io::write_label_table(&labels, &dir.join(LABEL_FILE))?;
    }
    if config.svg {
        let svg = io::render_svg(&outcome.mean_curves, budget);
        let path = dir.join(SVG_FILE);
        fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
    }
    Ok(outcome)
}

/// Replays every (strategy, seed) found in saved trace rows, checks the replay
/// reproduces the saved curve, and returns the seed-averaged sample statistics.
pub fn recompute_bias(
    g: &Graph,
    rows: &[TraceRow],
    order: TbfOrder,
) -> Result<Vec<(String, SampleStatsMean)>> {
    let mut groups: Vec<(String, u64, Vec<&TraceRow>)> = Vec::new();
    for row in rows {
        match groups
            .iter_mut()
            .find(|(s, seed, _)| *s == row.strategy && *seed == row.seed)
        {
            Some(group) => group.2.push(row),
            None => groups.push((row.strategy.clone(), row.seed, vec![row])),
        }
    }
    let mut strategies: Vec<String> = Vec::new();
    let mut samples: Vec<(String, SampleStats)> = Vec::new();
    for (name, seed, group) in groups {
        let strategy: StrategyName = name.parse()?;
        let budget = group.iter().map(|r| r.q).max().unwrap_or(0);
        if budget == 0 {
            return Err(Error::Config(format!("{name} seed {seed}: empty trace")));
        }
        let points: Vec<usize> = group.iter().map(|r| r.q).collect();
        let run = run_single(g, strategy, budget, seed, order, &points)?;
        for (row, &(_, m)) in group.iter().zip(&run.curve) {
            if row.m_prime != m {
                return Err(Error::Config(format!(
                    "{name} seed {seed}: saved m'({}) = {} but replay gives {m}",
                    row.q, row.m_prime
                )));
            }
        }
        if !strategies.contains(&name) {
            strategies.push(name.clone());
        }
        samples.push((name, run.sample));
    }
    Ok(strategies
        .into_iter()
        .map(|name| {
            let of: Vec<SampleStats> = samples
                .iter()
                .filter(|(s, _)| *s == name)
                .map(|(_, st)| *st)
                .collect();
            (name, SampleStatsMean::of(&of))
        })
        .collect())
}
