//! Edge lists, CSV tables and the SVG discovery chart.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bias::SampleStats;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, GraphStats};

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original label of each dense node id.
    pub labels: Vec<String>,
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Reads a whitespace-separated edge list. Lines starting with `#` and blank
/// lines are skipped; labels are arbitrary tokens mapped to ids in order of
/// first appearance.
pub fn load_edge_list(path: &Path) -> Result<LoadedGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path)
}

pub fn parse_edge_list<R: BufRead>(reader: R, path: &Path) -> Result<LoadedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut builder = GraphBuilder::new(0);
    let mut id_of = |label: &str, builder: &mut GraphBuilder| {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len();
        ids.insert(label.to_string(), id);
        labels.push(label.to_string());
        builder.ensure_node(id);
        id
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let u = id_of(tokens[0], &mut builder);
        let v = id_of(tokens[1], &mut builder);
        builder.add_edge(u, v)?;
    }
    let (duplicates, self_loops) = (builder.duplicates, builder.self_loops);
    let graph = builder.build()?;
    Ok(LoadedGraph {
        graph,
        labels,
        duplicates,
        self_loops,
    })
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# n={} m={}", g.node_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn write_label_table(labels: &[String], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (id, label) in labels.iter().enumerate() {
        writeln!(out, "{id}\t{label}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub const TRACE_HEADER: [&str; 4] = ["strategy", "seed", "q", "m_prime"];
pub const REPORT_HEADER: [&str; 8] = [
    "strategy",
    "k",
    "q",
    "m_prime",
    "pct_tested",
    "pct_found",
    "eff_norm",
    "eff_rel",
];
pub const BIAS_HEADER: [&str; 8] = [
    "strategy", "m_prime", "n_prime", "density", "avg_deg", "max_deg", "cc", "tr",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub strategy: String,
    pub seed: u64,
    pub q: usize,
    pub m_prime: u64,
}

/// Query counts kept when downsampling a curve of length `budget`: every
/// multiple of `stride`, plus `budget` itself.
pub fn sample_points(budget: usize, stride: usize) -> Vec<usize> {
    let stride = stride.max(1);
    let mut points: Vec<usize> = (1..=budget / stride).map(|i| i * stride).collect();
    if points.last() != Some(&budget) && budget > 0 {
        points.push(budget);
    }
    points
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_trace_csv(rows: &[TraceRow], path: &Path) -> Result<()> {
    let mut w = TraceWriter::create(path)?;
    for r in rows {
        w.write_row(&r.strategy, r.seed, r.q, r.m_prime)?;
    }
    w.finish()
}

/// Streams trace rows to a CSV file without materializing them.
pub struct TraceWriter {
    inner: csv::Writer<File>,
    path: PathBuf,
}

impl TraceWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut inner = csv_writer(path)?;
        inner.write_record(TRACE_HEADER)?;
        Ok(TraceWriter {
            inner,
            path: path.to_path_buf(),
        })
    }

    pub fn write_row(&mut self, strategy: &str, seed: u64, q: usize, m_prime: u64) -> Result<()> {
        self.inner.write_record([
            strategy,
            &seed.to_string(),
            &q.to_string(),
            &m_prime.to_string(),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(TRACE_HEADER) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("unexpected header {:?}", headers),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let bad = |what: &str| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            msg: format!("bad {what}"),
        };
        rows.push(TraceRow {
            strategy: record.get(0).ok_or_else(|| bad("strategy"))?.to_string(),
            seed: record
                .get(1)
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| bad("seed"))?,
            q: record
                .get(2)
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| bad("q"))?,
            m_prime: record
                .get(3)
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| bad("m_prime"))?,
        });
    }
    Ok(rows)
}

/// One line of the efficiency table; values are averaged over seeds.
/// Efficiency columns are `None` when normalization is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub strategy: String,
    pub k: String,
    pub q: usize,
    pub m_prime: f64,
    /// Percent of pairs tested.
    pub pct_tested: f64,
    /// Percent of links found.
    pub pct_found: f64,
    pub eff_norm: Option<f64>,
    pub eff_rel: Option<f64>,
}

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "NA".to_string(), |x| format!("{x:.digits$}"))
}

pub fn write_report_csv(rows: &[ReportRow], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        w.write_record([
            r.strategy.clone(),
            r.k.clone(),
            r.q.to_string(),
            format!("{:.2}", r.m_prime),
            format!("{:.4}", r.pct_tested),
            format!("{:.4}", r.pct_found),
            opt(r.eff_norm, 6),
            opt(r.eff_rel, 4),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_bias_csv(
    reference: &GraphStats,
    rows: &[(String, SampleStatsMean)],
    path: &Path,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_bias(reference, rows, file)
}

/// Reference row followed by one (seed-averaged) row per strategy.
pub fn write_bias<W: Write>(
    reference: &GraphStats,
    rows: &[(String, SampleStatsMean)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BIAS_HEADER)?;
    w.write_record([
        "reference".to_string(),
        reference.edge_count.to_string(),
        reference.node_count.to_string(),
        format!("{:.6}", reference.density),
        format!("{:.4}", reference.avg_degree),
        reference.max_degree.to_string(),
        format!("{:.6}", reference.clustering),
        format!("{:.6}", reference.transitivity),
    ])?;
    for (name, s) in rows {
        w.write_record([
            name.clone(),
            format!("{:.2}", s.m_prime),
            format!("{:.2}", s.n_prime),
            format!("{:.6}", s.density),
            format!("{:.4}", s.avg_degree),
            format!("{:.2}", s.max_degree),
            format!("{:.6}", s.clustering),
            format!("{:.6}", s.transitivity),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

/// Field-wise mean of several [`SampleStats`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleStatsMean {
    pub m_prime: f64,
    pub n_prime: f64,
    pub density: f64,
    pub avg_degree: f64,
    pub max_degree: f64,
    pub clustering: f64,
    pub transitivity: f64,
}

impl SampleStatsMean {
    pub fn of(samples: &[SampleStats]) -> Self {
        let k = samples.len().max(1) as f64;
        let mean = |f: fn(&SampleStats) -> f64| samples.iter().map(f).sum::<f64>() / k;
        SampleStatsMean {
            m_prime: mean(|s| s.m_prime as f64),
            n_prime: mean(|s| s.n_prime as f64),
            density: mean(|s| s.density),
            avg_degree: mean(|s| s.avg_degree),
            max_degree: mean(|s| s.max_degree as f64),
            clustering: mean(|s| s.clustering),
            transitivity: mean(|s| s.transitivity),
        }
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Line chart of `m'` against `q`, one polyline per named series.
pub fn render_svg(series: &[(String, Vec<(usize, f64)>)], x_max: usize) -> String {
    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (70.0, 170.0, 20.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let y_max = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|p| p.1))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let x_max = x_max.max(1) as f64;
    let sx = |x: f64| left + plot_w * x / x_max;
    let sy = |y: f64| top + plot_h * (1.0 - y / y_max);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{l:.2} {t:.2} V{b:.2} H{r:.2}" fill="none" stroke="black"/>"#,
        l = left,
        t = top,
        b = top + plot_h,
        r = left + plot_w
    );
    for i in 0..=5 {
        let fx = x_max * i as f64 / 5.0;
        let fy = y_max * i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(fx),
            top + plot_h + 18.0,
            fx.round()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(fy) + 4.0,
            fy.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">link queries</text>"#,
        left + plot_w / 2.0,
        height - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">links discovered</text>"#,
        top + plot_h / 2.0
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = format!("{:.2},{:.2}", sx(0.0), sy(0.0));
        for &(x, y) in pts {
            let _ = write!(d, " {:.2},{:.2}", sx(x as f64), sy(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 26.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
