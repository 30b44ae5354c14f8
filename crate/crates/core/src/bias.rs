//! Statistics of the observed sample and how they compare to the hidden graph.
//!
//! The sample is the graph `(V', E')`: only nodes with at least one
//! discovered link take part, so density and average degree are over `n'`.

use crate::graph::{graph_stats, Graph, GraphStats};
use crate::oracle::MeasurementState;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleStats {
    pub m_prime: usize,
    pub n_prime: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub clustering: f64,
    pub transitivity: f64,
}

impl From<GraphStats> for SampleStats {
    fn from(s: GraphStats) -> Self {
        SampleStats {
            m_prime: s.edge_count,
            n_prime: s.node_count,
            density: s.density,
            avg_degree: s.avg_degree,
            max_degree: s.max_degree,
            clustering: s.clustering,
            transitivity: s.transitivity,
        }
    }
}

/// The observed graph `(V', E')` with nodes relabelled densely in ascending
/// original-id order. `None` when nothing has been discovered.
pub fn observed_graph(state: &MeasurementState<'_>) -> Option<Graph> {
    let nodes: Vec<_> = state.observed_nodes().collect();
    if nodes.is_empty() {
        return None;
    }
    let mut index = vec![usize::MAX; state.node_count()];
    for (i, &v) in nodes.iter().enumerate() {
        index[v] = i;
    }
    let edges = state
        .discovered_edges()
        .into_iter()
        .map(|(u, v)| (index[u], index[v]));
    Some(Graph::from_edges(nodes.len(), edges).expect("discovered links form a simple graph"))
}

pub fn sample_stats(state: &MeasurementState<'_>) -> SampleStats {
    observed_graph(state)
        .map(|g| graph_stats(&g).into())
        .unwrap_or_default()
}

/// Sample / reference ratios; `None` where the reference value is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasRatios {
    pub links: Option<f64>,
    pub nodes: Option<f64>,
    pub density: Option<f64>,
    pub avg_degree: Option<f64>,
    pub max_degree: Option<f64>,
    pub clustering: Option<f64>,
    pub transitivity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasReport {
    pub reference: GraphStats,
    pub sample: SampleStats,
    pub ratios: BiasRatios,
}

fn ratio(sample: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| sample / reference)
}

pub fn bias_ratios(reference: &GraphStats, sample: &SampleStats) -> BiasRatios {
    BiasRatios {
        links: ratio(sample.m_prime as f64, reference.edge_count as f64),
        nodes: ratio(sample.n_prime as f64, reference.node_count as f64),
        density: ratio(sample.density, reference.density),
        avg_degree: ratio(sample.avg_degree, reference.avg_degree),
        max_degree: ratio(sample.max_degree as f64, reference.max_degree as f64),
        clustering: ratio(sample.clustering, reference.clustering),
        transitivity: ratio(sample.transitivity, reference.transitivity),
    }
}

pub fn bias_report(g: &Graph, state: &MeasurementState<'_>) -> BiasReport {
    let reference = graph_stats(g);
    let sample = sample_stats(state);
    BiasReport {
        reference,
        sample,
        ratios: bias_ratios(&reference, &sample),
    }
}
