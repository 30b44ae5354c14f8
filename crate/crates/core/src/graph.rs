//! Ground-truth graph and its basic statistics.
//!
//! A [`Graph`] is an immutable undirected simple graph over dense node ids
//! `0..n`. Neighbor sets are stored as sorted vectors, so membership is a
//! binary search and triangle counting is a sorted-merge intersection.

use crate::error::{Error, Result};

pub type Node = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<Node>>,
    edge_count: usize,
}

/// Incremental construction of a [`Graph`] that tolerates (and counts)
/// self-loops and duplicate edges.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    adjacency: Vec<Vec<Node>>,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl GraphBuilder {
    pub fn new(node_count: usize) -> Self {
        GraphBuilder {
            adjacency: vec![Vec::new(); node_count],
            self_loops: 0,
            duplicates: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Grow the node set so that `node` is a valid id.
    pub fn ensure_node(&mut self, node: Node) {
        if node >= self.adjacency.len() {
            self.adjacency.resize(node + 1, Vec::new());
        }
    }

    /// Adds `(u, v)`. Returns `Ok(false)` if the edge was dropped as a
    /// self-loop or duplicate.
    pub fn add_edge(&mut self, u: Node, v: Node) -> Result<bool> {
        let n = self.adjacency.len();
        for node in [u, v] {
            if node >= n {
                return Err(Error::InvalidNode { node, n });
            }
        }
        if u == v {
            self.self_loops += 1;
            return Ok(false);
        }
        // Linear scan is fine for the builder; `build` sorts.
        if self.adjacency[u].len() <= self.adjacency[v].len() {
            if self.adjacency[u].contains(&v) {
                self.duplicates += 1;
                return Ok(false);
            }
        } else if self.adjacency[v].contains(&u) {
            self.duplicates += 1;
            return Ok(false);
        }
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        Ok(true)
    }

    pub fn build(self) -> Result<Graph> {
        if self.adjacency.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = self.adjacency;
        let mut degree_sum = 0;
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            degree_sum += nbrs.len();
        }
        Ok(Graph {
            adjacency,
            edge_count: degree_sum / 2,
        })
    }
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range ids.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (Node, Node)>,
    {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::InvalidNode {
                        node,
                        n: node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut degree_sum = 0;
        for (u, nbrs) in adjacency.iter_mut().enumerate() {
            nbrs.sort_unstable();
            if let Some(w) = nbrs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
            degree_sum += nbrs.len();
        }
        Ok(Graph {
            adjacency,
            edge_count: degree_sum / 2,
        })
    }

    /// The graph with `n` nodes and no edges.
    pub fn empty(node_count: usize) -> Result<Graph> {
        Graph::from_edges(node_count, std::iter::empty())
    }

    pub fn complete(node_count: usize) -> Result<Graph> {
        let edges = (0..node_count).flat_map(|u| (u + 1..node_count).map(move |v| (u, v)));
        Graph::from_edges(node_count, edges)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of unordered node pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.node_count())
    }

    pub fn neighbors(&self, v: Node) -> &[Node] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Node) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: Node, v: Node) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Node, Node)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            let start = nbrs.partition_point(|&w| w <= u);
            nbrs[start..].iter().map(move |&v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_node(&self, v: Node) -> Result<()> {
        if v >= self.node_count() {
            Err(Error::InvalidNode {
                node: v,
                n: self.node_count(),
            })
        } else {
            Ok(())
        }
    }

    /// Number of triangles each node belongs to.
    pub fn triangles_per_node(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.node_count()];
        for (u, v) in self.edges() {
            // Only third nodes w > v, so each triangle u < v < w is seen once.
            let a = &self.adjacency[u];
            let b = &self.adjacency[v];
            let (mut i, mut j) = (
                a.partition_point(|&x| x <= v),
                b.partition_point(|&x| x <= v),
            );
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        counts[u] += 1;
                        counts[v] += 1;
                        counts[a[i]] += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        counts
    }

    /// Number of distinct triangles.
    pub fn triangle_count(&self) -> u64 {
        self.triangles_per_node().iter().sum::<u64>() / 3
    }
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn wedges(degree: usize) -> u64 {
    let d = degree as u64;
    d * d.saturating_sub(1) / 2
}

pub fn density(g: &Graph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    2.0 * g.edge_count() as f64 / (n as f64 * (n - 1) as f64)
}

/// Local clustering of `v`; `None` when `d(v) < 2`.
pub fn local_clustering(g: &Graph, v: Node) -> Result<Option<f64>> {
    g.check_node(v)?;
    let w = wedges(g.degree(v));
    if w == 0 {
        return Ok(None);
    }
    let nbrs = g.neighbors(v);
    let mut closed = 0u64;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if g.has_edge(a, b) {
                closed += 1;
            }
        }
    }
    Ok(Some(closed as f64 / w as f64))
}

/// Mean local clustering over nodes of degree at least 2 (0 if there are none).
pub fn clustering_coefficient(g: &Graph) -> f64 {
    clustering_from_triangles(g, &g.triangles_per_node())
}

fn clustering_from_triangles(g: &Graph, triangles: &[u64]) -> f64 {
    let mut sum = 0.0;
    let mut counted = 0usize;
    for (v, &t) in triangles.iter().enumerate() {
        let w = wedges(g.degree(v));
        if w > 0 {
            sum += t as f64 / w as f64;
            counted += 1;
        }
    }
    if counted == 0 {
        0.0
    } else {
        sum / counted as f64
    }
}

/// Transitivity ratio `3T / sum_v C(d(v), 2)` with `T` the number of distinct
/// triangles; 0 when the graph has no wedge.
pub fn transitivity(g: &Graph) -> f64 {
    transitivity_from_triangles(g, &g.triangles_per_node())
}

fn transitivity_from_triangles(g: &Graph, triangles: &[u64]) -> f64 {
    let wedge_total: u64 = (0..g.node_count()).map(|v| wedges(g.degree(v))).sum();
    if wedge_total == 0 {
        return 0.0;
    }
    // sum_v Δ(v) already equals 3T.
    let per_node: u64 = triangles.iter().sum();
    per_node as f64 / wedge_total as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub density: f64,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub clustering: f64,
    pub transitivity: f64,
}

pub fn graph_stats(g: &Graph) -> GraphStats {
    let triangles = g.triangles_per_node();
    GraphStats {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        density: density(g),
        avg_degree: 2.0 * g.edge_count() as f64 / g.node_count() as f64,
        max_degree: g.max_degree(),
        clustering: clustering_from_triangles(g, &triangles),
        transitivity: transitivity_from_triangles(g, &triangles),
    }
}
