//! Synthetic ground-truth graphs.
//!
//! All generators are deterministic given their seed.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Node};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    /// Each pair independently with probability `p`.
    ErdosRenyi { p: f64 },
    /// Growth by degree-proportional attachment of `m0` links per new node.
    PreferentialAttachment { m0: usize },
    /// Ring lattice of degree `k` with each edge rewired with probability `beta`.
    SmallWorld { k: usize, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGenerator(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        match self.kind {
            GeneratorKind::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => {
                bad(format!("p = {p} not in [0, 1]"))
            }
            GeneratorKind::PreferentialAttachment { m0 } if m0 == 0 || m0 >= self.n => {
                bad(format!("need 1 <= m0 < n, got m0 = {m0}, n = {}", self.n))
            }
            GeneratorKind::SmallWorld { k, beta } => {
                if k % 2 != 0 || k >= self.n {
                    bad(format!("need even k < n, got k = {k}, n = {}", self.n))
                } else if !(0.0..=1.0).contains(&beta) {
                    bad(format!("beta = {beta} not in [0, 1]"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        match self.kind {
            GeneratorKind::ErdosRenyi { p } => erdos_renyi(self.n, p, self.seed),
            GeneratorKind::PreferentialAttachment { m0 } => {
                preferential_attachment(self.n, m0, self.seed)
            }
            GeneratorKind::SmallWorld { k, beta } => small_world(self.n, k, beta, self.seed),
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::ErdosRenyi { p } => write!(f, "er:{},{}", self.n, p),
            GeneratorKind::PreferentialAttachment { m0 } => write!(f, "pa:{},{}", self.n, m0),
            GeneratorKind::SmallWorld { k, beta } => write!(f, "ws:{},{},{}", self.n, k, beta),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `er:n,p`, `pa:n,m0` or `ws:n,k,beta` (seed 0; set it afterwards).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGenerator(format!("cannot parse '{s}'"));
        let (kind, params) = s.split_once(':').ok_or_else(bad)?;
        let params: Vec<&str> = params.split(',').map(str::trim).collect();
        let int = |i: usize| {
            params
                .get(i)
                .and_then(|x| x.parse::<usize>().ok())
                .ok_or_else(bad)
        };
        let real = |i: usize| {
            params
                .get(i)
                .and_then(|x| x.parse::<f64>().ok())
                .ok_or_else(bad)
        };
        let (kind, arity) = match kind {
            "er" | "erdos_renyi" => (GeneratorKind::ErdosRenyi { p: real(1)? }, 2),
            "pa" | "preferential_attachment" => {
                (GeneratorKind::PreferentialAttachment { m0: int(1)? }, 2)
            }
            "ws" | "small_world" => (
                GeneratorKind::SmallWorld {
                    k: int(1)?,
                    beta: real(2)?,
                },
                3,
            ),
            _ => return Err(bad()),
        };
        if params.len() != arity {
            return Err(bad());
        }
        let spec = GeneratorSpec {
            kind,
            n: int(0)?,
            seed: 0,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) by geometric skipping over the pair sequence, so the cost is
/// proportional to the number of edges rather than to `n^2`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    GeneratorSpec {
        kind: GeneratorKind::ErdosRenyi { p },
        n,
        seed,
    }
    .validate()?;
    if p <= 0.0 {
        return Graph::empty(n);
    }
    if p >= 1.0 {
        return Graph::complete(n);
    }
    let mut rng = rng(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // Pairs (v, w) with w < v enumerated row by row.
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen();
        w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as Node, v));
        }
    }
    Graph::from_edges(n, edges)
}

/// Starts from a clique on `m0` nodes; each later node links to `m0` distinct
/// earlier nodes picked proportionally to their degree. The result has
/// `C(m0, 2) + m0 * (n - m0)` edges.
pub fn preferential_attachment(n: usize, m0: usize, seed: u64) -> Result<Graph> {
    GeneratorSpec {
        kind: GeneratorKind::PreferentialAttachment { m0 },
        n,
        seed,
    }
    .validate()?;
    let mut rng = rng(seed);
    let mut edges = Vec::with_capacity(m0 * n);
    // Each node appears once per incident edge.
    let mut endpoints: Vec<Node> = Vec::with_capacity(2 * m0 * n);
    for u in 0..m0 {
        for v in u + 1..m0 {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    let mut targets: Vec<Node> = Vec::with_capacity(m0);
    for new in m0..n {
        targets.clear();
        while targets.len() < m0 {
            let t = if endpoints.is_empty() {
                // m0 = 1 and the seed node has no edge yet.
                rng.gen_range(0..new)
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, new));
            endpoints.extend([t, new]);
        }
    }
    Graph::from_edges(n, edges)
}

/// Watts-Strogatz: ring lattice where each node links to its `k/2` nearest
/// nodes on each side, then every lattice edge `(u, u + j)` is rewired with
/// probability `beta` to `(u, w)`, `w` uniform among non-neighbors of `u`.
pub fn small_world(n: usize, k: usize, beta: f64, seed: u64) -> Result<Graph> {
    GeneratorSpec {
        kind: GeneratorKind::SmallWorld { k, beta },
        n,
        seed,
    }
    .validate()?;
    let mut rng = rng(seed);
    let mut adj: Vec<HashSet<Node>> = vec![HashSet::with_capacity(k); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            if !rng.gen_bool(beta) || adj[u].len() >= n - 1 {
                continue;
            }
            let v = (u + j) % n;
            let w = loop {
                let w = rng.gen_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
    Graph::from_edges(n, edges)
}
