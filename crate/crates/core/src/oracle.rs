//! The measurer's view of a hidden graph.
//!
//! [`MeasurementState`] is the only way strategies touch the ground truth:
//! every link query goes through [`MeasurementState::query`], which charges
//! the budget, records the pair as tested and updates the observed sample
//! (`E'`, `V'`, `d'`).

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{pair_count, Graph, Node};

/// Canonical unordered pair `(min, max)`.
pub fn canonical(u: Node, v: Node) -> (Node, Node) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Which part of a strategy issued a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Random,
    Closure,
    Sweep,
    Between,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryEvent {
    pub pair: (Node, Node),
    pub found: bool,
    pub phase: Phase,
}

/// Cumulative discovery curve: `cumulative[i - 1]` is `m'` after query `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MeasurementTrace {
    cumulative: Vec<u64>,
    queries: usize,
    events: Option<Vec<QueryEvent>>,
}

impl MeasurementTrace {
    pub fn new(record_events: bool) -> Self {
        MeasurementTrace {
            cumulative: Vec::new(),
            queries: 0,
            events: record_events.then(Vec::new),
        }
    }

    /// Builds a trace from an explicit curve; every entry counts as a query.
    pub fn from_curve(cumulative: Vec<u64>) -> Self {
        MeasurementTrace {
            queries: cumulative.len(),
            cumulative,
            events: None,
        }
    }

    fn push(&mut self, event: QueryEvent, links: u64) {
        self.cumulative.push(links);
        self.queries += 1;
        if let Some(events) = &mut self.events {
            events.push(event);
        }
    }

    /// Extends the curve with its last value up to `len` entries. Padding does
    /// not count as queries.
    pub fn pad_to(&mut self, len: usize) {
        let last = self.final_links();
        if self.cumulative.len() < len {
            self.cumulative.resize(len, last);
        }
    }

    pub fn cumulative(&self) -> &[u64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Number of queries actually performed (excludes padding).
    pub fn queries(&self) -> usize {
        self.queries
    }

    /// `m'` after `q` queries (`q = 0` gives 0).
    pub fn links_at(&self, q: usize) -> Option<u64> {
        match q {
            0 => Some(0),
            _ => self.cumulative.get(q - 1).copied(),
        }
    }

    pub fn final_links(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn events(&self) -> Option<&[QueryEvent]> {
        self.events.as_deref()
    }

    /// Checks the curve invariants: starts at 0 or 1, unit steps, and
    /// `m'(i) <= min(i, m)`.
    pub fn check_invariants(&self, edge_count: usize) -> std::result::Result<(), String> {
        let mut prev = 0u64;
        for (i, &c) in self.cumulative.iter().enumerate() {
            if c < prev || c - prev > 1 {
                return Err(format!("step {} -> {} at query {}", prev, c, i + 1));
            }
            if c > (i as u64 + 1).min(edge_count as u64) {
                return Err(format!("m' = {} exceeds bound at query {}", c, i + 1));
            }
            prev = c;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementState<'g> {
    hidden: &'g Graph,
    tested: HashSet<(Node, Node)>,
    discovered: Vec<Vec<Node>>,
    observed: Vec<bool>,
    observed_count: usize,
    links: u64,
    budget: usize,
    phase: Phase,
    trace: MeasurementTrace,
}

impl<'g> MeasurementState<'g> {
    pub fn new(hidden: &'g Graph, budget: usize) -> Self {
        Self::with_events(hidden, budget, false)
    }

    pub fn with_events(hidden: &'g Graph, budget: usize, record_events: bool) -> Self {
        let n = hidden.node_count();
        MeasurementState {
            hidden,
            tested: HashSet::new(),
            discovered: vec![Vec::new(); n],
            observed: vec![false; n],
            observed_count: 0,
            links: 0,
            budget,
            phase: Phase::Random,
            trace: MeasurementTrace::new(record_events),
        }
    }

    pub fn node_count(&self) -> usize {
        self.hidden.node_count()
    }

    pub fn pair_count(&self) -> usize {
        self.hidden.pair_count()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn query_count(&self) -> usize {
        self.tested.len()
    }

    pub fn budget_left(&self) -> bool {
        self.query_count() < self.budget
    }

    pub fn all_tested(&self) -> bool {
        self.query_count() >= self.pair_count()
    }

    /// True when no further query can be issued.
    pub fn exhausted(&self) -> bool {
        !self.budget_left() || self.all_tested()
    }

    /// `m'`, the number of discovered links.
    pub fn links(&self) -> u64 {
        self.links
    }

    /// `n'`, the number of observed nodes.
    pub fn observed_count(&self) -> usize {
        self.observed_count
    }

    pub fn is_observed(&self, v: Node) -> bool {
        self.observed[v]
    }

    /// `V'` in ascending id order.
    pub fn observed_nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.observed
            .iter()
            .enumerate()
            .filter_map(|(v, &o)| o.then_some(v))
    }

    /// `d'(v)`.
    pub fn observed_degree(&self, v: Node) -> usize {
        self.discovered[v].len()
    }

    /// Discovered neighbors of `v`, in discovery order.
    pub fn observed_neighbors(&self, v: Node) -> &[Node] {
        &self.discovered[v]
    }

    /// `E'` as canonical pairs in lexicographic order.
    pub fn discovered_edges(&self) -> Vec<(Node, Node)> {
        let mut edges: Vec<_> = self
            .discovered
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn trace(&self) -> &MeasurementTrace {
        &self.trace
    }

    pub fn into_trace(self) -> MeasurementTrace {
        self.trace
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    fn check_pair(&self, u: Node, v: Node) -> Result<()> {
        let n = self.node_count();
        for node in [u, v] {
            if node >= n {
                return Err(Error::InvalidNode { node, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    pub fn is_tested(&self, u: Node, v: Node) -> Result<bool> {
        self.check_pair(u, v)?;
        Ok(self.tested.contains(&canonical(u, v)))
    }

    /// Tests whether `(u, v)` is a link of the hidden graph.
    pub fn query(&mut self, u: Node, v: Node) -> Result<bool> {
        self.check_pair(u, v)?;
        if !self.budget_left() {
            return Err(Error::BudgetExhausted);
        }
        let pair = canonical(u, v);
        if !self.tested.insert(pair) {
            return Err(Error::DuplicateQuery(pair.0, pair.1));
        }
        let found = self.hidden.has_edge(u, v);
        if found {
            self.discovered[u].push(v);
            self.discovered[v].push(u);
            for w in [u, v] {
                if !self.observed[w] {
                    self.observed[w] = true;
                    self.observed_count += 1;
                }
            }
            self.links += 1;
        }
        let event = QueryEvent {
            pair,
            found,
            phase: self.phase,
        };
        self.trace.push(event, self.links);
        Ok(found)
    }

    /// Queries `(u, v)` if it is untested and budget remains. Returns
    /// `Some(found)` when a query was issued.
    pub fn query_if_untested(&mut self, u: Node, v: Node) -> Result<Option<bool>> {
        if !self.budget_left() || self.is_tested(u, v)? {
            return Ok(None);
        }
        self.query(u, v).map(Some)
    }

    /// A pair drawn uniformly among untested pairs, or `None` if every pair
    /// has been tested.
    ///
    /// While fewer than half of the pairs are tested, ordered pairs `(u, v)`
    /// are drawn uniformly with `u != v` and rejected if tested. Past that
    /// point the untested pairs are listed in lexicographic order and one is
    /// picked by index.
    pub fn random_untested_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(Node, Node)> {
        let n = self.node_count();
        let total = pair_count(n);
        let tested = self.query_count();
        if tested >= total {
            return None;
        }
        if 2 * tested < total {
            loop {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !self.tested.contains(&canonical(u, v)) {
                    return Some(canonical(u, v));
                }
            }
        }
        let untested: Vec<(Node, Node)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|p| !self.tested.contains(p))
            .collect();
        let i = rng.gen_range(0..untested.len());
        Some(untested[i])
    }
}
