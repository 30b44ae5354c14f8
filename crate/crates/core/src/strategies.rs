//! Link-query measurement strategies.
//!
//! Every strategy drives a [`MeasurementState`] and stops cleanly when the
//! budget runs out or every pair has been tested. Strategies with two phases
//! first bootstrap with `random` (or `v-random`) until `k` links are known.
//!
//! Orderings are deterministic: "decreasing `d'`" breaks ties by ascending
//! node id, and pair orderings break ties lexicographically on the canonical
//! `(min, max)` pair.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Node};
use crate::oracle::{canonical, MeasurementState, MeasurementTrace, Phase};

/// Random source used by every strategy run.
pub type StrategyRng = ChaCha8Rng;

/// `k` value meaning "never stop the random phase on link count".
pub const UNBOUNDED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Random,
    VRandom,
    CompleteSimple,
    Complete,
    Tbf,
    TbfComplete,
}

impl StrategyKind {
    pub fn has_bootstrap(self) -> bool {
        !matches!(self, StrategyKind::Random | StrategyKind::VRandom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Bootstrap {
    #[default]
    Random,
    VRandom,
}

/// Order of the test-between-found phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum TbfOrder {
    /// Pairs sorted once by the degrees frozen at the end of the bootstrap.
    #[default]
    Static,
    /// Next pair is always the one with the highest current `d'(u) + d'(v)`.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub k: usize,
    pub bootstrap: Bootstrap,
    pub budget: usize,
    pub seed: u64,
    pub tbf_order: TbfOrder,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind, k: usize, budget: usize, seed: u64) -> Self {
        StrategySpec {
            kind,
            k,
            bootstrap: Bootstrap::Random,
            budget,
            seed,
            tbf_order: TbfOrder::Static,
        }
    }

    pub fn with_bootstrap(mut self, bootstrap: Bootstrap) -> Self {
        self.bootstrap = bootstrap;
        self
    }

    pub fn with_tbf_order(mut self, order: TbfOrder) -> Self {
        self.tbf_order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidStrategy("budget must be at least 1".into()));
        }
        Ok(())
    }

    /// Name and `k` only; budget and seed are run parameters.
    pub fn name(&self) -> StrategyName {
        StrategyName {
            kind: self.kind,
            bootstrap: if self.kind.has_bootstrap() {
                self.bootstrap
            } else {
                Bootstrap::Random
            },
            k: self.k,
        }
    }
}

/// A strategy as written on the command line: `name[:k]`, e.g. `v-tbfc:1000`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyName {
    pub kind: StrategyKind,
    pub bootstrap: Bootstrap,
    pub k: usize,
}

const NAMES: [(&str, StrategyKind, Bootstrap); 10] = [
    ("random", StrategyKind::Random, Bootstrap::Random),
    ("v-random", StrategyKind::VRandom, Bootstrap::Random),
    ("cs", StrategyKind::CompleteSimple, Bootstrap::Random),
    ("v-cs", StrategyKind::CompleteSimple, Bootstrap::VRandom),
    ("c", StrategyKind::Complete, Bootstrap::Random),
    ("v-c", StrategyKind::Complete, Bootstrap::VRandom),
    ("tbf", StrategyKind::Tbf, Bootstrap::Random),
    ("v-tbf", StrategyKind::Tbf, Bootstrap::VRandom),
    ("tbfc", StrategyKind::TbfComplete, Bootstrap::Random),
    ("v-tbfc", StrategyKind::TbfComplete, Bootstrap::VRandom),
];

impl StrategyName {
    pub fn base_name(&self) -> &'static str {
        NAMES
            .iter()
            .find(|(_, kind, boot)| *kind == self.kind && *boot == self.bootstrap)
            .map(|(name, _, _)| *name)
            .expect("every kind/bootstrap combination is named")
    }

    pub fn spec(&self, budget: usize, seed: u64) -> StrategySpec {
        StrategySpec::new(self.kind, self.k, budget, seed).with_bootstrap(self.bootstrap)
    }

    /// `k` as written in reports: the number, or `inf`.
    pub fn k_label(&self) -> String {
        if self.k == UNBOUNDED {
            "inf".to_string()
        } else {
            self.k.to_string()
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == UNBOUNDED {
            write!(f, "{}", self.base_name())
        } else {
            write!(f, "{}:{}", self.base_name(), self.k)
        }
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, k) = match s.split_once(':') {
            Some((name, k)) => (name, Some(k)),
            None => (s, None),
        };
        let (_, kind, bootstrap) = NAMES
            .iter()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| Error::InvalidStrategy(format!("unknown strategy '{name}'")))?;
        let k = match k {
            None | Some("inf") => UNBOUNDED,
            Some(k) => k
                .parse()
                .map_err(|_| Error::InvalidStrategy(format!("bad k '{k}' in '{s}'")))?,
        };
        Ok(StrategyName {
            kind: *kind,
            bootstrap: *bootstrap,
            k,
        })
    }
}

/// Random untested pairs until `m' >= k`.
pub fn strat_random<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    rng: &mut R,
) -> Result<()> {
    state.set_phase(Phase::Random);
    while (state.links() as usize) < k && state.budget_left() {
        let Some((u, v)) = state.random_untested_pair(rng) else {
            break;
        };
        state.query(u, v)?;
    }
    Ok(())
}

/// Random untested pairs; every positive random test `(u, v)` is followed by
/// the closure tests `(v, w)` for `w` in `N'(u)` and `(u, w)` for `w` in
/// `N'(v)`. Closure hits do not trigger further closure.
pub fn strat_v_random<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    rng: &mut R,
) -> Result<()> {
    while (state.links() as usize) < k && state.budget_left() {
        state.set_phase(Phase::Random);
        let Some((u, v)) = state.random_untested_pair(rng) else {
            break;
        };
        if state.query(u, v)? {
            state.set_phase(Phase::Closure);
            close_wedges(state, u, v)?;
            close_wedges(state, v, u)?;
        }
    }
    Ok(())
}

/// Tests `(to, w)` for every discovered neighbor `w` of `from`.
fn close_wedges(state: &mut MeasurementState<'_>, from: Node, to: Node) -> Result<()> {
    let mut targets = state.observed_neighbors(from).to_vec();
    targets.sort_unstable();
    for w in targets {
        if w == to {
            continue;
        }
        if !state.budget_left() {
            break;
        }
        state.query_if_untested(to, w)?;
    }
    Ok(())
}

fn bootstrap<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    kind: Bootstrap,
    rng: &mut R,
) -> Result<()> {
    match kind {
        Bootstrap::Random => strat_random(state, k, rng),
        Bootstrap::VRandom => strat_v_random(state, k, rng),
    }
}

/// Tests `(u, v)` for all `v`, ascending. Returns nodes seen for the first time.
fn sweep(state: &mut MeasurementState<'_>, u: Node) -> Result<Vec<Node>> {
    let mut fresh = Vec::new();
    for v in 0..state.node_count() {
        if !state.budget_left() {
            break;
        }
        if v == u {
            continue;
        }
        let first_link = !state.is_observed(v);
        if state.query_if_untested(u, v)? == Some(true) && first_link {
            fresh.push(v);
        }
    }
    Ok(fresh)
}

/// Observed nodes by decreasing `d'`, ties by ascending id.
fn nodes_by_degree(state: &MeasurementState<'_>) -> Vec<Node> {
    let mut nodes: Vec<Node> = state.observed_nodes().collect();
    nodes.sort_by_key(|&v| (Reverse(state.observed_degree(v)), v));
    nodes
}

pub fn strat_complete_simple<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    boot: Bootstrap,
    rng: &mut R,
) -> Result<()> {
    bootstrap(state, k, boot, rng)?;
    state.set_phase(Phase::Sweep);
    for u in nodes_by_degree(state) {
        if !state.budget_left() {
            break;
        }
        sweep(state, u)?;
    }
    Ok(())
}

/// The sweep phase shared by `complete` and `tbf-complete`: repeatedly sweep
/// the frontier node with the highest live `d'`, adding newly observed nodes
/// to the frontier.
fn complete_phase(state: &mut MeasurementState<'_>) -> Result<()> {
    state.set_phase(Phase::Sweep);
    let mut frontier: BTreeSet<Node> = state.observed_nodes().collect();
    while state.budget_left() {
        let mut best: Option<(usize, Node)> = None;
        for &v in &frontier {
            let d = state.observed_degree(v);
            if best.is_none_or(|(bd, _)| d > bd) {
                best = Some((d, v));
            }
        }
        let Some((_, u)) = best else {
            break;
        };
        frontier.remove(&u);
        frontier.extend(sweep(state, u)?);
    }
    Ok(())
}

pub fn strat_complete<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    boot: Bootstrap,
    rng: &mut R,
) -> Result<()> {
    bootstrap(state, k, boot, rng)?;
    complete_phase(state)
}

fn between_found_static(state: &mut MeasurementState<'_>) -> Result<()> {
    let nodes: Vec<Node> = state.observed_nodes().collect();
    let mut pairs: Vec<(usize, Node, Node)> = Vec::with_capacity(nodes.len() * nodes.len() / 2);
    for (i, &a) in nodes.iter().enumerate() {
        let da = state.observed_degree(a);
        for &b in &nodes[i + 1..] {
            pairs.push((da + state.observed_degree(b), a, b));
        }
    }
    pairs.sort_unstable_by_key(|&(score, a, b)| (Reverse(score), a, b));
    for (_, a, b) in pairs {
        if !state.budget_left() {
            break;
        }
        state.query_if_untested(a, b)?;
    }
    Ok(())
}

fn between_found_dynamic(state: &mut MeasurementState<'_>) -> Result<()> {
    let nodes: Vec<Node> = state.observed_nodes().collect();
    let mut member = vec![false; state.node_count()];
    for &v in &nodes {
        member[v] = true;
    }
    let score = |state: &MeasurementState<'_>, a: Node, b: Node| {
        state.observed_degree(a) + state.observed_degree(b)
    };
    // Max-heap on score, then min pair. Stale entries are skipped on pop.
    let mut heap = BinaryHeap::new();
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            if !state.is_tested(a, b)? {
                heap.push((score(state, a, b), Reverse((a, b))));
            }
        }
    }
    while let Some((s, Reverse((a, b)))) = heap.pop() {
        if !state.budget_left() {
            break;
        }
        if state.is_tested(a, b)? || s != score(state, a, b) {
            continue;
        }
        if state.query(a, b)? {
            for x in [a, b] {
                for &y in &nodes {
                    if y != x && !state.is_tested(x, y)? {
                        let (p, q) = canonical(x, y);
                        heap.push((score(state, p, q), Reverse((p, q))));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn strat_tbf<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    boot: Bootstrap,
    order: TbfOrder,
    rng: &mut R,
) -> Result<()> {
    bootstrap(state, k, boot, rng)?;
    state.set_phase(Phase::Between);
    match order {
        TbfOrder::Static => between_found_static(state),
        TbfOrder::Dynamic => between_found_dynamic(state),
    }
}

pub fn strat_tbf_complete<R: Rng + ?Sized>(
    state: &mut MeasurementState<'_>,
    k: usize,
    boot: Bootstrap,
    order: TbfOrder,
    rng: &mut R,
) -> Result<()> {
    strat_tbf(state, k, boot, order, rng)?;
    complete_phase(state)
}

/// Runs `spec` on `g` and returns the final measurement state (unpadded trace).
pub fn execute<'g>(g: &'g Graph, spec: &StrategySpec) -> Result<MeasurementState<'g>> {
    execute_with(g, spec, false)
}

pub fn execute_with<'g>(
    g: &'g Graph,
    spec: &StrategySpec,
    record_events: bool,
) -> Result<MeasurementState<'g>> {
    spec.validate()?;
    let mut state = MeasurementState::with_events(g, spec.budget, record_events);
    let mut rng = StrategyRng::seed_from_u64(spec.seed);
    let k = spec.k;
    match spec.kind {
        StrategyKind::Random => strat_random(&mut state, k, &mut rng)?,
        StrategyKind::VRandom => strat_v_random(&mut state, k, &mut rng)?,
        StrategyKind::CompleteSimple => {
            strat_complete_simple(&mut state, k, spec.bootstrap, &mut rng)?
        }
        StrategyKind::Complete => strat_complete(&mut state, k, spec.bootstrap, &mut rng)?,
        StrategyKind::Tbf => strat_tbf(&mut state, k, spec.bootstrap, spec.tbf_order, &mut rng)?,
        StrategyKind::TbfComplete => {
            strat_tbf_complete(&mut state, k, spec.bootstrap, spec.tbf_order, &mut rng)?
        }
    }
    Ok(state)
}

/// Runs `spec` and returns its trace padded to `budget` entries.
pub fn run_strategy(g: &Graph, spec: &StrategySpec) -> Result<MeasurementTrace> {
    let mut trace = execute(g, spec)?.into_trace();
    trace.pad_to(spec.budget);
    Ok(trace)
}
