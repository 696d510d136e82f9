//! Breadth-first explicit-state model checking.
//!
//! Formulas are checked with existential path semantics: `Next tf` holds
//! if some successor satisfies `tf`, and `pf Until tf` holds if some finite
//! path keeps `pf` true until a state satisfying `tf`. The search runs over
//! pairs (configuration, pending obligation); for `Reach(pf)` there is
//! exactly one pair per configuration and the search is a plain BFS that
//! tests `pf` on every newly discovered state, so the witness is a shortest
//! one.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::ast::Program;
use crate::logic::{PropFormula, TemporalFormula};
use crate::semantics::{successors, Config, EngineError, Successor, TransitionLabel};
use crate::store::Store;
use crate::trace::{Trace, TraceStep};

pub const DEFAULT_MAX_STATES: usize = 10_000_000;

/// Environment variable overriding [`DEFAULT_MAX_STATES`].
pub const MAX_STATES_ENV: &str = "GBACH_MAX_STATES";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    /// Longest path explored; `None` is unbounded.
    pub max_depth: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: DEFAULT_MAX_STATES, max_depth: None }
    }
}

impl Limits {
    /// Defaults, with `GBACH_MAX_STATES` applied when set to a positive
    /// integer.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Some(n) = std::env::var(MAX_STATES_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            if n > 0 {
                l.max_states = n;
            }
        }
        l
    }

    pub fn states(max_states: usize) -> Self {
        Limits { max_states, max_depth: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    MaxStates(usize),
    MaxDepth(usize),
    Engine(EngineError),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::MaxStates(n) => write!(f, "state limit {n} reached"),
            UnknownReason::MaxDepth(n) => write!(f, "depth limit {n} reached"),
            UnknownReason::Engine(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds(Trace),
    RefutedExhaustive,
    /// A limit was hit, or the engine failed; `prefix` leads to the failing
    /// configuration for engine errors.
    Unknown { reason: UnknownReason, prefix: Option<Trace> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds(_) => "holds",
            Verdict::RefutedExhaustive => "refuted",
            Verdict::Unknown { .. } => "unknown",
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn witness(&self) -> Option<&Trace> {
        match self {
            Verdict::Holds(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundStatus {
    /// The whole reachable space was explored.
    #[default]
    Complete,
    /// Stopped early because the formula was satisfied.
    GoalFound,
    MaxStates,
    MaxDepth,
    EngineError,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Complete => "complete",
            BoundStatus::GoalFound => "goal",
            BoundStatus::MaxStates => "max_states",
            BoundStatus::MaxDepth => "max_depth",
            BoundStatus::EngineError => "engine_error",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExplorationStats {
    pub states_expanded: usize,
    pub states_discovered: usize,
    pub edges: usize,
    pub max_frontier: usize,
    /// Number of BFS levels fully expanded.
    pub depth: usize,
    pub wall: Duration,
    pub bound: BoundStatus,
}

impl ExplorationStats {
    pub fn wall_ms(&self) -> f64 {
        self.wall.as_secs_f64() * 1e3
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub stats: ExplorationStats,
}

impl CheckResult {
    pub fn witness_len(&self) -> Option<usize> {
        self.verdict.witness().map(Trace::len)
    }

    /// `key: value` lines; field names are stable. With `timing` false the
    /// wall-clock line is left out, which makes the text reproducible.
    pub fn report(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verdict: {}", self.verdict.name());
        if let Verdict::Unknown { reason, .. } = &self.verdict {
            let _ = writeln!(out, "reason: {reason}");
        }
        let s = &self.stats;
        let _ = writeln!(out, "states_expanded: {}", s.states_expanded);
        let _ = writeln!(out, "states_discovered: {}", s.states_discovered);
        let _ = writeln!(out, "edges: {}", s.edges);
        let _ = writeln!(out, "max_frontier: {}", s.max_frontier);
        let _ = writeln!(out, "depth: {}", s.depth);
        let _ = writeln!(out, "bound: {}", s.bound.as_str());
        if timing {
            let _ = writeln!(out, "wall_ms: {:.3}", s.wall_ms());
        }
        match self.witness_len() {
            Some(n) => {
                let _ = writeln!(out, "witness_len: {n}");
            }
            None => out.push_str("witness_len: -\n"),
        }
        out
    }
}

/// Reads the `key: value` lines written by [`CheckResult::report`].
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(':'))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub limits: Limits,
    /// Worker threads for successor computation; 0 or 1 runs sequentially.
    pub workers: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { limits: Limits::default(), workers: 1 }
    }
}

impl From<Limits> for CheckOptions {
    fn from(limits: Limits) -> Self {
        CheckOptions { limits, workers: 1 }
    }
}

/// Checks `tf` from the program's main agent and the empty store.
pub fn check(prog: &Program, tf: &TemporalFormula, opts: impl Into<CheckOptions>) -> CheckResult {
    check_from(prog, Config::initial(prog), tf, opts)
}

pub fn check_from(prog: &Program, init: Config, tf: &TemporalFormula, opts: impl Into<CheckOptions>) -> CheckResult {
    let goal = Obligations::new(tf);
    let out = Search::new(prog, init.clone(), &goal, opts.into()).run(&mut |_, _, _| {});
    let verdict = match out.end {
        End::Goal(path) => Verdict::Holds(rebuild(prog, &init, &path).expect("recorded path replays")),
        End::Exhausted => Verdict::RefutedExhaustive,
        End::Limit(reason) => Verdict::Unknown { reason, prefix: None },
        End::Engine(e, path) => Verdict::Unknown { reason: UnknownReason::Engine(e), prefix: rebuild(prog, &init, &path).ok() },
    };
    CheckResult { verdict, stats: out.stats }
}

/// The temporal formula flattened into a chain of obligations: `Prop` ends
/// the chain, `Next` and `Until` continue with the next entry.
struct Obligations<'a> {
    nodes: Vec<Node<'a>>,
}

enum Node<'a> {
    Prop(&'a PropFormula),
    Next,
    Until(&'a PropFormula),
    /// Never satisfied; used to enumerate the whole space.
    Never,
}

impl<'a> Obligations<'a> {
    fn new(tf: &'a TemporalFormula) -> Self {
        let mut nodes = Vec::new();
        let mut cur = tf;
        loop {
            match cur {
                TemporalFormula::Prop(pf) => {
                    nodes.push(Node::Prop(pf));
                    break;
                }
                TemporalFormula::Next(t) => {
                    nodes.push(Node::Next);
                    cur = t;
                }
                TemporalFormula::Until(pf, t) => {
                    nodes.push(Node::Until(pf));
                    cur = t;
                }
            }
        }
        Obligations { nodes }
    }

    fn never() -> Self {
        Obligations { nodes: vec![Node::Never] }
    }

    /// Follows the epsilon moves from obligation `k` at `store`. Returns
    /// true if the formula is satisfied here; otherwise fills `steps` with
    /// the `(obligation now, obligation after one step)` pairs that remain
    /// open.
    fn close(&self, k: usize, store: &Store, steps: &mut Vec<(usize, usize)>) -> bool {
        steps.clear();
        let mut k = k;
        loop {
            match &self.nodes[k] {
                Node::Prop(pf) => return pf.eval(store),
                Node::Next => {
                    steps.push((k, k + 1));
                    return false;
                }
                Node::Until(pf) => {
                    if pf.eval(store) {
                        steps.push((k, k));
                    }
                    k += 1;
                }
                Node::Never => {
                    steps.push((k, k));
                    return false;
                }
            }
        }
    }
}

/// Where a path came from: parent node and index in the parent's successor
/// list.
#[derive(Clone, Copy)]
struct NodeInfo {
    parent: u32,
    succ: u32,
}

const ROOT: u32 = u32::MAX;

enum End {
    /// Successor indices from the initial configuration.
    Goal(Vec<u32>),
    Exhausted,
    Limit(UnknownReason),
    Engine(EngineError, Vec<u32>),
}

struct Outcome {
    end: End,
    stats: ExplorationStats,
}

struct Search<'a> {
    prog: &'a Program,
    init: Config,
    goal: &'a Obligations<'a>,
    opts: CheckOptions,
}

/// One frontier entry: node id, configuration and the obligation its
/// successors inherit.
struct Item {
    id: u32,
    config: Config,
    next: usize,
}

type Expansion = Result<Vec<(Successor, Vec<u8>)>, EngineError>;

impl<'a> Search<'a> {
    fn new(prog: &'a Program, init: Config, goal: &'a Obligations<'a>, opts: CheckOptions) -> Self {
        Search { prog, init, goal, opts }
    }

    fn key(obligation: usize, cfg_key: &[u8]) -> Box<[u8]> {
        let mut k = Vec::with_capacity(cfg_key.len() + 2);
        crate::store::put_varint(&mut k, obligation as u64);
        k.extend_from_slice(cfg_key);
        k.into_boxed_slice()
    }

    fn path(nodes: &[NodeInfo], mut id: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while id != ROOT {
            let n = nodes[id as usize];
            if n.parent == ROOT {
                break;
            }
            out.push(n.succ);
            id = n.parent;
        }
        out.reverse();
        out
    }

    /// Runs the search. `on_edge(from, to, label)` sees every explored
    /// edge between node ids (used for state-graph export).
    fn run(&self, on_edge: &mut dyn FnMut(u32, u32, &Successor)) -> Outcome {
        let start = Instant::now();
        let mut stats = ExplorationStats::default();
        let finish = |mut stats: ExplorationStats, end: End, bound: BoundStatus| {
            stats.wall = start.elapsed();
            stats.bound = bound;
            Outcome { end, stats }
        };

        let mut visited: HashMap<Box<[u8]>, u32> = HashMap::new();
        let pool = if self.opts.workers > 1 {
            rayon::ThreadPoolBuilder::new().num_threads(self.opts.workers).build().ok()
        } else {
            None
        };
        let mut nodes: Vec<NodeInfo> = Vec::new();
        let mut steps = Vec::new();
        let init_key = self.init.key();

        // the root configuration
        nodes.push(NodeInfo { parent: ROOT, succ: 0 });
        let root_id = 0u32;
        if self.goal.close(0, &self.init.store, &mut steps) {
            stats.states_discovered = 1;
            return finish(stats, End::Goal(Vec::new()), BoundStatus::GoalFound);
        }
        let mut frontier = Vec::new();
        for &(now, next) in &steps {
            if visited.insert(Self::key(now, &init_key), root_id).is_none() {
                frontier.push(Item { id: root_id, config: self.init.clone(), next });
            }
        }
        stats.states_discovered = visited.len().max(1);

        let mut depth = 0usize;
        while !frontier.is_empty() {
            stats.max_frontier = stats.max_frontier.max(frontier.len());
            let at_depth_limit = self.opts.limits.max_depth.is_some_and(|d| depth >= d);
            let expansions = self.expand(&frontier, pool.as_ref());
            let mut next_frontier = Vec::new();
            for (item, expansion) in frontier.iter().zip(expansions) {
                let succs = match expansion {
                    Ok(s) => s,
                    Err(e) => {
                        return finish(stats, End::Engine(e, Self::path(&nodes, item.id)), BoundStatus::EngineError);
                    }
                };
                stats.states_expanded += 1;
                for (idx, (succ, cfg_key)) in succs.into_iter().enumerate() {
                    stats.edges += 1;
                    if self.goal.close(item.next, &succ.config.store, &mut steps) {
                        if at_depth_limit {
                            return finish(stats, End::Limit(UnknownReason::MaxDepth(depth)), BoundStatus::MaxDepth);
                        }
                        let mut path = Self::path(&nodes, item.id);
                        path.push(idx as u32);
                        stats.states_discovered += 1;
                        return finish(stats, End::Goal(path), BoundStatus::GoalFound);
                    }
                    for &(now, next) in &steps {
                        let key = Self::key(now, &cfg_key);
                        if let Some(&old) = visited.get(&key) {
                            on_edge(item.id, old, &succ);
                            continue;
                        }
                        if at_depth_limit {
                            return finish(stats, End::Limit(UnknownReason::MaxDepth(depth)), BoundStatus::MaxDepth);
                        }
                        if visited.len() >= self.opts.limits.max_states {
                            return finish(
                                stats,
                                End::Limit(UnknownReason::MaxStates(self.opts.limits.max_states)),
                                BoundStatus::MaxStates,
                            );
                        }
                        let id = nodes.len() as u32;
                        visited.insert(key, id);
                        stats.states_discovered = visited.len();
                        nodes.push(NodeInfo { parent: item.id, succ: idx as u32 });
                        on_edge(item.id, id, &succ);
                        next_frontier.push(Item { id, config: succ.config.clone(), next });
                    }
                }
            }
            frontier = next_frontier;
            depth += 1;
            stats.depth = depth;
        }
        finish(stats, End::Exhausted, BoundStatus::Complete)
    }

    fn expand(&self, frontier: &[Item], pool: Option<&rayon::ThreadPool>) -> Vec<Expansion> {
        let one = |item: &Item| -> Expansion {
            let succs = successors(&item.config, self.prog)?;
            Ok(succs
                .into_iter()
                .map(|s| {
                    let k = s.config.key();
                    (s, k)
                })
                .collect())
        };
        match pool {
            // successors are computed in parallel; merging stays sequential
            // and in frontier order, so results match the sequential run
            Some(pool) if frontier.len() > 1 => pool.install(|| frontier.par_iter().map(one).collect()),
            _ => frontier.iter().map(one).collect(),
        }
    }
}

/// Re-derives the steps of a path given as successor indices.
fn rebuild(prog: &Program, init: &Config, path: &[u32]) -> Result<Trace, EngineError> {
    let mut trace = Trace::new(init.store.clone());
    let mut cfg = init.clone();
    for &idx in path {
        let mut succs = successors(&cfg, prog)?;
        let s = succs.swap_remove(idx as usize);
        trace.steps.push(TraceStep::between(s.label, &cfg.store, &s.config.store));
        cfg = s.config;
    }
    Ok(trace)
}

/// Reachable state graph: one store per node (ids as assigned by the
/// search, the initial configuration is 0) and every explored edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StateGraph {
    pub stores: Vec<Store>,
    pub edges: Vec<(u32, u32, TransitionLabel)>,
}

impl StateGraph {
    /// `STATE <id> <store>` lines followed by `EDGE <from> <to> <rule>
    /// <primitives>` lines.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.stores.iter().enumerate() {
            let _ = writeln!(out, "STATE {i} {s}");
        }
        for (from, to, label) in &self.edges {
            let prims: Vec<String> = label.prims.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "EDGE {from} {to} {} {}", label.rule, prims.join(" ; "));
        }
        out
    }
}

/// Explores the whole reachable space (no formula). The graph is only
/// collected when `export` is set.
pub fn enumerate_space(prog: &Program, limits: Limits, export: bool) -> (ExplorationStats, Option<StateGraph>) {
    let init = Config::initial(prog);
    let never = Obligations::never();
    let search = Search::new(prog, init.clone(), &never, limits.into());
    let mut graph = StateGraph { stores: vec![init.store.clone()], edges: Vec::new() };
    let out = search.run(&mut |from, to, succ| {
        if export {
            if to as usize == graph.stores.len() {
                graph.stores.push(succ.config.store.clone());
            }
            graph.edges.push((from, to, succ.label.clone()));
        }
    });
    (out.stats, export.then_some(graph))
}

/// How a finished computation ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FinalMark {
    /// The agent terminated (`E`).
    Success,
    /// No transition possible and the agent is not `E`.
    Deadlock,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ObservablesError {
    #[error("state limit {0} reached")]
    TooManyStates(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Final observables: the set of (final store, mark) pairs over all
/// finite computations from `init`. Exhaustive; cycles are fine, but the
/// reachable space must fit in `max_states`.
pub fn final_observables(
    prog: &Program,
    init: &Config,
    max_states: usize,
) -> Result<BTreeSet<(Store, FinalMark)>, ObservablesError> {
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    let mut out = BTreeSet::new();
    seen.insert(init.key());
    queue.push_back(init.clone());
    while let Some(cfg) = queue.pop_front() {
        let succs = successors(&cfg, prog)?;
        if succs.is_empty() {
            let mark = if cfg.is_terminated() { FinalMark::Success } else { FinalMark::Deadlock };
            out.insert((cfg.store.clone(), mark));
        }
        for s in succs {
            if seen.insert(s.config.key()) {
                if seen.len() > max_states {
                    return Err(ObservablesError::TooManyStates(max_states));
                }
                queue.push_back(s.config);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("replay diverges at step {index}: {reason}")]
    ReplayDivergence { index: usize, reason: String },
}

/// Replays `trace` against `prog` from its main agent and the trace's
/// initial store. Every step must be a legal transition with the same
/// fired primitives, and the resulting store must match the recorded
/// delta. All configurations consistent with the trace so far are tracked,
/// so the result does not depend on which of several equal-label
/// transitions was originally taken.
pub fn replay(trace: &Trace, prog: &Program) -> Result<(), ReplayError> {
    let mut current = vec![Config::new(prog.main.clone(), trace.initial.clone())];
    for (index, step) in trace.steps.iter().enumerate() {
        let diverge = |reason: String| ReplayError::ReplayDivergence { index, reason };
        let expected = step.apply(&current[0].store).ok_or_else(|| diverge("recorded delta does not apply".into()))?;
        let mut next = Vec::new();
        let mut keys = std::collections::HashSet::new();
        for cfg in &current {
            let succs = successors(cfg, prog).map_err(|e| diverge(e.to_string()))?;
            for s in succs {
                if s.label.same_action(&step.label) && s.config.store == expected && keys.insert(s.config.key()) {
                    next.push(s.config);
                }
            }
        }
        if next.is_empty() {
            return Err(diverge(format!("no transition `{}` leading to {expected}", step.label)));
        }
        current = next;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunEnd {
    Terminated,
    Deadlock,
    StepLimit,
    Error(EngineError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub trace: Trace,
    pub end: RunEnd,
}

/// One random execution: at each step a successor is picked uniformly
/// with a seeded generator.
pub fn random_run(prog: &Program, seed: u64, max_steps: usize) -> RunOutcome {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cfg = Config::initial(prog);
    let mut trace = Trace::new(cfg.store.clone());
    for _ in 0..max_steps {
        let mut succs = match successors(&cfg, prog) {
            Ok(s) => s,
            Err(e) => return RunOutcome { trace, end: RunEnd::Error(e) },
        };
        if succs.is_empty() {
            let end = if cfg.is_terminated() { RunEnd::Terminated } else { RunEnd::Deadlock };
            return RunOutcome { trace, end };
        }
        let s = succs.swap_remove(rng.gen_range(0..succs.len()));
        trace.steps.push(TraceStep::between(s.label, &cfg.store, &s.config.store));
        cfg = s.config;
    }
    let end = match successors(&cfg, prog) {
        Ok(s) if s.is_empty() && cfg.is_terminated() => RunEnd::Terminated,
        Ok(s) if s.is_empty() => RunEnd::Deadlock,
        _ => RunEnd::StepLimit,
    };
    RunOutcome { trace, end }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program};

    fn prog(text: &str) -> Program {
        parse_program(text).unwrap_or_else(|d| panic!("{d:?}"))
    }

    fn run(text: &str, formula: &str) -> CheckResult {
        let p = prog(text);
        let tf = parse_formula(formula, &p).unwrap();
        check(&p, &tf, Limits::default())
    }

    #[test]
    fn refuted_on_tiny_space() {
        let r = run("run tell(a).", "Reach(#b = 1)");
        assert_eq!(r.verdict, Verdict::RefutedExhaustive);
        assert_eq!(r.stats.states_discovered, 2);
    }

    #[test]
    fn nested_next() {
        let r = run("run tell(a); tell(b).", "Next Next (#a = 1 & #b = 1)");
        assert_eq!(r.witness_len(), Some(2));
        assert!(!run("run tell(a); tell(b).", "Next (#a = 1 & #b = 1)").verdict.holds());
    }

    #[test]
    fn deadlocked_singleton() {
        assert_eq!(run("run ask(a).", "Reach(true)").witness_len(), Some(0));
        assert_eq!(run("run ask(a).", "Reach(#a = 1)").verdict, Verdict::RefutedExhaustive);
    }

    #[test]
    fn until_needs_the_left_side_on_the_way() {
        // b only becomes reachable after a, and a breaks #a = 0
        let text = "run tell(a); tell(b).";
        assert!(!run(text, "#a = 0 Until (#b = 1)").verdict.holds());
        assert!(run(text, "#c = 0 Until (#b = 1)").verdict.holds());
        // the right side may hold immediately
        assert_eq!(run(text, "false Until (#b = 0)").witness_len(), Some(0));
    }

    #[test]
    fn cycles_terminate() {
        let r = run("proc P() = tell(a); get(a); P(). run P().", "Reach(#b = 1)");
        assert_eq!(r.verdict, Verdict::RefutedExhaustive);
    }

    #[test]
    fn limits_give_unknown() {
        let p = prog("proc P() = tell(a); P(). run P().");
        let tf = parse_formula("Reach(#b = 1)", &p).unwrap();
        let r = check(&p, &tf, Limits::states(50));
        assert!(matches!(r.verdict, Verdict::Unknown { reason: UnknownReason::MaxStates(50), .. }));
        let r = check(&p, &tf, Limits { max_states: 1000, max_depth: Some(5) });
        assert!(matches!(r.verdict, Verdict::Unknown { reason: UnknownReason::MaxDepth(5), .. }));
    }

    #[test]
    fn engine_errors_give_unknown_with_prefix() {
        let r = run("run tell(a); [get(a) -> get(b)].", "Reach(#z = 1)");
        match r.verdict {
            Verdict::Unknown { reason: UnknownReason::Engine(EngineError::GuardedTailFailure { .. }), prefix } => {
                assert_eq!(prefix.unwrap().len(), 1)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diamond_space() {
        let (stats, graph) = enumerate_space(&prog("run tell(a) || tell(b)."), Limits::default(), true);
        assert_eq!((stats.states_discovered, stats.edges), (4, 4));
        let graph = graph.unwrap();
        assert_eq!(graph.stores.len(), 4);
        assert_eq!(graph.export().lines().filter(|l| l.starts_with("EDGE")).count(), 4);
        let (gl, _) = enumerate_space(&prog("run [tell(a) -> tell(b)] || [tell(c) -> tell(d)]."), Limits::default(), false);
        assert_eq!(gl.states_discovered, 4);
    }

    #[test]
    fn replay_accepts_witness_and_rejects_perturbation() {
        let p = prog("run (tell(a) || tell(b)); get(a); tell(c).");
        let tf = parse_formula("Reach(#c = 1)", &p).unwrap();
        let r = check(&p, &tf, Limits::default());
        let w = r.verdict.witness().unwrap().clone();
        assert_eq!(replay(&w, &p), Ok(()));
        let mut bad = w.clone();
        bad.steps[2].added = vec![crate::term::SiTerm::token("zzz")];
        assert!(matches!(replay(&bad, &p), Err(ReplayError::ReplayDivergence { index: 2, .. })));
        let reparsed = Trace::from_text(&w.to_text()).unwrap();
        assert_eq!(replay(&reparsed, &p), Ok(()));
    }

    #[test]
    fn observables() {
        let p = prog("run ask(a); tell(b) + tell(c).");
        let obs = final_observables(&p, &Config::initial(&p), 100).unwrap();
        let c = Store::from_terms([crate::term::SiTerm::token("c")]);
        assert_eq!(obs, BTreeSet::from([(c, FinalMark::Success)]));
    }

    #[test]
    fn random_runs_are_seeded() {
        let p = prog("run tell(a) || tell(b) || tell(c).");
        assert_eq!(random_run(&p, 7, 10), random_run(&p, 7, 10));
        assert_eq!(random_run(&p, 7, 10).end, RunEnd::Terminated);
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = prog("run (tell(a); tell(b)) || (tell(c); get(a)) || tell(d).");
        let tf = parse_formula("Reach(#b = 1 & #d = 1 & #a = 0)", &p).unwrap();
        let seq = check(&p, &tf, Limits::default());
        let par = check(&p, &tf, CheckOptions { limits: Limits::default(), workers: 4 });
        assert_eq!(seq.verdict, par.verdict);
        assert_eq!(seq.report(false), par.report(false));
    }
}
