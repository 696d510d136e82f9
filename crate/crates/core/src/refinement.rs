//! Histories, contractions and bounded refinement checking, plus the pass
//! that rewrites sequences of primitives into guarded lists.
//!
//! Refinement results are bounded evidence: histories are enumerated up to
//! a depth, and a truncated history only has to match a prefix.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::ast::{Agent, Conditional, GuardedList, Prim, PrimKind, Program};
use crate::checker::FinalMark;
use crate::logic::PropFormula;
use crate::semantics::{successors, Config, EngineError};
use crate::source::SrcPos;
use crate::store::Store;
use crate::term::{Name, SiTerm};

/// Default cap on the number of histories enumerated for one agent.
pub const DEFAULT_HISTORY_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Terminal {
    /// The agent terminated.
    Success,
    /// Stuck with a non-terminated agent.
    Failure,
    /// Cut at the depth bound while still able to move.
    Ongoing,
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Terminal::Success => "success",
            Terminal::Failure => "failure",
            Terminal::Ongoing => "ongoing",
        })
    }
}

/// The stores along one computation and how it ended.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    pub stores: Vec<Store>,
    pub terminal: Terminal,
}

impl History {
    pub fn new(stores: Vec<Store>, terminal: Terminal) -> Self {
        History { stores, terminal }
    }

    pub fn is_finite(&self) -> bool {
        self.terminal != Terminal::Ongoing
    }
}

/// `{} . {a:1} . success`
impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stores {
            write!(f, "{s} . ")?;
        }
        write!(f, "{}", self.terminal)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RefinementError {
    #[error("more than {0} histories")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// All histories of `agent` from `store` with at most `depth` transitions
/// (`None` for no bound, which only terminates on acyclic agents).
pub fn histories(
    agent: &Agent,
    store: &Store,
    prog: &Program,
    depth: Option<usize>,
) -> Result<BTreeSet<History>, RefinementError> {
    histories_capped(agent, store, prog, depth, DEFAULT_HISTORY_CAP)
}

pub fn histories_capped(
    agent: &Agent,
    store: &Store,
    prog: &Program,
    depth: Option<usize>,
    cap: usize,
) -> Result<BTreeSet<History>, RefinementError> {
    let mut out = BTreeSet::new();
    let mut path = vec![store.clone()];
    walk(&Config::new(agent.clone(), store.clone()), prog, depth, cap, &mut path, &mut out)?;
    Ok(out)
}

fn walk(
    cfg: &Config,
    prog: &Program,
    depth: Option<usize>,
    cap: usize,
    path: &mut Vec<Store>,
    out: &mut BTreeSet<History>,
) -> Result<(), RefinementError> {
    let succs = successors(cfg, prog)?;
    let terminal = if succs.is_empty() {
        Some(if cfg.is_terminated() { Terminal::Success } else { Terminal::Failure })
    } else if depth == Some(path.len() - 1) {
        Some(Terminal::Ongoing)
    } else {
        None
    };
    if let Some(t) = terminal {
        out.insert(History::new(path.clone(), t));
        return if out.len() > cap { Err(RefinementError::BudgetExceeded(cap)) } else { Ok(()) };
    }
    for s in succs {
        path.push(s.config.store.clone());
        walk(&s.config, prog, depth, cap, path, out)?;
        path.pop();
    }
    Ok(())
}

/// Final observables of a set of histories: the last store of every
/// finished history with its mark.
pub fn observables_of(hs: &BTreeSet<History>) -> BTreeSet<(Store, FinalMark)> {
    hs.iter()
        .filter_map(|h| {
            let mark = match h.terminal {
                Terminal::Success => FinalMark::Success,
                Terminal::Failure => FinalMark::Deadlock,
                Terminal::Ongoing => return None,
            };
            Some((h.stores.last()?.clone(), mark))
        })
        .collect()
}

/// How a contraction sits inside the longer history: `kept[i]` is the index
/// in the long history of store `i` of the contraction, and `removed[i]` the
/// indices dropped just before it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionWitness {
    pub kept: Vec<usize>,
    pub removed: Vec<Vec<usize>>,
}

impl ContractionWitness {
    pub fn removals(&self) -> usize {
        self.removed.iter().map(Vec::len).sum()
    }
}

/// Whether `hc` is `h` with some stores deleted. A finished `hc` needs the
/// same terminal mark and must keep `h`'s last store. A truncated `hc`
/// only has to fit in a prefix of `h`, whatever `h`'s mark.
pub fn is_contraction(hc: &History, h: &History) -> Option<ContractionWitness> {
    find_contraction(hc, h, None)
}

/// Whether every removed store agrees on `f` with the kept store that
/// follows it.
pub fn is_f_preserving(hc: &History, h: &History, w: &ContractionWitness, f: &PropFormula) -> bool {
    w.removed.iter().enumerate().all(|(i, seg)| {
        let kept = f.eval(&hc.stores[i]);
        seg.iter().all(|&j| f.eval(&h.stores[j]) == kept)
    })
}

/// Like [`is_contraction`], but only accepts witnesses that preserve `f`.
/// Several embeddings may exist; this one searches all of them.
pub fn find_f_preserving_contraction(hc: &History, h: &History, f: &PropFormula) -> Option<ContractionWitness> {
    find_contraction(hc, h, Some(f))
}

fn find_contraction(hc: &History, h: &History, f: Option<&PropFormula>) -> Option<ContractionWitness> {
    let (n, m) = (hc.stores.len(), h.stores.len());
    if hc.is_finite() && hc.terminal != h.terminal {
        return None;
    }
    if n == 0 || n > m {
        return (n == 0 && m == 0).then(|| ContractionWitness { kept: Vec::new(), removed: Vec::new() });
    }
    let fv: Option<(Vec<bool>, Vec<bool>)> =
        f.map(|f| (hc.stores.iter().map(|s| f.eval(s)).collect(), h.stores.iter().map(|s| f.eval(s)).collect()));
    // may_keep(i, j, prev): store i of hc at index j of h, with the stores
    // strictly between prev and j removed
    let gap_ok = |i: usize, prev: Option<usize>, j: usize| -> bool {
        let start = prev.map_or(0, |p| p + 1);
        match &fv {
            None => true,
            Some((vc, vh)) => (start..j).all(|k| vh[k] == vc[i]),
        }
    };
    // reach[i][j]: previous index when hc[..=i] ends at h[j]
    let mut back: Vec<Vec<Option<Option<usize>>>> = vec![vec![None; m]; n];
    for j in 0..m {
        if hc.stores[0] == h.stores[j] && gap_ok(0, None, j) {
            back[0][j] = Some(None);
        }
    }
    for i in 1..n {
        for j in i..m {
            if hc.stores[i] != h.stores[j] {
                continue;
            }
            back[i][j] = (i - 1..j).find(|&p| back[i - 1][p].is_some() && gap_ok(i, Some(p), j)).map(Some);
        }
    }
    let end = if hc.is_finite() { (back[n - 1][m - 1].is_some()).then_some(m - 1) } else { (0..m).find(|&j| back[n - 1][j].is_some()) }?;
    let mut kept = vec![end];
    let mut i = n - 1;
    while i > 0 {
        let p = back[i][kept[0]].flatten().expect("back pointer");
        kept.insert(0, p);
        i -= 1;
    }
    let removed = kept
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let start = if i == 0 { 0 } else { kept[i - 1] + 1 };
            (start..j).collect()
        })
        .collect();
    Some(ContractionWitness { kept, removed })
}

/// A history of the refining agent not covered by the refined one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uncovered {
    pub store: Store,
    pub history: History,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementOutcome {
    pub holds: bool,
    pub counterexample: Option<Uncovered>,
    pub histories_checked: usize,
}

/// Bounded check that `a` refines `b`: from every store, every history of
/// `a` with at most `depth` transitions is a contraction of some history
/// of `b`. `b` is explored deep enough to cover `a`'s guarded lists step
/// by step.
pub fn check_refinement(
    a: &Agent,
    b: &Agent,
    stores: &[Store],
    prog: &Program,
    depth: usize,
) -> Result<RefinementOutcome, RefinementError> {
    refinement(a, b, stores, prog, depth, None)
}

/// As [`check_refinement`], with every contraction required to preserve `f`.
pub fn check_f_refinement(
    a: &Agent,
    b: &Agent,
    stores: &[Store],
    prog: &Program,
    depth: usize,
    f: &PropFormula,
) -> Result<RefinementOutcome, RefinementError> {
    refinement(a, b, stores, prog, depth, Some(f))
}

fn refinement(
    a: &Agent,
    b: &Agent,
    stores: &[Store],
    prog: &Program,
    depth: usize,
    f: Option<&PropFormula>,
) -> Result<RefinementOutcome, RefinementError> {
    let tail = prog.max_guarded_tail().max(max_tail(a));
    let b_depth = depth.saturating_mul(1 + tail);
    let mut checked = 0;
    for store in stores {
        let ha = histories(a, store, prog, Some(depth))?;
        let hb = histories(b, store, prog, Some(b_depth))?;
        for h in ha {
            checked += 1;
            if !hb.iter().any(|g| find_contraction(&h, g, f).is_some()) {
                let counterexample = Some(Uncovered { store: store.clone(), history: h });
                return Ok(RefinementOutcome { holds: false, counterexample, histories_checked: checked });
            }
        }
    }
    Ok(RefinementOutcome { holds: true, counterexample: None, histories_checked: checked })
}

fn max_tail(a: &Agent) -> usize {
    match a {
        Agent::Guarded(g) => g.tail.len(),
        Agent::Seq(x, y) | Agent::Par(x, y) | Agent::Choice(x, y) => max_tail(x).max(max_tail(y)),
        Agent::Cond(c) => max_tail(&c.then).max(c.otherwise.as_ref().map_or(0, max_tail)),
        _ => 0,
    }
}

/// A sequence of primitives can become a guarded list when everything
/// after the first one is a `tell` or a graphical primitive.
pub fn syntactic_guardable(chain: &[Prim]) -> bool {
    chain.iter().skip(1).all(|p| matches!(p.kind, PrimKind::Tell | PrimKind::Graphical(_)))
}

/// Whether no `tell` in the tail can put a term counted by `f` on the
/// store. Terms are compared by head symbol and arity; a tail argument
/// whose head is unknown before rewriting (a map application or a
/// variable) is never considered distinct.
pub fn tail_distinct_from(chain: &[Prim], f: &PropFormula) -> bool {
    let counted = f.counted_terms();
    chain.iter().skip(1).filter(|p| p.kind == PrimKind::Tell).all(|p| {
        let Some(arg) = p.args.first() else { return true };
        match arg.head() {
            Some(h) => counted.iter().all(|c| c.head() != Some(h)),
            None => matches!(arg, SiTerm::Int(_)) && !counted.contains(&arg),
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Only the syntactic shape holds: the guarded form refines the
    /// sequence and proves a subset of its reachable properties.
    Syntactic,
    /// The tail is also distinct from the formula's terms: reachability of
    /// the formula is the same before and after.
    Distinct,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Syntactic => "syntactic",
            Criterion::Distinct => "distinct",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Transformed,
    Skipped,
    /// Rewritten on request although the tail is not distinct.
    Forced,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Transformed => "transformed",
            Action::Skipped => "skipped",
            Action::Forced => "forced",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Site {
    pub pos: SrcPos,
    /// Enclosing procedure; `None` for the main agent.
    pub proc: Option<Name>,
    pub chain: Vec<Prim>,
    pub criterion: Criterion,
    pub action: Action,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformReport {
    pub sites: Vec<Site>,
}

impl TransformReport {
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn count(&self, action: Action) -> usize {
        self.sites.iter().filter(|s| s.action == action).count()
    }

    /// One line per site:
    /// `file:line:col proc=VTruck len=3 criterion=distinct action=transformed`.
    pub fn render(&self, file: &str) -> String {
        let mut out = String::new();
        for s in &self.sites {
            let proc = s.proc.as_deref().unwrap_or("main");
            let _ = write!(
                out,
                "{file}:{} proc={proc} len={} criterion={} action={}",
                s.pos,
                s.chain.len(),
                s.criterion.as_str(),
                s.action.as_str()
            );
            match s.action {
                Action::Forced => out.push_str(" note=reach-preserving-one-way"),
                Action::Skipped => out.push_str(" note=tail-may-tell-counted-term"),
                Action::Transformed => {}
            }
            let _ = writeln!(out, " chain=`{}`", s.chain.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "));
        }
        out
    }
}

/// Rewrites each maximal sequence `p; p1; ...; pn` (n >= 1) of primitives
/// whose tail only tells or draws into `[p -> p1, ..., pn]`. Sequences
/// whose tail may tell a term counted by `f` are left alone and reported,
/// unless `force` is set. Sequences never span `+`, `||` or conditionals.
pub fn transform_to_guarded(prog: &Program, f: &PropFormula, force: bool) -> (Program, TransformReport) {
    let mut report = TransformReport::default();
    let mut out = prog.clone();
    for proc in &mut out.procs {
        let mut pass = Pass { f, force, proc: Some(proc.name.clone()), report: &mut report };
        proc.body = pass.agent(&proc.body);
    }
    let mut pass = Pass { f, force, proc: None, report: &mut report };
    out.main = pass.agent(&prog.main);
    (out, report)
}

struct Pass<'a> {
    f: &'a PropFormula,
    force: bool,
    proc: Option<Name>,
    report: &'a mut TransformReport,
}

impl Pass<'_> {
    fn agent(&mut self, a: &Agent) -> Agent {
        match a {
            Agent::Seq(..) => self.spine(a),
            Agent::Par(x, y) => rebuild2(a, self.agent(x), self.agent(y), Agent::par),
            Agent::Choice(x, y) => rebuild2(a, self.agent(x), self.agent(y), Agent::choice),
            Agent::Cond(c) => {
                let then = self.agent(&c.then);
                let otherwise = c.otherwise.as_ref().map(|o| self.agent(o));
                if then == c.then && otherwise == c.otherwise {
                    a.clone()
                } else {
                    Agent::Cond(std::sync::Arc::new(Conditional { cond: c.cond.clone(), then, otherwise }))
                }
            }
            _ => a.clone(),
        }
    }

    /// The right spine of a sequence, with chains grouped.
    fn spine(&mut self, a: &Agent) -> Agent {
        let mut items = Vec::new();
        let mut cur = a;
        while let Agent::Seq(x, y) = cur {
            items.push(&**x);
            cur = y;
        }
        items.push(cur);

        let mut out = Vec::new();
        let mut changed = false;
        let mut i = 0;
        while i < items.len() {
            let Agent::Prim(head) = items[i] else {
                let new = self.agent(items[i]);
                changed |= new != *items[i];
                out.push(new);
                i += 1;
                continue;
            };
            let mut chain = vec![head.clone()];
            while let Some(Agent::Prim(p)) = items.get(i + chain.len()) {
                if !matches!(p.kind, PrimKind::Tell | PrimKind::Graphical(_)) {
                    break;
                }
                chain.push(p.clone());
            }
            let n = chain.len();
            if n < 2 {
                out.push(items[i].clone());
                i += 1;
                continue;
            }
            let distinct = tail_distinct_from(&chain, self.f);
            let action = match (distinct, self.force) {
                (true, _) => Action::Transformed,
                (false, true) => Action::Forced,
                (false, false) => Action::Skipped,
            };
            let criterion = if distinct { Criterion::Distinct } else { Criterion::Syntactic };
            self.report.sites.push(Site { pos: head.pos, proc: self.proc.clone(), chain: chain.clone(), criterion, action });
            if action == Action::Skipped {
                out.extend(items[i..i + n].iter().map(|&x| x.clone()));
            } else {
                let mut prims = chain.into_iter();
                let guard = prims.next().expect("non-empty chain");
                out.push(Agent::from(GuardedList::new(guard, prims.collect())));
                changed = true;
            }
            i += n;
        }
        if changed {
            Agent::seq_all(out)
        } else {
            a.clone()
        }
    }
}

fn rebuild2(orig: &Agent, x: Agent, y: Agent, make: fn(Agent, Agent) -> Agent) -> Agent {
    match orig {
        Agent::Par(ox, oy) | Agent::Choice(ox, oy) if **ox == x && **oy == y => orig.clone(),
        _ => make(x, y),
    }
}
